//! Bounded model search: each domain size and name assignment becomes a
//! propositional formula over the atoms `A(d)` and `r(d, e)`, with one
//! defined variable per subconcept and element.

use std::collections::{BTreeMap, BTreeSet};

use varisat::{ExtendFormula, Lit, Solver};

use crate::semantics::{has_match, is_model, Interpretation};
use crate::syntax::{Axiom, Concept, ConjunctiveQuery, KnowledgeBase};

struct Encoding<'a> {
    solver: Solver<'a>,
    n: usize,
    concept: BTreeMap<(String, usize), Lit>,
    role: BTreeMap<(String, usize, usize), Lit>,
    defined: BTreeMap<(Concept, usize), Lit>,
}

impl Encoding<'_> {
    fn new(n: usize, concepts: &BTreeSet<String>, roles: &BTreeSet<String>) -> Self {
        let mut solver = Solver::new();
        let mut concept = BTreeMap::new();
        let mut role = BTreeMap::new();
        for c in concepts {
            for d in 0..n {
                concept.insert((c.clone(), d), solver.new_lit());
            }
        }
        for r in roles {
            for d in 0..n {
                for e in 0..n {
                    role.insert((r.clone(), d, e), solver.new_lit());
                }
            }
        }
        Encoding { solver, n, concept, role, defined: BTreeMap::new() }
    }

    /// A literal equivalent to `d ∈ C`.
    fn lit(&mut self, c: &Concept, d: usize) -> Lit {
        if let Some(l) = self.defined.get(&(c.clone(), d)) {
            return *l;
        }
        let l = match c {
            Concept::Atomic(a) => self.concept[&(a.clone(), d)],
            Concept::Not(inner) => !self.lit(inner, d),
            Concept::Bottom => {
                let l = self.solver.new_lit();
                self.solver.add_clause(&[!l]);
                l
            }
            Concept::And(parts) => {
                let ps: Vec<Lit> = parts.iter().map(|p| self.lit(p, d)).collect();
                self.all(&ps)
            }
            Concept::Exists(rc, filler) => {
                let mut witnesses = Vec::new();
                for e in 0..self.n {
                    let mut ps: Vec<Lit> = rc.roles().map(|r| self.role[&(r.to_owned(), d, e)]).collect();
                    ps.push(self.lit(filler, e));
                    witnesses.push(self.all(&ps));
                }
                self.any(&witnesses)
            }
        };
        self.defined.insert((c.clone(), d), l);
        l
    }

    fn all(&mut self, ps: &[Lit]) -> Lit {
        let l = self.solver.new_lit();
        for p in ps {
            self.solver.add_clause(&[!l, *p]);
        }
        let mut back: Vec<Lit> = ps.iter().map(|p| !*p).collect();
        back.push(l);
        self.solver.add_clause(&back);
        l
    }

    fn any(&mut self, ps: &[Lit]) -> Lit {
        let l = self.solver.new_lit();
        for p in ps {
            self.solver.add_clause(&[l, !*p]);
        }
        let mut forth = ps.to_vec();
        forth.push(!l);
        self.solver.add_clause(&forth);
        l
    }

    fn axiom(&mut self, ax: &Axiom, at: &BTreeMap<String, usize>) {
        match ax {
            Axiom::Gci(l, r) => {
                for d in 0..self.n {
                    let (a, b) = (self.lit(l, d), self.lit(r, d));
                    self.solver.add_clause(&[!a, b]);
                }
            }
            Axiom::ConceptAssertion(c, a) => {
                let l = self.lit(c, at[a]);
                self.solver.add_clause(&[l]);
            }
            Axiom::RoleAssertion(r, a, b) => {
                let l = self.role[&(r.clone(), at[a], at[b])];
                self.solver.add_clause(&[l]);
            }
            Axiom::NegRoleAssertion(r, a, b) => {
                let l = self.role[&(r.clone(), at[a], at[b])];
                self.solver.add_clause(&[!l]);
            }
        }
    }

    /// One clause per variable assignment, so that no assignment is a match.
    fn forbid_matches(&mut self, q: &ConjunctiveQuery) {
        let vars: Vec<_> = q.vars().iter().collect();
        let total = self.n.pow(vars.len() as u32);
        for mut code in 0..total {
            let mut at = BTreeMap::new();
            for v in &vars {
                at.insert(*v, code % self.n);
                code /= self.n;
            }
            let mut clause: Vec<Lit> = q
                .concept_atoms()
                .iter()
                .map(|a| !self.concept[&(a.concept.clone(), at[&a.var])])
                .collect();
            clause.extend(
                q.role_atoms()
                    .iter()
                    .map(|a| !self.role[&(a.role.clone(), at[&a.from], at[&a.to])]),
            );
            self.solver.add_clause(&clause);
        }
    }

    fn model(&self, at: &BTreeMap<String, usize>) -> Interpretation {
        let truth: BTreeSet<Lit> = self.solver.model().expect("solved").into_iter().collect();
        let mut i = Interpretation::with_size(self.n).expect("non-empty domain");
        for ((c, d), l) in &self.concept {
            i.declare_concept(c);
            if truth.contains(l) {
                i.add_concept(c, *d);
            }
        }
        for ((r, d, e), l) in &self.role {
            i.declare_role(r);
            if truth.contains(l) {
                i.add_role(r, *d, *e);
            }
        }
        for (a, d) in at {
            i.assign(a, *d);
        }
        i
    }
}

/// Name assignments up to renaming of elements: each name goes to an
/// element already used or to the next fresh one.
fn name_assignments(names: &[String], n: usize) -> Vec<BTreeMap<String, usize>> {
    fn go(names: &[String], n: usize, used: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == names.len() {
            out.push(cur.clone());
            return;
        }
        for d in 0..(used + 1).min(n) {
            cur.push(d);
            go(names, n, used.max(d + 1), cur, out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    go(names, n, 0, &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|ds| names.iter().cloned().zip(ds).collect())
        .collect()
}

/// A model of `k` with at most `max_size` elements in which no query of
/// `avoid` has a match, smallest domain first.
pub fn brute_force_model_avoiding(
    k: &KnowledgeBase,
    avoid: &[ConjunctiveQuery],
    max_size: usize,
) -> Option<Interpretation> {
    let mut concepts = k.concept_names();
    let mut roles = k.role_names();
    for q in avoid {
        concepts.extend(q.concept_names());
        roles.extend(q.role_names());
    }
    let names: Vec<String> = k.individuals().into_iter().collect();
    for n in 1..=max_size {
        for at in name_assignments(&names, n) {
            let mut enc = Encoding::new(n, &concepts, &roles);
            for ax in k.axioms() {
                enc.axiom(ax, &at);
            }
            for q in avoid {
                enc.forbid_matches(q);
            }
            if enc.solver.solve().expect("no solver limits are set") {
                let i = enc.model(&at);
                assert!(
                    is_model(&i, k) == Ok(true) && avoid.iter().all(|q| !has_match(&i, q)),
                    "decoded model fails verification"
                );
                return Some(i);
            }
        }
    }
    None
}

pub fn brute_force_model(k: &KnowledgeBase, max_size: usize) -> Option<Interpretation> {
    brute_force_model_avoiding(k, &[], max_size)
}
