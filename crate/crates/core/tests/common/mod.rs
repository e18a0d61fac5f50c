//! Seeded random instances and brute-force oracles shared by the
//! integration tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use dlq_core::semantics::Interpretation;
use dlq_core::syntax::{Axiom, Concept, ConceptAtom, ConjunctiveQuery, KnowledgeBase, RoleAtom, RoleConjunction, Var};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CONCEPTS: [&str; 3] = ["A", "B", "C"];
pub const ROLES: [&str; 2] = ["r", "s"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn names(ns: &[&str]) -> BTreeSet<String> {
    ns.iter().map(|s| s.to_string()).collect()
}

pub fn var(k: usize) -> Var {
    Var::new(format!("x{k}"))
}

pub fn role_conjunction(rng: &mut ChaCha8Rng) -> RoleConjunction {
    match rng.random_range(0..4) {
        0 => RoleConjunction::new(ROLES).unwrap(),
        _ => RoleConjunction::single(*ROLES.choose(rng).unwrap()),
    }
}

pub fn concept(rng: &mut ChaCha8Rng, depth: usize) -> Concept {
    let leaf = depth == 0 || rng.random_bool(0.3);
    if leaf {
        return match rng.random_range(0..8) {
            0 => Concept::top(),
            1 => Concept::Bottom,
            _ => Concept::atomic(*CONCEPTS[..2].choose(rng).unwrap()),
        };
    }
    match rng.random_range(0..4) {
        0 => Concept::not(concept(rng, depth - 1)),
        1 => Concept::and([concept(rng, depth - 1), concept(rng, depth - 1)]),
        2 => Concept::or(concept(rng, depth - 1), concept(rng, depth - 1)),
        _ => Concept::exists(role_conjunction(rng), concept(rng, depth - 1)),
    }
}

/// A random interpretation over `A, B, C, r, s` with `n` elements; the
/// given names go to random elements.
pub fn interpretation(rng: &mut ChaCha8Rng, n: usize, names: &[&str], density: f64) -> Interpretation {
    let mut i = Interpretation::with_size(n).unwrap();
    for c in CONCEPTS {
        i.declare_concept(c);
        for d in 0..n {
            if rng.random_bool(0.4) {
                i.add_concept(c, d);
            }
        }
    }
    for r in ROLES {
        i.declare_role(r);
        for d in 0..n {
            for e in 0..n {
                if rng.random_bool(density) {
                    i.add_role(r, d, e);
                }
            }
        }
    }
    for a in names {
        let d = rng.random_range(0..n);
        i.assign(a, d);
    }
    i
}

/// A forward-tree-shaped CQ on `x0 .. x{n-1}` rooted at `x0`.
pub fn tree_cq(rng: &mut ChaCha8Rng, n: usize) -> ConjunctiveQuery {
    let mut roles = Vec::new();
    let mut concepts = Vec::new();
    for k in 1..n {
        let parent = rng.random_range(0..k);
        for r in role_conjunction(rng).roles() {
            roles.push(RoleAtom { role: r.into(), from: var(parent), to: var(k) });
        }
    }
    for k in 0..n {
        for c in CONCEPTS {
            if rng.random_bool(0.25) {
                concepts.push(ConceptAtom { concept: c.into(), var: var(k) });
            }
        }
    }
    ConjunctiveQuery::from_parts((0..n).map(var), concepts, roles)
}

/// A CQ with up to `max_atoms` atoms over `max_vars` variables. Role atoms
/// prefer shared targets so that forks are common.
pub fn cq(rng: &mut ChaCha8Rng, max_vars: usize, max_atoms: usize) -> ConjunctiveQuery {
    loop {
        let atoms = rng.random_range(1..=max_atoms);
        let mut roles = Vec::new();
        let mut concepts = Vec::new();
        let targets = rng.random_range(1..=max_vars);
        for _ in 0..atoms {
            if rng.random_bool(0.3) {
                let c = *CONCEPTS.choose(rng).unwrap();
                concepts.push(ConceptAtom { concept: c.into(), var: var(rng.random_range(0..max_vars)) });
            } else {
                let r = *ROLES.choose(rng).unwrap();
                let to = var(rng.random_range(0..targets));
                let from = var(rng.random_range(0..max_vars));
                roles.push(RoleAtom { role: r.into(), from, to });
            }
        }
        if let Ok(q) = ConjunctiveQuery::new(concepts, roles) {
            return q;
        }
    }
}

/// A KB with 1..=`max_assertions` assertions and 0..=`max_gcis` inclusions
/// over the individuals `a, b`.
pub fn kb(rng: &mut ChaCha8Rng, max_assertions: usize, max_gcis: usize) -> KnowledgeBase {
    let inds = ["a", "b"];
    let mut axioms = Vec::new();
    for _ in 0..rng.random_range(1..=max_assertions) {
        let a = inds.choose(rng).unwrap().to_string();
        let b = inds.choose(rng).unwrap().to_string();
        let r = ROLES.choose(rng).unwrap().to_string();
        axioms.push(match rng.random_range(0..5) {
            0 => Axiom::RoleAssertion(r, a, b),
            1 => Axiom::NegRoleAssertion(r, a, b),
            _ => Axiom::ConceptAssertion(concept(rng, 2), a),
        });
    }
    for _ in 0..rng.random_range(0..=max_gcis) {
        axioms.push(Axiom::Gci(concept(rng, 2), concept(rng, 2)));
    }
    KnowledgeBase::new(axioms).unwrap()
}

/// Every assignment of the variables of `q` to elements of `i` extending
/// `fixed`, by plain backtracking; stops at the first that satisfies all
/// atoms.
pub fn brute_force_match(
    i: &Interpretation,
    q: &ConjunctiveQuery,
    fixed: &BTreeMap<Var, usize>,
) -> Option<BTreeMap<Var, usize>> {
    fn go(
        i: &Interpretation,
        q: &ConjunctiveQuery,
        vars: &[Var],
        at: &mut BTreeMap<Var, usize>,
    ) -> bool {
        let consistent = q.concept_atoms().iter().all(|a| match at.get(&a.var) {
            Some(d) => i.concept_ext(&a.concept).contains(d),
            None => true,
        }) && q.role_atoms().iter().all(|a| match (at.get(&a.from), at.get(&a.to)) {
            (Some(d), Some(e)) => i.role_ext(&a.role).contains(&(*d, *e)),
            _ => true,
        });
        if !consistent {
            return false;
        }
        let Some((v, rest)) = vars.split_first() else { return true };
        for d in i.elements() {
            at.insert(v.clone(), d);
            if go(i, q, rest, at) {
                return true;
            }
        }
        at.remove(v);
        false
    }
    let vars: Vec<Var> = q.vars().iter().filter(|v| !fixed.contains_key(*v)).cloned().collect();
    let mut at = fixed.clone();
    go(i, q, &vars, &mut at).then_some(at)
}
