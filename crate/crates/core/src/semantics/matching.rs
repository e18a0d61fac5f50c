//! Query matches and homomorphisms, both found by the same backtracking
//! search over a small constraint problem: unary label constraints, binary
//! role constraints and optional pinned values.

use std::collections::{BTreeMap, BTreeSet};

use super::Interpretation;
use crate::syntax::{ConjunctiveQuery, Var};

/// A variable assignment `π` with `I ⊨_π q`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Match {
    pub assignment: BTreeMap<Var, usize>,
}

/// A map from the elements of one structure to those of another, indexed
/// by source element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomMapping {
    pub mapping: Vec<usize>,
}

struct Problem<'a> {
    unary: Vec<Vec<&'a str>>,
    binary: Vec<(&'a str, usize, usize)>,
    pinned: Vec<Option<usize>>,
}

/// Iterative backtracking solver. Variables are visited in a fixed order;
/// candidates at each level are computed once from the already-fixed
/// neighbours.
struct Solver<'a> {
    target: &'a Interpretation,
    order: Vec<usize>,
    unary: Vec<Vec<&'a str>>,
    /// Per level: constraints `(role, other level, self is source)` whose
    /// other end is fixed earlier, plus self-loops encoded with `other = level`.
    back: Vec<Vec<(&'a str, usize, bool)>>,
    pinned: Vec<Option<usize>>,
    candidates: Vec<Vec<usize>>,
    cursor: Vec<usize>,
    values: Vec<usize>,
    started: bool,
    done: bool,
}

impl<'a> Solver<'a> {
    fn new(problem: Problem<'a>, target: &'a Interpretation) -> Self {
        let n = problem.unary.len();
        let degree = |v: usize| {
            problem.unary[v].len()
                + problem
                    .binary
                    .iter()
                    .filter(|(_, a, b)| *a == v || *b == v)
                    .count()
        };
        // Greedy order: pinned variables first, then prefer variables tied to
        // already-ordered ones, breaking ties by descending degree and index.
        let mut order: Vec<usize> = Vec::with_capacity(n);
        let mut placed = vec![false; n];
        while order.len() < n {
            let next = (0..n)
                .filter(|v| !placed[*v])
                .max_by_key(|&v| {
                    let links = problem
                        .binary
                        .iter()
                        .filter(|(_, a, b)| (*a == v && placed[*b]) || (*b == v && placed[*a]))
                        .count();
                    (problem.pinned[v].is_some(), links, degree(v), std::cmp::Reverse(v))
                })
                .unwrap();
            placed[next] = true;
            order.push(next);
        }
        let level: Vec<usize> = {
            let mut l = vec![0; n];
            for (k, v) in order.iter().enumerate() {
                l[*v] = k;
            }
            l
        };
        let mut back = vec![Vec::new(); n];
        for (r, a, b) in &problem.binary {
            let (la, lb) = (level[*a], level[*b]);
            if la >= lb {
                back[la].push((*r, lb, true));
            } else {
                back[lb].push((*r, la, false));
            }
        }
        Solver {
            target,
            unary: order.iter().map(|v| problem.unary[*v].clone()).collect(),
            pinned: order.iter().map(|v| problem.pinned[*v]).collect(),
            order,
            back,
            candidates: Vec::with_capacity(n),
            cursor: Vec::with_capacity(n),
            values: vec![0; n],
            started: false,
            done: false,
        }
    }

    fn compute_candidates(&self, level: usize) -> Vec<usize> {
        let t = self.target;
        let ok = |d: usize| {
            self.unary[level].iter().all(|c| t.concept_ext(c).contains(&d))
                && self.back[level].iter().all(|(r, other, self_is_source)| {
                    let o = if *other == level { d } else { self.values[*other] };
                    let pair = if *self_is_source { (d, o) } else { (o, d) };
                    t.role_ext(r).contains(&pair)
                })
        };
        match self.pinned[level] {
            Some(d) => {
                if d < t.len() && ok(d) {
                    vec![d]
                } else {
                    vec![]
                }
            }
            None => t.elements().filter(|d| ok(*d)).collect(),
        }
    }

    /// Advances to the next full solution, in original variable order.
    fn next_solution(&mut self) -> Option<Vec<usize>> {
        let n = self.order.len();
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if n == 0 {
                self.done = true;
                return Some(vec![]);
            }
            let c = self.compute_candidates(0);
            self.candidates.push(c);
            self.cursor.push(0);
        } else {
            // Resume after the last emitted solution.
            *self.cursor.last_mut().unwrap() += 1;
        }
        loop {
            let level = self.cursor.len() - 1;
            let pos = self.cursor[level];
            if pos >= self.candidates[level].len() {
                self.candidates.pop();
                self.cursor.pop();
                if self.cursor.is_empty() {
                    self.done = true;
                    return None;
                }
                *self.cursor.last_mut().unwrap() += 1;
                continue;
            }
            self.values[level] = self.candidates[level][pos];
            if level + 1 == n {
                let mut out = vec![0; n];
                for (k, v) in self.order.iter().enumerate() {
                    out[*v] = self.values[k];
                }
                return Some(out);
            }
            let c = self.compute_candidates(level + 1);
            self.candidates.push(c);
            self.cursor.push(0);
        }
    }
}

/// Lazy sequence of all matches of a query, in a deterministic order.
pub struct Matches<'a> {
    vars: Vec<Var>,
    solver: Solver<'a>,
}

impl Iterator for Matches<'_> {
    type Item = Match;

    fn next(&mut self) -> Option<Match> {
        let values = self.solver.next_solution()?;
        Some(Match {
            assignment: self.vars.iter().cloned().zip(values).collect(),
        })
    }
}

pub fn find_matches<'a>(i: &'a Interpretation, q: &'a ConjunctiveQuery) -> Matches<'a> {
    find_matches_pinned(i, q, &BTreeMap::new())
}

/// Matches that send each variable in `pinned` to the given element.
pub(crate) fn find_matches_pinned<'a>(
    i: &'a Interpretation,
    q: &'a ConjunctiveQuery,
    pinned: &BTreeMap<Var, usize>,
) -> Matches<'a> {
    let vars: Vec<Var> = q.vars().iter().cloned().collect();
    let pos: BTreeMap<&Var, usize> = vars.iter().enumerate().map(|(k, v)| (v, k)).collect();
    let mut unary = vec![Vec::new(); vars.len()];
    for a in q.concept_atoms() {
        unary[pos[&a.var]].push(a.concept.as_str());
    }
    let binary = q
        .role_atoms()
        .iter()
        .map(|a| (a.role.as_str(), pos[&a.from], pos[&a.to]))
        .collect();
    let pinned = vars.iter().map(|v| pinned.get(v).copied()).collect();
    let problem = Problem {
        unary,
        binary,
        pinned,
    };
    Matches {
        solver: Solver::new(problem, i),
        vars,
    }
}

pub fn has_match(i: &Interpretation, q: &ConjunctiveQuery) -> bool {
    find_matches(i, q).next().is_some()
}

pub fn is_match(i: &Interpretation, q: &ConjunctiveQuery, m: &Match) -> bool {
    let val = |v: &Var| m.assignment.get(v).copied();
    m.assignment.keys().eq(q.vars().iter())
        && m.assignment.values().all(|d| *d < i.len())
        && q.concept_atoms()
            .iter()
            .all(|a| val(&a.var).is_some_and(|d| i.concept_ext(&a.concept).contains(&d)))
        && q.role_atoms().iter().all(|a| match (val(&a.from), val(&a.to)) {
            (Some(d), Some(e)) => i.role_ext(&a.role).contains(&(d, e)),
            _ => false,
        })
}

/// Checks the three preservation conditions and name preservation for `N`.
pub fn is_homomorphism(
    src: &Interpretation,
    dst: &Interpretation,
    names: &BTreeSet<String>,
    h: &HomMapping,
) -> bool {
    let f = &h.mapping;
    f.len() == src.len()
        && f.iter().all(|d| *d < dst.len())
        && names.iter().all(|a| match src.name(a) {
            Some(d) => dst.name(a) == Some(f[d]),
            None => true,
        })
        && src.concepts().iter().all(|(c, ext)| {
            let target = dst.concept_ext(c);
            ext.iter().all(|d| target.contains(&f[*d]))
        })
        && src.roles().iter().all(|(r, ext)| {
            let target = dst.role_ext(r);
            ext.iter().all(|(d, e)| target.contains(&(f[*d], f[*e])))
        })
}

/// Some `N`-homomorphism from `src` to `dst`, if one exists.
pub fn find_homomorphism(
    src: &Interpretation,
    dst: &Interpretation,
    names: &BTreeSet<String>,
) -> Option<HomMapping> {
    let mut pinned = vec![None; src.len()];
    for a in names {
        if let Some(d) = src.name(a) {
            let target = dst.name(a)?;
            match pinned[d] {
                Some(t) if t != target => return None,
                _ => pinned[d] = Some(target),
            }
        }
    }
    let mut unary = vec![Vec::new(); src.len()];
    for (c, ext) in src.concepts() {
        for d in ext {
            unary[*d].push(c.as_str());
        }
    }
    let binary = src
        .roles()
        .iter()
        .flat_map(|(r, ext)| ext.iter().map(move |(d, e)| (r.as_str(), *d, *e)))
        .collect();
    let mut solver = Solver::new(
        Problem {
            unary,
            binary,
            pinned,
        },
        dst,
    );
    let h = HomMapping {
        mapping: solver.next_solution()?,
    };
    assert!(
        is_homomorphism(src, dst, names, &h),
        "homomorphism search returned an invalid mapping"
    );
    Some(h)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::super::eval::tests::arb_interpretation;
    use super::*;
    use crate::syntax::{parse_cq, ConceptAtom, RoleAtom};
    use proptest::prelude::*;

    fn chain() -> Interpretation {
        Interpretation::new(["d", "e"])
            .unwrap()
            .with_role("r", &[("d", "e")])
            .unwrap()
    }

    #[test]
    fn single_edge_match() {
        let i = chain();
        let q = parse_cq("r(?x,?y)").unwrap();
        let all: Vec<Match> = find_matches(&i, &q).collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].assignment[&Var::new("x")], 0);
        assert_eq!(all[0].assignment[&Var::new("y")], 1);
        assert!(is_match(&i, &q, &all[0]));
    }

    #[test]
    fn no_match_on_empty_concept() {
        assert!(!has_match(&chain(), &parse_cq("A(?x)").unwrap()));
    }

    #[test]
    fn identity_and_missing_homomorphisms() {
        let i = chain().with_name("a", "d").unwrap();
        let names: BTreeSet<String> = ["a".to_string()].into();
        assert!(find_homomorphism(&i, &i, &BTreeSet::new()).is_some());
        assert!(find_homomorphism(&i, &i, &names).is_some());
        let src = Interpretation::new(["x"]).unwrap().with_concept("A", &["x"]).unwrap();
        assert!(find_homomorphism(&src, &chain(), &BTreeSet::new()).is_none());
    }

    #[test]
    fn names_must_be_preserved() {
        let src = Interpretation::new(["x"]).unwrap().with_name("a", "x").unwrap();
        let dst = Interpretation::new(["y"]).unwrap();
        let names: BTreeSet<String> = ["a".to_string()].into();
        assert!(find_homomorphism(&src, &dst, &names).is_none());
        assert!(find_homomorphism(&src, &dst, &BTreeSet::new()).is_some());
    }

    pub(crate) fn arb_query(max_vars: usize) -> impl Strategy<Value = ConjunctiveQuery> {
        let var = move || (0..max_vars).prop_map(|v| Var::new(format!("x{v}")));
        let concept = (prop::sample::select(vec!["A", "B"]), var())
            .prop_map(|(c, var)| ConceptAtom { concept: c.into(), var });
        let role = (prop::sample::select(vec!["r", "s"]), var(), var())
            .prop_map(|(r, from, to)| RoleAtom { role: r.into(), from, to });
        (
            prop::collection::vec(concept, 0..3),
            prop::collection::vec(role, 0..4),
        )
            .prop_filter_map("empty query", |(c, r)| ConjunctiveQuery::new(c, r).ok())
    }

    /// Tries every assignment of the query variables.
    pub(crate) fn brute_force_has_match(i: &Interpretation, q: &ConjunctiveQuery) -> bool {
        let vars: Vec<Var> = q.vars().iter().cloned().collect();
        let total = i.len().pow(vars.len() as u32);
        (0..total).any(|mut code| {
            let mut assignment = BTreeMap::new();
            for v in &vars {
                assignment.insert(v.clone(), code % i.len());
                code /= i.len();
            }
            is_match(i, q, &Match { assignment })
        })
    }

    proptest! {
        #[test]
        fn matches_agree_with_brute_force(i in arb_interpretation(), q in arb_query(4)) {
            let found: Vec<Match> = find_matches(&i, &q).collect();
            prop_assert_eq!(!found.is_empty(), brute_force_has_match(&i, &q));
            for m in &found {
                prop_assert!(is_match(&i, &q, m));
            }
            let distinct: BTreeSet<&Match> = found.iter().collect();
            prop_assert_eq!(distinct.len(), found.len());
        }

        #[test]
        fn homomorphisms_preserve_matches(a in arb_interpretation(), b in arb_interpretation(), q in arb_query(3)) {
            if let Some(h) = find_homomorphism(&a, &b, &BTreeSet::new()) {
                prop_assert!(is_homomorphism(&a, &b, &BTreeSet::new(), &h));
                if has_match(&a, &q) {
                    prop_assert!(has_match(&b, &q));
                }
            }
        }

        #[test]
        fn query_structure_matches_itself(q in arb_query(4)) {
            let (iq, _) = Interpretation::from_query(&q);
            prop_assert!(has_match(&iq, &q));
        }
    }
}
