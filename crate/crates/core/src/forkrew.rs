//! Fork elimination and the space of fork rewritings.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::rollup::tree_shape;
use crate::syntax::{canonicalize_cq, ConjunctiveQuery, RoleAtom, RoleConjunction, Var};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ForkError {
    #[error("the fork is not present in the query")]
    ForkNotPresent,
    #[error("the query still has forks")]
    HasForks,
}

/// Two role atoms `r(a, t)` and `s(b, t)` with `a ≠ b`. One fork is listed
/// per target and source pair; the witnesses are the least such atoms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fork {
    pub target: Var,
    pub source_a: Var,
    pub source_b: Var,
    pub witness_a: RoleAtom,
    pub witness_b: RoleAtom,
}

pub fn list_forks(q: &ConjunctiveQuery) -> BTreeSet<Fork> {
    let mut by_target: BTreeMap<&Var, BTreeMap<&Var, &RoleAtom>> = BTreeMap::new();
    for a in q.role_atoms() {
        by_target
            .entry(&a.to)
            .or_default()
            .entry(&a.from)
            .or_insert(a);
    }
    let mut out = BTreeSet::new();
    for (target, sources) in by_target {
        let sources: Vec<_> = sources.into_iter().collect();
        for (k, (a, wa)) in sources.iter().enumerate() {
            for (b, wb) in &sources[k + 1..] {
                out.insert(Fork {
                    target: target.clone(),
                    source_a: (*a).clone(),
                    source_b: (*b).clone(),
                    witness_a: (*wa).clone(),
                    witness_b: (*wb).clone(),
                });
            }
        }
    }
    out
}

/// Identifies the two sources of `f`; the result is in canonical form.
pub fn eliminate_fork(q: &ConjunctiveQuery, f: &Fork) -> Result<ConjunctiveQuery, ForkError> {
    let present = f.source_a != f.source_b
        && f.witness_a.from == f.source_a
        && f.witness_b.from == f.source_b
        && f.witness_a.to == f.target
        && f.witness_b.to == f.target
        && q.role_atoms().contains(&f.witness_a)
        && q.role_atoms().contains(&f.witness_b);
    if !present {
        return Err(ForkError::ForkNotPresent);
    }
    Ok(canonicalize_cq(&merge(q, &f.source_a, &f.source_b)))
}

pub(crate) fn merge(q: &ConjunctiveQuery, keep: &Var, drop: &Var) -> ConjunctiveQuery {
    q.rename(&BTreeMap::from([(drop.clone(), keep.clone())]))
}

/// Every query reachable from `q` by zero or more fork eliminations, in
/// canonical form.
pub fn fork_rewritings(q: &ConjunctiveQuery) -> BTreeSet<ConjunctiveQuery> {
    let start = canonicalize_cq(q);
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        for f in list_forks(&cur) {
            let next = canonicalize_cq(&merge(&cur, &f.source_a, &f.source_b));
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen
}

/// `q°`, the result of eliminating forks until none is left.
pub fn maximal_fork_rewriting(q: &ConjunctiveQuery) -> ConjunctiveQuery {
    maximal_fork_rewriting_by(q, |_| 0)
}

/// Like [`maximal_fork_rewriting`], but `choose` picks which of the current
/// forks (listed in order) is eliminated next. Intermediate queries keep
/// their variable names.
pub fn maximal_fork_rewriting_by(
    q: &ConjunctiveQuery,
    mut choose: impl FnMut(&[Fork]) -> usize,
) -> ConjunctiveQuery {
    let mut cur = q.clone();
    loop {
        let forks: Vec<Fork> = list_forks(&cur).into_iter().collect();
        if forks.is_empty() {
            return canonicalize_cq(&cur);
        }
        let f = &forks[choose(&forks) % forks.len()];
        cur = merge(&cur, &f.source_a, &f.source_b);
    }
}

/// The tree-shaped restrictions `q°|Reach(v)`, in canonical form.
/// Restrictions that are not trees (a cycle below `v`) are dropped.
pub fn qtree_set(qmax: &ConjunctiveQuery) -> Result<BTreeSet<ConjunctiveQuery>, ForkError> {
    if !list_forks(qmax).is_empty() {
        return Err(ForkError::HasForks);
    }
    Ok(qmax
        .vars()
        .iter()
        .map(|v| qmax.restrict(&qmax.reach(v)))
        .filter(|sub| tree_shape(sub).is_some())
        .map(|sub| canonicalize_cq(&sub))
        .collect())
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: BTreeSet<String>,
    pub roles: BTreeSet<String>,
    /// The role sets `{r | r(v, v') ∈ q}` of ordered variable pairs.
    pub conjunctions: BTreeSet<RoleConjunction>,
}

pub fn occurring_signature(q: &ConjunctiveQuery) -> Signature {
    let mut pairs: BTreeMap<(&Var, &Var), BTreeSet<&str>> = BTreeMap::new();
    for a in q.role_atoms() {
        pairs.entry((&a.from, &a.to)).or_default().insert(&a.role);
    }
    Signature {
        concepts: q.concept_names(),
        roles: q.role_names(),
        conjunctions: pairs
            .into_values()
            .map(|rs| RoleConjunction::new(rs).expect("non-empty"))
            .collect(),
    }
}
