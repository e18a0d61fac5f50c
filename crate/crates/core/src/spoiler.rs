//! Spoilers and super-spoilers.
//!
//! A spoiler for a splitting is any KB containing one of its blocking
//! options. A super-spoiler blocks every splitting of every fork rewriting
//! and is ⊆-minimal, so super-spoilers are exactly the minimal hitting sets
//! of the family of blocking-option sets.

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::forkrew::{fork_rewritings, maximal_fork_rewriting, occurring_signature, qtree_set};
use crate::rollup::match_concept;
use crate::splitting::{enumerate_splittings, subtree_condition, validate_splitting, Splitting, Violation};
use crate::syntax::{Axiom, Concept, ConjunctiveQuery};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SpoilerError {
    #[error("invalid splitting: {0:?}")]
    InvalidSplitting(Violation),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SuperSpoiler {
    pub axioms: BTreeSet<Axiom>,
}

impl SuperSpoiler {
    /// One axiom per line in KB syntax.
    pub fn to_kb_text(&self) -> String {
        self.axioms.iter().map(|a| format!("{a}.\n")).collect()
    }
}

/// `⊤ ⊑ ¬C_match(q̂)`.
fn never(c: Concept) -> Axiom {
    Axiom::Gci(Concept::top(), Concept::not(c))
}

/// The axioms any one of which spoils `s`.
pub fn blocking_options(qr: &ConjunctiveQuery, s: &Splitting) -> Result<BTreeSet<Axiom>, SpoilerError> {
    let used: BTreeSet<String> = s.naming.values().cloned().collect();
    validate_splitting(qr, &used, s).map_err(SpoilerError::InvalidSplitting)?;
    let mut out = BTreeSet::new();
    for t in &s.trees {
        out.insert(never(match_concept(&qr.restrict(t)).expect("trees roll up")));
    }
    for a in qr.concept_atoms() {
        if let Some(name) = s.naming.get(&a.var) {
            out.insert(Axiom::ConceptAssertion(
                Concept::not(Concept::atomic(&a.concept)),
                name.clone(),
            ));
        }
    }
    for a in qr.role_atoms() {
        if let (Some(x), Some(y)) = (s.naming.get(&a.from), s.naming.get(&a.to)) {
            out.insert(Axiom::NegRoleAssertion(a.role.clone(), x.clone(), y.clone()));
        }
    }
    for st in &s.subtrees {
        out.insert(Axiom::ConceptAssertion(
            Concept::not(subtree_condition(qr, st)),
            s.naming[&st.attach].clone(),
        ));
    }
    Ok(out)
}

/// Every axiom of the forms a minimal spoiler may use, built from the tree
/// restrictions and the signature of the maximal fork rewriting.
pub fn candidate_spoiler_axioms(q: &ConjunctiveQuery, names: &BTreeSet<String>) -> BTreeSet<Axiom> {
    let qmax = maximal_fork_rewriting(q);
    let trees: Vec<Concept> = qtree_set(&qmax)
        .expect("maximal rewritings have no forks")
        .iter()
        .map(|t| match_concept(t).expect("qtree members are trees"))
        .collect();
    let sig = occurring_signature(&qmax);
    let mut out = BTreeSet::new();
    for c in &trees {
        out.insert(never(c.clone()));
    }
    for a in names {
        for c in &sig.concepts {
            out.insert(Axiom::ConceptAssertion(Concept::not(Concept::atomic(c)), a.clone()));
        }
        for b in names {
            for r in &sig.roles {
                out.insert(Axiom::NegRoleAssertion(r.clone(), a.clone(), b.clone()));
            }
        }
        for c in &trees {
            for rc in &sig.conjunctions {
                out.insert(Axiom::ConceptAssertion(
                    Concept::not(Concept::exists(rc.clone(), c.clone())),
                    a.clone(),
                ));
            }
        }
    }
    out
}

/// The blocking-option sets of all (fork rewriting, splitting) pairs,
/// without duplicates and without supersets of other members.
pub fn blocking_family(q: &ConjunctiveQuery, names: &BTreeSet<String>) -> Vec<BTreeSet<Axiom>> {
    let rewritings: Vec<ConjunctiveQuery> = fork_rewritings(q).into_iter().collect();
    let family: BTreeSet<BTreeSet<Axiom>> = rewritings
        .par_iter()
        .map(|qr| {
            enumerate_splittings(qr, names)
                .map(|s| blocking_options(qr, &s).expect("enumerated splittings are valid"))
                .collect::<BTreeSet<_>>()
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    let mut by_size: Vec<BTreeSet<Axiom>> = family.into_iter().collect();
    by_size.sort_by_key(BTreeSet::len);
    let mut kept: Vec<BTreeSet<Axiom>> = Vec::new();
    for f in by_size {
        if !kept.iter().any(|k| k.is_subset(&f)) {
            kept.push(f);
        }
    }
    kept.sort();
    kept
}

/// All super-spoilers of `q` for `names`, sorted.
pub fn enumerate_super_spoilers(q: &ConjunctiveQuery, names: &BTreeSet<String>) -> Vec<SuperSpoiler> {
    minimal_hitting_sets(&blocking_family(q, names))
        .into_iter()
        .map(|axioms| SuperSpoiler { axioms })
        .collect()
}

/// Minimal hitting sets of `family`, each produced once: branch on the
/// members of the smallest unhit set, forbidding the members tried before,
/// and prune as soon as a chosen element has no private set left.
pub fn minimal_hitting_sets<T: Ord + Clone>(family: &[BTreeSet<T>]) -> Vec<BTreeSet<T>> {
    if family.iter().any(BTreeSet::is_empty) {
        return Vec::new();
    }
    let universe: Vec<T> = family.iter().flatten().cloned().collect::<BTreeSet<T>>().into_iter().collect();
    let sets: Vec<Vec<usize>> = family
        .iter()
        .map(|f| f.iter().map(|x| universe.binary_search(x).unwrap()).collect())
        .collect();
    let mut found = Vec::new();
    search(&sets, &mut Vec::new(), &mut vec![false; universe.len()], &mut found);
    let mut out: Vec<BTreeSet<T>> = found
        .into_iter()
        .map(|hs| hs.into_iter().map(|k| universe[k].clone()).collect())
        .collect();
    out.sort();
    out
}

fn search(
    sets: &[Vec<usize>],
    chosen: &mut Vec<usize>,
    forbidden: &mut Vec<bool>,
    found: &mut Vec<Vec<usize>>,
) {
    let unhit = sets
        .iter()
        .filter(|s| !s.iter().any(|x| chosen.contains(x)))
        .min_by_key(|s| s.iter().filter(|x| !forbidden[**x]).count());
    let Some(branch) = unhit else {
        let mut hs = chosen.clone();
        hs.sort();
        found.push(hs);
        return;
    };
    let options: Vec<usize> = branch.iter().copied().filter(|x| !forbidden[*x]).collect();
    let mut newly_forbidden = Vec::new();
    for x in options {
        chosen.push(x);
        if every_choice_is_needed(sets, chosen) {
            search(sets, chosen, forbidden, found);
        }
        chosen.pop();
        forbidden[x] = true;
        newly_forbidden.push(x);
    }
    for x in newly_forbidden {
        forbidden[x] = false;
    }
}

/// Every chosen element is the only chosen one in some set.
fn every_choice_is_needed(sets: &[Vec<usize>], chosen: &[usize]) -> bool {
    chosen.iter().all(|c| {
        sets.iter().any(|s| s.contains(c) && chosen.iter().filter(|x| s.contains(x)).count() == 1)
    })
}
