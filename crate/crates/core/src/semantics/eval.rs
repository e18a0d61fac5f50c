use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;

use super::{Interpretation, SemanticsError};
use crate::syntax::{Axiom, Concept, KnowledgeBase, RoleConjunction};

/// The extension `C^I` as a bit set over element indices.
pub fn extension(i: &Interpretation, c: &Concept) -> FixedBitSet {
    let n = i.len();
    match c {
        Concept::Bottom => FixedBitSet::with_capacity(n),
        Concept::Atomic(a) => {
            let mut out = FixedBitSet::with_capacity(n);
            for d in i.concept_ext(a) {
                out.insert(*d);
            }
            out
        }
        Concept::Not(inner) => {
            let mut out = extension(i, inner);
            out.toggle_range(..);
            out
        }
        Concept::And(parts) => {
            let mut out = FixedBitSet::with_capacity(n);
            out.insert_range(..);
            for p in parts {
                out.intersect_with(&extension(i, p));
            }
            out
        }
        Concept::Exists(rc, filler) => {
            let target = extension(i, filler);
            let mut out = FixedBitSet::with_capacity(n);
            for (d, e) in conjunction_pairs(i, rc) {
                if target.contains(e) {
                    out.insert(d);
                }
            }
            out
        }
    }
}

/// `(r1 ∩ … ∩ rn)^I`.
fn conjunction_pairs<'a>(
    i: &'a Interpretation,
    rc: &'a RoleConjunction,
) -> impl Iterator<Item = (usize, usize)> + 'a {
    let mut roles = rc.roles();
    let first = roles.next().expect("role conjunctions are non-empty");
    let rest: Vec<&str> = roles.collect();
    i.role_ext(first)
        .iter()
        .copied()
        .filter(move |p| rest.iter().all(|r| i.role_ext(r).contains(p)))
}

pub fn eval_concept(i: &Interpretation, c: &Concept) -> BTreeSet<usize> {
    extension(i, c).ones().collect()
}

fn lookup(i: &Interpretation, name: &str) -> Result<usize, SemanticsError> {
    i.name(name)
        .ok_or_else(|| SemanticsError::UnassignedIndividual(name.to_owned()))
}

pub fn check_axiom(i: &Interpretation, ax: &Axiom) -> Result<bool, SemanticsError> {
    Ok(match ax {
        Axiom::Gci(lhs, rhs) => extension(i, lhs).is_subset(&extension(i, rhs)),
        Axiom::ConceptAssertion(c, a) => {
            let d = lookup(i, a)?;
            extension(i, c).contains(d)
        }
        Axiom::RoleAssertion(r, a, b) => i.role_ext(r).contains(&(lookup(i, a)?, lookup(i, b)?)),
        Axiom::NegRoleAssertion(r, a, b) => {
            !i.role_ext(r).contains(&(lookup(i, a)?, lookup(i, b)?))
        }
    })
}

pub fn is_model(i: &Interpretation, k: &KnowledgeBase) -> Result<bool, SemanticsError> {
    for ax in k.axioms() {
        if !check_axiom(i, ax)? {
            return Ok(false);
        }
    }
    Ok(true)
}
