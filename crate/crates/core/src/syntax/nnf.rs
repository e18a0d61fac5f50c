use std::collections::BTreeSet;
use std::fmt;

use super::concept::{Concept, RoleConjunction};
use super::kb::{Axiom, KnowledgeBase};

/// A concept in negation normal form.
///
/// The core grammar has no disjunction or universal restriction, so NNF
/// needs its own type: negation appears only directly above concept names.
/// Conjunctions and disjunctions are flattened, sorted and deduplicated, and
/// the constants are folded away (`C ⊓ ⊥ = ⊥`, `C ⊔ ⊤ = ⊤`, `∃R.⊥ = ⊥`,
/// `∀R.⊤ = ⊤`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NnfConcept {
    Top,
    Bottom,
    Atom(String),
    NegAtom(String),
    And(Vec<NnfConcept>),
    Or(Vec<NnfConcept>),
    Exists(RoleConjunction, Box<NnfConcept>),
    Forall(RoleConjunction, Box<NnfConcept>),
}

impl NnfConcept {
    pub fn and<I: IntoIterator<Item = NnfConcept>>(parts: I) -> Self {
        let mut flat = Vec::new();
        for part in parts {
            match part {
                NnfConcept::Top => {}
                NnfConcept::Bottom => return NnfConcept::Bottom,
                NnfConcept::And(inner) => flat.extend(inner),
                c => flat.push(c),
            }
        }
        flat.sort();
        flat.dedup();
        match flat.len() {
            0 => NnfConcept::Top,
            1 => flat.pop().unwrap(),
            _ => NnfConcept::And(flat),
        }
    }

    pub fn or<I: IntoIterator<Item = NnfConcept>>(parts: I) -> Self {
        let mut flat = Vec::new();
        for part in parts {
            match part {
                NnfConcept::Bottom => {}
                NnfConcept::Top => return NnfConcept::Top,
                NnfConcept::Or(inner) => flat.extend(inner),
                c => flat.push(c),
            }
        }
        flat.sort();
        flat.dedup();
        match flat.len() {
            0 => NnfConcept::Bottom,
            1 => flat.pop().unwrap(),
            _ => NnfConcept::Or(flat),
        }
    }

    pub fn exists(roles: RoleConjunction, filler: NnfConcept) -> Self {
        match filler {
            NnfConcept::Bottom => NnfConcept::Bottom,
            f => NnfConcept::Exists(roles, Box::new(f)),
        }
    }

    pub fn forall(roles: RoleConjunction, filler: NnfConcept) -> Self {
        match filler {
            NnfConcept::Top => NnfConcept::Top,
            f => NnfConcept::Forall(roles, Box::new(f)),
        }
    }

    /// The NNF of the negation of `self`.
    pub fn complement(&self) -> NnfConcept {
        match self {
            NnfConcept::Top => NnfConcept::Bottom,
            NnfConcept::Bottom => NnfConcept::Top,
            NnfConcept::Atom(a) => NnfConcept::NegAtom(a.clone()),
            NnfConcept::NegAtom(a) => NnfConcept::Atom(a.clone()),
            NnfConcept::And(cs) => NnfConcept::or(cs.iter().map(NnfConcept::complement)),
            NnfConcept::Or(cs) => NnfConcept::and(cs.iter().map(NnfConcept::complement)),
            NnfConcept::Exists(rc, c) => NnfConcept::forall(rc.clone(), c.complement()),
            NnfConcept::Forall(rc, c) => NnfConcept::exists(rc.clone(), c.complement()),
        }
    }

    /// Expands back into the core constructors.
    pub fn to_concept(&self) -> Concept {
        match self {
            NnfConcept::Top => Concept::top(),
            NnfConcept::Bottom => Concept::Bottom,
            NnfConcept::Atom(a) => Concept::atomic(a.clone()),
            NnfConcept::NegAtom(a) => Concept::not(Concept::atomic(a.clone())),
            NnfConcept::And(cs) => Concept::and(cs.iter().map(NnfConcept::to_concept)),
            NnfConcept::Or(cs) => Concept::not(Concept::and(
                cs.iter().map(|c| Concept::not(c.to_concept())),
            )),
            NnfConcept::Exists(rc, c) => Concept::exists(rc.clone(), c.to_concept()),
            NnfConcept::Forall(rc, c) => Concept::forall(rc.clone(), c.to_concept()),
        }
    }

    /// Immediate subterms.
    pub fn children(&self) -> &[NnfConcept] {
        match self {
            NnfConcept::And(cs) | NnfConcept::Or(cs) => cs,
            NnfConcept::Exists(_, c) | NnfConcept::Forall(_, c) => std::slice::from_ref(c),
            _ => &[],
        }
    }

    pub fn subconcepts(&self) -> BTreeSet<NnfConcept> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(c) = stack.pop() {
            if out.insert(c.clone()) {
                stack.extend(c.children());
            }
        }
        out
    }

    /// True when negation sits only directly above concept names.
    pub fn is_nnf(c: &Concept) -> bool {
        match c {
            Concept::Bottom | Concept::Atomic(_) => true,
            Concept::Not(inner) => matches!(**inner, Concept::Atomic(_) | Concept::Bottom),
            Concept::And(cs) => cs.iter().all(NnfConcept::is_nnf),
            Concept::Exists(_, c) => NnfConcept::is_nnf(c),
        }
    }
}

/// Negation normal form of a core concept.
pub fn nnf(c: &Concept) -> NnfConcept {
    to_nnf(c, false)
}

fn to_nnf(c: &Concept, negated: bool) -> NnfConcept {
    match (c, negated) {
        (Concept::Bottom, false) => NnfConcept::Bottom,
        (Concept::Bottom, true) => NnfConcept::Top,
        (Concept::Atomic(a), false) => NnfConcept::Atom(a.clone()),
        (Concept::Atomic(a), true) => NnfConcept::NegAtom(a.clone()),
        (Concept::Not(inner), neg) => to_nnf(inner, !neg),
        (Concept::And(cs), false) => NnfConcept::and(cs.iter().map(|c| to_nnf(c, false))),
        (Concept::And(cs), true) => NnfConcept::or(cs.iter().map(|c| to_nnf(c, true))),
        (Concept::Exists(rc, c), false) => NnfConcept::exists(rc.clone(), to_nnf(c, false)),
        (Concept::Exists(rc, c), true) => NnfConcept::forall(rc.clone(), to_nnf(c, true)),
    }
}

/// Subconcept closure of a knowledge base, in NNF.
///
/// Contains the NNF of every concept in an assertion or inclusion, the
/// internalised form `nnf(¬C ⊔ D)` of every inclusion `C ⊑ D`, and is closed
/// under subconcepts and NNF complement.
pub fn closure(kb: &KnowledgeBase) -> BTreeSet<NnfConcept> {
    let mut seeds = Vec::new();
    for ax in kb.axioms() {
        match ax {
            Axiom::Gci(lhs, rhs) => {
                seeds.push(nnf(lhs));
                seeds.push(nnf(rhs));
                seeds.push(internalise(lhs, rhs));
            }
            Axiom::ConceptAssertion(c, _) => seeds.push(nnf(c)),
            Axiom::RoleAssertion(..) | Axiom::NegRoleAssertion(..) => {}
        }
    }
    closure_of(seeds)
}

/// Closure of arbitrary NNF seeds under subconcepts and complement.
pub fn closure_of<I: IntoIterator<Item = NnfConcept>>(seeds: I) -> BTreeSet<NnfConcept> {
    let mut sub = BTreeSet::new();
    for seed in seeds {
        sub.extend(seed.subconcepts());
    }
    let complements: Vec<NnfConcept> = sub.iter().map(NnfConcept::complement).collect();
    sub.extend(complements);
    sub
}

/// `nnf(¬C ⊔ D)` for an inclusion `C ⊑ D`.
pub fn internalise(lhs: &Concept, rhs: &Concept) -> NnfConcept {
    NnfConcept::or([to_nnf(lhs, true), nnf(rhs)])
}

impl fmt::Display for NnfConcept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn joined(f: &mut fmt::Formatter<'_>, cs: &[NnfConcept], op: &str) -> fmt::Result {
            match cs {
                [] => unreachable!("n-ary NNF node with no children"),
                [only] => write!(f, "{only}"),
                [first, rest @ ..] => {
                    write!(f, "({first} {op} ")?;
                    joined(f, rest, op)?;
                    write!(f, ")")
                }
            }
        }
        match self {
            NnfConcept::Top => write!(f, "Top"),
            NnfConcept::Bottom => write!(f, "Bot"),
            NnfConcept::Atom(a) => write!(f, "{a}"),
            NnfConcept::NegAtom(a) => write!(f, "not {a}"),
            NnfConcept::And(cs) => joined(f, cs, "and"),
            NnfConcept::Or(cs) => joined(f, cs, "or"),
            NnfConcept::Exists(rc, c) => write!(f, "exists {rc}.{c}"),
            NnfConcept::Forall(rc, c) => write!(f, "forall {rc}.{c}"),
        }
    }
}
