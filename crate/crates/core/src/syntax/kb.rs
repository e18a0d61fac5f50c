use std::collections::BTreeSet;
use std::fmt;

use super::concept::Concept;
use super::SyntaxError;

/// A TBox inclusion or an ABox assertion.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    /// `C ⊑ D`
    Gci(Concept, Concept),
    /// `C(a)`
    ConceptAssertion(Concept, String),
    /// `r(a, b)`
    RoleAssertion(String, String, String),
    /// `¬r(a, b)`
    NegRoleAssertion(String, String, String),
}

impl Axiom {
    pub fn is_assertion(&self) -> bool {
        !matches!(self, Axiom::Gci(..))
    }

    pub fn individuals(&self) -> Vec<&str> {
        match self {
            Axiom::Gci(..) => vec![],
            Axiom::ConceptAssertion(_, a) => vec![a],
            Axiom::RoleAssertion(_, a, b) | Axiom::NegRoleAssertion(_, a, b) => vec![a, b],
        }
    }

    pub fn concepts(&self) -> Vec<&Concept> {
        match self {
            Axiom::Gci(l, r) => vec![l, r],
            Axiom::ConceptAssertion(c, _) => vec![c],
            _ => vec![],
        }
    }
}

/// Prints an axiom without the terminating `.`.
impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::Gci(l, r) => write!(f, "{l} SubClassOf {r}"),
            Axiom::ConceptAssertion(c, a) => write!(f, "{c}({a})"),
            Axiom::RoleAssertion(r, a, b) => write!(f, "{r}({a},{b})"),
            Axiom::NegRoleAssertion(r, a, b) => write!(f, "not {r}({a},{b})"),
        }
    }
}

/// A knowledge base `K = (A, T)`.
///
/// Both parts are non-empty: an empty TBox is normalised to `{⊤ ⊑ ⊤}` and an
/// empty ABox is rejected.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KnowledgeBase {
    abox: BTreeSet<Axiom>,
    tbox: BTreeSet<Axiom>,
}

impl KnowledgeBase {
    pub fn new<I: IntoIterator<Item = Axiom>>(axioms: I) -> Result<Self, SyntaxError> {
        let (abox, mut tbox): (BTreeSet<Axiom>, BTreeSet<Axiom>) =
            axioms.into_iter().partition(Axiom::is_assertion);
        if abox.is_empty() {
            return Err(SyntaxError::EmptyABox);
        }
        if tbox.is_empty() {
            tbox.insert(Axiom::Gci(Concept::top(), Concept::top()));
        }
        Ok(KnowledgeBase { abox, tbox })
    }

    pub fn abox(&self) -> &BTreeSet<Axiom> {
        &self.abox
    }

    pub fn tbox(&self) -> &BTreeSet<Axiom> {
        &self.tbox
    }

    /// ABox followed by TBox, each in canonical order.
    pub fn axioms(&self) -> impl Iterator<Item = &Axiom> + '_ {
        self.abox.iter().chain(self.tbox.iter())
    }

    /// A new KB with extra axioms added. Extra assertions go to the ABox and
    /// extra inclusions to the TBox.
    pub fn extended<'a, I: IntoIterator<Item = &'a Axiom>>(&self, extra: I) -> KnowledgeBase {
        let mut kb = self.clone();
        for ax in extra {
            if ax.is_assertion() {
                kb.abox.insert(ax.clone());
            } else {
                kb.tbox.insert(ax.clone());
            }
        }
        kb
    }

    /// `ind(K)`, the individual names occurring in the KB.
    pub fn individuals(&self) -> BTreeSet<String> {
        self.axioms()
            .flat_map(|a| a.individuals())
            .map(str::to_owned)
            .collect()
    }

    pub fn concept_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for ax in self.axioms() {
            for c in ax.concepts() {
                c.concept_names(&mut out);
            }
        }
        out
    }

    pub fn role_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for ax in self.axioms() {
            match ax {
                Axiom::RoleAssertion(r, ..) | Axiom::NegRoleAssertion(r, ..) => {
                    out.insert(r.clone());
                }
                _ => ax.concepts().iter().for_each(|c| c.role_names(&mut out)),
            }
        }
        out
    }
}

/// One axiom per line, each terminated by `.`, in the KB grammar.
impl fmt::Display for KnowledgeBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ax in self.axioms() {
            writeln!(f, "{ax}.")?;
        }
        Ok(())
    }
}
