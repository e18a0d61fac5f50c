//! Finite interpretations and structures, and everything evaluated on them.

pub(crate) mod eval;
pub(crate) mod forest;
pub(crate) mod matching;

pub use eval::{check_axiom, eval_concept, extension, is_model};
pub use forest::{
    classify_forest, is_lff_like, neighbourhood, restrict, restrict_with_map, ForestClass,
    NotForestReason,
};
pub use matching::{
    find_homomorphism, find_matches, has_match, is_homomorphism, is_match, HomMapping, Match,
    Matches,
};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::ConjunctiveQuery;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("individual '{0}' is not assigned")]
    UnassignedIndividual(String),
    #[error("cannot restrict to an empty set of elements")]
    EmptyRestriction,
    #[error("the domain is empty")]
    EmptyDomain,
    #[error("element '{0}' occurs twice in the domain")]
    DuplicateElement(String),
    #[error("element '{0}' is not in the domain")]
    UnknownElement(String),
    #[error("malformed interpretation JSON: {0}")]
    Json(String),
}

/// A finite interpretation with a possibly partial name assignment.
///
/// Elements are addressed by index; each carries a unique label used for
/// printing and JSON. Names may be left unassigned, which makes the value a
/// structure rather than an interpretation proper.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation {
    labels: Vec<String>,
    index: BTreeMap<String, usize>,
    concepts: BTreeMap<String, BTreeSet<usize>>,
    roles: BTreeMap<String, BTreeSet<(usize, usize)>>,
    names: BTreeMap<String, usize>,
}

static EMPTY_ELEMS: BTreeSet<usize> = BTreeSet::new();
static EMPTY_PAIRS: BTreeSet<(usize, usize)> = BTreeSet::new();

impl Interpretation {
    pub fn new<I, S>(domain: I) -> Result<Self, SemanticsError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut labels = Vec::new();
        let mut index = BTreeMap::new();
        for label in domain {
            let label = label.into();
            if index.insert(label.clone(), labels.len()).is_some() {
                return Err(SemanticsError::DuplicateElement(label));
            }
            labels.push(label);
        }
        if labels.is_empty() {
            return Err(SemanticsError::EmptyDomain);
        }
        Ok(Interpretation {
            labels,
            index,
            concepts: BTreeMap::new(),
            roles: BTreeMap::new(),
            names: BTreeMap::new(),
        })
    }

    /// Domain `{d0, …, d(n-1)}`.
    pub fn with_size(n: usize) -> Result<Self, SemanticsError> {
        Interpretation::new((0..n).map(|i| format!("d{i}")))
    }

    /// The structure `I_q` of a query: one element per variable, labelled by
    /// the variable name, no names assigned. Returns the variables in index
    /// order.
    pub fn from_query(q: &ConjunctiveQuery) -> (Interpretation, Vec<crate::syntax::Var>) {
        let vars: Vec<_> = q.vars().iter().cloned().collect();
        let mut i = Interpretation {
            labels: vars.iter().map(|v| v.name().to_owned()).collect(),
            index: BTreeMap::new(),
            concepts: BTreeMap::new(),
            roles: BTreeMap::new(),
            names: BTreeMap::new(),
        };
        i.index = i.labels.iter().enumerate().map(|(k, l)| (l.clone(), k)).collect();
        let pos: BTreeMap<_, _> = vars.iter().enumerate().map(|(k, v)| (v, k)).collect();
        for a in q.concept_atoms() {
            i.add_concept(&a.concept, pos[&a.var]);
        }
        for a in q.role_atoms() {
            i.add_role(&a.role, pos[&a.from], pos[&a.to]);
        }
        (i, vars)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.labels.len()
    }

    pub fn label(&self, d: usize) -> &str {
        &self.labels[d]
    }

    pub fn element(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    fn element_or_err(&self, label: &str) -> Result<usize, SemanticsError> {
        self.element(label)
            .ok_or_else(|| SemanticsError::UnknownElement(label.to_owned()))
    }

    pub fn add_concept(&mut self, concept: &str, d: usize) {
        assert!(d < self.len(), "element index out of range");
        self.concepts.entry(concept.to_owned()).or_default().insert(d);
    }

    pub fn add_role(&mut self, role: &str, d: usize, e: usize) {
        assert!(d < self.len() && e < self.len(), "element index out of range");
        self.roles.entry(role.to_owned()).or_default().insert((d, e));
    }

    /// Registers a concept name with an empty extension, so it is printed.
    pub fn declare_concept(&mut self, concept: &str) {
        self.concepts.entry(concept.to_owned()).or_default();
    }

    pub fn declare_role(&mut self, role: &str) {
        self.roles.entry(role.to_owned()).or_default();
    }

    pub fn assign(&mut self, name: &str, d: usize) {
        assert!(d < self.len(), "element index out of range");
        self.names.insert(name.to_owned(), d);
    }

    /// Label-based variant of [`Interpretation::add_concept`].
    pub fn with_concept(mut self, concept: &str, elems: &[&str]) -> Result<Self, SemanticsError> {
        self.declare_concept(concept);
        for e in elems {
            let d = self.element_or_err(e)?;
            self.add_concept(concept, d);
        }
        Ok(self)
    }

    pub fn with_role(mut self, role: &str, pairs: &[(&str, &str)]) -> Result<Self, SemanticsError> {
        self.declare_role(role);
        for (a, b) in pairs {
            let (d, e) = (self.element_or_err(a)?, self.element_or_err(b)?);
            self.add_role(role, d, e);
        }
        Ok(self)
    }

    pub fn with_name(mut self, name: &str, elem: &str) -> Result<Self, SemanticsError> {
        let d = self.element_or_err(elem)?;
        self.assign(name, d);
        Ok(self)
    }

    pub fn concept_ext(&self, concept: &str) -> &BTreeSet<usize> {
        self.concepts.get(concept).unwrap_or(&EMPTY_ELEMS)
    }

    pub fn role_ext(&self, role: &str) -> &BTreeSet<(usize, usize)> {
        self.roles.get(role).unwrap_or(&EMPTY_PAIRS)
    }

    pub fn concepts(&self) -> &BTreeMap<String, BTreeSet<usize>> {
        &self.concepts
    }

    pub fn roles(&self) -> &BTreeMap<String, BTreeSet<(usize, usize)>> {
        &self.roles
    }

    pub fn names(&self) -> &BTreeMap<String, usize> {
        &self.names
    }

    pub fn name(&self, name: &str) -> Option<usize> {
        self.names.get(name).copied()
    }

    /// Elements `d` with `d = a^I` for some `a ∈ names`.
    pub fn named_elements<'a, I>(&self, names: I) -> BTreeSet<usize>
    where
        I: IntoIterator<Item = &'a String>,
    {
        names.into_iter().filter_map(|n| self.name(n)).collect()
    }

    /// Concept names whose extension contains `d`.
    pub fn labels_of(&self, d: usize) -> BTreeSet<&str> {
        self.concepts
            .iter()
            .filter(|(_, ext)| ext.contains(&d))
            .map(|(c, _)| c.as_str())
            .collect()
    }

    /// Role names `r` with `(d, e) ∈ r^I`.
    pub fn roles_between(&self, d: usize, e: usize) -> BTreeSet<&str> {
        self.roles
            .iter()
            .filter(|(_, ext)| ext.contains(&(d, e)))
            .map(|(r, _)| r.as_str())
            .collect()
    }

    /// All pairs in the union of role extensions.
    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        self.roles.values().flatten().copied().collect()
    }

    pub fn to_json_value(&self) -> InterpretationJson {
        let mut domain = self.labels.clone();
        domain.sort();
        let concepts = self
            .concepts
            .iter()
            .map(|(c, ext)| {
                let mut v: Vec<String> = ext.iter().map(|d| self.labels[*d].clone()).collect();
                v.sort();
                (c.clone(), v)
            })
            .collect();
        let roles = self
            .roles
            .iter()
            .map(|(r, ext)| {
                let mut v: Vec<[String; 2]> = ext
                    .iter()
                    .map(|(d, e)| [self.labels[*d].clone(), self.labels[*e].clone()])
                    .collect();
                v.sort();
                (r.clone(), v)
            })
            .collect();
        let names = self
            .names
            .iter()
            .map(|(n, d)| (n.clone(), self.labels[*d].clone()))
            .collect();
        InterpretationJson {
            domain,
            concepts,
            roles,
            names,
        }
    }

    /// Compact JSON with sorted keys and arrays.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("plain data serialises")
    }

    pub fn from_json(text: &str) -> Result<Interpretation, SemanticsError> {
        let raw: InterpretationJson =
            serde_json::from_str(text).map_err(|e| SemanticsError::Json(e.to_string()))?;
        Interpretation::from_json_value(&raw)
    }

    pub fn from_json_value(raw: &InterpretationJson) -> Result<Interpretation, SemanticsError> {
        let mut i = Interpretation::new(raw.domain.iter().cloned())?;
        for (c, elems) in &raw.concepts {
            let elems: Vec<&str> = elems.iter().map(String::as_str).collect();
            i = i.with_concept(c, &elems)?;
        }
        for (r, pairs) in &raw.roles {
            let pairs: Vec<(&str, &str)> =
                pairs.iter().map(|[a, b]| (a.as_str(), b.as_str())).collect();
            i = i.with_role(r, &pairs)?;
        }
        for (n, d) in &raw.names {
            i = i.with_name(n, d)?;
        }
        Ok(i)
    }
}

impl std::fmt::Display for Interpretation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let j = self.to_json_value();
        writeln!(f, "domain: {}", j.domain.join(", "))?;
        for (c, ext) in &j.concepts {
            writeln!(f, "{c}: {{{}}}", ext.join(", "))?;
        }
        for (r, ext) in &j.roles {
            let pairs: Vec<String> = ext.iter().map(|[a, b]| format!("({a}, {b})")).collect();
            writeln!(f, "{r}: {{{}}}", pairs.join(", "))?;
        }
        for (n, d) in &j.names {
            writeln!(f, "{n} -> {d}")?;
        }
        Ok(())
    }
}

/// The JSON shape of an interpretation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterpretationJson {
    pub domain: Vec<String>,
    #[serde(default)]
    pub concepts: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub roles: BTreeMap<String, Vec<[String; 2]>>,
    #[serde(default)]
    pub names: BTreeMap<String, String>,
}
