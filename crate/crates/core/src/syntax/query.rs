use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::SyntaxError;

/// A query variable. Printed with a leading `?`, stored without it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        match name.strip_prefix('?') {
            Some(stripped) => Var(stripped.to_owned()),
            None => Var(name),
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptAtom {
    pub concept: String,
    pub var: Var,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleAtom {
    pub role: String,
    pub from: Var,
    pub to: Var,
}

impl fmt::Display for ConceptAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.concept, self.var)
    }
}

impl fmt::Display for RoleAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.role, self.from, self.to)
    }
}

/// A conjunctive query: a set of concept and role atoms over variables.
///
/// Parsed queries are non-empty and every variable occurs in an atom.
/// Restrictions `q|V` keep the whole variable set `V`, so a derived query may
/// carry variables without atoms (or no atoms at all); such a variable rolls
/// up to `⊤`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConjunctiveQuery {
    vars: BTreeSet<Var>,
    concept_atoms: BTreeSet<ConceptAtom>,
    role_atoms: BTreeSet<RoleAtom>,
}

impl ConjunctiveQuery {
    /// Builds a query from its atoms; the variable set is the set of
    /// variables occurring in them. Duplicate atoms collapse.
    pub fn new<C, R>(concept_atoms: C, role_atoms: R) -> Result<Self, SyntaxError>
    where
        C: IntoIterator<Item = ConceptAtom>,
        R: IntoIterator<Item = RoleAtom>,
    {
        let q = ConjunctiveQuery::from_parts(BTreeSet::new(), concept_atoms, role_atoms);
        if q.size() == 0 {
            return Err(SyntaxError::EmptyQuery);
        }
        Ok(q)
    }

    /// Builds a query with an explicit variable set. Variables of the atoms
    /// are added to it.
    pub fn from_parts<V, C, R>(vars: V, concept_atoms: C, role_atoms: R) -> Self
    where
        V: IntoIterator<Item = Var>,
        C: IntoIterator<Item = ConceptAtom>,
        R: IntoIterator<Item = RoleAtom>,
    {
        let concept_atoms: BTreeSet<ConceptAtom> = concept_atoms.into_iter().collect();
        let role_atoms: BTreeSet<RoleAtom> = role_atoms.into_iter().collect();
        let mut vars: BTreeSet<Var> = vars.into_iter().collect();
        vars.extend(concept_atoms.iter().map(|a| a.var.clone()));
        for a in &role_atoms {
            vars.insert(a.from.clone());
            vars.insert(a.to.clone());
        }
        ConjunctiveQuery {
            vars,
            concept_atoms,
            role_atoms,
        }
    }

    pub fn vars(&self) -> &BTreeSet<Var> {
        &self.vars
    }

    pub fn concept_atoms(&self) -> &BTreeSet<ConceptAtom> {
        &self.concept_atoms
    }

    pub fn role_atoms(&self) -> &BTreeSet<RoleAtom> {
        &self.role_atoms
    }

    /// `|q|`, the number of atoms.
    pub fn size(&self) -> usize {
        self.concept_atoms.len() + self.role_atoms.len()
    }

    /// `q|V`: drops every atom mentioning a variable outside `keep`. The
    /// variable set of the result is `keep ∩ Var(q)`.
    pub fn restrict(&self, keep: &BTreeSet<Var>) -> ConjunctiveQuery {
        ConjunctiveQuery {
            vars: self.vars.intersection(keep).cloned().collect(),
            concept_atoms: self
                .concept_atoms
                .iter()
                .filter(|a| keep.contains(&a.var))
                .cloned()
                .collect(),
            role_atoms: self
                .role_atoms
                .iter()
                .filter(|a| keep.contains(&a.from) && keep.contains(&a.to))
                .cloned()
                .collect(),
        }
    }

    /// Applies a variable substitution; unmapped variables stay. Several
    /// variables may map to one, in which case atoms merge.
    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> ConjunctiveQuery {
        let sub = |v: &Var| map.get(v).cloned().unwrap_or_else(|| v.clone());
        ConjunctiveQuery::from_parts(
            self.vars.iter().map(sub),
            self.concept_atoms.iter().map(|a| ConceptAtom {
                concept: a.concept.clone(),
                var: sub(&a.var),
            }),
            self.role_atoms.iter().map(|a| RoleAtom {
                role: a.role.clone(),
                from: sub(&a.from),
                to: sub(&a.to),
            }),
        )
    }

    /// Concept names `A` with `A(v) ∈ q`.
    pub fn labels_of(&self, v: &Var) -> BTreeSet<&str> {
        self.concept_atoms
            .iter()
            .filter(|a| &a.var == v)
            .map(|a| a.concept.as_str())
            .collect()
    }

    /// Role names `r` with `r(from, to) ∈ q`.
    pub fn roles_between(&self, from: &Var, to: &Var) -> BTreeSet<String> {
        self.role_atoms
            .iter()
            .filter(|a| &a.from == from && &a.to == to)
            .map(|a| a.role.clone())
            .collect()
    }

    /// Distinct variables `u ≠ v` with some atom `r(u, v)`.
    pub fn in_neighbours(&self, v: &Var) -> BTreeSet<&Var> {
        self.role_atoms
            .iter()
            .filter(|a| &a.to == v && &a.from != v)
            .map(|a| &a.from)
            .collect()
    }

    pub fn out_neighbours(&self, v: &Var) -> BTreeSet<&Var> {
        self.role_atoms
            .iter()
            .filter(|a| &a.from == v && &a.to != v)
            .map(|a| &a.to)
            .collect()
    }

    /// Variables reachable from `v` by directed paths, `v` included.
    pub fn reach(&self, v: &Var) -> BTreeSet<Var> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![v.clone()];
        while let Some(u) = stack.pop() {
            if seen.insert(u.clone()) {
                for a in self.role_atoms.iter().filter(|a| a.from == u) {
                    stack.push(a.to.clone());
                }
            }
        }
        seen
    }

    /// Connected components of the undirected query graph, sorted.
    pub fn components(&self) -> Vec<BTreeSet<Var>> {
        let mut adj: BTreeMap<&Var, Vec<&Var>> = self.vars.iter().map(|v| (v, vec![])).collect();
        for a in &self.role_atoms {
            adj.get_mut(&a.from).unwrap().push(&a.to);
            adj.get_mut(&a.to).unwrap().push(&a.from);
        }
        let mut seen: BTreeSet<&Var> = BTreeSet::new();
        let mut out = Vec::new();
        for v in &self.vars {
            if seen.contains(v) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![v];
            while let Some(u) = stack.pop() {
                if seen.insert(u) {
                    comp.insert(u.clone());
                    stack.extend(adj[u].iter().copied());
                }
            }
            out.push(comp);
        }
        out.sort();
        out
    }

    pub fn concept_names(&self) -> BTreeSet<String> {
        self.concept_atoms.iter().map(|a| a.concept.clone()).collect()
    }

    pub fn role_names(&self) -> BTreeSet<String> {
        self.role_atoms.iter().map(|a| a.role.clone()).collect()
    }
}

/// Concept atoms first, then role atoms, comma separated.
impl fmt::Display for ConjunctiveQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms = self
            .concept_atoms
            .iter()
            .map(ToString::to_string)
            .chain(self.role_atoms.iter().map(ToString::to_string));
        for (i, atom) in atoms.enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{atom}")?;
        }
        Ok(())
    }
}

/// A union of conjunctive queries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ucq {
    disjuncts: Vec<ConjunctiveQuery>,
}

impl Ucq {
    pub fn new(disjuncts: Vec<ConjunctiveQuery>) -> Result<Self, SyntaxError> {
        if disjuncts.is_empty() || disjuncts.iter().any(|q| q.size() == 0) {
            return Err(SyntaxError::EmptyQuery);
        }
        Ok(Ucq { disjuncts })
    }

    pub fn disjuncts(&self) -> &[ConjunctiveQuery] {
        &self.disjuncts
    }

    pub fn size(&self) -> usize {
        self.disjuncts.iter().map(ConjunctiveQuery::size).sum()
    }
}

impl From<ConjunctiveQuery> for Ucq {
    fn from(q: ConjunctiveQuery) -> Self {
        Ucq { disjuncts: vec![q] }
    }
}

impl fmt::Display for Ucq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, q) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                write!(f, " or ")?;
            }
            write!(f, "{q}")?;
        }
        Ok(())
    }
}
