//! Splittings: an abstract description of how a query matches a locally
//! forward-forest-like interpretation.
//!
//! A splitting sends each variable to the named part (`R`, with a naming
//! `ν`), to a subtree hanging off a named variable (`S_i`, attached at
//! `μ(i)`), or to a detached forward tree (`T`).

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::forkrew::{list_forks, merge};
use crate::rollup::{match_concept, tree_shape};
use crate::semantics::{extension, is_lff_like, is_match, Interpretation, Match};
use crate::syntax::{Concept, ConjunctiveQuery, RoleConjunction, Var};

/// The first splitting condition that fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The sets do not partition the variables.
    Partition,
    /// A root is named outside `N`.
    UnknownName,
    /// `q|T` is not a union of variable-disjoint forward trees.
    ItemA,
    /// Some `q|S_i` is not a forward tree rooted at its recorded root.
    ItemB,
    /// A role atom crosses sets other than from `μ(i)` to the root of `S_i`.
    ItemC,
    /// No atom links `μ(i)` to the root of `S_i`.
    ItemD,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SplittingError {
    #[error("invalid splitting: {0:?}")]
    Invalid(Violation),
    #[error("individual '{0}' is not assigned")]
    UnassignedIndividual(String),
    #[error("the assignment is not a match")]
    NotAMatch,
    #[error("the interpretation is not locally forward-forest-like")]
    NotLffLike,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subtree {
    pub root: Var,
    pub vars: BTreeSet<Var>,
    /// `μ(i)`.
    pub attach: Var,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Splitting {
    /// `ν`; its keys form `R`.
    pub naming: BTreeMap<Var, String>,
    /// `S_1..S_n`, sorted by root.
    pub subtrees: Vec<Subtree>,
    /// The components of `q|T`, sorted.
    pub trees: Vec<BTreeSet<Var>>,
}

#[derive(Serialize)]
struct SubtreeJson {
    vars: Vec<String>,
    attach: String,
}

#[derive(Serialize)]
struct SplittingJson {
    roots: BTreeMap<String, String>,
    subtrees: Vec<SubtreeJson>,
    trees: Vec<Vec<String>>,
}

impl Splitting {
    pub fn roots(&self) -> BTreeSet<Var> {
        self.naming.keys().cloned().collect()
    }

    pub fn tree_vars(&self) -> BTreeSet<Var> {
        self.trees.iter().flatten().cloned().collect()
    }

    /// Subtree variables are listed root first.
    pub fn to_json_value(&self) -> serde_json::Value {
        let name = |v: &Var| v.to_string();
        let raw = SplittingJson {
            roots: self.naming.iter().map(|(v, a)| (name(v), a.clone())).collect(),
            subtrees: self
                .subtrees
                .iter()
                .map(|s| SubtreeJson {
                    vars: std::iter::once(&s.root)
                        .chain(s.vars.iter().filter(|v| **v != s.root))
                        .map(name)
                        .collect(),
                    attach: name(&s.attach),
                })
                .collect(),
            trees: self.trees.iter().map(|t| t.iter().map(name).collect()).collect(),
        };
        serde_json::to_value(raw).expect("plain data")
    }
}

/// Checks the partition and items a–d of the definition.
pub fn validate_splitting(
    q: &ConjunctiveQuery,
    names: &BTreeSet<String>,
    s: &Splitting,
) -> Result<(), Violation> {
    // Which block each variable lies in: 0 for R, 1 + i for S_i, and
    // 1 + n + j for the j-th tree.
    let mut block: BTreeMap<&Var, usize> = BTreeMap::new();
    let n = s.subtrees.len();
    let sets = s
        .naming
        .keys()
        .map(|v| (v, 0))
        .chain(s.subtrees.iter().enumerate().flat_map(|(i, st)| st.vars.iter().map(move |v| (v, 1 + i))))
        .chain(s.trees.iter().enumerate().flat_map(|(j, t)| t.iter().map(move |v| (v, 1 + n + j))));
    for (v, b) in sets {
        if block.insert(v, b).is_some() {
            return Err(Violation::Partition);
        }
    }
    if block.len() != q.vars().len() || !q.vars().iter().all(|v| block.contains_key(v)) {
        return Err(Violation::Partition);
    }
    if s.subtrees.iter().any(|st| st.vars.is_empty()) || s.trees.iter().any(BTreeSet::is_empty) {
        return Err(Violation::Partition);
    }
    if s.naming.values().any(|a| !names.contains(a)) {
        return Err(Violation::UnknownName);
    }
    for st in &s.subtrees {
        match tree_shape(&q.restrict(&st.vars)) {
            Some(info) if info.root == st.root => {}
            _ => return Err(Violation::ItemB),
        }
    }
    for t in &s.trees {
        if tree_shape(&q.restrict(t)).is_none() {
            return Err(Violation::ItemA);
        }
    }
    for a in q.role_atoms() {
        let (bf, bt) = (block[&a.from], block[&a.to]);
        if bf == bt {
            continue;
        }
        if bf > n && bt > n {
            return Err(Violation::ItemA);
        }
        let hangs = bf == 0
            && bt >= 1
            && bt <= n
            && s.subtrees[bt - 1].attach == a.from
            && s.subtrees[bt - 1].root == a.to;
        if !hangs {
            return Err(Violation::ItemC);
        }
    }
    for st in &s.subtrees {
        if !s.naming.contains_key(&st.attach) || q.roles_between(&st.attach, &st.root).is_empty() {
            return Err(Violation::ItemD);
        }
    }
    Ok(())
}

/// The splitting shape picked by a block choice per variable (0 for `R`,
/// 1 for subtrees, 2 for `T`), or `None` if it cannot be valid.
fn shape(q: &ConjunctiveQuery, vars: &[Var], choice: &[u8]) -> Option<Splitting> {
    let pick = |c: u8| -> BTreeSet<Var> {
        vars.iter().zip(choice).filter(|(_, k)| **k == c).map(|(v, _)| v.clone()).collect()
    };
    let (roots, sub, rest) = (pick(0), pick(1), pick(2));
    let mut subtrees = Vec::new();
    for comp in q.restrict(&sub).components() {
        let root = tree_shape(&q.restrict(&comp))?.root;
        let attach = q
            .role_atoms()
            .iter()
            .find(|a| a.to == root && roots.contains(&a.from))?
            .from
            .clone();
        subtrees.push(Subtree { root, vars: comp, attach });
    }
    subtrees.sort();
    Some(Splitting {
        naming: roots.into_iter().map(|v| (v, String::new())).collect(),
        subtrees,
        trees: q.restrict(&rest).components(),
    })
}

/// Every `N`-splitting of `q`, each once. Subtrees are ordered by root;
/// splittings come grouped by block choice, then by naming.
pub fn enumerate_splittings<'a>(
    q: &'a ConjunctiveQuery,
    names: &'a BTreeSet<String>,
) -> impl Iterator<Item = Splitting> + 'a {
    let vars: Vec<Var> = q.vars().iter().cloned().collect();
    let name_list: Vec<String> = names.iter().cloned().collect();
    let total = 3usize.pow(vars.len() as u32);
    (0..total)
        .filter_map(move |mut code| {
            let choice: Vec<u8> = (0..vars.len())
                .map(|_| {
                    let c = (code % 3) as u8;
                    code /= 3;
                    c
                })
                .collect();
            let mut s = shape(q, &vars, &choice)?;
            if s.naming.len() > 0 && name_list.is_empty() {
                return None;
            }
            for a in s.naming.values_mut() {
                *a = name_list.first().cloned().unwrap_or_default();
            }
            validate_splitting(q, names, &s).ok()?;
            Some(s)
        })
        .flat_map(move |s| namings(s, names.iter().cloned().collect()))
}

/// All variants of `s` over `N^R`.
fn namings(s: Splitting, names: Vec<String>) -> impl Iterator<Item = Splitting> {
    let roots: Vec<Var> = s.naming.keys().cloned().collect();
    let total = names.len().pow(roots.len() as u32);
    (0..total).map(move |mut code| {
        let mut out = s.clone();
        // Most significant digit first, so namings come in lexicographic order.
        let mut digits = vec![0; roots.len()];
        for d in digits.iter_mut().rev() {
            *d = code % names.len();
            code /= names.len();
        }
        for (v, d) in roots.iter().zip(digits) {
            out.naming.insert(v.clone(), names[d].clone());
        }
        out
    })
}

fn lookup(i: &Interpretation, a: &str) -> Result<usize, SplittingError> {
    i.name(a).ok_or_else(|| SplittingError::UnassignedIndividual(a.to_owned()))
}

/// The concept of item D for subtree `st`:
/// `∃(∩ r with r(μ(i), x_i) ∈ q).C_match(q|S_i)`.
pub fn subtree_condition(q: &ConjunctiveQuery, st: &Subtree) -> Concept {
    let roles = RoleConjunction::new(q.roles_between(&st.attach, &st.root))
        .expect("item d gives a linking atom");
    let filler = match_concept(&q.restrict(&st.vars)).expect("item b gives a tree");
    Concept::exists(roles, filler)
}

/// Items A–D of compatibility. Lff-likeness of `i` is the caller's concern.
pub fn is_compatible(
    s: &Splitting,
    q: &ConjunctiveQuery,
    i: &Interpretation,
) -> Result<bool, SplittingError> {
    let used: BTreeSet<String> = s.naming.values().cloned().collect();
    validate_splitting(q, &used, s).map_err(SplittingError::Invalid)?;
    let elem: BTreeMap<&Var, usize> = s
        .naming
        .iter()
        .map(|(v, a)| Ok((v, lookup(i, a)?)))
        .collect::<Result<_, SplittingError>>()?;
    for t in &s.trees {
        let c = match_concept(&q.restrict(t)).expect("item a gives trees");
        if extension(i, &c).is_clear() {
            return Ok(false);
        }
    }
    for a in q.concept_atoms() {
        if let Some(d) = elem.get(&a.var) {
            if !i.concept_ext(&a.concept).contains(d) {
                return Ok(false);
            }
        }
    }
    for a in q.role_atoms() {
        if let (Some(d), Some(e)) = (elem.get(&a.from), elem.get(&a.to)) {
            if !i.role_ext(&a.role).contains(&(*d, *e)) {
                return Ok(false);
            }
        }
    }
    for st in &s.subtrees {
        if !extension(i, &subtree_condition(q, st)).contains(elem[&st.attach]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Builds the rewriting and splitting that witness the match `m`: forks
/// whose sources `m` sends to one element are eliminated, variables at
/// `N`-named elements become roots, every other variable with an atom from
/// a root starts a subtree holding what it reaches outside the roots, and
/// the rest forms the detached trees. The rewriting keeps variable names.
pub fn splitting_from_match(
    q: &ConjunctiveQuery,
    i: &Interpretation,
    m: &Match,
    names: &BTreeSet<String>,
) -> Result<(ConjunctiveQuery, Splitting), SplittingError> {
    if !is_match(i, q, m) {
        return Err(SplittingError::NotAMatch);
    }
    for a in names {
        lookup(i, a)?;
    }
    if !is_lff_like(i, q.size(), names) {
        return Err(SplittingError::NotLffLike);
    }
    let mut qr = q.clone();
    let mut at = m.assignment.clone();
    while let Some(f) = list_forks(&qr)
        .into_iter()
        .find(|f| at[&f.source_a] == at[&f.source_b])
    {
        qr = merge(&qr, &f.source_a, &f.source_b);
        at.remove(&f.source_b);
    }

    // The least name of each named element.
    let mut name_of: BTreeMap<usize, &String> = BTreeMap::new();
    for a in names.iter().rev() {
        name_of.insert(i.name(a).unwrap(), a);
    }
    let naming: BTreeMap<Var, String> = qr
        .vars()
        .iter()
        .filter_map(|v| name_of.get(&at[v]).map(|a| (v.clone(), (*a).clone())))
        .collect();
    let anonymous: BTreeSet<Var> = qr.vars().iter().filter(|v| !naming.contains_key(*v)).cloned().collect();
    let off_roots = qr.restrict(&anonymous);
    let mut subtrees = Vec::new();
    for x in &anonymous {
        let from_roots: BTreeSet<&Var> = qr
            .in_neighbours(x)
            .into_iter()
            .filter(|u| naming.contains_key(*u))
            .collect();
        if let Some(attach) = from_roots.into_iter().next() {
            subtrees.push(Subtree {
                root: x.clone(),
                vars: off_roots.reach(x),
                attach: attach.clone(),
            });
        }
    }
    subtrees.sort();
    let in_subtrees: BTreeSet<Var> = subtrees.iter().flat_map(|s| s.vars.iter().cloned()).collect();
    let rest: BTreeSet<Var> = anonymous.difference(&in_subtrees).cloned().collect();
    let s = Splitting {
        naming,
        subtrees,
        trees: qr.restrict(&rest).components(),
    };
    validate_splitting(&qr, names, &s).map_err(SplittingError::Invalid)?;
    Ok((qr, s))
}
