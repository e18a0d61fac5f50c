//! Depth-truncated `N`-rooted forward unravellings.
//!
//! Nodes are words over the base domain starting at an `N`-named element,
//! where the first two letters are never both named. Concepts follow the
//! last letter; roles are the named-to-named pairs of the base plus
//! `(w, w·d)` whenever `(last(w), d)` is in the base role.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::semantics::Interpretation;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum UnravelError {
    #[error("names not assigned in the interpretation: {}", .0.join(", "))]
    NamesUnassigned(Vec<String>),
    #[error("the set of root names is empty")]
    NoNames,
    #[error("the unravelling exceeds {0} nodes")]
    SizeLimitExceeded(usize),
}

#[derive(Clone, Debug)]
pub struct Unravelling {
    pub interpretation: Interpretation,
    /// The word of each node, as base element indices.
    pub words: Vec<Vec<usize>>,
    pub depth: usize,
    pub reachable_only: bool,
}

impl Unravelling {
    /// `w ↦ last(w)`, indexed by node.
    pub fn base_map(&self) -> Vec<usize> {
        self.words.iter().map(|w| *w.last().unwrap()).collect()
    }
}

pub const DEFAULT_NODE_CAP: usize = 100_000;

/// Unravels `i` from the elements named in `names`, keeping words of length
/// at most `depth + 1`. With `reachable_only`, consecutive letters must be
/// linked by some role (classical path words); otherwise every word allowed
/// by the definition is kept.
pub fn forward_unravel(
    i: &Interpretation,
    names: &BTreeSet<String>,
    depth: usize,
    reachable_only: bool,
    node_cap: usize,
) -> Result<Unravelling, UnravelError> {
    if names.is_empty() {
        return Err(UnravelError::NoNames);
    }
    let missing: Vec<String> = names.iter().filter(|a| i.name(a).is_none()).cloned().collect();
    if !missing.is_empty() {
        return Err(UnravelError::NamesUnassigned(missing));
    }
    let named = i.named_elements(names);
    let mut linked = vec![BTreeSet::new(); i.len()];
    for (d, e) in i.edges() {
        linked[d].insert(e);
    }

    let mut words: Vec<Vec<usize>> = named.iter().map(|d| vec![*d]).collect();
    let mut frontier: Vec<usize> = (0..words.len()).collect();
    for _ in 0..depth {
        let mut next = Vec::new();
        for &k in &frontier {
            let w = words[k].clone();
            let last = *w.last().unwrap();
            for d in i.elements() {
                if w.len() == 1 && named.contains(&d) {
                    continue;
                }
                if reachable_only && !linked[last].contains(&d) {
                    continue;
                }
                if words.len() >= node_cap {
                    return Err(UnravelError::SizeLimitExceeded(node_cap));
                }
                let mut child = w.clone();
                child.push(d);
                next.push(words.len());
                words.push(child);
            }
        }
        frontier = next;
    }

    let label = |w: &[usize]| {
        w.iter()
            .map(|d| i.label(*d))
            .collect::<Vec<_>>()
            .join("/")
    };
    let mut out = Interpretation::new(words.iter().map(|w| label(w)))
        .expect("named elements exist and words are distinct");
    for (c, ext) in i.concepts() {
        out.declare_concept(c);
        for (k, w) in words.iter().enumerate() {
            if ext.contains(w.last().unwrap()) {
                out.add_concept(c, k);
            }
        }
    }
    // Roots occupy the first positions, in the order of `named`.
    let root_of: Vec<usize> = named.iter().copied().collect();
    let node_of_root = |d: usize| root_of.iter().position(|x| *x == d);
    for (r, ext) in i.roles() {
        out.declare_role(r);
        for (d, e) in ext {
            if let (Some(a), Some(b)) = (node_of_root(*d), node_of_root(*e)) {
                out.add_role(r, a, b);
            }
        }
    }
    // Link each longer word to its prefix.
    let mut index_of = std::collections::HashMap::with_capacity(words.len());
    for (k, w) in words.iter().enumerate() {
        index_of.insert(w.as_slice(), k);
    }
    for (k, w) in words.iter().enumerate().filter(|(_, w)| w.len() > 1) {
        let parent = index_of[&w[..w.len() - 1]];
        let (last_parent, d) = (w[w.len() - 2], w[w.len() - 1]);
        for (r, ext) in i.roles() {
            if ext.contains(&(last_parent, d)) {
                out.add_role(r, parent, k);
            }
        }
    }
    // Names outside N survive only as aliases of N-named elements.
    for (a, d) in i.names() {
        if let Some(k) = node_of_root(*d) {
            out.assign(a, k);
        }
    }
    Ok(Unravelling {
        interpretation: out,
        words,
        depth,
        reachable_only,
    })
}
