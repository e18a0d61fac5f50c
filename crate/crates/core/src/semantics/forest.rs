//! Restrictions, neighbourhoods and the recognition of forward forests.
//!
//! Forest shape is decided structurally rather than by searching for a word
//! embedding. A structure is an `N`-rooted forward forest up to isomorphism
//! iff, with `R` the set of `N`-named elements:
//! every name in `N` is defined and `R` is non-empty; edges into roots come
//! from roots only; every non-root has at most one in-neighbour (its parent),
//! never itself; and following parents never cycles. A non-root without a
//! parent is still fine: it sits below some root as a word `a·d` that happens
//! to carry no edge from `a`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{Interpretation, SemanticsError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ForestClass {
    ForwardTree(usize),
    RootedForest(BTreeSet<usize>),
    NotForest(NotForestReason),
}

impl ForestClass {
    pub fn is_forest_like(&self) -> bool {
        !matches!(self, ForestClass::NotForest(_))
    }
}

/// Why a structure is neither a forward tree nor a rooted forward forest.
/// Element indices refer to the classified structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotForestReason {
    UndefinedName(String),
    NoNamedRoot,
    SelfLoop(usize),
    TwoParents { node: usize, parents: (usize, usize) },
    RootWithAnonymousParent { root: usize, parent: usize },
    Cycle(Vec<usize>),
    NoRoot,
    MultipleRoots(Vec<usize>),
}

pub fn restrict(i: &Interpretation, s: &BTreeSet<usize>) -> Result<Interpretation, SemanticsError> {
    restrict_with_map(i, s).map(|(r, _)| r)
}

/// `I|S` together with the original index of each new element.
pub fn restrict_with_map(
    i: &Interpretation,
    s: &BTreeSet<usize>,
) -> Result<(Interpretation, Vec<usize>), SemanticsError> {
    if s.is_empty() {
        return Err(SemanticsError::EmptyRestriction);
    }
    if let Some(bad) = s.iter().find(|d| **d >= i.len()) {
        return Err(SemanticsError::UnknownElement(format!("#{bad}")));
    }
    let old: Vec<usize> = s.iter().copied().collect();
    let new_of: BTreeMap<usize, usize> = old.iter().enumerate().map(|(k, d)| (*d, k)).collect();
    let mut out = Interpretation::new(old.iter().map(|d| i.label(*d).to_owned()))?;
    for (c, ext) in i.concepts() {
        out.declare_concept(c);
        for d in ext {
            if let Some(k) = new_of.get(d) {
                out.add_concept(c, *k);
            }
        }
    }
    for (r, ext) in i.roles() {
        out.declare_role(r);
        for (d, e) in ext {
            if let (Some(k), Some(l)) = (new_of.get(d), new_of.get(e)) {
                out.add_role(r, *k, *l);
            }
        }
    }
    for (a, d) in i.names() {
        if let Some(k) = new_of.get(d) {
            out.assign(a, *k);
        }
    }
    Ok((out, old))
}

/// Elements within undirected distance `k` of `d`.
fn ball(i: &Interpretation, d: usize, k: usize) -> BTreeSet<usize> {
    let mut adj = vec![BTreeSet::new(); i.len()];
    for (a, b) in i.edges() {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let mut dist = BTreeMap::from([(d, 0usize)]);
    let mut queue = VecDeque::from([d]);
    while let Some(u) = queue.pop_front() {
        if dist[&u] == k {
            continue;
        }
        for v in &adj[u] {
            if !dist.contains_key(v) {
                dist.insert(*v, dist[&u] + 1);
                queue.push_back(*v);
            }
        }
    }
    dist.into_keys().collect()
}

/// The `k`-neighbourhood of `d`.
pub fn neighbourhood(i: &Interpretation, d: usize, k: usize) -> Interpretation {
    restrict(i, &ball(i, d, k)).expect("a ball contains its centre")
}

/// In-neighbours other than the element itself, and whether it has a
/// self-loop.
fn in_edges(s: &Interpretation) -> (Vec<BTreeSet<usize>>, Vec<bool>) {
    let mut preds = vec![BTreeSet::new(); s.len()];
    let mut self_loop = vec![false; s.len()];
    for (a, b) in s.edges() {
        if a == b {
            self_loop[a] = true;
        } else {
            preds[b].insert(a);
        }
    }
    (preds, self_loop)
}

/// A cycle in the parent relation among `nodes`, if any. Each node in
/// `nodes` has at most one parent.
fn parent_cycle(parent: &[Option<usize>], nodes: impl Iterator<Item = usize>) -> Option<Vec<usize>> {
    let mut state = vec![0u8; parent.len()]; // 0 new, 1 on current path, 2 done
    for start in nodes {
        let mut path = Vec::new();
        let mut cur = Some(start);
        while let Some(u) = cur {
            match state[u] {
                2 => break,
                1 => {
                    let from = path.iter().position(|x| *x == u).unwrap();
                    return Some(path[from..].to_vec());
                }
                _ => {
                    state[u] = 1;
                    path.push(u);
                    cur = parent[u];
                }
            }
        }
        for u in path {
            state[u] = 2;
        }
    }
    None
}

fn check_rooted_forest(s: &Interpretation, names: &BTreeSet<String>) -> Result<BTreeSet<usize>, NotForestReason> {
    let mut roots = BTreeSet::new();
    for a in names {
        match s.name(a) {
            Some(d) => {
                roots.insert(d);
            }
            None => return Err(NotForestReason::UndefinedName(a.clone())),
        }
    }
    if roots.is_empty() {
        return Err(NotForestReason::NoNamedRoot);
    }
    let (preds, self_loop) = in_edges(s);
    let mut parent = vec![None; s.len()];
    for d in s.elements() {
        if roots.contains(&d) {
            if let Some(p) = preds[d].iter().find(|p| !roots.contains(p)) {
                return Err(NotForestReason::RootWithAnonymousParent { root: d, parent: *p });
            }
            continue;
        }
        if self_loop[d] {
            return Err(NotForestReason::SelfLoop(d));
        }
        let mut it = preds[d].iter();
        parent[d] = it.next().copied();
        if let Some(second) = it.next() {
            return Err(NotForestReason::TwoParents {
                node: d,
                parents: (parent[d].unwrap(), *second),
            });
        }
    }
    match parent_cycle(&parent, s.elements()) {
        Some(cycle) => Err(NotForestReason::Cycle(cycle)),
        None => Ok(roots),
    }
}

fn check_tree(s: &Interpretation) -> Result<usize, NotForestReason> {
    let (preds, self_loop) = in_edges(s);
    if let Some(d) = s.elements().find(|d| self_loop[*d]) {
        return Err(NotForestReason::SelfLoop(d));
    }
    let mut parent = vec![None; s.len()];
    for d in s.elements() {
        let mut it = preds[d].iter();
        parent[d] = it.next().copied();
        if let Some(second) = it.next() {
            return Err(NotForestReason::TwoParents {
                node: d,
                parents: (parent[d].unwrap(), *second),
            });
        }
    }
    if let Some(cycle) = parent_cycle(&parent, s.elements()) {
        return Err(NotForestReason::Cycle(cycle));
    }
    let roots: Vec<usize> = s.elements().filter(|d| parent[*d].is_none()).collect();
    match roots.as_slice() {
        [] => Err(NotForestReason::NoRoot),
        [r] => Ok(*r),
        _ => Err(NotForestReason::MultipleRoots(roots)),
    }
}

/// Classifies `s` as an `names`-rooted forward forest or, failing that, a
/// forward tree. Root self-loops are allowed in forests but not in trees.
pub fn classify_forest(s: &Interpretation, names: &BTreeSet<String>) -> ForestClass {
    let forest = check_rooted_forest(s, names);
    if let Ok(roots) = forest {
        return ForestClass::RootedForest(roots);
    }
    match check_tree(s) {
        Ok(root) => ForestClass::ForwardTree(root),
        Err(tree_reason) => match forest {
            Err(NotForestReason::NoNamedRoot) => ForestClass::NotForest(tree_reason),
            Err(reason) => ForestClass::NotForest(reason),
            Ok(_) => unreachable!(),
        },
    }
}

/// `(n, N)`-lff-likeness: every `n`-neighbourhood is forward-tree-shaped or
/// an `N'`-rooted forward forest, `N'` being the names of `N` defined in it.
pub fn is_lff_like(i: &Interpretation, n: usize, names: &BTreeSet<String>) -> bool {
    i.elements().all(|d| {
        let nb = neighbourhood(i, d, n);
        let defined: BTreeSet<String> = names.iter().filter(|a| nb.name(a).is_some()).cloned().collect();
        classify_forest(&nb, &defined).is_forest_like()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(ns: &[&str]) -> BTreeSet<String> {
        ns.iter().map(|s| s.to_string()).collect()
    }

    fn chain() -> Interpretation {
        Interpretation::new(["d1", "d2", "d3"])
            .unwrap()
            .with_role("r", &[("d1", "d2"), ("d2", "d3")])
            .unwrap()
    }

    #[test]
    fn restriction_examples() {
        let i = chain().with_name("a", "d1").unwrap();
        let all: BTreeSet<usize> = i.elements().collect();
        assert_eq!(restrict(&i, &all).unwrap(), i);
        let only_d3 = restrict(&i, &[2].into()).unwrap();
        assert_eq!(only_d3.name("a"), None);
        assert!(only_d3.role_ext("r").is_empty());
        assert_eq!(restrict(&i, &BTreeSet::new()), Err(SemanticsError::EmptyRestriction));
    }

    #[test]
    fn neighbourhood_examples() {
        let i = chain();
        assert_eq!(neighbourhood(&i, 1, 0).len(), 1);
        assert_eq!(neighbourhood(&i, 1, 1).len(), 3);
        let nb = neighbourhood(&i, 2, 1);
        assert_eq!(nb.len(), 2);
        assert!(nb.element("d2").is_some() && nb.element("d3").is_some());
    }

    #[test]
    fn classification_examples() {
        let i = Interpretation::new(["u", "c"])
            .unwrap()
            .with_role("r", &[("u", "c")])
            .unwrap()
            .with_name("a", "u")
            .unwrap();
        assert_eq!(classify_forest(&i, &names(&["a"])), ForestClass::RootedForest([0].into()));
        assert_eq!(classify_forest(&i, &names(&[])), ForestClass::ForwardTree(0));

        let cyc = Interpretation::new(["p", "q"])
            .unwrap()
            .with_role("r", &[("p", "q"), ("q", "p")])
            .unwrap();
        assert!(matches!(
            classify_forest(&cyc, &names(&[])),
            ForestClass::NotForest(NotForestReason::Cycle(_))
        ));
    }

    #[test]
    fn root_self_loop_is_forest_but_not_tree() {
        let i = Interpretation::new(["u"])
            .unwrap()
            .with_role("r", &[("u", "u")])
            .unwrap()
            .with_name("a", "u")
            .unwrap();
        assert!(matches!(classify_forest(&i, &names(&["a"])), ForestClass::RootedForest(_)));
        assert_eq!(
            classify_forest(&i, &names(&[])),
            ForestClass::NotForest(NotForestReason::SelfLoop(0))
        );
    }

    #[test]
    fn shared_child_is_not_lff_like() {
        let i = Interpretation::new(["u", "v", "c"])
            .unwrap()
            .with_role("r", &[("u", "c"), ("v", "c")])
            .unwrap()
            .with_name("a", "u")
            .unwrap()
            .with_name("b", "v")
            .unwrap();
        assert!(!is_lff_like(&i, 1, &names(&["a", "b"])));
        let single = Interpretation::new(["x"]).unwrap();
        assert!(is_lff_like(&single, 3, &names(&[])));
    }

    #[test]
    fn anonymous_parent_of_root_is_rejected() {
        let i = Interpretation::new(["u", "c"])
            .unwrap()
            .with_role("r", &[("u", "c"), ("c", "u")])
            .unwrap()
            .with_name("a", "u")
            .unwrap();
        assert_eq!(
            classify_forest(&i, &names(&["a"])),
            ForestClass::NotForest(NotForestReason::RootWithAnonymousParent { root: 0, parent: 1 })
        );
    }
}
