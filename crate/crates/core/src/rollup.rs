//! Rolling forward-tree-shaped queries up into concepts.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::syntax::{Concept, ConjunctiveQuery, RoleConjunction, Var};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RollupError {
    #[error("the query is not forward-tree-shaped")]
    NotTreeShaped,
    #[error("variable {0} does not occur in the query")]
    UnknownVariable(Var),
}

/// The tree structure of a forward-tree-shaped query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeInfo {
    pub root: Var,
    /// Parent of every non-root variable and the roles on the edge.
    pub parent: BTreeMap<Var, (Var, RoleConjunction)>,
    /// Children of every variable, sorted.
    pub children: BTreeMap<Var, Vec<Var>>,
}

/// Recognises forward-tree-shaped queries: connected, no self-loops, a
/// unique variable without in-neighbours, and one parent for every other
/// variable. Several roles on one parent edge are fine.
pub fn tree_shape(q: &ConjunctiveQuery) -> Option<TreeInfo> {
    if q.vars().is_empty() || q.components().len() != 1 {
        return None;
    }
    if q.role_atoms().iter().any(|a| a.from == a.to) {
        return None;
    }
    let mut parent = BTreeMap::new();
    let mut children: BTreeMap<Var, Vec<Var>> =
        q.vars().iter().map(|v| (v.clone(), Vec::new())).collect();
    let mut roots = Vec::new();
    for v in q.vars() {
        let preds = q.in_neighbours(v);
        match preds.len() {
            0 => roots.push(v.clone()),
            1 => {
                let p = (*preds.iter().next().unwrap()).clone();
                let roles = RoleConjunction::new(q.roles_between(&p, v)).unwrap();
                children.get_mut(&p).unwrap().push(v.clone());
                parent.insert(v.clone(), (p, roles));
            }
            _ => return None,
        }
    }
    let [root] = roots.as_slice() else {
        return None;
    };
    // With one root, single parents and connectivity, every variable
    // reaches the root through its ancestors; make sure of it anyway.
    for v in q.vars() {
        let mut cur = v;
        for _ in 0..=q.vars().len() {
            match parent.get(cur) {
                Some((p, _)) => cur = p,
                None => break,
            }
        }
        if cur != root {
            return None;
        }
    }
    for c in children.values_mut() {
        c.sort();
    }
    Some(TreeInfo {
        root: root.clone(),
        parent,
        children,
    })
}

/// `C_{q,v}` for a forward-tree-shaped `q`.
pub fn subtree_concept(q: &ConjunctiveQuery, v: &Var) -> Result<Concept, RollupError> {
    let info = tree_shape(q).ok_or(RollupError::NotTreeShaped)?;
    if !q.vars().contains(v) {
        return Err(RollupError::UnknownVariable(v.clone()));
    }
    Ok(roll(q, &info, v))
}

fn roll(q: &ConjunctiveQuery, info: &TreeInfo, v: &Var) -> Concept {
    let labels = q.labels_of(v).into_iter().map(Concept::atomic);
    let successors = info.children[v].iter().map(|u| {
        let (_, roles) = &info.parent[u];
        Concept::exists(roles.clone(), roll(q, info, u))
    });
    Concept::and(labels.chain(successors))
}

/// `C_match(q)`: the rolled-up concept at the root.
pub fn match_concept(q: &ConjunctiveQuery) -> Result<Concept, RollupError> {
    let info = tree_shape(q).ok_or(RollupError::NotTreeShaped)?;
    Ok(roll(q, &info, &info.root))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{eval_concept, is_match, Interpretation, Match};
    use crate::syntax::{parse_concept, parse_cq, ConceptAtom, RoleAtom};
    use proptest::prelude::*;

    fn cq(text: &str) -> ConjunctiveQuery {
        parse_cq(text).unwrap()
    }

    #[test]
    fn tree_shape_examples() {
        let single = tree_shape(&cq("A(?x)")).unwrap();
        assert_eq!(single.root, Var::new("x"));
        assert!(single.children[&Var::new("x")].is_empty());

        let multi = tree_shape(&cq("A(?x), r(?x,?y), s(?x,?y), B(?y)")).unwrap();
        assert_eq!(multi.children[&Var::new("x")], vec![Var::new("y")]);
        assert_eq!(
            multi.parent[&Var::new("y")].1,
            RoleConjunction::new(["r", "s"]).unwrap()
        );

        let example = cq("r(?x,?y), r(?x,?z), s(?v,?y), r(?v,?z), A(?x), B(?y), C(?z), D(?v)");
        assert!(tree_shape(&example).is_none());
        assert!(tree_shape(&cq("r(?x,?x)")).is_none());
        assert!(tree_shape(&cq("A(?x), B(?y)")).is_none());
        assert!(tree_shape(&cq("r(?x,?y), r(?y,?x)")).is_none());
    }

    #[test]
    fn concept_examples() {
        let q = cq("A(?x), r(?x,?y), s(?x,?y), B(?y)");
        assert_eq!(subtree_concept(&q, &Var::new("y")).unwrap(), Concept::atomic("B"));
        assert_eq!(
            subtree_concept(&q, &Var::new("x")).unwrap(),
            parse_concept("(A and exists (r & s).B)").unwrap()
        );
        let bare = cq("r(?x,?y)");
        assert!(subtree_concept(&bare, &Var::new("y")).unwrap().is_top());
        assert_eq!(match_concept(&bare).unwrap(), parse_concept("exists (r).Top").unwrap());
        assert_eq!(match_concept(&cq("A(?x)")).unwrap(), Concept::atomic("A"));
        assert_eq!(
            match_concept(&cq("A(?x), r(?x,?y), r(?y,?z), C(?z)")).unwrap(),
            parse_concept("(A and exists (r).exists (r).C)").unwrap()
        );
        assert_eq!(match_concept(&cq("r(?x,?x)")), Err(RollupError::NotTreeShaped));
        assert_eq!(
            subtree_concept(&bare, &Var::new("w")),
            Err(RollupError::UnknownVariable(Var::new("w")))
        );
    }

    #[test]
    fn rendered_like_the_cli_expects() {
        let q = cq("A(?x), r(?x,?y), s(?x,?y), B(?y)");
        assert_eq!(match_concept(&q).unwrap().to_string(), "(A and exists (r & s).B)");
    }

    /// A random forward tree over `x0..x(n-1)`, `x0` the root.
    pub(crate) fn arb_tree_query(max_vars: usize) -> impl Strategy<Value = ConjunctiveQuery> {
        (1..=max_vars).prop_flat_map(|n| {
            let parents: Vec<BoxedStrategy<usize>> = (1..n).map(|i| (0..i).boxed()).collect();
            let roles = prop::collection::vec(prop::sample::subsequence(vec!["r", "s"], 1..=2), n);
            let labels = prop::collection::vec(prop::sample::subsequence(vec!["A", "B"], 0..=2), n);
            (Just(n), parents, roles, labels).prop_map(|(n, parents, roles, labels)| {
                let x = |i: usize| Var::new(format!("x{i}"));
                let mut cs = Vec::new();
                let mut rs = Vec::new();
                for (i, ls) in labels.iter().enumerate() {
                    cs.extend(ls.iter().map(|l| ConceptAtom { concept: l.to_string(), var: x(i) }));
                }
                for i in 1..n {
                    for r in &roles[i] {
                        rs.push(RoleAtom { role: r.to_string(), from: x(parents[i - 1]), to: x(i) });
                    }
                }
                ConjunctiveQuery::from_parts((0..n).map(x), cs, rs)
            })
        })
    }

    fn brute_force_rooted_hom(i: &Interpretation, q: &ConjunctiveQuery, v: &Var, d: usize) -> bool {
        let vars: Vec<Var> = q.vars().iter().cloned().collect();
        let total = i.len().pow(vars.len() as u32);
        (0..total).any(|mut code| {
            let mut assignment = BTreeMap::new();
            for u in &vars {
                assignment.insert(u.clone(), code % i.len());
                code /= i.len();
            }
            assignment[v] == d && is_match(i, q, &Match { assignment })
        })
    }

    proptest! {
        #[test]
        fn rolling_up_matches_homomorphisms(
            q in arb_tree_query(5),
            i in crate::semantics::eval::tests::arb_interpretation(),
        ) {
            for v in q.vars() {
                let sub = q.restrict(&q.reach(v));
                let ext = eval_concept(&i, &subtree_concept(&q, v).unwrap());
                for d in i.elements() {
                    prop_assert_eq!(ext.contains(&d), brute_force_rooted_hom(&i, &sub, v, d));
                }
            }
        }

        #[test]
        fn generated_trees_are_recognised(q in arb_tree_query(6)) {
            let info = tree_shape(&q).unwrap();
            prop_assert_eq!(info.root, Var::new("x0"));
            prop_assert!(match_concept(&q).unwrap().size() <= 3 * q.size() + 2);
        }
    }
}
