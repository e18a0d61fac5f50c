//! Isomorphism-invariant renaming of conjunctive queries.
//!
//! Each connected component is labelled separately by colour refinement
//! followed by individualisation of the first smallest non-singleton cell.
//! Every leaf of that search gives a variable ordering; the component keeps
//! the lexicographically least atom encoding over all leaves. Components are
//! then sorted by encoding and numbered consecutively.

use std::collections::{BTreeMap, BTreeSet};

use super::query::{ConceptAtom, ConjunctiveQuery, RoleAtom, Var};

type Encoding = (usize, Vec<(String, usize)>, Vec<(String, usize, usize)>);

/// Renames the variables of `q` to `v0, v1, …` so that two queries get the
/// same result exactly when they are equal up to variable renaming.
pub fn canonicalize_cq(q: &ConjunctiveQuery) -> ConjunctiveQuery {
    let mut encodings: Vec<Encoding> = q
        .components()
        .iter()
        .map(|comp| canonical_component(&q.restrict(comp)))
        .collect();
    encodings.sort();

    let mut vars = Vec::new();
    let mut concept_atoms = Vec::new();
    let mut role_atoms = Vec::new();
    let mut offset = 0;
    let name = |i: usize| Var::new(format!("v{i}"));
    for (n, cs, rs) in encodings {
        vars.extend((offset..offset + n).map(name));
        concept_atoms.extend(cs.into_iter().map(|(concept, v)| ConceptAtom {
            concept,
            var: name(offset + v),
        }));
        role_atoms.extend(rs.into_iter().map(|(role, a, b)| RoleAtom {
            role,
            from: name(offset + a),
            to: name(offset + b),
        }));
        offset += n;
    }
    ConjunctiveQuery::from_parts(vars, concept_atoms, role_atoms)
}

struct Graph {
    labels: Vec<Vec<String>>,
    edges: Vec<(String, usize, usize)>,
}

fn canonical_component(q: &ConjunctiveQuery) -> Encoding {
    let vars: Vec<&Var> = q.vars().iter().collect();
    let index: BTreeMap<&Var, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut labels = vec![Vec::new(); vars.len()];
    for a in q.concept_atoms() {
        labels[index[&a.var]].push(a.concept.clone());
    }
    let edges = q
        .role_atoms()
        .iter()
        .map(|a| (a.role.clone(), index[&a.from], index[&a.to]))
        .collect();
    let g = Graph { labels, edges };

    let initial: Vec<Vec<String>> = g.labels.clone();
    let colours = rank(&initial);
    let colours = refine(&g, colours);
    let mut best = None;
    search(&g, colours, &mut best);
    best.expect("search visits at least one leaf")
}

/// Replaces arbitrary ordered keys by their dense rank.
fn rank<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let distinct: BTreeSet<K> = keys.iter().cloned().collect();
    let order: BTreeMap<K, usize> = distinct.into_iter().enumerate().map(|(i, k)| (k, i)).collect();
    keys.iter().map(|k| order[k]).collect()
}

fn refine(g: &Graph, mut colours: Vec<usize>) -> Vec<usize> {
    loop {
        let count = colours.iter().collect::<BTreeSet<_>>().len();
        let signatures: Vec<(usize, Vec<(u8, &str, usize)>)> = (0..colours.len())
            .map(|v| {
                let mut sig = Vec::new();
                for (r, a, b) in &g.edges {
                    if *a == v && *b == v {
                        sig.push((0, r.as_str(), colours[v]));
                    } else if *a == v {
                        sig.push((1, r.as_str(), colours[*b]));
                    } else if *b == v {
                        sig.push((2, r.as_str(), colours[*a]));
                    }
                }
                sig.sort();
                (colours[v], sig)
            })
            .collect();
        let next = rank(&signatures);
        let next_count = next.iter().collect::<BTreeSet<_>>().len();
        colours = next;
        if next_count == count {
            return colours;
        }
    }
}

fn search(g: &Graph, colours: Vec<usize>, best: &mut Option<Encoding>) {
    let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, c) in colours.iter().enumerate() {
        cells.entry(*c).or_default().push(v);
    }
    let target = cells
        .iter()
        .filter(|(_, members)| members.len() > 1)
        .min_by_key(|(c, members)| (members.len(), **c));
    match target {
        None => {
            let enc = encode(g, &colours);
            if best.as_ref().is_none_or(|b| enc < *b) {
                *best = Some(enc);
            }
        }
        Some((&cell, members)) => {
            for &chosen in members {
                let split: Vec<usize> = colours
                    .iter()
                    .enumerate()
                    .map(|(v, &c)| 2 * c + usize::from(c == cell && v != chosen))
                    .collect();
                search(g, refine(g, rank(&split)), best);
            }
        }
    }
}

fn encode(g: &Graph, order: &[usize]) -> Encoding {
    let mut cs: Vec<(String, usize)> = g
        .labels
        .iter()
        .enumerate()
        .flat_map(|(v, ls)| ls.iter().map(move |l| (l.clone(), order[v])))
        .collect();
    cs.sort();
    let mut rs: Vec<(String, usize, usize)> = g
        .edges
        .iter()
        .map(|(r, a, b)| (r.clone(), order[*a], order[*b]))
        .collect();
    rs.sort();
    (order.len(), cs, rs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse::parse_cq;
    use proptest::prelude::*;

    fn canon(text: &str) -> ConjunctiveQuery {
        canonicalize_cq(&parse_cq(text).unwrap())
    }

    #[test]
    fn single_atom() {
        assert_eq!(canon("A(?foo)").to_string(), "A(?v0)");
    }

    #[test]
    fn renaming_invariance() {
        assert_eq!(canon("r(?x,?y)"), canon("r(?p,?q)"));
        assert_eq!(
            canon("r(?a,?b), r(?b,?c), A(?c), s(?d,?d)"),
            canon("s(?z,?z), A(?m), r(?k,?l), r(?l,?m)")
        );
    }

    #[test]
    fn distinguishes_non_isomorphic() {
        assert_ne!(canon("r(?x,?y), r(?y,?z)"), canon("r(?x,?y), r(?x,?z)"));
        assert_ne!(canon("r(?x,?y), A(?x)"), canon("r(?x,?y), A(?y)"));
    }

    #[test]
    fn symmetric_cycle() {
        // Every vertex looks alike until individualised.
        let a = canon("r(?a,?b), r(?b,?c), r(?c,?a), r(?d,?e), r(?e,?f), r(?f,?d)");
        let b = canon("r(?x,?y), r(?y,?x2), r(?x2,?x), r(?p,?q), r(?q,?s), r(?s,?p)");
        assert_eq!(a, b);
    }

    fn arb_cq() -> impl Strategy<Value = ConjunctiveQuery> {
        let concept = (0..2usize, 0..5usize).prop_map(|(c, v)| ConceptAtom {
            concept: ["A", "B"][c].into(),
            var: Var::new(format!("x{v}")),
        });
        let role = (0..2usize, 0..5usize, 0..5usize).prop_map(|(r, a, b)| RoleAtom {
            role: ["r", "s"][r].into(),
            from: Var::new(format!("x{a}")),
            to: Var::new(format!("x{b}")),
        });
        (
            prop::collection::vec(concept, 0..4),
            prop::collection::vec(role, 1..7),
        )
            .prop_map(|(c, r)| ConjunctiveQuery::new(c, r).unwrap())
    }

    /// Checks that `map` is a bijection carrying the atoms of `a` onto `b`.
    fn is_isomorphism(a: &ConjunctiveQuery, b: &ConjunctiveQuery, map: &BTreeMap<Var, Var>) -> bool {
        let image: BTreeSet<&Var> = map.values().collect();
        image.len() == a.vars().len() && a.vars().len() == b.vars().len() && a.rename(map) == *b
    }

    fn find_isomorphism(a: &ConjunctiveQuery, b: &ConjunctiveQuery) -> bool {
        fn go(
            a: &ConjunctiveQuery,
            b: &ConjunctiveQuery,
            left: &[Var],
            map: &mut BTreeMap<Var, Var>,
        ) -> bool {
            let Some((v, rest)) = left.split_first() else {
                return is_isomorphism(a, b, map);
            };
            for w in b.vars() {
                if map.values().any(|x| x == w) {
                    continue;
                }
                map.insert(v.clone(), w.clone());
                if go(a, b, rest, map) {
                    return true;
                }
                map.remove(v);
            }
            false
        }
        let vars: Vec<Var> = a.vars().iter().cloned().collect();
        go(a, b, &vars, &mut BTreeMap::new())
    }

    proptest! {
        #[test]
        fn canonical_form_is_isomorphic(q in arb_cq()) {
            prop_assert!(find_isomorphism(&q, &canonicalize_cq(&q)));
        }

        #[test]
        fn canonical_form_ignores_renaming(q in arb_cq(), perm in Just((0..5).collect::<Vec<usize>>()).prop_shuffle()) {
            let map: BTreeMap<Var, Var> = (0..5)
                .map(|i| (Var::new(format!("x{i}")), Var::new(format!("y{}", perm[i]))))
                .collect();
            prop_assert_eq!(canonicalize_cq(&q), canonicalize_cq(&q.rename(&map)));
        }

        #[test]
        fn equal_canonical_forms_mean_isomorphic(a in arb_cq(), b in arb_cq()) {
            let same = canonicalize_cq(&a) == canonicalize_cq(&b);
            prop_assert_eq!(same, find_isomorphism(&a, &b));
        }
    }
}
