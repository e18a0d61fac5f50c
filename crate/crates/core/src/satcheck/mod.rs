//! Satisfiability of ALC^∩ knowledge bases.
//!
//! `is_satisfiable` decides with a tableau and gives no model. Models come
//! from the bounded search in `brute_force_model`, which checks its output
//! before returning it. Finite and unrestricted satisfiability coincide for
//! ALC^∩, so one procedure serves both modes.

mod brute;
mod tableau;

pub use brute::{brute_force_model, brute_force_model_avoiding};

use serde::Serialize;
use thiserror::Error;

use crate::syntax::KnowledgeBase;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SatError {
    #[error("resource limit exceeded: {0}")]
    ResourceLimitExceeded(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SatConfig {
    /// Generated nodes allowed on one path of the search.
    pub max_nodes: usize,
    /// Wall-clock budget for one check.
    pub max_seconds: Option<f64>,
    /// Record every rule application.
    pub trace: bool,
}

impl Default for SatConfig {
    fn default() -> Self {
        SatConfig { max_nodes: 100_000, max_seconds: None, trace: false }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SatStats {
    pub states: usize,
    pub branches: usize,
    pub rule_applications: usize,
    pub max_nodes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatOutcome {
    pub satisfiable: bool,
    pub stats: SatStats,
    pub trace: Vec<String>,
}

pub fn check_satisfiable(k: &KnowledgeBase, config: &SatConfig) -> Result<SatOutcome, SatError> {
    tableau::run(k, config)
}

pub fn is_satisfiable(k: &KnowledgeBase) -> Result<bool, SatError> {
    Ok(check_satisfiable(k, &SatConfig::default())?.satisfiable)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::semantics::eval::tests::arb_concept;
    use crate::semantics::is_model;
    use crate::syntax::{closure, nnf, parse_kb, Axiom, Concept};
    use proptest::prelude::*;

    fn kb(text: &str) -> KnowledgeBase {
        parse_kb(text).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(is_satisfiable(&kb("A(a). A SubClassOf Bot.")), Ok(false));
        assert_eq!(is_satisfiable(&kb("A(a). r(a,b). not r(a,b).")), Ok(false));
        let cyclic = kb("A(a). A SubClassOf exists (r & s).B. B SubClassOf exists (r).A.");
        assert_eq!(is_satisfiable(&cyclic), Ok(true));
        // The smallest model is a single element carrying both concepts and
        // both loops; the two-element cycle is a model as well.
        let m = brute_force_model(&cyclic, 2).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(is_model(&m, &cyclic), Ok(true));
        let two = crate::semantics::Interpretation::new(["d", "e"])
            .unwrap()
            .with_concept("A", &["d"])
            .unwrap()
            .with_concept("B", &["e"])
            .unwrap()
            .with_role("r", &[("d", "e"), ("e", "d")])
            .unwrap()
            .with_role("s", &[("d", "e")])
            .unwrap()
            .with_name("a", "d")
            .unwrap();
        assert_eq!(is_model(&two, &cyclic), Ok(true));
        let trivial = brute_force_model(&kb("A(a). Top SubClassOf Top."), 1).unwrap();
        assert_eq!(trivial.len(), 1);
        assert!(brute_force_model(&kb("A(a). A SubClassOf Bot."), 3).is_none());
    }

    #[test]
    fn curated_unsat() {
        for text in [
            "A(a). A SubClassOf Bot.",
            "Top SubClassOf Bot. A(a).",
            "A(a). not A(a).",
            "r(a,b). not r(a,b).",
            "r(a,a). not r(a,a).",
            "A(a). A SubClassOf exists (r).B. B SubClassOf Bot.",
            "exists (r & s).A(a). forall (r).not A(a).",
            "A(a). A SubClassOf exists (r).A. A SubClassOf forall (r).B. B SubClassOf not A.",
            "(A or B)(a). A SubClassOf Bot. B SubClassOf Bot.",
            "r(a,b). A(b). exists (r).A SubClassOf Bot.",
        ] {
            assert_eq!(is_satisfiable(&kb(text)), Ok(false), "{text}");
        }
    }

    #[test]
    fn curated_sat() {
        for text in [
            "A(a). Top SubClassOf exists (r).Top.",
            "exists (r & s).A(a). forall (r).B(a).",
            "not r(a,b). exists (r).Top(a).",
            "A(a). A SubClassOf exists (r).(not A and exists (s).A).",
            "(A or B)(a). A SubClassOf Bot.",
        ] {
            let k = kb(text);
            assert_eq!(is_satisfiable(&k), Ok(true), "{text}");
            assert!(brute_force_model(&k, 6).is_some(), "{text}");
        }
    }

    #[test]
    fn node_cap_is_reported() {
        let k = kb("A(a). Top SubClassOf exists (r).A. Top SubClassOf exists (s).B.");
        let config = SatConfig { max_nodes: 2, ..SatConfig::default() };
        assert!(matches!(check_satisfiable(&k, &config), Err(SatError::ResourceLimitExceeded(_))));
    }

    #[test]
    fn traces_are_deterministic() {
        let k = kb("(A or B)(a). A SubClassOf exists (r).(B or C). B SubClassOf forall (r).not C.");
        let config = SatConfig { trace: true, ..SatConfig::default() };
        let first = check_satisfiable(&k, &config).unwrap();
        assert!(!first.trace.is_empty());
        for _ in 0..3 {
            assert_eq!(check_satisfiable(&k, &config).unwrap(), first);
        }
    }

    pub(crate) fn arb_kb() -> impl Strategy<Value = KnowledgeBase> {
        let ind = || prop::sample::select(vec!["a", "b"]);
        let role = || prop::sample::select(vec!["r", "s"]);
        let assertion = prop_oneof![
            3 => (arb_concept(), ind()).prop_map(|(c, a)| Axiom::ConceptAssertion(c, a.into())),
            1 => (role(), ind(), ind()).prop_map(|(r, a, b)| Axiom::RoleAssertion(r.into(), a.into(), b.into())),
            1 => (role(), ind(), ind()).prop_map(|(r, a, b)| Axiom::NegRoleAssertion(r.into(), a.into(), b.into())),
        ];
        let gci = (arb_concept(), arb_concept()).prop_map(|(l, r)| Axiom::Gci(l, r));
        (prop::collection::vec(assertion, 1..5), prop::collection::vec(gci, 0..4))
            .prop_map(|(a, t)| KnowledgeBase::new(a.into_iter().chain(t)).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn tableau_agrees_with_bounded_search(k in arb_kb()) {
            let sat = is_satisfiable(&k).unwrap();
            let model = brute_force_model(&k, 3);
            if let Some(m) = &model {
                prop_assert!(sat);
                prop_assert_eq!(is_model(m, &k), Ok(true));
            }
            if !sat {
                prop_assert!(model.is_none());
            }
        }

        #[test]
        fn closure_is_bounded(k in arb_kb()) {
            let mut seeds = std::collections::BTreeSet::new();
            for ax in k.axioms() {
                match ax {
                    Axiom::Gci(l, r) => {
                        seeds.extend(l.subconcepts());
                        seeds.extend(r.subconcepts());
                        seeds.extend(Concept::implies(l.clone(), r.clone()).subconcepts());
                    }
                    Axiom::ConceptAssertion(c, _) => seeds.extend(c.subconcepts()),
                    _ => {}
                }
            }
            prop_assert!(closure(&k).len() <= 2 * seeds.len().max(1));
            for ax in k.axioms() {
                if let Axiom::ConceptAssertion(c, _) = ax {
                    prop_assert!(closure(&k).contains(&nnf(c)));
                }
            }
        }
    }
}
