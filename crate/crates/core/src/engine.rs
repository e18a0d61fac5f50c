//! UCQ entailment: `K ⊨ q_1 ∨ … ∨ q_n` fails iff some choice of one
//! super-spoiler per disjunct, added to `K`, leaves a satisfiable KB.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::satcheck::{brute_force_model, brute_force_model_avoiding, check_satisfiable, SatConfig, SatError};
use crate::semantics::Interpretation;
use crate::spoiler::{enumerate_super_spoilers, SuperSpoiler};
use crate::syntax::{Axiom, KnowledgeBase, Ucq};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    Sat(#[from] SatError),
    #[error("could not start worker pool: {0}")]
    Threads(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Finite and unrestricted satisfiability coincide for ALC^∩; the mode
    /// is only recorded.
    Finite,
    #[default]
    Unrestricted,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "finite" => Ok(Mode::Finite),
            "unrestricted" => Ok(Mode::Unrestricted),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Finite => "finite",
            Mode::Unrestricted => "unrestricted",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EngineOptions {
    pub mode: Mode,
    /// Worker threads for selection checks; 0 uses the rayon default.
    pub threads: usize,
    /// Domain bound for countermodel extraction, if wanted.
    pub extract_countermodel: Option<usize>,
    pub sat: SatConfig,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { mode: Mode::Unrestricted, threads: 0, extract_countermodel: None, sat: SatConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reason {
    InconsistentKB,
    NoSpoilerSelectionSatisfiable,
    /// One super-spoiler per disjunct, in disjunct order.
    SpoilerSelectionSatisfiable(Vec<SuperSpoiler>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub entailed: bool,
    pub reason: Reason,
    pub countermodel: Option<Interpretation>,
    pub mode: Mode,
    /// Satisfiability checks of extended KBs that were run.
    pub selections_checked: usize,
}

impl Verdict {
    pub fn to_json_value(&self) -> Value {
        let (reason, selection) = match &self.reason {
            Reason::InconsistentKB => ("InconsistentKB", Value::Null),
            Reason::NoSpoilerSelectionSatisfiable => ("NoSpoilerSelectionSatisfiable", Value::Null),
            Reason::SpoilerSelectionSatisfiable(sel) => (
                "SpoilerSelectionSatisfiable",
                sel.iter()
                    .map(|s| s.axioms.iter().map(ToString::to_string).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
                    .into(),
            ),
        };
        json!({
            "entailed": self.entailed,
            "reason": reason,
            "selection": selection,
            "mode": self.mode,
            "countermodel": self.countermodel.as_ref().map(|m| serde_json::to_value(m.to_json_value()).expect("plain data")),
        })
    }
}

/// Cartesian product of the per-disjunct choices, last disjunct fastest.
struct Selections<'a> {
    choices: &'a [Vec<SuperSpoiler>],
    next: Option<Vec<usize>>,
}

impl Iterator for Selections<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for i in (0..succ.len()).rev() {
            succ[i] += 1;
            if succ[i] < self.choices[i].len() {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    }
}

fn selections(choices: &[Vec<SuperSpoiler>]) -> Selections<'_> {
    let start = (!choices.iter().any(Vec::is_empty)).then(|| vec![0; choices.len()]);
    Selections { choices, next: start }
}

/// Selections checked per parallel round.
const BATCH: usize = 64;

pub fn entails(k: &KnowledgeBase, u: &Ucq, opts: &EngineOptions) -> Result<Verdict, EngineError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| EngineError::Threads(e.to_string()))?;
    pool.install(|| entails_in_pool(k, u, opts))
}

fn entails_in_pool(k: &KnowledgeBase, u: &Ucq, opts: &EngineOptions) -> Result<Verdict, EngineError> {
    let verdict = |entailed, reason, checked| Verdict {
        entailed,
        reason,
        countermodel: None,
        mode: opts.mode,
        selections_checked: checked,
    };
    if !check_satisfiable(k, &opts.sat)?.satisfiable {
        return Ok(verdict(true, Reason::InconsistentKB, 0));
    }
    let names = k.individuals();
    let choices: Vec<Vec<SuperSpoiler>> =
        u.disjuncts().iter().map(|q| enumerate_super_spoilers(q, &names)).collect();
    let mut all = selections(&choices);
    let mut checked = 0;
    loop {
        let batch: Vec<Vec<usize>> = all.by_ref().take(BATCH).collect();
        if batch.is_empty() {
            return Ok(verdict(true, Reason::NoSpoilerSelectionSatisfiable, checked));
        }
        let results: Vec<Result<bool, SatError>> = batch
            .par_iter()
            .map(|sel| {
                let extra: BTreeSet<&Axiom> =
                    sel.iter().zip(&choices).flat_map(|(&i, c)| &c[i].axioms).collect();
                Ok(check_satisfiable(&k.extended(extra), &opts.sat)?.satisfiable)
            })
            .collect();
        // Scanning in order keeps the answer independent of which worker
        // finished first.
        for (sel, result) in batch.iter().zip(results) {
            checked += 1;
            if result? {
                let chosen = sel.iter().zip(&choices).map(|(&i, c)| c[i].clone()).collect();
                let mut v = verdict(false, Reason::SpoilerSelectionSatisfiable(chosen), checked);
                if let Some(bound) = opts.extract_countermodel {
                    v.countermodel = brute_force_model_avoiding(k, u.disjuncts(), bound);
                }
                return Ok(v);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BruteVerdict {
    NotEntailed(Interpretation),
    NoCountermodelUpTo(usize),
}

/// Searches models of `k` with at most `max_size` elements for one that
/// matches no disjunct. Never claims entailment.
pub fn brute_force_entails(k: &KnowledgeBase, u: &Ucq, max_size: usize) -> BruteVerdict {
    match brute_force_model_avoiding(k, u.disjuncts(), max_size) {
        Some(m) => BruteVerdict::NotEntailed(m),
        None => BruteVerdict::NoCountermodelUpTo(max_size),
    }
}

/// A model of `k` and the selection, if one exists within `max_size`.
pub fn selection_model(k: &KnowledgeBase, selection: &[SuperSpoiler], max_size: usize) -> Option<Interpretation> {
    brute_force_model(&k.extended(selection.iter().flat_map(|s| &s.axioms)), max_size)
}
