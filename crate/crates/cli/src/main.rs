//! `dlq`: command-line access to every stage of the entailment pipeline.
//!
//! Exit codes: 0 computed (and positive, for commands with a verdict),
//! 1 negative verdict, 2 input error, 3 resource limit.

use std::collections::BTreeSet;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use dlq_core::engine::{entails, EngineError, EngineOptions, Mode, Reason};
use dlq_core::forkrew::{fork_rewritings, maximal_fork_rewriting};
use dlq_core::rollup::match_concept;
use dlq_core::satcheck::{brute_force_model, check_satisfiable, SatConfig, SatError};
use dlq_core::semantics::{check_axiom, find_matches, Interpretation};
use dlq_core::splitting::enumerate_splittings;
use dlq_core::spoiler::enumerate_super_spoilers;
use dlq_core::syntax::{parse_cq, parse_kb, parse_ucq, ConjunctiveQuery, KnowledgeBase};
use dlq_core::unravel::{forward_unravel, DEFAULT_NODE_CAP};

#[derive(Parser)]
#[command(name = "dlq", version, about = "Conjunctive query entailment over ALC with role conjunction")]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Limits {
    /// Satisfiability semantics; both give the same answers for this logic.
    #[arg(long, default_value = "unrestricted")]
    mode: Mode,
    /// Cap on tableau nodes per satisfiability check.
    #[arg(long, default_value_t = 100_000)]
    max_nodes: usize,
    /// Wall-clock cap per satisfiability check.
    #[arg(long)]
    max_seconds: Option<f64>,
}

impl Limits {
    fn sat_config(&self) -> SatConfig {
        SatConfig { max_nodes: self.max_nodes, max_seconds: self.max_seconds, trace: false }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide KB satisfiability (exit 1 when unsatisfiable).
    Sat {
        kb: PathBuf,
        #[command(flatten)]
        limits: Limits,
        /// Also search for a model with at most this many elements.
        #[arg(long)]
        max_domain: Option<usize>,
    },
    /// Decide UCQ entailment (exit 0 entailed, 1 not entailed).
    Entails {
        kb: PathBuf,
        query: PathBuf,
        #[command(flatten)]
        limits: Limits,
        /// Attach a countermodel with at most this many elements, if found.
        #[arg(long)]
        max_domain: Option<usize>,
        /// Worker threads; 0 picks the number of CPUs.
        #[arg(long, env = "DLQ_THREADS", default_value_t = 0)]
        threads: usize,
    },
    /// Print the concept describing matches of a tree-shaped CQ.
    Rollup { query: PathBuf },
    /// Print the fork rewritings of a CQ.
    Forkrew {
        query: PathBuf,
        /// Only the maximal rewriting.
        #[arg(long)]
        maximal: bool,
    },
    /// Enumerate the splittings of a CQ over the given names.
    Splittings {
        query: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        names: Vec<String>,
    },
    /// Enumerate the super-spoilers of a CQ over the given names.
    Spoilers {
        query: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        names: Vec<String>,
    },
    /// Forward-unravel an interpretation from its named elements.
    Unravel {
        model: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        names: Vec<String>,
        #[arg(long)]
        depth: usize,
        /// Keep only words along role edges.
        #[arg(long)]
        reachable_only: bool,
        #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
        max_nodes: usize,
    },
    /// Check that an interpretation is a model of a KB (exit 1 if not).
    Modelcheck { model: PathBuf, kb: PathBuf },
    /// List the matches of a CQ in an interpretation (exit 1 if none).
    Match { model: PathBuf, query: PathBuf },
}

enum Failure {
    Input(String),
    Limit(String),
}

impl From<SatError> for Failure {
    fn from(e: SatError) -> Self {
        Failure::Limit(e.to_string())
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Sat(e) => e.into(),
            EngineError::Threads(m) => Failure::Input(m),
        }
    }
}

fn input<E: Display>(path: &Path) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Input(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(input(path))
}

fn read_kb(path: &Path) -> Result<KnowledgeBase, Failure> {
    parse_kb(&read(path)?).map_err(input(path))
}

fn read_cq(path: &Path) -> Result<ConjunctiveQuery, Failure> {
    parse_cq(&read(path)?).map_err(input(path))
}

fn read_model(path: &Path) -> Result<Interpretation, Failure> {
    Interpretation::from_json(&read(path)?).map_err(input(path))
}

/// Text or JSON output plus the exit code.
struct Output {
    text: String,
    json: Value,
    code: u8,
}

fn ok(text: String, json: Value) -> Output {
    Output { text, json, code: 0 }
}

fn model_json(m: &Option<Interpretation>) -> Value {
    m.as_ref().map_or(Value::Null, |m| serde_json::to_value(m.to_json_value()).expect("plain data"))
}

fn run(command: Command) -> Result<Output, Failure> {
    match command {
        Command::Sat { kb, limits, max_domain } => {
            let k = read_kb(&kb)?;
            let outcome = check_satisfiable(&k, &limits.sat_config())?;
            let model = match max_domain {
                Some(n) if outcome.satisfiable => brute_force_model(&k, n),
                _ => None,
            };
            let mut text = if outcome.satisfiable { "satisfiable\n" } else { "unsatisfiable\n" }.to_string();
            if let Some(m) = &model {
                text.push_str(&m.to_string());
            }
            let json = json!({
                "satisfiable": outcome.satisfiable,
                "mode": limits.mode,
                "stats": outcome.stats,
                "model": model_json(&model),
            });
            Ok(Output { text, json, code: if outcome.satisfiable { 0 } else { 1 } })
        }
        Command::Entails { kb, query, limits, max_domain, threads } => {
            let k = read_kb(&kb)?;
            let u = parse_ucq(&read(&query)?).map_err(input(&query))?;
            let opts = EngineOptions {
                mode: limits.mode,
                threads,
                extract_countermodel: max_domain,
                sat: limits.sat_config(),
            };
            let v = entails(&k, &u, &opts)?;
            let mut text = format!("{}\n", if v.entailed { "entailed" } else { "not entailed" });
            match &v.reason {
                Reason::InconsistentKB => text.push_str("reason: inconsistent KB\n"),
                Reason::NoSpoilerSelectionSatisfiable => text.push_str("reason: no spoiler selection is satisfiable\n"),
                Reason::SpoilerSelectionSatisfiable(sel) => {
                    text.push_str("reason: satisfiable spoiler selection\n");
                    for (i, s) in sel.iter().enumerate() {
                        text.push_str(&format!("# disjunct {}\n{}", i + 1, s.to_kb_text()));
                    }
                }
            }
            if let Some(m) = &v.countermodel {
                text.push_str("countermodel:\n");
                text.push_str(&m.to_string());
            }
            Ok(Output { text, json: v.to_json_value(), code: if v.entailed { 0 } else { 1 } })
        }
        Command::Rollup { query } => {
            let c = match_concept(&read_cq(&query)?).map_err(input(&query))?;
            Ok(ok(format!("{c}\n"), json!({ "concept": c.to_string() })))
        }
        Command::Forkrew { query, maximal } => {
            let q = read_cq(&query)?;
            let qs: Vec<ConjunctiveQuery> =
                if maximal { vec![maximal_fork_rewriting(&q)] } else { fork_rewritings(&q).into_iter().collect() };
            let text = qs.iter().map(|q| format!("{q}\n")).collect();
            let json = if maximal { json!(qs[0].to_string()) } else { json!(qs.iter().map(ToString::to_string).collect::<Vec<_>>()) };
            Ok(ok(text, json))
        }
        Command::Splittings { query, names } => {
            let q = read_cq(&query)?;
            let names: BTreeSet<String> = names.into_iter().collect();
            let all: Vec<Value> = enumerate_splittings(&q, &names).map(|s| s.to_json_value()).collect();
            let text = all.iter().map(|s| format!("{s}\n")).collect();
            Ok(ok(text, Value::Array(all)))
        }
        Command::Spoilers { query, names } => {
            let q = read_cq(&query)?;
            let names: BTreeSet<String> = names.into_iter().collect();
            let all = enumerate_super_spoilers(&q, &names);
            let text = all
                .iter()
                .enumerate()
                .map(|(i, s)| format!("# super-spoiler {}\n{}", i + 1, s.to_kb_text()))
                .collect();
            let json = all
                .iter()
                .map(|s| s.axioms.iter().map(ToString::to_string).collect::<Vec<_>>())
                .collect::<Vec<_>>();
            Ok(ok(text, json!(json)))
        }
        Command::Unravel { model, names, depth, reachable_only, max_nodes } => {
            let i = read_model(&model)?;
            let names: BTreeSet<String> = names.into_iter().collect();
            let u = forward_unravel(&i, &names, depth, reachable_only, max_nodes).map_err(|e| match e {
                dlq_core::unravel::UnravelError::SizeLimitExceeded(_) => Failure::Limit(e.to_string()),
                other => Failure::Input(other.to_string()),
            })?;
            let json = serde_json::to_value(u.interpretation.to_json_value()).expect("plain data");
            Ok(ok(u.interpretation.to_string(), json))
        }
        Command::Modelcheck { model, kb } => {
            let i = read_model(&model)?;
            let k = read_kb(&kb)?;
            let mut violated = Vec::new();
            for ax in k.axioms() {
                if !check_axiom(&i, ax).map_err(input(&model))? {
                    violated.push(ax.to_string());
                }
            }
            let is_model = violated.is_empty();
            let mut text = if is_model { "model\n" } else { "not a model\n" }.to_string();
            for v in &violated {
                text.push_str(&format!("violated: {v}\n"));
            }
            let json = json!({ "model": is_model, "violated": violated });
            Ok(Output { text, json, code: if is_model { 0 } else { 1 } })
        }
        Command::Match { model, query } => {
            let i = read_model(&model)?;
            let q = read_cq(&query)?;
            let matches: Vec<Value> = find_matches(&i, &q)
                .map(|m| {
                    let map: serde_json::Map<String, Value> =
                        m.assignment.iter().map(|(v, d)| (v.to_string(), json!(i.label(*d)))).collect();
                    Value::Object(map)
                })
                .collect();
            let text = matches
                .iter()
                .map(|m| {
                    let parts: Vec<String> = m
                        .as_object()
                        .unwrap()
                        .iter()
                        .map(|(v, d)| format!("{v} -> {}", d.as_str().unwrap()))
                        .collect();
                    format!("{}\n", parts.join(", "))
                })
                .collect();
            let code = if matches.is_empty() { 1 } else { 0 };
            Ok(Output { text, json: json!({ "matches": matches }), code })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("plain data"));
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Limit(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
