//! Tableau for ALC^∩ knowledge bases.
//!
//! Labels are sets of closure concepts in NNF; inclusions are internalised
//! and put into every label. The named individuals are expanded together,
//! since ABox edges carry `∀` constraints between them. Every `∃R.C` gets a
//! fresh successor whose initial label is `C`, the fillers of the
//! applicable `∀`, and the inclusions. Without inverse roles nothing flows
//! back up an edge, so a generated node is decided from its initial label
//! alone, depth first:
//!
//! - `⊓` saturates, the first open `⊔` branches, and each `∃` of the
//!   complete label recurses into its successor;
//! - a node whose complete label is contained in that of a generated
//!   ancestor is blocked and counts as satisfiable;
//! - unsatisfiable initial labels are cached, and so are satisfiable ones
//!   that did not rely on blocking by an ancestor above them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use fixedbitset::FixedBitSet;

use super::{SatConfig, SatError, SatOutcome, SatStats};
use crate::syntax::{closure, internalise, nnf, Axiom, KnowledgeBase, NnfConcept, RoleConjunction};

#[derive(Clone, Debug)]
enum Kind {
    Other,
    Bottom,
    Literal(usize),
    And(Vec<usize>),
    Or(Vec<usize>),
    Exists(Vec<usize>, usize),
    Forall(Vec<usize>, usize),
}

/// The closure with concepts and roles replaced by indices.
struct Compiled {
    concepts: Vec<NnfConcept>,
    kinds: Vec<Kind>,
    /// Internalised inclusions.
    universal: Vec<usize>,
}

impl Compiled {
    fn new(k: &KnowledgeBase, roles: &BTreeMap<String, usize>) -> Compiled {
        let concepts: Vec<NnfConcept> = closure(k).into_iter().collect();
        let index = |c: &NnfConcept| concepts.binary_search(c).expect("closed under subconcepts");
        let role_ids = |rc: &RoleConjunction| rc.roles().map(|r| roles[r]).collect();
        let kinds = concepts
            .iter()
            .map(|c| match c {
                NnfConcept::Top => Kind::Other,
                NnfConcept::Bottom => Kind::Bottom,
                NnfConcept::Atom(_) | NnfConcept::NegAtom(_) => Kind::Literal(index(&c.complement())),
                NnfConcept::And(cs) => Kind::And(cs.iter().map(index).collect()),
                NnfConcept::Or(cs) => Kind::Or(cs.iter().map(index).collect()),
                NnfConcept::Exists(rc, c) => Kind::Exists(role_ids(rc), index(c)),
                NnfConcept::Forall(rc, c) => Kind::Forall(role_ids(rc), index(c)),
            })
            .collect();
        let universal = k
            .tbox()
            .iter()
            .filter_map(|ax| match ax {
                Axiom::Gci(l, r) => Some(index(&internalise(l, r))),
                _ => None,
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Compiled { concepts, kinds, universal }
    }

    fn index(&self, c: &NnfConcept) -> usize {
        self.concepts.binary_search(c).expect("closed under subconcepts")
    }
}

type Label = FixedBitSet;

struct Run<'a> {
    cl: &'a Compiled,
    config: &'a SatConfig,
    start: Instant,
    stats: SatStats,
    trace: Vec<String>,
    unsat: HashMap<Label, ()>,
    sat: HashMap<Label, ()>,
    /// Complete labels of the generated nodes on the current path.
    path: Vec<Label>,
    nodes: usize,
}

/// Outcome for a generated node: satisfiable or not, and the shallowest
/// path position of a blocker the answer relied on.
struct Verdict {
    sat: bool,
    blocker: usize,
}

impl Run<'_> {
    fn log(&mut self, event: impl FnOnce(&Compiled) -> String) {
        self.stats.rule_applications += 1;
        if self.config.trace {
            self.trace.push(event(self.cl));
        }
    }

    fn check_limits(&self) -> Result<(), SatError> {
        if self.nodes > self.config.max_nodes {
            return Err(SatError::ResourceLimitExceeded(format!(
                "more than {} tableau nodes",
                self.config.max_nodes
            )));
        }
        if let Some(limit) = self.config.max_seconds {
            if self.start.elapsed().as_secs_f64() > limit {
                return Err(SatError::ResourceLimitExceeded(format!("more than {limit} seconds")));
            }
        }
        Ok(())
    }

    fn empty(&self) -> Label {
        FixedBitSet::with_capacity(self.cl.concepts.len())
    }

    /// Adds `c`; false on a clash.
    fn add(&self, label: &mut Label, c: usize) -> bool {
        if label.put(c) {
            return true;
        }
        match self.cl.kinds[c] {
            Kind::Bottom => false,
            Kind::Literal(neg) => !label.contains(neg),
            _ => true,
        }
    }

    /// Saturates a label under `⊓`; false on a clash.
    fn saturate(&self, label: &mut Label) -> bool {
        let mut todo: Vec<usize> = label.ones().collect();
        for c in &todo {
            if !self.add(&mut label.clone(), *c) {
                return false;
            }
        }
        while let Some(c) = todo.pop() {
            if let Kind::And(parts) = &self.cl.kinds[c] {
                for &p in parts {
                    if !label.contains(p) {
                        if !self.add(label, p) {
                            return false;
                        }
                        todo.push(p);
                    }
                }
            }
        }
        true
    }

    fn open_or(&self, label: &Label) -> Option<Vec<usize>> {
        label.ones().find_map(|c| match &self.cl.kinds[c] {
            Kind::Or(options) if !options.iter().any(|o| label.contains(*o)) => Some(options.clone()),
            _ => None,
        })
    }

    /// Initial label of the successor for `∃R.C` below a node with
    /// complete label `label`, and the extra edges it receives.
    fn successor(&self, label: &Label, roles: &[usize], filler: usize) -> Option<Label> {
        let mut out = self.empty();
        let mut ok = self.add(&mut out, filler);
        for c in label.ones() {
            if let Kind::Forall(rs, d) = &self.cl.kinds[c] {
                if rs.iter().all(|r| roles.contains(r)) {
                    ok &= self.add(&mut out, *d);
                }
            }
        }
        for &u in &self.cl.universal {
            ok &= self.add(&mut out, u);
        }
        ok.then_some(out)
    }

    fn existentials(&self, label: &Label) -> Vec<(usize, Vec<usize>, usize)> {
        label
            .ones()
            .filter_map(|c| match &self.cl.kinds[c] {
                Kind::Exists(rs, f) => Some((c, rs.clone(), *f)),
                _ => None,
            })
            .collect()
    }

    /// Decides a generated node from its initial label.
    fn generated(&mut self, initial: Label) -> Result<Verdict, SatError> {
        let depth = self.path.len();
        if self.unsat.contains_key(&initial) {
            self.log(|_| "cached unsat".into());
            return Ok(Verdict { sat: false, blocker: usize::MAX });
        }
        if self.sat.contains_key(&initial) {
            self.log(|_| "cached sat".into());
            return Ok(Verdict { sat: true, blocker: usize::MAX });
        }
        self.nodes += 1;
        self.stats.max_nodes = self.stats.max_nodes.max(self.nodes);
        self.check_limits()?;
        let mut branches = vec![initial.clone()];
        let mut result = Verdict { sat: false, blocker: usize::MAX };
        'branches: while let Some(mut label) = branches.pop() {
            self.stats.states += 1;
            if !self.saturate(&mut label) {
                continue;
            }
            if let Some(options) = self.open_or(&label) {
                self.stats.branches += 1;
                for &o in options.iter().rev() {
                    let mut alt = label.clone();
                    if self.add(&mut alt, o) {
                        branches.push(alt);
                    }
                }
                continue;
            }
            if let Some(pos) = self.path.iter().position(|anc| label.is_subset(anc)) {
                self.log(|_| format!("blocked at depth {depth} by depth {pos}"));
                result = Verdict { sat: true, blocker: pos };
                break;
            }
            self.path.push(label.clone());
            let mut blocker = usize::MAX;
            for (c, roles, filler) in self.existentials(&label) {
                self.log(|cl| format!("exists at depth {depth}: {}", cl.concepts[c]));
                let child = match self.successor(&label, &roles, filler) {
                    Some(child) => self.generated(child)?,
                    None => Verdict { sat: false, blocker: usize::MAX },
                };
                if !child.sat {
                    self.path.pop();
                    continue 'branches;
                }
                blocker = blocker.min(child.blocker);
            }
            self.path.pop();
            result = Verdict { sat: true, blocker };
            break;
        }
        self.nodes -= 1;
        if !result.sat {
            self.unsat.insert(initial, ());
        } else if result.blocker >= depth {
            self.sat.insert(initial, ());
            result.blocker = usize::MAX;
        }
        Ok(result)
    }
}

pub(super) fn run(k: &KnowledgeBase, config: &SatConfig) -> Result<SatOutcome, SatError> {
    let roles: BTreeMap<String, usize> =
        k.role_names().into_iter().enumerate().map(|(i, r)| (r, i)).collect();
    let cl = Compiled::new(k, &roles);
    let mut run = Run {
        cl: &cl,
        config,
        start: Instant::now(),
        stats: SatStats::default(),
        trace: Vec::new(),
        unsat: HashMap::new(),
        sat: HashMap::new(),
        path: Vec::new(),
        nodes: 0,
    };
    let satisfiable = named_part(&mut run, k, &roles)?;
    Ok(SatOutcome { satisfiable, stats: run.stats, trace: run.trace })
}

/// Expands the named individuals jointly, then checks every successor they
/// need. Distinct individuals get distinct nodes: in ALC^∩ a model that
/// identifies two of them can be split by copying the shared element.
fn named_part(run: &mut Run, k: &KnowledgeBase, roles: &BTreeMap<String, usize>) -> Result<bool, SatError> {
    let individuals: Vec<String> = k.individuals().into_iter().collect();
    let ind = |a: &str| individuals.binary_search_by(|x| x.as_str().cmp(a)).unwrap();
    let n = individuals.len();
    let mut edges: BTreeMap<(usize, usize), BTreeSet<usize>> = BTreeMap::new();
    let mut forbidden = BTreeSet::new();
    let mut labels: Vec<Label> = vec![run.empty(); n];
    let mut ok = true;
    for ax in k.abox() {
        match ax {
            Axiom::ConceptAssertion(c, a) => {
                let c = run.cl.index(&nnf(c));
                ok &= run.add(&mut labels[ind(a)], c);
            }
            Axiom::RoleAssertion(r, a, b) => {
                edges.entry((ind(a), ind(b))).or_default().insert(roles[r]);
            }
            Axiom::NegRoleAssertion(r, a, b) => {
                forbidden.insert((roles[r], ind(a), ind(b)));
            }
            Axiom::Gci(..) => unreachable!("inclusions live in the TBox"),
        }
    }
    for label in labels.iter_mut() {
        for &u in &run.cl.universal {
            ok &= run.add(label, u);
        }
    }
    // Only ABox edges join named nodes, so negative assertions clash here
    // or never.
    let role_clash = edges
        .iter()
        .any(|((x, y), rs)| rs.iter().any(|r| forbidden.contains(&(*r, *x, *y))));
    if !ok || role_clash {
        return Ok(false);
    }

    let mut stack = vec![labels];
    'states: while let Some(mut labels) = stack.pop() {
        run.stats.states += 1;
        run.check_limits()?;
        // ⊓ within each node and ∀ along ABox edges, to a fixpoint.
        loop {
            for label in labels.iter_mut() {
                if !run.saturate(label) {
                    continue 'states;
                }
            }
            let mut changed = false;
            for ((x, y), rs) in &edges {
                let pushed: Vec<usize> = labels[*x]
                    .ones()
                    .filter_map(|c| match &run.cl.kinds[c] {
                        Kind::Forall(need, d) if need.iter().all(|r| rs.contains(r)) => Some(*d),
                        _ => None,
                    })
                    .collect();
                for d in pushed {
                    if !labels[*y].contains(d) {
                        changed = true;
                        run.log(|cl| format!("forall {} -> {}: {}", individuals[*x], individuals[*y], cl.concepts[d]));
                        if !run.add(&mut labels[*y], d) {
                            continue 'states;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if let Some((x, options)) = (0..n).find_map(|x| run.open_or(&labels[x]).map(|o| (x, o))) {
            run.stats.branches += 1;
            for &o in options.iter().rev() {
                let mut alt = labels.clone();
                run.log(|cl| format!("or {}: {}", individuals[x], cl.concepts[o]));
                if run.add(&mut alt[x], o) {
                    stack.push(alt);
                }
            }
            continue;
        }
        for x in 0..n {
            for (c, rs, filler) in run.existentials(&labels[x]) {
                run.log(|cl| format!("exists {}: {}", individuals[x], cl.concepts[c]));
                let sat = match run.successor(&labels[x], &rs, filler) {
                    Some(child) => run.generated(child)?.sat,
                    None => false,
                };
                if !sat {
                    continue 'states;
                }
            }
        }
        return Ok(true);
    }
    Ok(false)
}
