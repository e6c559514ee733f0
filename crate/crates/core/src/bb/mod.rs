//! Target-lower-bound branch-and-bound with orbital branching and
//! isomorphism pruning.
//!
//! The search is breadth-first and level-synchronous. Every node of a level
//! is classified (infeasible, solved leaf, pruned by its bound, or branched)
//! in parallel; children are then created in ascending parent id and swept
//! against the retained history for isomorphic duplicates. No upper bound is
//! searched for: the run proves `optimum ≥ target` or exhibits a feasible
//! solution below the target.

mod iso;
mod orbit;

use std::collections::HashMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dnn::{self, NbParams, NbStatus, DEFAULT_LAMBDA_SCALE};
use crate::error::{Error, Result};
use crate::instance::{BinarySolution, BqopInstance};
use crate::subproblem::{reduce, FixSets, LeafParams, LeafStatus, Subproblem};
use crate::symmetry::{self, Orbit};

pub use iso::{isomorphic, Fingerprint, DEFAULT_ISO_NODE_CAP};
pub use orbit::{branch, choose_orbit, orbit_score, Score};

/// Default search-node cap per pair in the orbit computation.
pub const DEFAULT_ORBIT_NODE_CAP: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BbParams {
    pub lambda_scale: f64,
    /// Fixed penalty parameter; when unset `lambda_scale / ‖C‖_F` per node.
    pub lambda: Option<f64>,
    pub nb: NbParams,
    pub leaf: LeafParams,
    pub iso_pruning: bool,
    pub iso_node_cap: u64,
    pub orbit_node_cap: u64,
    /// Worker threads for the bounding phase; 0 uses all cores.
    pub workers: usize,
    pub node_budget: Option<u64>,
    pub time_budget_secs: Option<f64>,
    /// Re-check every decision by enumeration (small instances only).
    pub audit: bool,
}

impl Default for BbParams {
    fn default() -> Self {
        Self {
            lambda_scale: DEFAULT_LAMBDA_SCALE,
            lambda: None,
            nb: NbParams::default(),
            leaf: LeafParams::default(),
            iso_pruning: true,
            iso_node_cap: DEFAULT_ISO_NODE_CAP,
            orbit_node_cap: DEFAULT_ORBIT_NODE_CAP,
            workers: 0,
            node_budget: None,
            time_budget_secs: None,
            audit: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: u64,
    pub depth: usize,
    pub parent: Option<u64>,
    pub fix: FixSets,
}

/// Bound summary of one node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInfo {
    pub a: f64,
    pub b: f64,
    pub lb_integer: i64,
    pub status: NbStatus,
    pub iterations: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub(crate) enum Evaluation {
    Infeasible,
    Leaf {
        value: i64,
        witness: BinarySolution,
    },
    Pruned(BoundInfo),
    Branch {
        bound: Option<BoundInfo>,
        orbit: Orbit,
    },
}

impl Evaluation {
    pub(crate) fn bound(&self) -> Option<&BoundInfo> {
        match self {
            Evaluation::Pruned(b) => Some(b),
            Evaluation::Branch { bound, .. } => bound.as_ref(),
            _ => None,
        }
    }
}

/// Classifies one node. The unfixed root is branched without bounding.
pub(crate) fn evaluate(
    inst: &BqopInstance,
    node: &Node,
    target: i64,
    params: &BbParams,
) -> Result<Evaluation> {
    let sub = reduce(inst, &node.fix);
    match sub.feasibility_status(&params.leaf) {
        LeafStatus::Infeasible => return Ok(Evaluation::Infeasible),
        LeafStatus::Solved { value, witness } => return Ok(Evaluation::Leaf { value, witness }),
        LeafStatus::Open => {}
    }
    let is_root = node.fix.i0.is_empty() && node.fix.i1.is_empty();
    let bound = if is_root {
        None
    } else {
        let info = bound_node(&sub, target, params)?;
        if target <= info.lb_integer {
            return Ok(Evaluation::Pruned(info));
        }
        Some(info)
    };
    let (orbits, _) = symmetry::orbit_partition(&sub.reduced, params.orbit_node_cap);
    let (k, _) = choose_orbit(&sub, &orbits)?;
    Ok(Evaluation::Branch {
        bound,
        orbit: orbits[k].clone(),
    })
}

pub(crate) fn bound_node(sub: &Subproblem, target: i64, params: &BbParams) -> Result<BoundInfo> {
    let lambda = match params.lambda {
        Some(l) => l,
        None => dnn::default_lambda(sub, params.lambda_scale)?,
    };
    let start = Instant::now();
    let prob = dnn::assemble(sub, lambda)?;
    let r = dnn::nb_bound(&prob, Some(target), &params.nb);
    Ok(BoundInfo {
        a: r.a,
        b: r.b,
        lb_integer: r.lb_integer,
        status: r.status,
        iterations: r.iterations,
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub(crate) fn evaluate_level(
    inst: &BqopInstance,
    nodes: &[Node],
    target: i64,
    params: &BbParams,
    pool: &rayon::ThreadPool,
) -> Result<Vec<Evaluation>> {
    pool.install(|| {
        nodes
            .par_iter()
            .map(|n| evaluate(inst, n, target, params))
            .collect()
    })
}

pub(crate) fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DepthStats {
    pub depth: usize,
    /// Nodes created at this depth that survived isomorphism pruning.
    pub generated: u64,
    /// Nodes branched at this depth.
    pub active: u64,
    pub pruned_bound: u64,
    pub pruned_iso: u64,
    pub infeasible: u64,
    pub leaves: u64,
    /// `generated / (generated + pruned_iso)`.
    pub reduction_rate: f64,
}

impl DepthStats {
    fn new(depth: usize, generated: u64, pruned_iso: u64) -> Self {
        let created = generated + pruned_iso;
        Self {
            depth,
            generated,
            pruned_iso,
            reduction_rate: if created == 0 {
                1.0
            } else {
                generated as f64 / created as f64
            },
            ..Default::default()
        }
    }
}

pub fn write_stats_csv<W: Write>(out: W, stats: &[DepthStats]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in stats {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Outcome {
    Proved,
    /// `witness` lists the 1-based indices set to one.
    Refuted {
        witness: Vec<usize>,
        value: i64,
    },
    Inconclusive {
        reason: String,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub checks: u64,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub wall_seconds: f64,
    pub bound_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub outcome: Outcome,
    pub target: i64,
    pub node_count: u64,
    pub bound_calls: u64,
    pub depth_stats: Vec<DepthStats>,
    /// Geometric mean of the per-depth reduction rates.
    pub reduction_geomean: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditReport>,
    pub timings: Timings,
}

impl Certificate {
    pub fn is_proved(&self) -> bool {
        matches!(self.outcome, Outcome::Proved)
    }

    pub fn witness(&self, n: usize) -> Option<BinarySolution> {
        match &self.outcome {
            Outcome::Refuted { witness, .. } => {
                let idx: Vec<usize> = witness.iter().map(|i| i - 1).collect();
                BinarySolution::from_support(n, &idx).ok()
            }
            _ => None,
        }
    }
}

/// Resumable search state: the unprocessed frontier, retained history and
/// the statistics so far.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BbState {
    pub target: i64,
    pub depth: usize,
    pub next_id: u64,
    pub frontier: Vec<Node>,
    pub history: Vec<(u64, FixSets)>,
    pub stats: Vec<DepthStats>,
    pub bound_calls: u64,
    pub audit: Option<AuditReport>,
}

impl BbState {
    pub fn new(inst: &BqopInstance, target: i64) -> Self {
        let root = Node {
            id: 0,
            depth: 0,
            parent: None,
            fix: FixSets::root(inst.n()),
        };
        Self {
            target,
            depth: 0,
            next_id: 1,
            history: vec![(0, root.fix.clone())],
            frontier: vec![root],
            stats: vec![DepthStats::new(0, 1, 0)],
            bound_calls: 0,
            audit: None,
        }
    }

    pub fn node_count(&self) -> u64 {
        self.stats.iter().map(|s| s.generated).sum()
    }
}

type History = HashMap<Fingerprint, Vec<(u64, FixSets)>>;

fn exhaustive(inst: &BqopInstance, fix: &FixSets) -> Option<i64> {
    reduce(inst, fix).exhaustive_optimum().map(|(v, _)| v)
}

fn audit_level(
    inst: &BqopInstance,
    target: i64,
    nodes: &[Node],
    evals: &[Evaluation],
    report: &mut AuditReport,
) {
    for (node, ev) in nodes.iter().zip(evals) {
        let opt = exhaustive(inst, &node.fix);
        if let (Some(b), Some(o)) = (ev.bound(), opt) {
            report.checks += 1;
            if b.lb_integer > o {
                report.failures.push(format!(
                    "node {}: bound {} above optimum {o}",
                    node.id, b.lb_integer
                ));
            }
        }
        match ev {
            Evaluation::Pruned(_) => {
                report.checks += 1;
                if opt.is_some_and(|o| o < target) {
                    report.failures.push(format!(
                        "node {}: pruned with optimum below target",
                        node.id
                    ));
                }
            }
            Evaluation::Branch { orbit, .. } => {
                report.checks += 1;
                let (z, o) = branch(&node.fix, orbit);
                let kids = [exhaustive(inst, &z), exhaustive(inst, &o)];
                let best = kids.iter().flatten().min().copied();
                if best != opt {
                    report.failures.push(format!(
                        "node {}: children optimum {best:?} differs from {opt:?}",
                        node.id
                    ));
                }
            }
            _ => {}
        }
    }
}

/// Proves `optimum ≥ target` or refutes it with a witness.
pub fn solve_target(inst: &BqopInstance, target: i64, params: &BbParams) -> Result<Certificate> {
    let (cert, _) = solve_from(inst, BbState::new(inst, target), params, &mut |_| Ok(()))?;
    Ok(cert)
}

/// Runs from a saved state. `on_level` sees the state after every completed
/// level (for checkpointing). The final state is returned alongside the
/// certificate; it is resumable when the outcome is inconclusive.
pub fn solve_from(
    inst: &BqopInstance,
    mut state: BbState,
    params: &BbParams,
    on_level: &mut dyn FnMut(&BbState) -> Result<()>,
) -> Result<(Certificate, BbState)> {
    let start = Instant::now();
    let pool = thread_pool(params.workers)?;
    let target = state.target;
    if params.audit && state.audit.is_none() {
        state.audit = Some(AuditReport::default());
    }
    let mut history: History = HashMap::new();
    if params.iso_pruning {
        for (id, fix) in &state.history {
            let fp = Fingerprint::of(&reduce(inst, fix));
            history.entry(fp).or_default().push((*id, fix.clone()));
        }
    }
    let mut bound_seconds = 0.0;
    let outcome = loop {
        if state.frontier.is_empty() {
            break Outcome::Proved;
        }
        if let Some(limit) = params.node_budget {
            if state.node_count() > limit {
                break Outcome::Inconclusive {
                    reason: format!("node budget of {limit} exceeded"),
                };
            }
        }
        if let Some(limit) = params.time_budget_secs {
            if start.elapsed().as_secs_f64() > limit {
                break Outcome::Inconclusive {
                    reason: format!("time budget of {limit} s exceeded"),
                };
            }
        }
        let evals = evaluate_level(inst, &state.frontier, target, params, &pool)?;
        if let Some(report) = state.audit.as_mut() {
            audit_level(inst, target, &state.frontier, &evals, report);
        }
        let refuting = evals.iter().find_map(|e| match e {
            Evaluation::Leaf { value, witness } if *value < target => Some((*value, witness)),
            _ => None,
        });
        if let Some((value, witness)) = refuting {
            break Outcome::Refuted {
                witness: witness.support().iter().map(|i| i + 1).collect(),
                value,
            };
        }

        let depth = state.depth;
        let mut children = Vec::new();
        {
            let row = &mut state.stats[depth];
            for (node, ev) in state.frontier.iter().zip(&evals) {
                if let Some(b) = ev.bound() {
                    bound_seconds += b.seconds;
                    state.bound_calls += 1;
                }
                match ev {
                    Evaluation::Infeasible => row.infeasible += 1,
                    Evaluation::Leaf { .. } => row.leaves += 1,
                    Evaluation::Pruned(_) => row.pruned_bound += 1,
                    Evaluation::Branch { orbit, .. } => {
                        row.active += 1;
                        let (zero, one) = branch(&node.fix, orbit);
                        for fix in [zero, one] {
                            children.push(Node {
                                id: state.next_id,
                                depth: depth + 1,
                                parent: Some(node.id),
                                fix,
                            });
                            state.next_id += 1;
                        }
                    }
                }
            }
        }

        let mut survivors = Vec::with_capacity(children.len());
        let mut pruned_iso = 0;
        for child in children {
            if !params.iso_pruning {
                survivors.push(child);
                continue;
            }
            let sub = reduce(inst, &child.fix);
            let fp = Fingerprint::of(&sub);
            let bucket = history.entry(fp).or_default();
            let twin = bucket.iter().find(|(_, fix)| {
                let other = reduce(inst, fix);
                iso::isomorphic_prechecked(&sub, &other, params.iso_node_cap).is_some()
            });
            if let Some((twin_id, twin_fix)) = twin {
                pruned_iso += 1;
                if let Some(report) = state.audit.as_mut() {
                    report.checks += 1;
                    let (a, b) = (exhaustive(inst, &child.fix), exhaustive(inst, twin_fix));
                    if a != b {
                        report.failures.push(format!(
                            "node {} merged into {twin_id} with optima {a:?} and {b:?}",
                            child.id
                        ));
                    }
                }
                continue;
            }
            bucket.push((child.id, child.fix.clone()));
            survivors.push(child);
        }

        if params.iso_pruning {
            if let Some(f1_min) = survivors.iter().map(|n| n.fix.i1.len()).min() {
                history.retain(|fp, _| fp.n_one >= f1_min);
            }
            let mut kept: Vec<(u64, FixSets)> = history.values().flatten().cloned().collect();
            kept.sort_by_key(|(id, _)| *id);
            state.history = kept;
        }
        state.stats.push(DepthStats::new(
            depth + 1,
            survivors.len() as u64,
            pruned_iso,
        ));
        state.frontier = survivors;
        state.depth += 1;
        on_level(&state)?;
    };

    while state
        .stats
        .last()
        .is_some_and(|s| s.generated == 0 && s.pruned_iso == 0)
    {
        state.stats.pop();
    }
    let rates: Vec<f64> = state
        .stats
        .iter()
        .skip(1)
        .map(|s| s.reduction_rate)
        .collect();
    let reduction_geomean = if rates.is_empty() {
        1.0
    } else {
        (rates.iter().map(|r| r.ln()).sum::<f64>() / rates.len() as f64).exp()
    };
    let cert = Certificate {
        outcome,
        target,
        node_count: state.node_count(),
        bound_calls: state.bound_calls,
        depth_stats: state.stats.clone(),
        reduction_geomean,
        audit: state.audit.clone(),
        timings: Timings {
            wall_seconds: start.elapsed().as_secs_f64(),
            bound_seconds,
        },
    };
    Ok((cert, state))
}
