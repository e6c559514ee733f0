//! Tree-size estimation by full expansion up to a width threshold followed
//! by random-subtree sampling.
//!
//! Levels are expanded completely while they hold fewer than
//! `width_threshold` nodes. From the first wide level `ℓ` on, only `s_k`
//! nodes drawn uniformly without replacement are bounded, and the children
//! of the `r_k` branched ones form the next (partial) level. The estimate is
//! `Σ_{k<ℓ} t_k + Σ_{k≥ℓ} t̂_k` with `t̂_ℓ = t_ℓ` and
//! `t̂_{k+1} = (2 r_k / s_k) t̂_k`.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bb::{branch, evaluate_level, thread_pool, BbParams, BbState, Evaluation, Node};
use crate::error::Result;
use crate::instance::BqopInstance;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstParams {
    pub width_threshold: usize,
    /// Sample size used once a level has at least `sample_trigger` nodes.
    pub sample_size: usize,
    pub sample_trigger: usize,
    /// Isomorphism pruning is always off here.
    pub bb: BbParams,
    pub max_depth: Option<usize>,
}

impl Default for EstParams {
    fn default() -> Self {
        Self {
            width_threshold: 1000,
            sample_size: 100,
            sample_trigger: 500,
            bb: BbParams::default(),
            max_depth: None,
        }
    }
}

impl EstParams {
    /// `s_k` for a level of `width` nodes.
    pub fn sample_count(&self, width: usize) -> usize {
        if width >= self.sample_trigger {
            self.sample_size.min(width)
        } else {
            width
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthEstimate {
    pub depth: usize,
    /// `t_k` in the exact phase, `t̄_k` in the sampled phase.
    pub width: u64,
    pub sampled: u64,
    pub branched: u64,
    pub estimated: f64,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub target: i64,
    pub seed: u64,
    pub depths: Vec<DepthEstimate>,
    pub estimated_total_nodes: f64,
    /// Nodes actually classified during the run.
    pub evaluated_nodes: u64,
    pub mean_bound_seconds: f64,
    pub estimated_seconds: f64,
    /// Set when `max_depth` stopped the run before the sample died out.
    pub truncated: bool,
}

pub fn estimate(
    inst: &BqopInstance,
    target: i64,
    params: &EstParams,
    seed: u64,
) -> Result<EstimationReport> {
    let bb = BbParams {
        iso_pruning: false,
        ..params.bb.clone()
    };
    let pool = thread_pool(bb.workers)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut frontier = BbState::new(inst, target).frontier;
    let mut next_id = 1u64;
    let mut depths: Vec<DepthEstimate> = Vec::new();
    let mut sampling = false;
    let mut t_hat = 0.0f64;
    let (mut bound_calls, mut bound_seconds, mut evaluated) = (0u64, 0.0f64, 0u64);
    let mut truncated = false;
    let mut depth = 0usize;
    while !frontier.is_empty() {
        if params.max_depth.is_some_and(|d| depth > d) {
            truncated = true;
            break;
        }
        let width = frontier.len();
        if !sampling && width >= params.width_threshold {
            sampling = true;
            t_hat = width as f64;
        }
        let chosen: Vec<Node> = if sampling {
            let s = params.sample_count(width);
            frontier.shuffle(&mut rng);
            let mut pick: Vec<Node> = frontier.drain(..s).collect();
            pick.sort_by_key(|n| n.id);
            pick
        } else {
            std::mem::take(&mut frontier)
        };
        let evals = evaluate_level(inst, &chosen, target, &bb, &pool)?;
        evaluated += chosen.len() as u64;
        let mut children = Vec::new();
        for (node, ev) in chosen.iter().zip(&evals) {
            if let Some(b) = ev.bound() {
                bound_calls += 1;
                bound_seconds += b.seconds;
            }
            if let Evaluation::Branch { orbit, .. } = ev {
                let (zero, one) = branch(&node.fix, orbit);
                for fix in [zero, one] {
                    children.push(Node {
                        id: next_id,
                        depth: depth + 1,
                        parent: Some(node.id),
                        fix,
                    });
                    next_id += 1;
                }
            }
        }
        let r = (children.len() / 2) as u64;
        let estimated = if sampling { t_hat } else { width as f64 };
        depths.push(DepthEstimate {
            depth,
            width: width as u64,
            sampled: chosen.len() as u64,
            branched: r,
            estimated,
            exact: !sampling,
        });
        if sampling {
            t_hat *= 2.0 * r as f64 / chosen.len() as f64;
        }
        frontier = children;
        depth += 1;
    }
    let estimated_total_nodes: f64 = depths.iter().map(|d| d.estimated).sum();
    let mean_bound_seconds = if bound_calls == 0 {
        0.0
    } else {
        bound_seconds / bound_calls as f64
    };
    Ok(EstimationReport {
        target,
        seed,
        depths,
        estimated_total_nodes,
        evaluated_nodes: evaluated,
        mean_bound_seconds,
        estimated_seconds: estimated_total_nodes * mean_bound_seconds,
        truncated,
    })
}

/// Min, mean and max of the total-node estimates across reports.
pub fn summarize(reports: &[EstimationReport]) -> Option<(f64, f64, f64)> {
    let totals: Vec<f64> = reports.iter().map(|r| r.estimated_total_nodes).collect();
    if totals.is_empty() {
        return None;
    }
    let min = totals.iter().copied().fold(f64::INFINITY, f64::min);
    let max = totals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some((min, totals.iter().sum::<f64>() / totals.len() as f64, max))
}

pub fn write_depth_csv<W: Write>(out: W, report: &EstimationReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in &report.depths {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
