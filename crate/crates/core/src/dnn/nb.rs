//! Newton-bracketing on the cone-distance function `g(y)`.
//!
//! `g(y)` is the distance from `Qλ - yH` to the dual cone. It vanishes up to
//! the relaxation value `y*` and is convex and increasing beyond it, so
//! Newton steps from above approach `y*` from the right. Every iterate
//! also yields a validated lower bound from the smallest eigenvalue of
//! `Qλ - yH - Y2`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::apg::{cone_distance_from, ApgParams};
use super::DnnProblem;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NbStatus {
    Pruned,
    Branchable,
    Converged,
    IterLimit,
}

/// Multiplier applied to the negative eigenvalue in the lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceFactor {
    /// `ℓ + 1`: the trace of every lifted feasible binary point.
    FreeCount,
    /// `2ℓ + 1`: the order of the lifted matrix.
    LiftedOrder,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NbParams {
    pub max_iter: usize,
    pub gap_tol: f64,
    pub dprime_floor: f64,
    /// `g` counts as positive above this times `max(1, ‖M‖)`.
    pub g_pos_tol: f64,
    pub trace_factor: TraceFactor,
    /// Relative floating-point allowance subtracted from the eigenvalue.
    pub eig_safety: f64,
    pub apg: ApgParams,
}

impl Default for NbParams {
    fn default() -> Self {
        Self {
            max_iter: 100,
            gap_tol: 1e-5,
            dprime_floor: 1e-12,
            g_pos_tol: 1e-12,
            trace_factor: TraceFactor::FreeCount,
            eig_safety: 1e-13,
            apg: ApgParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
/// One bracketing iteration, in original units.
pub struct NbTraceRow {
    pub iter: usize,
    pub y: f64,
    pub a: f64,
    pub b: f64,
    pub g: f64,
    pub gprime: f64,
    pub min_eig: f64,
    pub apg_iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NbResult {
    pub status: NbStatus,
    /// Validated lower bound on the reduced objective (offset excluded),
    /// in original units.
    pub a: f64,
    pub b: f64,
    pub iterations: usize,
    /// `⌈a + offset⌉`, a lower bound on the subproblem optimum.
    pub lb_integer: i64,
    pub apg_iterations: usize,
    pub trace: Vec<NbTraceRow>,
}

/// Runs the bracketing iteration. With a target, stops as soon as the
/// target is reached by the lower bound (`Pruned`) or shown unreachable by
/// the upper bracket (`Branchable`).
pub fn nb_bound(prob: &DnnProblem, target: Option<i64>, params: &NbParams) -> NbResult {
    nb_bound_observed(prob, target, params, &mut |_| {})
}

/// As [`nb_bound`], reporting every iteration to `observe`.
pub fn nb_bound_observed(
    prob: &DnnProblem,
    target: Option<i64>,
    params: &NbParams,
    observe: &mut dyn FnMut(&NbTraceRow),
) -> NbResult {
    let q = prob.q_lambda();
    let offset = prob.offset as f64;
    let unit = prob.scale;
    let factor = match params.trace_factor {
        TraceFactor::FreeCount => prob.ell as f64 + 1.0,
        TraceFactor::LiftedOrder => prob.order() as f64,
    };
    let mut y = prob.initial_upper;
    let mut a = f64::NEG_INFINITY;
    let mut b = prob.initial_upper;
    let mut y2 = None;
    let mut trace = Vec::new();
    let mut apg_iterations = 0;
    let mut status = NbStatus::IterLimit;
    let lb_of = |a: f64| {
        let v = (a * unit + offset).ceil();
        if v.is_finite() {
            v as i64
        } else {
            i64::MIN
        }
    };
    for iter in 1..=params.max_iter {
        let m = prob.shifted(&q, y);
        let r = cone_distance_from(&m, y2.as_ref(), &params.apg);
        apg_iterations += r.iterations;
        let scale = m.norm().max(1.0);
        let slack = params.eig_safety * (scale + r.y2.norm());
        let a_k = y + factor * (r.min_eig - slack).min(0.0);
        a = a.max(a_k);
        if r.converged && r.g > params.g_pos_tol * scale {
            b = b.min(y);
        }
        trace.push(NbTraceRow {
            iter,
            y: y * unit,
            a: a * unit,
            b: b * unit,
            g: r.g * unit,
            gprime: r.gprime,
            min_eig: r.min_eig * unit,
            apg_iterations: r.iterations,
        });
        observe(trace.last().unwrap());
        let (g, gprime) = (r.g, r.gprime);
        y2 = Some(r.y2);
        if let Some(t) = target {
            if t <= lb_of(a) {
                status = NbStatus::Pruned;
                break;
            }
            if b * unit + offset < t as f64 {
                status = NbStatus::Branchable;
                break;
            }
        }
        if b - a <= params.gap_tol * b.abs().max(1.0 / unit)
            || lb_of(a) as f64 >= (b * unit + offset).ceil()
        {
            status = NbStatus::Converged;
            break;
        }
        let newton = if g > 0.0 && gprime > params.dprime_floor {
            y - g / gprime
        } else {
            f64::NAN
        };
        let next = if newton > a && newton < b {
            newton
        } else if y - a <= params.gap_tol * y.abs().max(1.0 / unit) {
            // Newton undershoots the validated bound: y is already at the
            // relaxation value up to the tolerance.
            status = NbStatus::Converged;
            break;
        } else {
            0.5 * (a + b.min(y))
        };
        if next == y {
            break;
        }
        y = next;
    }
    NbResult {
        status,
        a: a * unit,
        b: b * unit,
        iterations: trace.len(),
        lb_integer: lb_of(a),
        apg_iterations,
        trace,
    }
}

pub fn write_trace_csv<W: Write>(out: W, rows: &[NbTraceRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
