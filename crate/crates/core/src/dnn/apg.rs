//! Distance from a symmetric matrix to the sum of the PSD and the
//! entrywise-nonnegative cones, by accelerated projected gradient.
//!
//! For `M` the problem is `min_{Y2 ≥ 0} ½‖Π₋(M - Y2)‖²` with `Π₋` the
//! projection onto the negative semidefinite cone. The gradient is
//! `-Π₋(M - Y2)` and is 1-Lipschitz, so a unit step gives
//! `Y2⁺ = max(0, Z + Π₋(M - Z))`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::eig::{split, sym_eigen};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ApgParams {
    pub max_iter: usize,
    /// Stop when the relative change of the objective drops below this.
    pub obj_rel_tol: f64,
    /// Stop when the step `‖Y2⁺ - Z‖` drops below this times `max(1, ‖M‖)`.
    pub step_tol: f64,
    /// Stop when the distance drops below this times `max(1, ‖M‖)`.
    pub zero_tol: f64,
}

impl Default for ApgParams {
    fn default() -> Self {
        Self {
            max_iter: 20_000,
            obj_rel_tol: 1e-9,
            step_tol: 1e-12,
            zero_tol: 1e-13,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConeDistanceResult {
    /// `‖M - Y1 - Y2‖`.
    pub g: f64,
    /// `-R_cc / g` with `R = M - Y1 - Y2` and `c` the last index.
    pub gprime: f64,
    pub y1: DMatrix<f64>,
    pub y2: DMatrix<f64>,
    /// Smallest eigenvalue of `M - Y2` before projection.
    pub min_eig: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn cone_distance(m: &DMatrix<f64>, params: &ApgParams) -> ConeDistanceResult {
    cone_distance_from(m, None, params)
}

/// As [`cone_distance`], starting from `start` (clamped at zero) when
/// given.
pub fn cone_distance_from(
    m: &DMatrix<f64>,
    start: Option<&DMatrix<f64>>,
    params: &ApgParams,
) -> ConeDistanceResult {
    let n = m.nrows();
    let scale = m.norm().max(1.0);
    let mut y = match start {
        Some(s) => s.map(|v| v.max(0.0)),
        None => DMatrix::zeros(n, n),
    };
    let mut z = y.clone();
    let mut t = 1.0f64;
    let mut prev_obj = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iter {
        iterations += 1;
        let s = m - &z;
        let (_, neg) = split(&s, &sym_eigen(&s));
        let obj = 0.5 * neg.norm_squared();
        let y_new = (&z + &neg).map(|v| v.max(0.0));
        let step = (&y_new - &z).norm();
        let restart = (&z - &y_new).dot(&(&y_new - &y)) > 0.0;
        if restart {
            t = 1.0;
            z = y_new.clone();
        } else {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            z = &y_new + (&y_new - &y) * ((t - 1.0) / t_next);
            t = t_next;
        }
        y = y_new;
        let small_change =
            prev_obj.is_finite() && (prev_obj - obj).abs() <= params.obj_rel_tol * prev_obj;
        if step <= params.step_tol * scale
            || (2.0 * obj).sqrt() <= params.zero_tol * scale
            || small_change
        {
            converged = true;
            break;
        }
        prev_obj = obj;
    }
    let s = m - &y;
    let e = sym_eigen(&s);
    let min_eig = if n == 0 { 0.0 } else { e.values[0] };
    let (y1, r) = split(&s, &e);
    let g = r.norm();
    let gprime = if g > 0.0 { -r[(n - 1, n - 1)] / g } else { 0.0 };
    ConeDistanceResult {
        g,
        gprime,
        y1,
        y2: y,
        min_eig,
        iterations,
        converged,
    }
}
