//! Lagrangian doubly nonnegative relaxation of a subproblem and its
//! validated lower bounds.
//!
//! The lifted variable is `w = (u, v, s)` with `u, v` of length `ℓ` (the
//! free-variable count) and a scalar `s`. For `b = residual_m` the
//! Lagrangian is
//!
//! ```text
//! L(u, v, s, λ) = uᵀCu + λ (Σ (u_j + v_j - s)² + Σ u_j v_j + (Σ u_j - b s)²)
//! ```
//!
//! and `Qλ` is the symmetric matrix with `wᵀ Qλ w = L`. The objective is
//! normalized first: `C` is replaced by `C / ‖C‖_F`, so `λ` weighs the
//! penalty against an objective of unit norm. Bounds are reported in the
//! original units.

mod apg;
pub(crate) mod eig;
mod nb;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::subproblem::Subproblem;

pub use apg::{cone_distance, cone_distance_from, ApgParams, ConeDistanceResult};
pub use nb::{
    nb_bound, nb_bound_observed, write_trace_csv, NbParams, NbResult, NbStatus, NbTraceRow,
    TraceFactor,
};

/// Default numerator of the penalty parameter `λ = scale / ‖C‖_F`.
pub const DEFAULT_LAMBDA_SCALE: f64 = 1e8;

#[derive(Clone, Debug)]
pub struct DnnProblem {
    pub ell: usize,
    pub b: i64,
    pub lambda: f64,
    pub offset: i64,
    /// Objective normalization `‖C‖_F` (1 for a zero matrix).
    pub scale: f64,
    pub q_obj: DMatrix<f64>,
    pub q_pen: DMatrix<f64>,
    /// Normalized objective of the first-`b` completion plus one.
    pub initial_upper: f64,
}

pub fn assemble(sub: &Subproblem, lambda: f64) -> Result<DnnProblem> {
    let ell = sub.n_free();
    if ell == 0 {
        return Err(Error::NoFreeVariables);
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let b = sub.residual_m;
    let n = 2 * ell + 1;
    let s = 2 * ell;
    let norm = sub.reduced.frobenius_norm();
    let scale = if norm > 0.0 { norm } else { 1.0 };
    let mut q_obj = DMatrix::zeros(n, n);
    for i in 0..ell {
        for j in 0..ell {
            q_obj[(i, j)] = sub.reduced.get(i, j) as f64 / scale;
        }
    }
    let bf = b as f64;
    let mut q_pen = DMatrix::zeros(n, n);
    for i in 0..ell {
        for j in 0..ell {
            q_pen[(i, j)] = 1.0;
        }
        q_pen[(i, i)] = 2.0;
        q_pen[(ell + i, ell + i)] = 1.0;
        q_pen[(i, ell + i)] = 1.5;
        q_pen[(ell + i, i)] = 1.5;
        q_pen[(i, s)] = -(1.0 + bf);
        q_pen[(s, i)] = -(1.0 + bf);
        q_pen[(ell + i, s)] = -1.0;
        q_pen[(s, ell + i)] = -1.0;
    }
    q_pen[(s, s)] = ell as f64 + bf * bf;
    Ok(DnnProblem {
        ell,
        b,
        lambda,
        offset: sub.offset,
        scale,
        q_obj,
        q_pen,
        initial_upper: initial_upper(sub) / scale,
    })
}

/// `scale / ‖C‖_F` for the reduced matrix `C`. Since the objective is
/// normalized to unit norm, the penalty weight in original units is
/// `scale` itself.
pub fn default_lambda(sub: &Subproblem, scale: f64) -> Result<f64> {
    let norm = sub.reduced.frobenius_norm();
    if norm == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    Ok(scale / norm)
}

/// Reduced objective of the completion that sets the `residual_m`
/// smallest-index free variables to one, plus one.
pub fn initial_upper(sub: &Subproblem) -> f64 {
    let k = sub.residual_m.clamp(0, sub.n_free() as i64) as usize;
    let support: Vec<usize> = (0..k).collect();
    sub.reduced.support_form(&support) as f64 + 1.0
}

impl DnnProblem {
    pub fn order(&self) -> usize {
        2 * self.ell + 1
    }

    pub fn q_lambda(&self) -> DMatrix<f64> {
        &self.q_obj + &self.q_pen * self.lambda
    }

    /// Selector with a single unit entry in the last diagonal position.
    pub fn h(&self) -> DMatrix<f64> {
        let n = self.order();
        let mut h = DMatrix::zeros(n, n);
        h[(n - 1, n - 1)] = 1.0;
        h
    }

    /// `Qλ - y H`.
    pub fn shifted(&self, q_lambda: &DMatrix<f64>, y: f64) -> DMatrix<f64> {
        let mut m = q_lambda.clone();
        let c = self.order() - 1;
        m[(c, c)] -= y;
        m
    }

    /// `wᵀ Qλ w` for `w = (u, v, s)`, in normalized units.
    pub fn lifted_form(&self, u: &[f64], v: &[f64], s: f64) -> f64 {
        let mut w: Vec<f64> = u.to_vec();
        w.extend_from_slice(v);
        w.push(s);
        let w = nalgebra::DVector::from_vec(w);
        (w.transpose() * self.q_lambda() * &w)[(0, 0)]
    }

    /// Direct evaluation of `L(u, v, s, λ)` with the normalized objective.
    pub fn lagrangian(&self, u: &[f64], v: &[f64], s: f64) -> f64 {
        let ell = self.ell;
        let mut obj = 0.0;
        for i in 0..ell {
            for j in 0..ell {
                obj += u[i] * self.q_obj[(i, j)] * u[j];
            }
        }
        let mut pen = 0.0;
        for j in 0..ell {
            pen += (u[j] + v[j] - s).powi(2) + u[j] * v[j];
        }
        let lin: f64 = u.iter().sum::<f64>() - self.b as f64 * s;
        obj + self.lambda * (pen + lin * lin)
    }
}
