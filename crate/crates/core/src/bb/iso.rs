//! Isomorphism tests between subproblems.

use serde::{Deserialize, Serialize};

use crate::subproblem::Subproblem;
use crate::symmetry;

/// Default search-node cap per isomorphism test.
pub const DEFAULT_ISO_NODE_CAP: u64 = 1_000_000;

/// Permutation-invariant summary; equal fingerprints are necessary for
/// isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fingerprint {
    pub n_zero: usize,
    pub n_one: usize,
    pub offset: i64,
    pub diag_sum: i128,
    pub total: i128,
    pub max_diag: i64,
    pub min_entry: i64,
    pub diag: Vec<i64>,
    pub row_sums: Vec<i64>,
}

impl Fingerprint {
    pub fn of(sub: &Subproblem) -> Self {
        let c = &sub.reduced;
        let n = c.dim();
        let mut diag: Vec<i64> = (0..n).map(|i| c.get(i, i)).collect();
        let mut row_sums: Vec<i64> = (0..n).map(|i| c.row(i).iter().sum()).collect();
        diag.sort_unstable();
        row_sums.sort_unstable();
        Self {
            n_zero: sub.fix.i0.len(),
            n_one: sub.fix.i1.len(),
            offset: sub.offset,
            diag_sum: c.trace(),
            total: c.sum(),
            max_diag: diag.last().copied().unwrap_or(0),
            min_entry: c.as_slice().iter().copied().min().unwrap_or(0),
            diag,
            row_sums,
        }
    }
}

/// `Some(phi)` with `reduced_b[phi(i)][phi(j)] = reduced_a[i][j]` when the
/// two subproblems have equal fixing sizes and offsets and permutation-
/// similar reduced matrices. Exhausting `node_cap` yields `None`.
pub fn isomorphic(a: &Subproblem, b: &Subproblem, node_cap: u64) -> Option<Vec<usize>> {
    if Fingerprint::of(a) != Fingerprint::of(b) {
        return None;
    }
    isomorphic_prechecked(a, b, node_cap)
}

/// As [`isomorphic`] for callers that already compared fingerprints.
pub(crate) fn isomorphic_prechecked(
    a: &Subproblem,
    b: &Subproblem,
    node_cap: u64,
) -> Option<Vec<usize>> {
    if a.reduced == b.reduced {
        return Some((0..a.n_free()).collect());
    }
    symmetry::find_isomorphism(&a.reduced, &b.reduced, node_cap)
        .ok()
        .flatten()
}
