//! Reduced subproblems obtained by fixing variables to 0 or 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{BinarySolution, BqopInstance};
use crate::matrix::IntMatrix;
use crate::symmetry::{self, PermutationGroup};

/// Default largest free-variable count solved by enumeration.
pub const DEFAULT_LEAF_THRESHOLD: usize = 20;
/// Default largest `min(b, |F| - b)` solved by enumeration.
pub const DEFAULT_LEAF_DEPTH: usize = 3;

/// Partition of `{0, …, n-1}` into zero-fixed, one-fixed and free indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FixSets {
    pub i0: Vec<usize>,
    pub i1: Vec<usize>,
    pub free: Vec<usize>,
}

impl FixSets {
    pub fn root(n: usize) -> Self {
        Self {
            i0: Vec::new(),
            i1: Vec::new(),
            free: (0..n).collect(),
        }
    }

    pub fn new(n: usize, mut i0: Vec<usize>, mut i1: Vec<usize>) -> Result<Self> {
        i0.sort_unstable();
        i1.sort_unstable();
        let mut state = vec![0u8; n];
        for (set, tag) in [(&i0, 1u8), (&i1, 2u8)] {
            for &i in set.iter() {
                if i >= n {
                    return Err(Error::InvalidArgument(format!(
                        "index {} out of range",
                        i + 1
                    )));
                }
                if state[i] != 0 {
                    return Err(Error::InvalidArgument(format!(
                        "index {} fixed twice",
                        i + 1
                    )));
                }
                state[i] = tag;
            }
        }
        let free = (0..n).filter(|&i| state[i] == 0).collect();
        Ok(Self { i0, i1, free })
    }

    pub fn n(&self) -> usize {
        self.i0.len() + self.i1.len() + self.free.len()
    }

    /// Copy with the free index at reduced position `r` moved to `I0` or
    /// `I1`.
    pub fn fix(&self, r: usize, value: bool) -> Self {
        let idx = self.free[r];
        let mut out = self.clone();
        out.free.remove(r);
        let target = if value { &mut out.i1 } else { &mut out.i0 };
        let pos = target.partition_point(|&i| i < idx);
        target.insert(pos, idx);
        out
    }
}

/// `BQOP(I0, I1)`: minimise `yᵀ C y + offset` over binary `y` on the free
/// indices with `|y| = residual_m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subproblem {
    pub fix: FixSets,
    pub reduced: IntMatrix,
    pub offset: i64,
    pub residual_m: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeafStatus {
    Infeasible,
    /// Optimal value and an optimal full-length witness.
    Solved {
        value: i64,
        witness: BinarySolution,
    },
    Open,
}

/// Leaf-solving parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafParams {
    pub threshold: usize,
    pub depth: usize,
}

impl Default for LeafParams {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_LEAF_THRESHOLD,
            depth: DEFAULT_LEAF_DEPTH,
        }
    }
}

pub fn reduce(inst: &BqopInstance, fix: &FixSets) -> Subproblem {
    let b = inst.b();
    let mut reduced = b.submatrix(&fix.free);
    for (r, &i) in fix.free.iter().enumerate() {
        let row = b.row(i);
        let extra: i64 = fix.i1.iter().map(|&k| row[k]).sum();
        reduced.set(r, r, reduced.get(r, r) + 2 * extra);
    }
    Subproblem {
        fix: fix.clone(),
        reduced,
        offset: b.support_form(&fix.i1),
        residual_m: inst.m() as i64 - fix.i1.len() as i64,
    }
}

impl Subproblem {
    pub fn n_free(&self) -> usize {
        self.fix.free.len()
    }

    /// Fixes the free variable at reduced position `r` and reduces again,
    /// working from this subproblem's own data.
    pub fn child(&self, r: usize, value: bool) -> Subproblem {
        let fix = self.fix.fix(r, value);
        let keep: Vec<usize> = (0..self.n_free()).filter(|&k| k != r).collect();
        let mut reduced = self.reduced.submatrix(&keep);
        let (mut offset, mut residual_m) = (self.offset, self.residual_m);
        if value {
            let row = self.reduced.row(r);
            for (a, &k) in keep.iter().enumerate() {
                reduced.set(a, a, reduced.get(a, a) + 2 * row[k]);
            }
            offset += row[r];
            residual_m -= 1;
        }
        Subproblem {
            fix,
            reduced,
            offset,
            residual_m,
        }
    }

    /// Value of the full solution that agrees with the fixing and takes the
    /// free part from `y`.
    pub fn lift(&self, y: &[u8]) -> BinarySolution {
        let mut bits = vec![0u8; self.fix.n()];
        for &i in &self.fix.i1 {
            bits[i] = 1;
        }
        for (r, &i) in self.fix.free.iter().enumerate() {
            bits[i] = y[r];
        }
        BinarySolution::new(bits).expect("0/1 bits")
    }

    pub fn free_value(&self, support: &[usize]) -> i64 {
        self.reduced.support_form(support) + self.offset
    }

    pub fn feasibility_status(&self, leaf: &LeafParams) -> LeafStatus {
        let f = self.n_free() as i64;
        let b = self.residual_m;
        if b < 0 || b > f {
            return LeafStatus::Infeasible;
        }
        let small = (f as usize) <= leaf.threshold && (b.min(f - b) as usize) <= leaf.depth;
        if b == 0 || b == f || small || self.reduced.is_zero() {
            let (value, support) = self.enumerate_best(b as usize);
            let mut y = vec![0u8; f as usize];
            for &r in &support {
                y[r] = 1;
            }
            return LeafStatus::Solved {
                value,
                witness: self.lift(&y),
            };
        }
        LeafStatus::Open
    }

    /// Exhaustive minimum over all supports of size `k`, ties broken by the
    /// lexicographically first support.
    fn enumerate_best(&self, k: usize) -> (i64, Vec<usize>) {
        let f = self.n_free();
        if self.reduced.is_zero() || k == 0 || k == f {
            let s: Vec<usize> = (0..k).collect();
            return (self.free_value(&s), s);
        }
        let mut comb: Vec<usize> = (0..k).collect();
        let mut best = (i64::MAX, Vec::new());
        loop {
            let v = self.free_value(&comb);
            if v < best.0 {
                best = (v, comb.clone());
            }
            let mut i = k;
            while i > 0 && comb[i - 1] == f - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                return best;
            }
            comb[i - 1] += 1;
            for j in i..k {
                comb[j] = comb[j - 1] + 1;
            }
        }
    }

    /// Exact optimum by enumeration, `None` when infeasible.
    pub fn exhaustive_optimum(&self) -> Option<(i64, BinarySolution)> {
        let f = self.n_free() as i64;
        if self.residual_m < 0 || self.residual_m > f {
            return None;
        }
        let (value, support) = self.enumerate_best(self.residual_m as usize);
        let mut y = vec![0u8; f as usize];
        for &r in &support {
            y[r] = 1;
        }
        Some((value, self.lift(&y)))
    }

    /// Automorphism group of the reduced matrix, acting on reduced
    /// positions `0..|F|`.
    pub fn subgroup(&self, cap: usize) -> Result<PermutationGroup> {
        symmetry::automorphisms(&self.reduced, cap)
    }

    /// Debug dump: fix sets (1-based), offset and residual cardinality.
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Dump {
            i0: Vec<usize>,
            i1: Vec<usize>,
            free: Vec<usize>,
            offset: i64,
            residual_m: i64,
        }
        let one = |v: &[usize]| v.iter().map(|i| i + 1).collect();
        Ok(serde_json::to_string(&Dump {
            i0: one(&self.fix.i0),
            i1: one(&self.fix.i1),
            free: one(&self.fix.free),
            offset: self.offset,
            residual_m: self.residual_m,
        })?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BqopInstance {
        let b = IntMatrix::from_fn(6, |i, j| {
            if i == j {
                0
            } else {
                ((i * 7 + j * 7 + i * j) % 11) as i64
            }
        });
        BqopInstance::new(b, 3).unwrap()
    }

    #[test]
    fn root_reduction_is_identity() {
        let inst = small();
        let s = reduce(&inst, &FixSets::root(6));
        assert_eq!(&s.reduced, inst.b());
        assert_eq!((s.offset, s.residual_m), (0, 3));
    }

    #[test]
    fn child_matches_direct_reduction() {
        let inst = small();
        let root = reduce(&inst, &FixSets::root(6));
        let c = root.child(2, true).child(0, false).child(1, true);
        let direct = reduce(&inst, &FixSets::new(6, vec![0], vec![2, 3]).unwrap());
        assert_eq!(c, direct);
    }

    #[test]
    fn overfixed_to_zero_is_infeasible() {
        let inst = small();
        let s = reduce(&inst, &FixSets::new(6, (0..6).collect(), vec![]).unwrap());
        assert_eq!(
            s.feasibility_status(&LeafParams::default()),
            LeafStatus::Infeasible
        );
    }

    #[test]
    fn residual_zero_is_solved_at_offset() {
        let inst = small();
        let s = reduce(&inst, &FixSets::new(6, vec![], vec![1, 4, 5]).unwrap());
        match s.feasibility_status(&LeafParams::default()) {
            LeafStatus::Solved { value, witness } => {
                assert_eq!(value, s.offset);
                assert_eq!(witness.support(), vec![1, 4, 5]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fixing_twice_rejected() {
        assert!(FixSets::new(4, vec![1], vec![1]).is_err());
    }
}
