//! Orbit selection and orbital branching.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subproblem::{FixSets, Subproblem};
use crate::symmetry::Orbit;

/// Exact rational orbit score `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Score {
    pub num: i128,
    pub den: i128,
}

impl Score {
    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn ceil(self) -> i128 {
        self.num.div_euclid(self.den) + i128::from(self.num.rem_euclid(self.den) != 0)
    }
}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Average objective of the child that fixes reduced position `r` to one:
/// the child's reduced quadratic form at the uniform point
/// `p = (b - 1) / (ℓ - 1)` plus the child's offset, where `b` is the
/// residual cardinality and `ℓ` the free count of `sub`.
///
/// With `C` the reduced matrix of `sub` and `S` its entry sum this is
/// `offset + C_rr + p² (S - C_rr)`.
pub fn orbit_score(sub: &Subproblem, r: usize) -> Score {
    let ell = sub.n_free() as i128;
    let c_rr = sub.reduced.get(r, r) as i128;
    let base = sub.offset as i128 + c_rr;
    if ell <= 1 {
        return Score { num: base, den: 1 };
    }
    let den = (ell - 1) * (ell - 1);
    let p = sub.residual_m as i128 - 1;
    Score {
        num: base * den + p * p * (sub.reduced.sum() - c_rr),
        den,
    }
}

/// Index into `orbits` of the orbit with the largest score; ties go to the
/// smaller representative. Orbits are given in reduced positions.
pub fn choose_orbit(sub: &Subproblem, orbits: &[Orbit]) -> Result<(usize, Score)> {
    if orbits.is_empty() {
        return Err(Error::NoOrbits);
    }
    let mut best: Option<(usize, Score)> = None;
    for (k, o) in orbits.iter().enumerate() {
        let s = orbit_score(sub, o.representative());
        let better = match best {
            None => true,
            Some((bk, bs)) => {
                s > bs || (s == bs && o.representative() < orbits[bk].representative())
            }
        };
        if better {
            best = Some((k, s));
        }
    }
    Ok(best.unwrap())
}

/// Fixings of the two children: every orbit member to zero, and the
/// representative to one. `orbit` is in reduced positions of `fix`.
pub fn branch(fix: &FixSets, orbit: &Orbit) -> (FixSets, FixSets) {
    let members: Vec<usize> = orbit.members().iter().map(|&r| fix.free[r]).collect();
    let mut zero = fix.clone();
    zero.free.retain(|i| !members.contains(i));
    zero.i0.extend_from_slice(&members);
    zero.i0.sort_unstable();
    let one = fix.fix(orbit.representative(), true);
    (zero, one)
}
