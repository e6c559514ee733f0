//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symbb_core::instance::{BinarySolution, BqopInstance};
use symbb_core::matrix::IntMatrix;

/// Minimum of `xᵀBx` over all `m`-subsets, by plain enumeration.
pub fn brute_force(inst: &BqopInstance) -> (i64, BinarySolution) {
    let n = inst.n();
    let m = inst.m();
    let b = inst.b();
    let mut best: Option<(i64, Vec<usize>)> = None;
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        let mut v = 0i64;
        for &i in &idx {
            for &j in &idx {
                v += b.get(i, j);
            }
        }
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, idx.clone()));
        }
        // next combination in lexicographic order
        let mut k = m;
        while k > 0 && idx[k - 1] == n - m + k - 1 {
            k -= 1;
        }
        if k == 0 {
            break;
        }
        idx[k - 1] += 1;
        for t in k..m {
            idx[t] = idx[t - 1] + 1;
        }
    }
    let (v, s) = best.unwrap();
    (v, BinarySolution::from_support(n, &s).unwrap())
}

/// All permutations of `0..n` preserving `b`, by brute force over `n!`.
pub fn brute_automorphisms(b: &IntMatrix) -> Vec<Vec<usize>> {
    let n = b.dim();
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    permute(b, &mut perm, 0, &mut out);
    out.sort();
    out
}

fn permute(b: &IntMatrix, p: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    // prune as soon as a fixed prefix is inconsistent
    for i in 0..k {
        if b.get(p[i], p[k.saturating_sub(1)]) != b.get(i, k.saturating_sub(1)) {
            return;
        }
    }
    if k == p.len() {
        out.push(p.clone());
        return;
    }
    for t in k..p.len() {
        p.swap(k, t);
        permute(b, p, k + 1, out);
        p.swap(k, t);
    }
}

/// Block construction: `B_ij = W[blk i][blk j]` off the diagonal, so any
/// permutation inside a block is a symmetry.
pub fn block_instance(rng: &mut ChaCha8Rng, n: usize, m: usize) -> BqopInstance {
    let k = rng.random_range(2..=3.min(n / 2));
    let blk: Vec<usize> = (0..n).map(|i| i * k / n).collect();
    let mut w = vec![vec![0i64; k]; k];
    for a in 0..k {
        for c in a..k {
            let v = rng.random_range(0..10);
            w[a][c] = v;
            w[c][a] = v;
        }
    }
    let b = IntMatrix::from_fn(n, |i, j| if i == j { 0 } else { w[blk[i]][blk[j]] });
    BqopInstance::new(b, m).unwrap()
}

/// Circulant construction: `B_ij` depends on the cyclic distance only.
pub fn cyclic_instance(rng: &mut ChaCha8Rng, n: usize, m: usize) -> BqopInstance {
    let w: Vec<i64> = (0..=n / 2).map(|_| rng.random_range(0..12)).collect();
    let b = IntMatrix::from_fn(n, |i, j| {
        if i == j {
            return 0;
        }
        let d = (i as i64 - j as i64).rem_euclid(n as i64) as usize;
        w[d.min(n - d)]
    });
    BqopInstance::new(b, m).unwrap()
}

/// Random instance with planted symmetry: block or cyclic, `n ∈ [6, 14]`,
/// `m ∈ [2, n − 2]`.
pub fn planted(seed: u64) -> BqopInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(6..=14);
    let m = rng.random_range(2..=n - 2);
    if rng.random_bool(0.5) {
        block_instance(&mut rng, n, m)
    } else {
        cyclic_instance(&mut rng, n, m)
    }
}

fn sym_eig(m: &DMatrix<f64>) -> (nalgebra::DVector<f64>, DMatrix<f64>) {
    let e = nalgebra::SymmetricEigen::new(m.clone());
    (e.eigenvalues, e.eigenvectors)
}

fn proj_psd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (vals, vecs) = sym_eig(m);
    let d = DMatrix::from_diagonal(&vals.map(|v| v.max(0.0)));
    let p = &vecs * d * vecs.transpose();
    (&p + p.transpose()) * 0.5
}

/// Distance from `m` to `PSD + nonnegative`, computed by Moreau
/// decomposition as `‖Π_DNN(−m)‖` with Dykstra's alternating projections
/// onto the PSD and nonnegative cones.
pub fn cone_distance_oracle(m: &DMatrix<f64>) -> f64 {
    let target = -m;
    let n = m.nrows();
    let mut x = target.clone();
    let mut p = DMatrix::<f64>::zeros(n, n);
    let mut q = DMatrix::<f64>::zeros(n, n);
    for _ in 0..200_000 {
        let y = proj_psd(&(&x + &p));
        p = &x + &p - &y;
        let x_next = (&y + &q).map(|v| v.max(0.0));
        q = &y + &q - &x_next;
        let change = (&x_next - &x).norm();
        x = x_next;
        if change < 1e-13 {
            break;
        }
    }
    x.norm()
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    (&a + a.transpose()) * 0.5
}

/// `(apg, oracle)` distance pairs on `count` random symmetric matrices of
/// order at most 7.
pub fn dykstra_pairs(count: usize, seed: u64) -> Vec<(f64, f64)> {
    use symbb_core::dnn::{cone_distance, ApgParams};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=7);
            let shift = rng.random_range(-1.5..0.5);
            let m = random_symmetric(&mut rng, n) + DMatrix::identity(n, n) * shift;
            (
                cone_distance(&m, &ApgParams::default()).g,
                cone_distance_oracle(&m),
            )
        })
        .collect()
}

fn ring(n: usize, m: usize) -> BqopInstance {
    let b = IntMatrix::from_fn(n, |i, j| {
        let d = (i as i64 - j as i64).rem_euclid(n as i64) as usize;
        [0, 5, 3, 2, 1, 1, 1][d.min(n - d).min(6)]
    });
    BqopInstance::new(b, m).unwrap()
}

/// `(g', central difference)` at `count` points with positive distance on
/// Lag-DNN problems of small ring instances.
pub fn derivative_pairs(count: usize, seed: u64) -> Vec<(f64, f64)> {
    use symbb_core::dnn::{self, cone_distance, ApgParams};
    use symbb_core::subproblem::{reduce, FixSets};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = ApgParams {
        max_iter: 50_000,
        obj_rel_tol: 1e-15,
        step_tol: 1e-15,
        zero_tol: 1e-15,
    };
    let mut out = Vec::new();
    for _ in 0..100 * count {
        if out.len() == count {
            break;
        }
        let n = rng.random_range(5..=8);
        let m = rng.random_range(2..=n - 2);
        let inst = ring(n, m);
        let k = rng.random_range(0..n);
        let sub = reduce(&inst, &FixSets::new(n, vec![], vec![k]).unwrap());
        let lambda = dnn::default_lambda(&sub, 1e2).unwrap();
        let prob = dnn::assemble(&sub, lambda).unwrap();
        let q = prob.q_lambda();
        let y = prob.initial_upper * rng.random_range(1.0..3.0);
        let g = |y: f64| cone_distance(&prob.shifted(&q, y), &params);
        let mid = g(y);
        if mid.g < 1e-3 {
            continue;
        }
        let h = 1e-4 * y.abs().max(1.0);
        out.push((mid.gprime, (g(y + h).g - g(y - h).g) / (2.0 * h)));
    }
    out
}
