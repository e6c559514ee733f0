//! QAPLIB instances, the rank-one-flow reduction to a cardinality-constrained
//! binary quadratic problem, objective evaluation, the penalty QUBO and the
//! random feasible-solution sampler.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// A QAP with flow matrix `flow` and distance matrix `distance`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QapInstance {
    pub flow: IntMatrix,
    pub distance: IntMatrix,
}

impl QapInstance {
    pub fn new(flow: IntMatrix, distance: IntMatrix) -> Result<Self> {
        if flow.dim() != distance.dim() {
            return Err(Error::Dimension(format!(
                "flow is {0}x{0}, distance is {1}x{1}",
                flow.dim(),
                distance.dim()
            )));
        }
        if flow.dim() == 0 {
            return Err(Error::Dimension("empty instance".into()));
        }
        if let Some((row, col)) = flow.asymmetry() {
            return Err(Error::Asymmetric {
                which: "A",
                row,
                col,
            });
        }
        if let Some((row, col)) = distance.asymmetry() {
            return Err(Error::Asymmetric {
                which: "B",
                row,
                col,
            });
        }
        Ok(Self { flow, distance })
    }

    pub fn n(&self) -> usize {
        self.flow.dim()
    }

    /// `sum_{i,k} a_ik b_{pi(i) pi(k)}` for a 0-based permutation `pi`.
    pub fn value(&self, pi: &[usize]) -> Result<i64> {
        let n = self.n();
        if pi.len() != n {
            return Err(Error::Dimension(format!(
                "permutation of length {} for n = {n}",
                pi.len()
            )));
        }
        let mut total = 0i64;
        for i in 0..n {
            for k in 0..n {
                let a = self.flow.get(i, k);
                if a != 0 {
                    total += a * self.distance.get(pi[i], pi[k]);
                }
            }
        }
        Ok(total)
    }
}

/// Parses the QAPLIB `.dat` layout: `n`, then `A` row-major, then `B`.
/// Whitespace (including newlines) is not significant.
pub fn parse_qaplib(text: &str) -> Result<QapInstance> {
    let mut values = Vec::new();
    for (position, token) in text.split_whitespace().enumerate() {
        let v: i64 = token.parse().map_err(|_| Error::BadToken {
            token: token.to_string(),
            position,
        })?;
        values.push(v);
    }
    let Some((&n, rest)) = values.split_first() else {
        return Err(Error::Truncated {
            expected: 1,
            found: 0,
        });
    };
    if n <= 0 {
        return Err(Error::Dimension(format!("dimension {n} is not positive")));
    }
    let n = n as usize;
    let expected = 2 * n * n;
    if rest.len() < expected {
        return Err(Error::Truncated {
            expected,
            found: rest.len(),
        });
    }
    if rest.len() > expected {
        return Err(Error::Dimension(format!(
            "{} trailing integers after two {n}x{n} matrices",
            rest.len() - expected
        )));
    }
    let flow = IntMatrix::from_row_major(n, rest[..n * n].to_vec())?;
    let distance = IntMatrix::from_row_major(n, rest[n * n..].to_vec())?;
    QapInstance::new(flow, distance)
}

/// Writes the QAPLIB layout read by [`parse_qaplib`].
pub fn write_qaplib(qap: &QapInstance) -> String {
    let mut out = format!("{}\n\n", qap.n());
    for m in [&qap.flow, &qap.distance] {
        for i in 0..m.dim() {
            let row: Vec<String> = m.row(i).iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

/// Grey-pattern QAP on a `rows x cols` torus with `black` black cells: the
/// flow is the all-ones block on the first `black` facilities and the
/// distance between two cells is `100000 / d^2` rounded to the nearest
/// integer (ties to even), where `d` is the shortest wrapped Euclidean
/// distance.
///
/// `grey_pattern(16, 16, 92)` is the instance distributed as tai256c.
pub fn grey_pattern(rows: usize, cols: usize, black: usize) -> Result<QapInstance> {
    let n = rows * cols;
    if n == 0 || black == 0 || black > n {
        return Err(Error::InvalidArgument(format!(
            "grey pattern needs 0 < black <= rows*cols, got {black} of {n}"
        )));
    }
    let flow = IntMatrix::from_fn(n, |i, k| i64::from(i < black && k < black));
    let (r, c) = (rows as i64, cols as i64);
    let distance = IntMatrix::from_fn(n, |i, j| {
        if i == j {
            return 0;
        }
        let (r1, c1) = ((i / cols) as i64, (i % cols) as i64);
        let (r2, c2) = ((j / cols) as i64, (j % cols) as i64);
        let mut best = 0.0f64;
        for w1 in -1..=1 {
            for w2 in -1..=1 {
                let d2 = (r1 - r2 + r * w1).pow(2) + (c1 - c2 + c * w2).pow(2);
                if d2 > 0 {
                    best = best.max(100_000.0 / d2 as f64);
                }
            }
        }
        best.round_ties_even() as i64
    });
    QapInstance::new(flow, distance)
}

/// `min { x^T B x : x in {0,1}^n, sum x = m }` with `B` symmetric, zero
/// diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BqopJson", into = "BqopJson")]
pub struct BqopInstance {
    m: usize,
    b: IntMatrix,
}

#[derive(Serialize, Deserialize)]
struct BqopJson {
    n: usize,
    m: usize,
    /// Row-major lower triangle of `B`, diagonal included.
    b_lower: Vec<i64>,
}

impl TryFrom<BqopJson> for BqopInstance {
    type Error = Error;

    fn try_from(j: BqopJson) -> Result<Self> {
        BqopInstance::new(IntMatrix::from_lower_triangle(j.n, &j.b_lower)?, j.m)
    }
}

impl From<BqopInstance> for BqopJson {
    fn from(inst: BqopInstance) -> Self {
        BqopJson {
            n: inst.n(),
            m: inst.m,
            b_lower: inst.b.lower_triangle(),
        }
    }
}

impl BqopInstance {
    pub fn new(b: IntMatrix, m: usize) -> Result<Self> {
        let n = b.dim();
        if n == 0 {
            return Err(Error::InvalidInstance("empty matrix".into()));
        }
        if let Some((row, col)) = b.asymmetry() {
            return Err(Error::Asymmetric {
                which: "B",
                row,
                col,
            });
        }
        if !b.has_zero_diagonal() {
            return Err(Error::InvalidInstance("B has a nonzero diagonal".into()));
        }
        if m == 0 || m > n {
            return Err(Error::InvalidInstance(format!(
                "cardinality {m} outside 1..={n}"
            )));
        }
        Ok(Self { m, b })
    }

    pub fn n(&self) -> usize {
        self.b.dim()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn b(&self) -> &IntMatrix {
        &self.b
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// A 0/1 vector of length `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinarySolution {
    bits: Vec<u8>,
}

impl BinarySolution {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(p) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidSolution(format!(
                "entry {p} is {}, not 0/1",
                bits[p]
            )));
        }
        Ok(Self { bits })
    }

    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![0; n] }
    }

    /// From 0-based support indices.
    pub fn from_support(n: usize, support: &[usize]) -> Result<Self> {
        let mut bits = vec![0u8; n];
        for &i in support {
            if i >= n {
                return Err(Error::InvalidSolution(format!(
                    "index {} outside 1..={n}",
                    i + 1
                )));
            }
            if bits[i] == 1 {
                return Err(Error::InvalidSolution(format!("index {} repeated", i + 1)));
            }
            bits[i] = 1;
        }
        Ok(Self { bits })
    }

    /// Accepts either a single run of `n` characters `0`/`1`, or a
    /// whitespace-separated list of 1-based support indices.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let trimmed = text.trim();
        let is_bitstring = trimmed.len() == n
            && !trimmed.is_empty()
            && trimmed.bytes().all(|b| b == b'0' || b == b'1');
        if is_bitstring {
            return Self::new(trimmed.bytes().map(|b| b - b'0').collect());
        }
        let mut support = Vec::new();
        for tok in trimmed.split_whitespace() {
            let idx: usize = tok
                .parse()
                .map_err(|_| Error::InvalidSolution(format!("bad index token {tok:?}")))?;
            if idx == 0 {
                return Err(Error::InvalidSolution("indices are 1-based".into()));
            }
            support.push(idx - 1);
        }
        Self::from_support(n, &support)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> u8 {
        self.bits[i]
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// 0-based indices of the ones.
    pub fn support(&self) -> Vec<usize> {
        (0..self.bits.len())
            .filter(|&i| self.bits[i] == 1)
            .collect()
    }

    pub fn to_bitstring(&self) -> String {
        self.bits.iter().map(|&b| char::from(b'0' + b)).collect()
    }

    /// 1-based support indices, space separated.
    pub fn to_index_list(&self) -> String {
        let idx: Vec<String> = self.support().iter().map(|i| (i + 1).to_string()).collect();
        idx.join(" ")
    }
}

/// Converts a QAP whose flow matrix is `f f^T` for a 0/1 vector `f` (with or
/// without the diagonal) into the cardinality-constrained problem with
/// `m = |support(f)|` and `B` the distance matrix.
pub fn qap_to_bqop(qap: &QapInstance) -> Result<BqopInstance> {
    let a = &qap.flow;
    let n = qap.n();
    if !qap.distance.has_zero_diagonal() {
        return Err(Error::InvalidInstance(
            "distance matrix has a nonzero diagonal".into(),
        ));
    }
    let Some(pivot) = (0..n).find(|&i| a.row(i).iter().any(|&v| v != 0)) else {
        return Err(Error::NotRankOne("flow matrix is zero".into()));
    };
    if a.row(pivot).iter().any(|&v| v != 0 && v != 1) {
        return Err(Error::FactorNotBinary);
    }
    let mut f: Vec<bool> = a.row(pivot).iter().map(|&v| v != 0).collect();
    f[pivot] = true;
    for i in 0..n {
        for j in 0..n {
            let v = a.get(i, j);
            let outer = i64::from(f[i] && f[j]);
            let ok = if i == j {
                v == 0 || v == outer
            } else {
                v == outer
            };
            if !ok {
                if !(0..=1).contains(&v) {
                    return Err(Error::FactorNotBinary);
                }
                return Err(Error::NotRankOne(format!(
                    "entry ({}, {}) is {v}, expected {outer}",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let m = f.iter().filter(|&&b| b).count();
    BqopInstance::new(qap.distance.clone(), m)
}

/// `x^T B x`.
pub fn objective(inst: &BqopInstance, x: &BinarySolution) -> Result<i64> {
    if x.len() != inst.n() {
        return Err(Error::Dimension(format!(
            "solution has {} entries, instance has {}",
            x.len(),
            inst.n()
        )));
    }
    Ok(inst.b.support_form(&x.support()))
}

/// `x^T q x + constant == x^T B x + lambda (sum x - m)^2` on binary `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PenaltyQubo {
    pub q: IntMatrix,
    pub constant: i64,
    pub lambda: i64,
}

impl PenaltyQubo {
    pub fn value(&self, x: &BinarySolution) -> i64 {
        self.q.support_form(&x.support()) + self.constant
    }
}

/// Folds `lambda (sum x - m)^2` into the quadratic form using `x_i^2 = x_i`:
/// `Q = B + lambda J - 2 lambda m I`, constant `lambda m^2`.
pub fn to_penalty_qubo(inst: &BqopInstance, lambda: i64) -> Result<PenaltyQubo> {
    if lambda <= 0 {
        return Err(Error::InvalidArgument(format!(
            "penalty weight {lambda} must be positive"
        )));
    }
    let m = inst.m as i64;
    let q = IntMatrix::from_fn(inst.n(), |i, j| {
        let diag = if i == j { -2 * lambda * m } else { 0 };
        inst.b.get(i, j) + lambda + diag
    });
    Ok(PenaltyQubo {
        q,
        constant: lambda * m * m,
        lambda,
    })
}

/// Equal-width histogram over `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn from_values(values: &[f64], bins: usize) -> Self {
        let bins = bins.max(1);
        if values.is_empty() {
            return Self {
                lo: 0.0,
                hi: 0.0,
                counts: vec![0; bins],
            };
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0u64; bins];
        for &v in values {
            let b = if width > 0.0 {
                (((v - lo) / width) as usize).min(bins - 1)
            } else {
                0
            };
            counts[b] += 1;
        }
        Self { lo, hi, counts }
    }

    pub fn bin_edges(&self) -> Vec<f64> {
        let bins = self.counts.len();
        (0..=bins)
            .map(|k| self.lo + (self.hi - self.lo) * k as f64 / bins as f64)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledDistribution {
    pub optimum: i64,
    pub seed: u64,
    /// `(objective - optimum) / |optimum|` per sample, in sample order.
    pub values: Vec<f64>,
    pub mean: f64,
    pub histogram: Histogram,
}

/// Uniform random `m`-subset of `0..n`, drawn from sample stream `index`.
pub fn random_support(n: usize, m: usize, seed: u64, index: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..m {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    idx.truncate(m);
    idx
}

pub const DEFAULT_HISTOGRAM_BINS: usize = 50;

/// Scaled objective values of `count` uniformly random feasible supports.
pub fn sample_scaled_distribution(
    inst: &BqopInstance,
    count: usize,
    optimum: i64,
    seed: u64,
) -> Result<ScaledDistribution> {
    if optimum == 0 {
        return Err(Error::InvalidArgument("optimum must be nonzero".into()));
    }
    if inst.m > inst.n() {
        return Err(Error::InvalidInstance("m > n".into()));
    }
    let scale = (optimum as f64).abs();
    let values: Vec<f64> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let support = random_support(inst.n(), inst.m, seed, i);
            (inst.b.support_form(&support) - optimum) as f64 / scale
        })
        .collect();
    let mean = if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    };
    let histogram = Histogram::from_values(&values, DEFAULT_HISTOGRAM_BINS);
    Ok(ScaledDistribution {
        optimum,
        seed,
        values,
        mean,
        histogram,
    })
}
