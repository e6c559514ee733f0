//! Python bindings for `symbb_core`. Variable indices are 1-based on the
//! Python side, as in the CLI and the QAPLIB files.

use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyAny;

use symbb_core::bb::{self, BbParams};
use symbb_core::dnn::{self, ApgParams, NbParams};
use symbb_core::estimator::{self, EstParams};
use symbb_core::instance::{self, BinarySolution, BqopInstance};
use symbb_core::matrix::IntMatrix;
use symbb_core::subproblem::{reduce, FixSets};
use symbb_core::symmetry::{self, PermutationGroup, DEFAULT_GROUP_CAP};

fn err(e: symbb_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<T: serde::Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let loads = py.import("json")?.getattr("loads")?;
    Ok(loads.call1((text,))?.unbind())
}

fn zero_based(n: usize, support: &[usize]) -> PyResult<BinarySolution> {
    if support.contains(&0) {
        return Err(PyValueError::new_err("indices are 1-based"));
    }
    let idx: Vec<usize> = support.iter().map(|i| i - 1).collect();
    BinarySolution::from_support(n, &idx).map_err(err)
}

fn fixed_one(inst: &BqopInstance, k: usize) -> PyResult<FixSets> {
    if k == 0 || k > inst.n() {
        return Err(PyValueError::new_err(format!(
            "fix_one must lie in 1..={}",
            inst.n()
        )));
    }
    FixSets::new(inst.n(), vec![], vec![k - 1]).map_err(err)
}

/// Cardinality-constrained binary quadratic instance `min xᵀBx, Σx = m`.
#[pyclass(name = "Instance", module = "symbb", frozen)]
struct PyInstance {
    inner: BqopInstance,
}

#[pymethods]
impl PyInstance {
    #[new]
    fn new(b: Vec<Vec<i64>>, m: usize) -> PyResult<Self> {
        let b = IntMatrix::from_rows(&b).map_err(err)?;
        Ok(Self {
            inner: BqopInstance::new(b, m).map_err(err)?,
        })
    }

    /// QAPLIB `.dat` or BQOP JSON file.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let loaded = symbb_core::cli::load_instance(&path).map_err(err)?;
        Ok(Self { inner: loaded.inst })
    }

    /// Converts QAPLIB text with a rank-one 0/1 flow matrix.
    #[staticmethod]
    fn from_qaplib(text: &str) -> PyResult<Self> {
        let qap = instance::parse_qaplib(text).map_err(err)?;
        Ok(Self {
            inner: instance::qap_to_bqop(&qap).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: BqopInstance::from_json(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn matrix(&self) -> Vec<Vec<i64>> {
        self.inner.b().to_rows()
    }

    /// Objective of the solution with the given 1-based support.
    fn objective(&self, support: Vec<usize>) -> PyResult<i64> {
        let x = zero_based(self.inner.n(), &support)?;
        instance::objective(&self.inner, &x).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Instance(n={}, m={})", self.inner.n(), self.inner.m())
    }
}

/// Automorphism group of `B` with 1-based permutation images.
#[pyclass(name = "Group", module = "symbb", frozen)]
struct PyGroup {
    inner: PermutationGroup,
}

#[pymethods]
impl PyGroup {
    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    fn elements(&self) -> Vec<Vec<usize>> {
        self.inner
            .elements()
            .iter()
            .map(|p| p.image().iter().map(|i| i + 1).collect())
            .collect()
    }

    fn orbits(&self) -> Vec<Vec<usize>> {
        self.inner
            .orbit_partition()
            .iter()
            .map(|o| o.members().iter().map(|i| i + 1).collect())
            .collect()
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.order()
    }
}

#[pyfunction]
#[pyo3(signature = (inst, cap = DEFAULT_GROUP_CAP))]
fn automorphism_group(py: Python<'_>, inst: &PyInstance, cap: usize) -> PyResult<PyGroup> {
    let b = inst.inner.b().clone();
    let inner = py
        .detach(|| symmetry::automorphisms(&b, cap))
        .map_err(err)?;
    Ok(PyGroup { inner })
}

/// Distinct images of a solution (1-based support) under the group.
#[pyfunction]
fn expand_solution(
    group: &PyGroup,
    inst: &PyInstance,
    support: Vec<usize>,
) -> PyResult<Vec<Vec<usize>>> {
    let x = zero_based(inst.inner.n(), &support)?;
    let sols = symmetry::expand_solution(&group.inner, &x).map_err(err)?;
    Ok(sols
        .iter()
        .map(|s| s.support().iter().map(|i| i + 1).collect())
        .collect())
}

/// Orbits of the subproblem with `fix_one` set to one, sorted by decreasing
/// score: a list of `(members, exact score numerator, denominator)`.
#[pyfunction]
#[pyo3(signature = (inst, fix_one = 1))]
fn orbit_report(
    py: Python<'_>,
    inst: &PyInstance,
    fix_one: usize,
) -> PyResult<Vec<(Vec<usize>, i128, i128)>> {
    let sub = reduce(&inst.inner, &fixed_one(&inst.inner, fix_one)?);
    let group = py.detach(|| sub.subgroup(DEFAULT_GROUP_CAP)).map_err(err)?;
    let mut rows: Vec<_> = group
        .orbit_partition()
        .iter()
        .map(|o| {
            let s = bb::orbit_score(&sub, o.representative());
            let members: Vec<usize> = o.members().iter().map(|&r| sub.fix.free[r] + 1).collect();
            (s, members)
        })
        .collect();
    rows.sort_by(|(sa, ma), (sb, mb)| sb.cmp(sa).then(ma[0].cmp(&mb[0])));
    Ok(rows.into_iter().map(|(s, m)| (m, s.num, s.den)).collect())
}

/// Lag-DNN lower bound of the subproblem with `fix_one` set to one.
#[pyfunction]
#[pyo3(signature = (inst, fix_one = 1, lambda_ = None, lambda_scale = dnn::DEFAULT_LAMBDA_SCALE, apg_max_iter = None))]
fn root_bound(
    py: Python<'_>,
    inst: &PyInstance,
    fix_one: usize,
    lambda_: Option<f64>,
    lambda_scale: f64,
    apg_max_iter: Option<usize>,
) -> PyResult<Py<PyAny>> {
    let sub = reduce(&inst.inner, &fixed_one(&inst.inner, fix_one)?);
    let lambda = match lambda_ {
        Some(l) => l,
        None => dnn::default_lambda(&sub, lambda_scale).map_err(err)?,
    };
    let prob = dnn::assemble(&sub, lambda).map_err(err)?;
    let mut params = NbParams::default();
    if let Some(k) = apg_max_iter {
        params.apg.max_iter = k;
    }
    let r = py.detach(|| dnn::nb_bound(&prob, None, &params));
    to_py(py, &r)
}

/// `(g, g')` for the distance of a symmetric matrix to PSD + nonnegative.
#[pyfunction]
fn cone_distance(m: Vec<Vec<f64>>) -> PyResult<(f64, f64)> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    let mat = nalgebra::DMatrix::from_fn(n, n, |i, j| m[i][j]);
    let r = dnn::cone_distance(&mat, &ApgParams::default());
    Ok((r.g, r.gprime))
}

/// Proves `optimum ≥ target` or refutes it; returns the certificate.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (inst, target, iso_pruning = true, workers = 0, node_budget = None, time_budget = None, audit = false))]
fn solve(
    py: Python<'_>,
    inst: &PyInstance,
    target: i64,
    iso_pruning: bool,
    workers: usize,
    node_budget: Option<u64>,
    time_budget: Option<f64>,
    audit: bool,
) -> PyResult<Py<PyAny>> {
    let params = BbParams {
        iso_pruning,
        workers,
        node_budget,
        time_budget_secs: time_budget,
        audit,
        ..BbParams::default()
    };
    let b = inst.inner.clone();
    let cert = py
        .detach(|| bb::solve_target(&b, target, &params))
        .map_err(err)?;
    to_py(py, &cert)
}

/// Tree-size estimate for `target` from one seed.
#[pyfunction]
#[pyo3(signature = (inst, target, seed = 0, workers = 0, max_depth = None))]
fn estimate(
    py: Python<'_>,
    inst: &PyInstance,
    target: i64,
    seed: u64,
    workers: usize,
    max_depth: Option<usize>,
) -> PyResult<Py<PyAny>> {
    let params = EstParams {
        bb: BbParams {
            workers,
            ..BbParams::default()
        },
        max_depth,
        ..EstParams::default()
    };
    let b = inst.inner.clone();
    let r = py
        .detach(|| estimator::estimate(&b, target, &params, seed))
        .map_err(err)?;
    to_py(py, &r)
}

#[pymodule]
fn symbb(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PyGroup>()?;
    m.add_function(wrap_pyfunction!(automorphism_group, m)?)?;
    m.add_function(wrap_pyfunction!(expand_solution, m)?)?;
    m.add_function(wrap_pyfunction!(orbit_report, m)?)?;
    m.add_function(wrap_pyfunction!(root_bound, m)?)?;
    m.add_function(wrap_pyfunction!(cone_distance, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    Ok(())
}
