//! Python bindings. Points are 1-based on the Python side, as in the
//! file formats.

use std::collections::BTreeMap;

use gcsolve::cli::InstanceFile;
use gcsolve::constraint::{
    AtomicConstraint, Fallback, GcInstance, SolveOutcome, Solver, UnsatReason, DEFAULT_CAP,
};
use gcsolve::genbench::{self, BenchSettings, GenConfig};
use gcsolve::perm::{self, Permutation};
use gcsolve::reduction::{self, ClauseSet};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_zero_based(points: &[usize]) -> PyResult<Vec<usize>> {
    points
        .iter()
        .map(|&a| {
            a.checked_sub(1)
                .ok_or_else(|| value_err("points are numbered from 1"))
        })
        .collect()
}

#[pyclass(
    name = "Permutation",
    module = "gcsolve_py",
    eq,
    frozen,
    from_py_object
)]
#[derive(Clone, PartialEq)]
struct PyPermutation {
    inner: Permutation,
}

#[pymethods]
impl PyPermutation {
    /// Builds a permutation from its 1-based image list.
    #[new]
    fn new(images: Vec<usize>) -> PyResult<Self> {
        let inner = Permutation::from_images(to_zero_based(&images)?).map_err(value_err)?;
        Ok(PyPermutation { inner })
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        PyPermutation {
            inner: Permutation::identity(n),
        }
    }

    #[staticmethod]
    fn from_cycles(n: usize, cycles: Vec<Vec<usize>>) -> PyResult<Self> {
        let refs: Vec<&[usize]> = cycles.iter().map(Vec::as_slice).collect();
        let inner = Permutation::from_cycles(n, &refs).map_err(value_err)?;
        Ok(PyPermutation { inner })
    }

    /// Parses the text form `g <images>`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let inner = Permutation::parse_text(text).map_err(value_err)?;
        Ok(PyPermutation { inner })
    }

    #[getter]
    fn images(&self) -> Vec<usize> {
        self.inner.images().iter().map(|b| b + 1).collect()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn apply(&self, a: usize) -> PyResult<usize> {
        if a == 0 || a > self.inner.degree() {
            return Err(value_err(format!("point {a} out of range")));
        }
        Ok(self.inner.apply(a - 1) + 1)
    }

    /// `self` then `other`.
    fn compose(&self, other: &PyPermutation) -> PyResult<Self> {
        let inner = self.inner.compose(&other.inner).map_err(value_err)?;
        Ok(PyPermutation { inner })
    }

    fn inverse(&self) -> Self {
        PyPermutation {
            inner: self.inner.inverse(),
        }
    }

    fn order(&self) -> u64 {
        self.inner.order()
    }

    fn is_identity(&self) -> bool {
        self.inner.is_identity()
    }

    fn cycles(&self) -> Vec<Vec<usize>> {
        self.inner
            .cycles()
            .into_iter()
            .map(|c| c.into_iter().map(|a| a + 1).collect())
            .collect()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Permutation({:?})", self.images())
    }
}

fn unwrap_gens(gens: &[PyPermutation]) -> Vec<Permutation> {
    gens.iter().map(|g| g.inner.clone()).collect()
}

/// Orbits of `<gens>` on `1..=n`, each sorted, ordered by least point.
#[pyfunction]
#[pyo3(signature = (gens, n = None))]
fn orbit_partition(gens: Vec<PyPermutation>, n: Option<usize>) -> PyResult<Vec<Vec<usize>>> {
    let n = n
        .or_else(|| gens.first().map(|g| g.inner.degree()))
        .unwrap_or(0);
    if gens.iter().any(|g| g.inner.degree() != n) {
        return Err(value_err("generators must all have degree n"));
    }
    let part = perm::orbit_partition(n, &unwrap_gens(&gens));
    Ok(part
        .blocks()
        .iter()
        .map(|b| b.iter().map(|a| a + 1).collect())
        .collect())
}

/// `(ok, reason)`; `reason` names the first violated condition.
#[pyfunction]
fn is_elementary_abelian(gens: Vec<PyPermutation>, p: u32) -> PyResult<(bool, Option<String>)> {
    let v = perm::elementary_abelian_violation(&unwrap_gens(&gens), p).map_err(value_err)?;
    Ok((v.is_none(), v.map(|v| v.to_string())))
}

#[pyclass(name = "Instance", module = "gcsolve_py", frozen)]
struct PyInstance {
    solver: Solver,
}

impl PyInstance {
    fn wrap(inst: GcInstance) -> PyResult<Self> {
        Ok(PyInstance {
            solver: Solver::new(inst).map_err(value_err)?,
        })
    }

    fn inst(&self) -> &GcInstance {
        self.solver.instance()
    }
}

fn outcome_dict<'py>(
    py: Python<'py>,
    solver: &Solver,
    out: SolveOutcome,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let origin = |orbit: usize| solver.frame().orbit(orbit).origin() + 1;
    match out {
        SolveOutcome::Solution { witness, method } => {
            d.set_item("status", "SAT")?;
            d.set_item("method", method.to_string())?;
            d.set_item("witness", PyPermutation { inner: witness })?;
        }
        SolveOutcome::Unsat { reason, method } => {
            d.set_item("status", "UNSAT")?;
            d.set_item("method", method.to_string())?;
            let reason = match reason {
                UnsatReason::EmptyOrbitSet { orbit } => {
                    d.set_item("orbit", origin(orbit))?;
                    "empty_orbit_set"
                }
                UnsatReason::Inconsistent => "inconsistent",
                UnsatReason::Exhausted => "exhausted",
            };
            d.set_item("reason", reason)?;
        }
        SolveOutcome::NotLinear { orbit, size, dim } => {
            d.set_item("status", "NOTLINEAR")?;
            d.set_item("orbit", origin(orbit))?;
            d.set_item("vo_size", size)?;
            d.set_item("e_dim", dim)?;
        }
    }
    Ok(d)
}

#[pymethods]
impl PyInstance {
    /// `constraints` maps a point to its allowed images; points left out
    /// are unconstrained.
    #[new]
    #[pyo3(signature = (p, n, gens, constraints = None))]
    fn new(
        p: u32,
        n: usize,
        gens: Vec<PyPermutation>,
        constraints: Option<BTreeMap<usize, Vec<usize>>>,
    ) -> PyResult<Self> {
        let atoms = constraints
            .unwrap_or_default()
            .into_iter()
            .map(|(a, set)| {
                let a = a
                    .checked_sub(1)
                    .ok_or_else(|| value_err("points are numbered from 1"))?;
                Ok(AtomicConstraint::new(a, to_zero_based(&set)?))
            })
            .collect::<PyResult<Vec<_>>>()?;
        let inst = GcInstance::normalize(p, n, unwrap_gens(&gens), &atoms).map_err(value_err)?;
        PyInstance::wrap(inst)
    }

    /// Parses the instance file format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let file = InstanceFile::parse(text).map_err(value_err)?;
        PyInstance::wrap(file.to_instance().map_err(value_err)?)
    }

    fn render(&self) -> String {
        InstanceFile::from_instance(self.inst()).render()
    }

    #[getter]
    fn p(&self) -> u32 {
        self.inst().p()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inst().degree()
    }

    #[getter]
    fn gens(&self) -> Vec<PyPermutation> {
        self.inst()
            .gens()
            .iter()
            .map(|g| PyPermutation { inner: g.clone() })
            .collect()
    }

    #[getter]
    fn group_dim(&self) -> usize {
        self.solver.group_dim()
    }

    #[getter]
    fn frame_dim(&self) -> usize {
        self.solver.frame().dim()
    }

    fn allowed(&self, a: usize) -> PyResult<Vec<usize>> {
        if a == 0 || a > self.n() {
            return Err(value_err(format!("point {a} out of range")));
        }
        Ok(self.inst().allowed(a - 1).iter().map(|b| b + 1).collect())
    }

    /// Linear pipeline, then `fallback` ("product", "enumerate" or "none").
    #[pyo3(signature = (fallback = "product", cap = DEFAULT_CAP))]
    fn solve<'py>(
        &self,
        py: Python<'py>,
        fallback: &str,
        cap: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let fallback = match fallback {
            "product" => Fallback::Product,
            "enumerate" => Fallback::Enumerate,
            "none" => Fallback::None,
            other => return Err(value_err(format!("unknown fallback {other:?}"))),
        };
        let out = self.solver.solve(fallback, cap).map_err(value_err)?;
        outcome_dict(py, &self.solver, out)
    }

    /// Exhaustive search over the group.
    #[pyo3(signature = (cap = DEFAULT_CAP))]
    fn solve_enumerate<'py>(&self, py: Python<'py>, cap: u64) -> PyResult<Bound<'py, PyDict>> {
        let out = self.solver.solve_enumerate(cap).map_err(value_err)?;
        outcome_dict(py, &self.solver, out)
    }

    /// `"satisfied"` or the reason `g` is rejected.
    fn verify(&self, g: &PyPermutation) -> String {
        use gcsolve::constraint::Verification;
        match self.solver.verify(&g.inner) {
            Verification::Violated { point } => format!("violated at point {}", point + 1),
            other => other.to_string(),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(p={}, n={}, m={})",
            self.p(),
            self.n(),
            self.inst().gens().len()
        )
    }
}

/// Reduces a clause file (`vars ...` then one clause per line) with
/// `mode` "k3" or "2cstr".
#[pyfunction]
fn reduce(clauses: &str, mode: &str, p: u32) -> PyResult<PyInstance> {
    let s = ClauseSet::parse(clauses).map_err(value_err)?;
    let inst = match mode {
        "k3" => reduction::reduce_1in_k(&s, p),
        "2cstr" => reduction::reduce_2cstr(&s, p),
        other => return Err(value_err(format!("unknown mode {other:?}"))),
    }
    .map_err(value_err)?;
    PyInstance::wrap(inst)
}

/// Variables of an interpretation meeting every clause exactly once.
#[pyfunction]
fn one_in_k(clauses: &str) -> PyResult<Option<Vec<String>>> {
    let s = ClauseSet::parse(clauses).map_err(value_err)?;
    let found = reduction::one_in_k_brute(&s).map_err(value_err)?;
    Ok(found.map(|vs| vs.into_iter().map(|v| s.vars()[v].clone()).collect()))
}

/// A seeded random instance and its planted witness, if any.
#[pyfunction]
#[pyo3(signature = (dims, p = 2, k = 2, seed = 0, sat_bias = 0.5, dim_g = None))]
fn gen_instance(
    dims: Vec<usize>,
    p: u32,
    k: usize,
    seed: u64,
    sat_bias: f64,
    dim_g: Option<usize>,
) -> PyResult<(PyInstance, Option<PyPermutation>)> {
    let cfg = GenConfig {
        p,
        dims,
        k,
        seed,
        sat_bias,
        dim_g,
        ..GenConfig::default()
    };
    let g = genbench::gen_instance(&cfg).map_err(value_err)?;
    Ok((
        PyInstance::wrap(g.instance)?,
        g.witness.map(|inner| PyPermutation { inner }),
    ))
}

/// Runs a benchmark sweep configured by `key=value` lines; returns CSV.
#[pyfunction]
#[pyo3(name = "bench", signature = (config = ""))]
fn run_bench(config: &str) -> PyResult<String> {
    let settings = BenchSettings::from_kv(config).map_err(value_err)?;
    let rows = genbench::bench_run(&settings).map_err(value_err)?;
    Ok(genbench::render_csv(&rows))
}

#[pymodule]
fn gcsolve_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPermutation>()?;
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(orbit_partition, m)?)?;
    m.add_function(wrap_pyfunction!(is_elementary_abelian, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(one_in_k, m)?)?;
    m.add_function(wrap_pyfunction!(gen_instance, m)?)?;
    m.add_function(wrap_pyfunction!(run_bench, m)?)?;
    Ok(())
}
