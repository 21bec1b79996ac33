//! Python bindings: instances, assortments, closed-form evaluation, the
//! consumer simulator and every solver.
//!
//! Indices are 0-based in Python, matching the Rust API; the JSON documents
//! read and written by `from_json`/`to_json` stay 1-based.

use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use cascade_mnl::acme::{self, Branch, DEFAULT_EPSILON, DEFAULT_RHO};
use cascade_mnl::model::{self, io, GeneratorProfile, Placement};
use cascade_mnl::{choice, dp, oracle, sim, single_stage, Error};

create_exception!(cascade_mnl, ValidationError, PyValueError, "Invalid instance, assortment or argument.");
create_exception!(cascade_mnl, RefusedError, PyRuntimeError, "A solver refused an instance as too large.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Refused { .. } | Error::EnumerationCeiling { .. } | Error::DegenerateGrid(_) => {
            RefusedError::new_err(e.to_string())
        }
        Error::Io(err) => PyOSError::new_err(err.to_string()),
        other => ValidationError::new_err(other.to_string()),
    }
}

#[pyclass(frozen, skip_from_py_object, name = "Instance", module = "cascade_mnl")]
#[derive(Clone)]
struct PyInstance(model::Instance);

#[pymethods]
impl PyInstance {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        io::load_instance(text).map(PyInstance).map_err(to_py)
    }

    /// Seeded random instance; `profile` is one of `default`, `exponential`,
    /// `deterministic`, `burnout`, `patient`.
    #[staticmethod]
    #[pyo3(signature = (seed, n, m, d, w, profile = "default"))]
    fn generate(seed: u64, n: usize, m: usize, d: usize, w: usize, profile: &str) -> PyResult<Self> {
        let p = GeneratorProfile::named(profile).map_err(to_py)?;
        model::generate_instance(seed, n, m, d, w, &p).map(PyInstance).map_err(to_py)
    }

    fn to_json(&self) -> String {
        io::instance_to_json(&self.0)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn w(&self) -> usize {
        self.0.w()
    }

    fn __repr__(&self) -> String {
        format!("Instance(n={}, m={}, d={}, w={})", self.0.n(), self.0.m(), self.0.d(), self.0.w())
    }
}

#[pyclass(frozen, eq, skip_from_py_object, name = "Assortment", module = "cascade_mnl")]
#[derive(Clone, PartialEq)]
struct PyAssortment(model::Assortment);

#[pymethods]
impl PyAssortment {
    /// `placements` are `(product, exposure, stage)` triples.
    #[new]
    #[pyo3(signature = (instance, placements = Vec::new()))]
    fn new(instance: &PyInstance, placements: Vec<(usize, usize, usize)>) -> PyResult<Self> {
        let inst = &instance.0;
        let ps: Vec<Placement> =
            placements.into_iter().map(|(product, exposure, stage)| Placement { product, exposure, stage }).collect();
        model::Assortment::from_placements(inst.n(), inst.w(), inst.m(), &ps).map(PyAssortment).map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str, instance: &PyInstance) -> PyResult<Self> {
        io::load_assortment(text, &instance.0).map(PyAssortment).map_err(to_py)
    }

    fn to_json(&self) -> String {
        io::assortment_to_json(&self.0)
    }

    fn placements(&self) -> Vec<(usize, usize, usize)> {
        self.0.placements().into_iter().map(|p| (p.product, p.exposure, p.stage)).collect()
    }

    fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn __len__(&self) -> usize {
        self.0.placements().len()
    }

    fn __repr__(&self) -> String {
        format!("Assortment({:?})", self.placements())
    }
}

#[pyclass(frozen, name = "SolveReport", module = "cascade_mnl")]
struct PySolveReport(acme::SolveReport);

#[pymethods]
impl PySolveReport {
    #[getter]
    fn assortment(&self) -> PyAssortment {
        PyAssortment(self.0.assortment.clone())
    }

    #[getter]
    fn f_value(&self) -> f64 {
        self.0.f_value
    }

    #[getter]
    fn g_value(&self) -> f64 {
        self.0.g_value
    }

    /// `"dp"` or `"single-stage"`
    #[getter]
    fn winning_branch(&self) -> String {
        self.0.winning_branch.to_string()
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.0.rho
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.0.epsilon
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.0.kappa
    }

    #[getter]
    fn certified_ratio(&self) -> f64 {
        self.0.certified_ratio
    }

    #[getter]
    fn guarantee_degraded(&self) -> bool {
        self.0.guarantee_degraded
    }

    #[getter]
    fn per_stage_reachability(&self) -> Vec<f64> {
        self.0.per_stage_reachability.clone()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.0.warnings.clone()
    }

    /// seconds
    #[getter]
    fn wall_time(&self) -> f64 {
        self.0.wall_time.as_secs_f64()
    }

    fn __repr__(&self) -> String {
        let branch = match self.0.winning_branch {
            Branch::Dp => "dp",
            Branch::SingleStage => "single-stage",
        };
        format!("SolveReport(f_value={}, winning_branch={branch:?}, rho={})", self.0.f_value, self.0.rho)
    }
}

/// Violations of the feasibility rules, empty when `assortment` is feasible.
#[pyfunction]
fn validate(instance: &PyInstance, assortment: &PyAssortment) -> PyResult<Vec<String>> {
    let v = model::validate_assortment(&instance.0, &assortment.0).map_err(to_py)?;
    Ok(v.iter().map(|v| v.to_string()).collect())
}

#[pyfunction]
fn evaluate<'py>(py: Python<'py>, instance: &PyInstance, assortment: &PyAssortment) -> PyResult<Bound<'py, PyDict>> {
    let r = choice::evaluate(&instance.0, &assortment.0).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("per_stage_reachability", r.per_stage_reachability)?;
    d.set_item("purchase_prob", r.purchase_prob)?;
    d.set_item("no_purchase_prob", r.no_purchase_prob)?;
    d.set_item("f_value", r.f_value)?;
    d.set_item("g_value", r.g_value)?;
    Ok(d)
}

#[pyfunction]
fn expected_revenue(instance: &PyInstance, assortment: &PyAssortment) -> PyResult<f64> {
    choice::expected_revenue(&instance.0, &assortment.0).map_err(to_py)
}

/// Monte Carlo purchase frequencies as `(estimate, std_error)` pairs.
#[pyfunction]
fn simulate<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    assortment: &PyAssortment,
    trials: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let (inst, a) = (&instance.0, &assortment.0);
    let est = py.detach(|| sim::estimate_probabilities(inst, a, trials, seed)).map_err(to_py)?;
    let pair = |e: &sim::Estimate| (e.estimate, e.std_error);
    let d = PyDict::new(py);
    d.set_item("trials", est.trials)?;
    d.set_item("seed", est.seed)?;
    let purchase: Vec<Vec<(f64, f64)>> = est.purchase.iter().map(|row| row.iter().map(pair).collect()).collect();
    d.set_item("purchase", purchase)?;
    d.set_item("no_purchase", pair(&est.no_purchase))?;
    d.set_item("reach", est.reach.iter().map(pair).collect::<Vec<_>>())?;
    d.set_item("browsed", est.browsed.iter().map(pair).collect::<Vec<_>>())?;
    d.set_item("abandoned", pair(&est.abandoned))?;
    d.set_item("exhausted", pair(&est.exhausted))?;
    Ok(d)
}

#[pyfunction]
fn solve_single_stage(py: Python<'_>, instance: &PyInstance) -> (PyAssortment, f64) {
    let inst = &instance.0;
    let (a, f) = py.detach(|| single_stage::solve_single_stage(inst));
    (PyAssortment(a), f)
}

#[pyfunction]
fn brute_force_opt(py: Python<'_>, instance: &PyInstance) -> PyResult<(PyAssortment, f64)> {
    let inst = &instance.0;
    let (a, f) = py.detach(|| oracle::brute_force_opt(inst)).map_err(to_py)?;
    Ok((PyAssortment(a), f))
}

#[pyfunction]
fn brute_force_p1(py: Python<'_>, instance: &PyInstance, rho: f64) -> PyResult<(PyAssortment, f64)> {
    let inst = &instance.0;
    let (a, g) = py.detach(|| oracle::brute_force_p1(inst, rho)).map_err(to_py)?;
    Ok((PyAssortment(a), g))
}

/// Grid DP for the patience-free surrogate; returns the assortment and its `g`.
#[pyfunction]
#[pyo3(signature = (instance, rho = DEFAULT_RHO, epsilon = DEFAULT_EPSILON))]
fn dp_solve(py: Python<'_>, instance: &PyInstance, rho: f64, epsilon: f64) -> PyResult<(PyAssortment, f64)> {
    let inst = &instance.0;
    let s = py.detach(|| dp::dp_solve(inst, rho, epsilon)).map_err(to_py)?;
    Ok((PyAssortment(s.assortment), s.g_value))
}

#[pyfunction]
#[pyo3(signature = (instance, rho = DEFAULT_RHO, epsilon = DEFAULT_EPSILON))]
fn solve_acme(py: Python<'_>, instance: &PyInstance, rho: f64, epsilon: f64) -> PyResult<PySolveReport> {
    let inst = &instance.0;
    py.detach(|| acme::solve_acme(inst, rho, epsilon)).map(PySolveReport).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (instance, rhos, epsilon = DEFAULT_EPSILON))]
fn sweep_rho(py: Python<'_>, instance: &PyInstance, rhos: Vec<f64>, epsilon: f64) -> PyResult<PySolveReport> {
    let inst = &instance.0;
    py.detach(|| acme::sweep_rho(inst, &rhos, epsilon)).map(PySolveReport).map_err(to_py)
}

#[pyfunction]
fn kappa(epsilon: f64) -> f64 {
    acme::kappa(epsilon)
}

#[pyfunction]
fn certified_ratio(rho: f64, epsilon: f64) -> f64 {
    acme::certified_ratio(rho, epsilon)
}

#[pymodule(name = "cascade_mnl")]
mod cascade_mnl_module {
    use super::*;

    #[pymodule_export]
    use super::{
        brute_force_opt, brute_force_p1, certified_ratio, dp_solve, evaluate, expected_revenue, kappa,
        simulate, solve_acme, solve_single_stage, sweep_rho, validate, PyAssortment, PyInstance,
        PySolveReport,
    };

    #[pymodule_init]
    fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
        m.add("ValidationError", m.py().get_type::<ValidationError>())?;
        m.add("RefusedError", m.py().get_type::<RefusedError>())?;
        Ok(())
    }
}
