//! Python bindings: shards, single-machine OMP, the four protocols, the
//! theory functions and JSON-configured sweeps.

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use distomp_core::config::CliConfig;
use distomp_core::datagen::{generate_shard, make_sparse_theta, GenConfig};
use distomp_core::experiments::{self, Algorithm};
use distomp_core::protocol::{self, ProtocolResult};
use distomp_core::theory::{self, TheoryParams};
use distomp_core::{matrix, omp, DesignMatrix, Error, RegressionShard, SupportSet};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidConfig(_) | Error::PatternMismatch(_) | Error::Json(_) => {
            PyValueError::new_err(e.to_string())
        }
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// One machine's data: an `n x d` design and `n` responses.
#[pyclass(name = "Shard", module = "distomp", frozen)]
struct PyShard {
    inner: RegressionShard,
}

#[pymethods]
impl PyShard {
    #[new]
    #[pyo3(signature = (rows, response, machine_id = 0))]
    fn new(rows: Vec<Vec<f64>>, response: Vec<f64>, machine_id: usize) -> PyResult<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(PyValueError::new_err("rows have different lengths"));
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        let x = DesignMatrix::from_row_major(n, d, &flat).map_err(to_py)?;
        let inner = RegressionShard::new(x, response, machine_id).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Shard `machine` of `trial` drawn from a `gen` config given as JSON.
    #[staticmethod]
    #[pyo3(signature = (gen_json, trial = 0, machine = 0))]
    fn generate(gen_json: &str, trial: u64, machine: usize) -> PyResult<Self> {
        let gen: GenConfig =
            serde_json::from_str(gen_json).map_err(|e| to_py(Error::Json(e)))?;
        gen.validate().map_err(to_py)?;
        let theta = make_sparse_theta(&gen).map_err(to_py)?;
        let inner = generate_shard(&gen, trial, machine, &theta).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.samples()
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn machine_id(&self) -> usize {
        self.inner.machine_id()
    }

    #[getter]
    fn response(&self) -> Vec<f64> {
        self.inner.response().to_vec()
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        let d = self.inner.dim();
        self.inner
            .design()
            .to_row_major()
            .chunks(d)
            .map(<[f64]>::to_vec)
            .collect()
    }

    fn coherence(&self) -> PyResult<f64> {
        matrix::coherence(self.inner.design()).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Shard(n={}, d={}, machine_id={})",
            self.inner.samples(),
            self.inner.dim(),
            self.inner.machine_id()
        )
    }
}

/// Estimate and communication cost of one protocol run.
#[pyclass(name = "ProtocolRun", module = "distomp", frozen, get_all)]
struct PyProtocolRun {
    estimate: Vec<usize>,
    rounds: usize,
    machines_used: usize,
    uplink_bits: u64,
    downlink_bits: u64,
    total_bits: u64,
}

#[pymethods]
impl PyProtocolRun {
    fn __repr__(&self) -> String {
        format!(
            "ProtocolRun(estimate={:?}, rounds={}, total_bits={})",
            self.estimate, self.rounds, self.total_bits
        )
    }
}

impl From<ProtocolResult> for PyProtocolRun {
    fn from(r: ProtocolResult) -> Self {
        Self {
            estimate: r.estimate.as_slice().to_vec(),
            rounds: r.rounds,
            machines_used: r.machines_used,
            uplink_bits: r.ledger.uplink_bits(),
            downlink_bits: r.ledger.downlink_bits(),
            total_bits: r.ledger.total(),
        }
    }
}

fn unwrap_shards(shards: &[PyRef<'_, PyShard>]) -> Vec<RegressionShard> {
    shards.iter().map(|s| s.inner.clone()).collect()
}

/// Indices chosen by `steps` OMP iterations, in selection order.
#[pyfunction]
fn run_omp(shard: PyRef<'_, PyShard>, steps: usize) -> PyResult<Vec<usize>> {
    omp::run_omp(&shard.inner, steps)
        .map(|t| t.chosen.as_slice().to_vec())
        .map_err(to_py)
}

/// One OMP step from `support`; returns `(index, normalized correlation)`.
#[pyfunction]
#[pyo3(signature = (shard, support = Vec::new()))]
fn omp_step(shard: PyRef<'_, PyShard>, support: Vec<usize>) -> PyResult<(usize, f64)> {
    let s = SupportSet::from_indices(support).map_err(to_py)?;
    omp::omp_step(&shard.inner, &s).map_err(to_py)
}

#[pyfunction]
fn centralized_omp(shards: Vec<PyRef<'_, PyShard>>, k: usize) -> PyResult<Vec<usize>> {
    omp::centralized_omp(&unwrap_shards(&shards), k)
        .map(|s| s.as_slice().to_vec())
        .map_err(to_py)
}

#[pyfunction]
fn ds_omp(shards: Vec<PyRef<'_, PyShard>>, l: usize, k: usize) -> PyResult<PyProtocolRun> {
    protocol::ds_omp(&unwrap_shards(&shards), l, k)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
fn dj_omp(shards: Vec<PyRef<'_, PyShard>>, k: usize) -> PyResult<PyProtocolRun> {
    protocol::dj_omp(&unwrap_shards(&shards), k)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
fn djf_omp(pool: Vec<PyRef<'_, PyShard>>, k: usize, per_round: usize) -> PyResult<PyProtocolRun> {
    protocol::djf_omp(&unwrap_shards(&pool), k, per_round)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
fn dc_omp(shards: Vec<PyRef<'_, PyShard>>, k: usize, seed: u64) -> PyResult<PyProtocolRun> {
    protocol::dc_omp(&unwrap_shards(&shards), k, seed)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
fn bits_per_index(d: usize) -> u64 {
    protocol::bits_per_index(d)
}

#[pyfunction]
fn phi_c(t: f64) -> f64 {
    theory::phi_c(t)
}

#[pyfunction]
fn log_phi_c(t: f64) -> f64 {
    theory::log_phi_c(t)
}

#[pyfunction]
#[pyo3(signature = (mu, d, k, sigma = 1.0))]
fn theta_crit(mu: f64, d: f64, k: usize, sigma: f64) -> PyResult<f64> {
    theory::theta_crit(mu, 0, d, k, sigma).map_err(to_py)
}

#[pyfunction]
fn f_prob(d: f64, k: usize, mu: f64, r: f64) -> PyResult<f64> {
    theory::f_prob(d, k, mu, r).map_err(to_py)
}

#[pyfunction]
fn machines_needed(d: f64, k: usize, mu: f64, r: f64) -> PyResult<u64> {
    theory::machines_needed(d, k, mu, r).map_err(to_py)
}

/// `(Q0, Q1, Q2, nu_a, nu_b, mu_d_max)`.
#[pyfunction]
fn q_quantities(d: f64, k: usize, mu: f64, epsilon: f64) -> PyResult<(f64, f64, f64, f64, f64, f64)> {
    let q = theory::q_quantities(d, k, mu, epsilon).map_err(to_py)?;
    Ok((q.q0, q.q1, q.q2, q.nu_a, q.nu_b, q.mu_d_max))
}

/// Theory report for parameters given as JSON; returns the report as JSON.
#[pyfunction]
fn check_theorem(params_json: &str, machines_available: u64) -> PyResult<String> {
    let p: TheoryParams =
        serde_json::from_str(params_json).map_err(|e| to_py(Error::Json(e)))?;
    let rep = theory::check_theorem(&p, machines_available);
    serde_json::to_string(&rep).map_err(|e| to_py(Error::Json(e)))
}

/// Runs the `experiment` section of a full config; returns the CSV text.
#[pyfunction]
fn sweep_csv(py: Python<'_>, config_json: &str) -> PyResult<String> {
    let cfg = CliConfig::from_json(config_json).map_err(to_py)?;
    let gen = cfg.gen().map_err(to_py)?.clone();
    let exp = cfg.experiment().map_err(to_py)?.clone();
    let rep = py
        .detach(|| experiments::sweep(&gen, &exp))
        .map_err(to_py)?;
    let mut out = Vec::new();
    experiments::write_csv_to(&rep.points, &mut out).map_err(to_py)?;
    String::from_utf8(out).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// One instance at `gen.theta_min` (trial 0) for algorithm `algo`.
/// Returns `(estimate, support, bits, rounds)`.
#[pyfunction]
fn simulate(gen_json: &str, algo: &str) -> PyResult<(Vec<usize>, Vec<usize>, u64, usize)> {
    let gen: GenConfig = serde_json::from_str(gen_json).map_err(|e| to_py(Error::Json(e)))?;
    let algo: Algorithm = algo.parse().map_err(to_py)?;
    let (run, truth) = experiments::simulate(&gen, algo).map_err(to_py)?;
    Ok((run.estimate.sorted(), truth.sorted(), run.bits, run.rounds))
}

#[pymodule]
fn distomp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyShard>()?;
    m.add_class::<PyProtocolRun>()?;
    m.add_function(wrap_pyfunction!(run_omp, m)?)?;
    m.add_function(wrap_pyfunction!(omp_step, m)?)?;
    m.add_function(wrap_pyfunction!(centralized_omp, m)?)?;
    m.add_function(wrap_pyfunction!(ds_omp, m)?)?;
    m.add_function(wrap_pyfunction!(dj_omp, m)?)?;
    m.add_function(wrap_pyfunction!(djf_omp, m)?)?;
    m.add_function(wrap_pyfunction!(dc_omp, m)?)?;
    m.add_function(wrap_pyfunction!(bits_per_index, m)?)?;
    m.add_function(wrap_pyfunction!(phi_c, m)?)?;
    m.add_function(wrap_pyfunction!(log_phi_c, m)?)?;
    m.add_function(wrap_pyfunction!(theta_crit, m)?)?;
    m.add_function(wrap_pyfunction!(f_prob, m)?)?;
    m.add_function(wrap_pyfunction!(machines_needed, m)?)?;
    m.add_function(wrap_pyfunction!(q_quantities, m)?)?;
    m.add_function(wrap_pyfunction!(check_theorem, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_csv, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
