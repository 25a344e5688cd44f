//! Python bindings: configure and run simulations, sample populations,
//! and evaluate the behavioural maps from Python.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use std::path::PathBuf;

use recloop_core::population::InitialDistribution;
use recloop_core::sweep::SweepSpec;
use recloop_core::{engine, metrics, model, population, rng};

fn parse_distribution(spec: &str) -> PyResult<InitialDistribution> {
    match spec.to_ascii_lowercase().as_str() {
        "ndic" => Ok(InitialDistribution::Ndic),
        "bdic" => Ok(InitialDistribution::Bdic),
        other => {
            // Allow the JSON spelling for custom shapes.
            serde_json::from_str(other)
                .map_err(|_| PyValueError::new_err(format!("unknown distribution {spec:?}")))
        }
    }
}

/// Configuration of one simulation run.
#[pyclass(name = "SimulationConfig", module = "recloop", from_py_object)]
#[derive(Clone)]
struct PySimulationConfig {
    inner: engine::SimulationConfig,
}

#[pymethods]
impl PySimulationConfig {
    #[new]
    #[pyo3(signature = (
        users=500, steps=1000, k=21, alpha=7.0, omega=0.5, delta=5,
        beta=9.0, lambda=0.9, gamma=5.0, mu=5.0,
        distribution="ndic", seed=0, trace_recommendations=false,
        opinion_snapshots_every=None,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        users: usize,
        steps: usize,
        k: usize,
        alpha: f64,
        omega: f64,
        delta: usize,
        beta: f64,
        lambda: f64,
        gamma: f64,
        mu: f64,
        distribution: &str,
        seed: u64,
        trace_recommendations: bool,
        opinion_snapshots_every: Option<usize>,
    ) -> PyResult<Self> {
        let inner = engine::SimulationConfig {
            users,
            steps,
            k,
            alpha,
            omega,
            delta,
            beta,
            lambda,
            gamma,
            mu,
            initial_opinions: parse_distribution(distribution)?,
            seed,
            trace: engine::TraceOptions {
                recommendations: trace_recommendations,
                opinion_snapshots_every,
            },
        };
        inner
            .validate()
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { inner })
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "SimulationConfig(users={}, steps={}, k={}, alpha={}, omega={}, delta={}, \
             beta={}, lambda={}, gamma={}, mu={}, distribution='{}', seed={})",
            c.users,
            c.steps,
            c.k,
            c.alpha,
            c.omega,
            c.delta,
            c.beta,
            c.lambda,
            c.gamma,
            c.mu,
            c.initial_opinions.label(),
            c.seed
        )
    }
}

/// Everything a finished run reports.
#[pyclass(name = "RunResult", module = "recloop")]
struct PyRunResult {
    inner: engine::RunResult,
}

#[pymethods]
impl PyRunResult {
    #[getter]
    fn likes_pct(&self) -> f64 {
        self.inner.metrics.likes_pct
    }

    #[getter]
    fn watch_rate_pct(&self) -> f64 {
        self.inner.metrics.watch_rate_pct
    }

    #[getter]
    fn dispersion(&self) -> f64 {
        self.inner.metrics.dispersion
    }

    #[getter]
    fn dispersion_initial(&self) -> f64 {
        self.inner.dispersion_initial
    }

    #[getter]
    fn radicalisation(&self) -> f64 {
        self.inner.metrics.radicalisation
    }

    #[getter]
    fn radicalisation_initial(&self) -> f64 {
        self.inner.radicalisation_initial
    }

    #[getter]
    fn dominance(&self) -> f64 {
        self.inner.metrics.dominance
    }

    #[getter]
    fn viral_stance(&self) -> f64 {
        self.inner.metrics.viral_stance
    }

    #[getter]
    fn total_likes(&self) -> u64 {
        self.inner.total_likes
    }

    fn initial_opinions(&self) -> Vec<f64> {
        self.inner.initial_opinions.clone()
    }

    fn final_opinions(&self) -> Vec<f64> {
        self.inner.final_opinions.clone()
    }

    fn cumulative_likes(&self) -> Vec<u64> {
        self.inner.cumulative_likes.clone()
    }

    fn likes_per_step(&self) -> Vec<u64> {
        self.inner.likes_per_step.clone()
    }

    fn recommendation_trace(&self) -> Option<Vec<u16>> {
        self.inner.recommendation_trace.clone()
    }

    /// Percent changes of dispersion and radicalisation over the run,
    /// None when the initial value is zero.
    fn pct_changes(&self) -> (Option<f64>, Option<f64>) {
        (
            metrics::pct_change(self.inner.metrics.dispersion, self.inner.dispersion_initial),
            metrics::pct_change(
                self.inner.metrics.radicalisation,
                self.inner.radicalisation_initial,
            ),
        )
    }

    fn metrics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        d.set_item("likes_pct", self.inner.metrics.likes_pct)?;
        d.set_item("watch_rate_pct", self.inner.metrics.watch_rate_pct)?;
        d.set_item("dispersion", self.inner.metrics.dispersion)?;
        d.set_item("radicalisation", self.inner.metrics.radicalisation)?;
        d.set_item("dominance", self.inner.metrics.dominance)?;
        d.set_item("viral_stance", self.inner.metrics.viral_stance)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "RunResult(likes_pct={:.2}, watch_rate_pct={:.2}, dispersion={:.4}, \
             radicalisation={:.4}, dominance={:.4}, viral_stance={})",
            self.inner.metrics.likes_pct,
            self.inner.metrics.watch_rate_pct,
            self.inner.metrics.dispersion,
            self.inner.metrics.radicalisation,
            self.inner.metrics.dominance,
            self.inner.metrics.viral_stance
        )
    }
}

/// Run one simulation to completion.
#[pyfunction]
fn run(config: &PySimulationConfig) -> PyResult<PyRunResult> {
    engine::run(config.inner.clone())
        .map(|inner| PyRunResult { inner })
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// The k content stances, equally spaced over [-1, 1].
#[pyfunction]
fn content_stances(k: usize) -> PyResult<Vec<f64>> {
    model::ContentCatalog::new(k)
        .map(|c| c.stances().to_vec())
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Watch rate for an (opinion, stance) pair.
#[pyfunction]
#[pyo3(signature = (opinion, stance, gamma=5.0))]
fn watch_rate(opinion: f64, stance: f64, gamma: f64) -> f64 {
    model::watch_rate(opinion, stance, gamma)
}

/// (like, dislike, neutral) payoffs for an (opinion, stance) pair.
#[pyfunction]
fn engagement_payoffs(opinion: f64, stance: f64) -> (f64, f64, f64) {
    model::engagement_payoffs(opinion, stance)
}

/// Draw n initial opinions from "ndic", "bdic", or a JSON distribution
/// spec, deterministically from the seed.
#[pyfunction]
fn sample_initial_opinions(distribution: &str, n: usize, seed: u64) -> PyResult<Vec<f64>> {
    let dist = parse_distribution(distribution)?;
    let mut stream = rng::init_stream(seed);
    dist.sample(n, &mut stream)
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Run a sweep preset into out_dir; returns the number of simulations
/// this call executed (0 when fully resumed).
#[pyfunction]
#[pyo3(signature = (preset, out_dir, reps=None, lambda_override=None, workers=0))]
fn run_sweep_preset(
    preset: &str,
    out_dir: PathBuf,
    reps: Option<u32>,
    lambda_override: Option<f64>,
    workers: usize,
) -> PyResult<usize> {
    let mut spec = match preset {
        "rq1" => SweepSpec::preset_rq1(),
        "rq2" => SweepSpec::preset_rq2(),
        "rq2-ext" => SweepSpec::preset_rq2_extended(),
        "rq3-omega" => SweepSpec::preset_rq3_omega(),
        "rq3-heatmap" => SweepSpec::preset_rq3_heatmap(),
        other => return Err(PyValueError::new_err(format!("unknown preset {other:?}"))),
    };
    if let Some(reps) = reps {
        spec.replications = reps;
    }
    if let Some(lambda) = lambda_override {
        spec.base.lambda = lambda;
    }
    recloop_core::sweep::run_sweep(&spec, workers, &out_dir)
        .map(|table| table.executed_runs)
        .map_err(|e| PyIOError::new_err(e.to_string()))
}

/// NDIC/BDIC helpers mirroring the canonical populations.
#[pyfunction]
fn sample_ndic(n: usize, seed: u64) -> PyResult<Vec<f64>> {
    let mut stream = rng::init_stream(seed);
    population::sample_ndic(n, &mut stream).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn sample_bdic(n: usize, seed: u64) -> PyResult<Vec<f64>> {
    let mut stream = rng::init_stream(seed);
    population::sample_bdic(n, &mut stream).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn recloop(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySimulationConfig>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(content_stances, m)?)?;
    m.add_function(wrap_pyfunction!(watch_rate, m)?)?;
    m.add_function(wrap_pyfunction!(engagement_payoffs, m)?)?;
    m.add_function(wrap_pyfunction!(sample_initial_opinions, m)?)?;
    m.add_function(wrap_pyfunction!(sample_ndic, m)?)?;
    m.add_function(wrap_pyfunction!(sample_bdic, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep_preset, m)?)?;
    Ok(())
}
