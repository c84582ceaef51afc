//! Python bindings: density constructors, the four samplers and the
//! log-space utilities, mirroring the Rust API with plain-list inputs.

use std::path::PathBuf;
use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use crais::annealing::{divergence_table, AnnealingPath};
use crais::harness::mode_occupancy;
use crais::kernels::{HmcConfig, KernelConfig};
use crais::numerics::RngStream;
use crais::sampler::{
    resample_multinomial, run_adaptive_ais, run_cr_ais, run_cr_smc, run_fixed_schedule_ais,
    AdaptiveConfig, CrAisConfig, CrSmcConfig, ParticleEnsemble, RunReport,
};
use crais::schedules::{heuristic_schedule, interpolate_schedule, AdaptiveMode, HeuristicKind, StepClamp};
use crais::targets::{self, DensityModel};

fn err(e: crais::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// An unnormalized density with analytic gradient.
#[pyclass(name = "Density", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDensity {
    model: DensityModel,
}

#[pymethods]
impl PyDensity {
    #[getter]
    fn dim(&self) -> usize {
        self.model.dim()
    }

    #[getter]
    fn name(&self) -> String {
        self.model.name().to_string()
    }

    #[getter]
    fn true_log_z(&self) -> Option<f64> {
        self.model.true_log_z()
    }

    fn log_density(&self, z: Vec<f64>) -> PyResult<f64> {
        self.check_dim(&z)?;
        Ok(self.model.log_density(&z))
    }

    fn grad_log_density(&self, z: Vec<f64>) -> PyResult<Vec<f64>> {
        self.check_dim(&z)?;
        Ok(self.model.grad_log_density(&z))
    }

    fn sample(&self, seed: u64, n: usize) -> PyResult<Vec<Vec<f64>>> {
        let mut rng = RngStream::new(seed).rng();
        (0..n)
            .map(|_| self.model.sample(&mut rng).map_err(err))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("Density(name={}, dim={})", self.model.name(), self.model.dim())
    }
}

impl PyDensity {
    fn check_dim(&self, z: &[f64]) -> PyResult<()> {
        if z.len() != self.model.dim() {
            return Err(PyValueError::new_err(format!(
                "expected a point of dimension {}, got {}",
                self.model.dim(),
                z.len()
            )));
        }
        Ok(())
    }
}

/// Result of one sampling run.
#[pyclass(name = "Report", frozen)]
struct PyReport {
    #[pyo3(get)]
    log_z_lower: f64,
    #[pyo3(get)]
    log_z_is: f64,
    #[pyo3(get)]
    ess_final: f64,
    #[pyo3(get)]
    m: usize,
    #[pyo3(get)]
    target_evals: u64,
    #[pyo3(get)]
    kernel_evals: u64,
    #[pyo3(get)]
    n_resamples: u64,
    #[pyo3(get)]
    seed: u64,
    #[pyo3(get)]
    schedule: Vec<f64>,
    #[pyo3(get)]
    divergence_trace: Option<Vec<f64>>,
    #[pyo3(get)]
    positions: Option<Vec<Vec<f64>>>,
    #[pyo3(get)]
    log_weights: Option<Vec<f64>>,
}

#[pymethods]
impl PyReport {
    fn __repr__(&self) -> String {
        format!(
            "Report(log_z_is={:.6}, log_z_lower={:.6}, m={}, ess={:.1}, target_evals={})",
            self.log_z_is, self.log_z_lower, self.m, self.ess_final, self.target_evals
        )
    }
}

fn make_report(
    report: RunReport,
    ensemble: Option<&ParticleEnsemble>,
) -> PyReport {
    let (positions, log_weights) = match ensemble {
        Some(e) => {
            let rows = (0..e.n_particles())
                .map(|j| e.position(j).to_vec())
                .collect();
            (Some(rows), Some(e.logw().to_vec()))
        }
        None => (None, None),
    };
    PyReport {
        log_z_lower: report.log_z_lower,
        log_z_is: report.log_z_is,
        ess_final: report.ess_final,
        m: report.m,
        target_evals: report.target_evals,
        kernel_evals: report.evals.kernel,
        n_resamples: report.n_resamples,
        seed: report.seed,
        schedule: report.schedule,
        divergence_trace: report.divergence_trace,
        positions,
        log_weights,
    }
}

#[pyfunction]
fn gaussian(mean: Vec<f64>, diag_var: Vec<f64>) -> PyResult<PyDensity> {
    Ok(PyDensity {
        model: targets::make_gaussian(mean, diag_var).map_err(err)?,
    })
}

#[pyfunction]
fn gaussian_mixture(
    weights: Vec<f64>,
    means: Vec<Vec<f64>>,
    diag_vars: Vec<Vec<f64>>,
) -> PyResult<PyDensity> {
    Ok(PyDensity {
        model: targets::make_gaussian_mixture(weights, means, diag_vars).map_err(err)?,
    })
}

#[pyfunction]
fn laplace(scale: f64, dim: usize) -> PyResult<PyDensity> {
    Ok(PyDensity {
        model: targets::make_laplace(scale, dim).map_err(err)?,
    })
}

#[pyfunction]
fn student_t(dof: f64, dim: usize) -> PyResult<PyDensity> {
    Ok(PyDensity {
        model: targets::make_student_t(dof, dim).map_err(err)?,
    })
}

/// One of the 2d benchmark targets: "narrow_gaussian", "ring", "bananas"
/// or "mixture4".
#[pyfunction]
fn benchmark_2d(name: &str) -> PyResult<PyDensity> {
    let which = name.parse().map_err(err)?;
    Ok(PyDensity {
        model: targets::make_2d_benchmark(which),
    })
}

/// The normalized N(0, I) proposal.
#[pyfunction]
fn standard_normal(dim: usize) -> PyDensity {
    PyDensity {
        model: targets::standard_normal(dim),
    }
}

/// Bayesian logistic regression posterior. Without a path, the bundled
/// synthetic dataset is used.
#[pyfunction]
#[pyo3(signature = (path=None, prior_var=5.0, standardize=true))]
fn logistic_posterior(
    path: Option<PathBuf>,
    prior_var: f64,
    standardize: bool,
) -> PyResult<PyDensity> {
    let data = match path {
        Some(p) => targets::load_logistic_dataset(&p, standardize).map_err(err)?,
        None => {
            targets::parse_logistic_csv(targets::SYNTHETIC_LOGISTIC_CSV, standardize)
                .map_err(err)?
        }
    };
    Ok(PyDensity {
        model: targets::make_logistic_posterior(Arc::new(data), prior_var).map_err(err)?,
    })
}

fn kernel(step_size: f64, n_leapfrog: usize) -> PyResult<KernelConfig> {
    Ok(KernelConfig::Hmc(
        HmcConfig::new(step_size, n_leapfrog).map_err(err)?,
    ))
}

fn clamp(min_step: f64, max_step: f64) -> StepClamp {
    StepClamp { min_step, max_step }
}

/// Annealed importance sampling over an explicit schedule (ending at 1).
#[pyfunction]
#[pyo3(signature = (proposal, target, schedule, n_particles=1024, seed=0, alpha=0.0,
                    step_size=0.5, n_leapfrog=1, return_particles=false))]
#[allow(clippy::too_many_arguments)]
fn run_fixed_ais(
    py: Python<'_>,
    proposal: &PyDensity,
    target: &PyDensity,
    schedule: Vec<f64>,
    n_particles: usize,
    seed: u64,
    alpha: f64,
    step_size: f64,
    n_leapfrog: usize,
    return_particles: bool,
) -> PyResult<PyReport> {
    let path = AnnealingPath::new(proposal.model.clone(), target.model.clone(), alpha)
        .map_err(err)?;
    let kernel = kernel(step_size, n_leapfrog)?;
    let (ensemble, report) = py
        .detach(|| {
            run_fixed_schedule_ais(&path, &schedule, &kernel, n_particles, RngStream::new(seed))
        })
        .map_err(err)?;
    Ok(make_report(
        report,
        return_particles.then_some(&ensemble),
    ))
}

/// Constant-rate AIS: adapts the schedule to the chosen alpha-divergence.
#[pyfunction]
#[pyo3(signature = (proposal, target, alpha=0.0, delta=1.0/32.0, n_particles=1024, seed=0,
                    step_size=0.5, n_leapfrog=1, variance_threshold=1e-3, max_steps=20_000,
                    min_step=1e-6, max_step=1.0/16.0, return_particles=false))]
#[allow(clippy::too_many_arguments)]
fn run_constant_rate_ais(
    py: Python<'_>,
    proposal: &PyDensity,
    target: &PyDensity,
    alpha: f64,
    delta: f64,
    n_particles: usize,
    seed: u64,
    step_size: f64,
    n_leapfrog: usize,
    variance_threshold: f64,
    max_steps: usize,
    min_step: f64,
    max_step: f64,
    return_particles: bool,
) -> PyResult<PyReport> {
    let path = AnnealingPath::new(proposal.model.clone(), target.model.clone(), alpha)
        .map_err(err)?;
    let kernel = kernel(step_size, n_leapfrog)?;
    let cfg = CrAisConfig {
        delta,
        clamp: clamp(min_step, max_step),
        variance_threshold,
        max_steps,
    };
    let run = py
        .detach(|| {
            run_cr_ais(
                &path,
                &divergence_table(alpha),
                &cfg,
                &kernel,
                n_particles,
                RngStream::new(seed),
            )
        })
        .map_err(err)?;
    Ok(make_report(
        run.report,
        return_particles.then_some(&run.ensemble),
    ))
}

/// Constant-rate SMC with adaptive multinomial resampling.
#[pyfunction]
#[pyo3(signature = (proposal, target, alpha=0.0, delta=1.0/32.0, n_particles=1024, seed=0,
                    step_size=0.5, n_leapfrog=1, variance_threshold=1e-3, max_steps=20_000,
                    resample_trigger=0.9, systematic=false, return_particles=false))]
#[allow(clippy::too_many_arguments)]
fn run_constant_rate_smc(
    py: Python<'_>,
    proposal: &PyDensity,
    target: &PyDensity,
    alpha: f64,
    delta: f64,
    n_particles: usize,
    seed: u64,
    step_size: f64,
    n_leapfrog: usize,
    variance_threshold: f64,
    max_steps: usize,
    resample_trigger: f64,
    systematic: bool,
    return_particles: bool,
) -> PyResult<PyReport> {
    let path = AnnealingPath::new(proposal.model.clone(), target.model.clone(), alpha)
        .map_err(err)?;
    let kernel = kernel(step_size, n_leapfrog)?;
    let cfg = CrSmcConfig {
        cr: CrAisConfig {
            delta,
            clamp: StepClamp::default(),
            variance_threshold,
            max_steps,
        },
        resample_trigger,
        systematic,
    };
    let run = py
        .detach(|| {
            run_cr_smc(
                &path,
                &divergence_table(alpha),
                &cfg,
                &kernel,
                n_particles,
                RngStream::new(seed),
            )
        })
        .map_err(err)?;
    Ok(make_report(
        run.report,
        return_particles.then_some(&run.ensemble),
    ))
}

/// Search-based adaptive AIS baseline (binary search on ESS or CESS ratios).
#[pyfunction]
#[pyo3(signature = (proposal, target, mode="cess_ratio", target_ratio=0.7, n_particles=1024,
                    seed=0, alpha=0.0, step_size=0.5, n_leapfrog=1, max_steps=20_000,
                    min_step=1e-6, max_step=1.0/16.0, return_particles=false))]
#[allow(clippy::too_many_arguments)]
fn run_adaptive_search_ais(
    py: Python<'_>,
    proposal: &PyDensity,
    target: &PyDensity,
    mode: &str,
    target_ratio: f64,
    n_particles: usize,
    seed: u64,
    alpha: f64,
    step_size: f64,
    n_leapfrog: usize,
    max_steps: usize,
    min_step: f64,
    max_step: f64,
    return_particles: bool,
) -> PyResult<PyReport> {
    let mode = match mode {
        "ess_ratio" => AdaptiveMode::EssRatio,
        "cess_ratio" => AdaptiveMode::CessRatio,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown mode '{other}' (expected ess_ratio or cess_ratio)"
            )))
        }
    };
    let path = AnnealingPath::new(proposal.model.clone(), target.model.clone(), alpha)
        .map_err(err)?;
    let kernel = kernel(step_size, n_leapfrog)?;
    let cfg = AdaptiveConfig {
        mode,
        target_ratio,
        clamp: clamp(min_step, max_step),
        max_steps,
        tol: 1e-6,
    };
    let (ensemble, report) = py
        .detach(|| run_adaptive_ais(&path, &cfg, &kernel, n_particles, RngStream::new(seed)))
        .map_err(err)?;
    Ok(make_report(
        report,
        return_particles.then_some(&ensemble),
    ))
}

/// Linear, exponential or sigmoidal schedule of length m.
#[pyfunction]
#[pyo3(signature = (kind, m, eps=0.9, c=10.0))]
fn schedule(kind: &str, m: usize, eps: f64, c: f64) -> PyResult<Vec<f64>> {
    let kind = match kind {
        "linear" => HeuristicKind::Linear,
        "exponential" => HeuristicKind::Exponential { eps },
        "sigmoidal" => HeuristicKind::Sigmoidal { c },
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown schedule kind '{other}'"
            )))
        }
    };
    heuristic_schedule(kind, m).map_err(err)
}

/// Piecewise-linear interpolation of a tuned schedule onto m points.
#[pyfunction]
fn interpolate(taus: Vec<f64>, m: usize) -> PyResult<Vec<f64>> {
    interpolate_schedule(&taus, m).map_err(err)
}

#[pyfunction]
fn log_sum_exp(values: Vec<f64>) -> PyResult<f64> {
    crais::numerics::logsumexp(&values).map_err(err)
}

#[pyfunction]
fn effective_sample_size(log_weights: Vec<f64>) -> PyResult<f64> {
    crais::numerics::ess(&log_weights).map_err(err)
}

/// Nearest-mode occupancy counts after a final multinomial resampling of
/// weighted particles.
#[pyfunction]
fn mode_counts(
    positions: Vec<Vec<f64>>,
    log_weights: Vec<f64>,
    modes: Vec<Vec<f64>>,
    seed: u64,
) -> PyResult<Vec<usize>> {
    if positions.len() != log_weights.len() || positions.is_empty() {
        return Err(PyValueError::new_err(
            "positions and log_weights must be equal-length and non-empty",
        ));
    }
    let dim = positions[0].len();
    let flat: Vec<f64> = positions.iter().flatten().copied().collect();
    let ensemble = ParticleEnsemble::from_parts(dim, flat, log_weights).map_err(err)?;
    let resampled = resample_multinomial(&ensemble, RngStream::new(seed)).map_err(err)?;
    Ok(mode_occupancy(&resampled, &modes))
}

#[pymodule]
fn crais_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensity>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(gaussian, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_mixture, m)?)?;
    m.add_function(wrap_pyfunction!(laplace, m)?)?;
    m.add_function(wrap_pyfunction!(student_t, m)?)?;
    m.add_function(wrap_pyfunction!(benchmark_2d, m)?)?;
    m.add_function(wrap_pyfunction!(standard_normal, m)?)?;
    m.add_function(wrap_pyfunction!(logistic_posterior, m)?)?;
    m.add_function(wrap_pyfunction!(run_fixed_ais, m)?)?;
    m.add_function(wrap_pyfunction!(run_constant_rate_ais, m)?)?;
    m.add_function(wrap_pyfunction!(run_constant_rate_smc, m)?)?;
    m.add_function(wrap_pyfunction!(run_adaptive_search_ais, m)?)?;
    m.add_function(wrap_pyfunction!(schedule, m)?)?;
    m.add_function(wrap_pyfunction!(interpolate, m)?)?;
    m.add_function(wrap_pyfunction!(log_sum_exp, m)?)?;
    m.add_function(wrap_pyfunction!(effective_sample_size, m)?)?;
    m.add_function(wrap_pyfunction!(mode_counts, m)?)?;
    Ok(())
}
