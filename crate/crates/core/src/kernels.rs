//! MCMC transition kernels invariant with respect to a given log-density.
//!
//! Kernels expose no weight contribution: reversibility means the sampler
//! only ever needs density ratios. Rejected moves return the position
//! bit-identical, and a fixed generator state yields a bit-identical
//! trajectory, which is what makes runs reproducible at any worker count.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Generator;

/// Hamiltonian Monte Carlo with unit diagonal mass.
///
/// A single leapfrog step with step size 0.5 is the default transition for
/// the 2d benchmarks; high-dimensional runs benefit from more leapfrog steps.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HmcConfig {
    pub step_size: f64,
    pub n_leapfrog: usize,
}

impl Default for HmcConfig {
    fn default() -> Self {
        Self {
            step_size: 0.5,
            n_leapfrog: 1,
        }
    }
}

impl HmcConfig {
    pub fn new(step_size: f64, n_leapfrog: usize) -> Result<Self> {
        if !(step_size >= 0.0) || n_leapfrog == 0 {
            return Err(Error::InvalidParameter(
                "hmc needs step_size >= 0 and n_leapfrog >= 1".into(),
            ));
        }
        Ok(Self {
            step_size,
            n_leapfrog,
        })
    }
}

/// Kernel choice, as it appears in run configurations.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelConfig {
    Hmc(HmcConfig),
    Rwm { proposal_sd: f64 },
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig::Hmc(HmcConfig::default())
    }
}

/// Result of one kernel step, with the number of density and gradient
/// closure calls so callers can account for target evaluations exactly.
#[derive(Clone, Debug)]
pub struct KernelOutcome {
    pub position: Vec<f64>,
    pub log_density: f64,
    pub accepted: bool,
    pub density_evals: u64,
    pub grad_evals: u64,
}

/// One HMC proposal: momentum refresh, `n_leapfrog` leapfrog steps,
/// Metropolis accept. `current_log_density` must be the log-density at `z`
/// (callers always have it cached); a non-finite value is an error, while a
/// non-finite proposal is auto-rejected because power-mean bridges can
/// overflow far in the tails.
pub fn hmc_step<F, G>(
    z: &[f64],
    current_log_density: f64,
    log_density: F,
    grad_log_density: G,
    cfg: &HmcConfig,
    rng: &mut Generator,
) -> Result<KernelOutcome>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    if !current_log_density.is_finite() {
        return Err(Error::Aborted(format!(
            "hmc started from non-finite log-density {current_log_density}"
        )));
    }
    let d = z.len();
    let eps = cfg.step_size;

    let mut momentum: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let kinetic0: f64 = 0.5 * momentum.iter().map(|p| p * p).sum::<f64>();

    let mut pos = z.to_vec();
    let mut grad = grad_log_density(&pos);
    let mut grad_evals = 1u64;
    for _ in 0..cfg.n_leapfrog {
        for k in 0..d {
            momentum[k] += 0.5 * eps * grad[k];
        }
        for k in 0..d {
            pos[k] += eps * momentum[k];
        }
        grad = grad_log_density(&pos);
        grad_evals += 1;
        for k in 0..d {
            momentum[k] += 0.5 * eps * grad[k];
        }
    }

    let mut density_evals = 0u64;
    let proposal_ok = pos.iter().all(|x| x.is_finite());
    let log_density_new = if proposal_ok {
        density_evals += 1;
        log_density(&pos)
    } else {
        f64::NEG_INFINITY
    };
    let kinetic1: f64 = 0.5 * momentum.iter().map(|p| p * p).sum::<f64>();

    // Accept with min(1, exp(-dH)).
    let delta_h = (-log_density_new + kinetic1) - (-current_log_density + kinetic0);
    let accept = if delta_h.is_nan() {
        false
    } else {
        rng.random::<f64>().ln() < -delta_h
    };

    Ok(if accept {
        KernelOutcome {
            position: pos,
            log_density: log_density_new,
            accepted: true,
            density_evals,
            grad_evals,
        }
    } else {
        KernelOutcome {
            position: z.to_vec(),
            log_density: current_log_density,
            accepted: false,
            density_evals,
            grad_evals,
        }
    })
}

/// Gaussian random-walk Metropolis, the gradient-free fallback.
pub fn rwm_step<F>(
    z: &[f64],
    current_log_density: f64,
    log_density: F,
    proposal_sd: f64,
    rng: &mut Generator,
) -> Result<KernelOutcome>
where
    F: Fn(&[f64]) -> f64,
{
    if !current_log_density.is_finite() {
        return Err(Error::Aborted(format!(
            "rwm started from non-finite log-density {current_log_density}"
        )));
    }
    if !(proposal_sd >= 0.0) {
        return Err(Error::InvalidParameter(
            "rwm proposal sd must be non-negative".into(),
        ));
    }
    let pos: Vec<f64> = z
        .iter()
        .map(|&x| x + proposal_sd * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let log_density_new = if pos.iter().all(|x| x.is_finite()) {
        log_density(&pos)
    } else {
        f64::NEG_INFINITY
    };
    let delta = log_density_new - current_log_density;
    let accept = if delta.is_nan() {
        false
    } else {
        rng.random::<f64>().ln() < delta
    };
    Ok(if accept {
        KernelOutcome {
            position: pos,
            log_density: log_density_new,
            accepted: true,
            density_evals: 1,
            grad_evals: 0,
        }
    } else {
        KernelOutcome {
            position: z.to_vec(),
            log_density: current_log_density,
            accepted: false,
            density_evals: 1,
            grad_evals: 0,
        }
    })
}
