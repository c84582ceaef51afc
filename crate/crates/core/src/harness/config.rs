//! Experiment configuration: a JSON-serializable description of one run
//! matrix (target, proposal, sampler, kernel, particle count, seeds).

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::annealing::AnnealingPath;
use crate::error::{Error, Result};
use crate::kernels::KernelConfig;
use crate::schedules::{heuristic_schedule, read_schedule_csv, HeuristicKind, StepClamp};
use crate::targets::{
    make_2d_benchmark, make_gaussian, make_laplace, make_logistic_posterior, make_seeded_mixture,
    make_student_t, normalized, parse_logistic_csv, standard_normal, Benchmark2d, DensityModel,
    SYNTHETIC_LOGISTIC_CSV,
};

fn default_prior_var() -> f64 {
    5.0
}

fn default_true() -> bool {
    true
}

fn default_mixture_components() -> usize {
    8
}

fn default_mixture_spread() -> f64 {
    1.0
}

fn default_mixture_seed() -> u64 {
    7
}

fn default_laplace_scale() -> f64 {
    1.0
}

fn default_student_dof() -> f64 {
    3.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    /// Isotropic Gaussian, stored unnormalized with analytic log Z.
    /// With `normalized: true` the normalizer is folded in (log Z = 0),
    /// which is what makes identity-annealing smoke configs exact.
    Gaussian {
        dim: usize,
        #[serde(default)]
        mean: f64,
        var: f64,
        #[serde(default)]
        normalized: bool,
    },
    /// Seeded mixture of unit-variance Gaussians (normalized; log Z = 0).
    Mixture {
        dim: usize,
        #[serde(default = "default_mixture_components")]
        components: usize,
        #[serde(default = "default_mixture_spread")]
        spread: f64,
        #[serde(default = "default_mixture_seed")]
        means_seed: u64,
    },
    Laplace {
        dim: usize,
        #[serde(default = "default_laplace_scale")]
        scale: f64,
    },
    StudentT {
        dim: usize,
        #[serde(default = "default_student_dof")]
        dof: f64,
    },
    Benchmark2d { name: Benchmark2d },
    /// Bayesian logistic regression posterior; `path: null` uses the
    /// bundled synthetic dataset.
    Logistic {
        #[serde(default)]
        path: Option<PathBuf>,
        #[serde(default = "default_prior_var")]
        prior_var: f64,
        #[serde(default = "default_true")]
        standardize: bool,
    },
}

impl TargetSpec {
    pub fn build(&self) -> Result<DensityModel> {
        match self {
            TargetSpec::Gaussian {
                dim,
                mean,
                var,
                normalized: norm,
            } => {
                let g = make_gaussian(vec![*mean; *dim], vec![*var; *dim])?;
                if *norm {
                    normalized(g)
                } else {
                    Ok(g)
                }
            }
            TargetSpec::Mixture {
                dim,
                components,
                spread,
                means_seed,
            } => make_seeded_mixture(*dim, *components, *spread, *means_seed),
            TargetSpec::Laplace { dim, scale } => make_laplace(*scale, *dim),
            TargetSpec::StudentT { dim, dof } => make_student_t(*dof, *dim),
            TargetSpec::Benchmark2d { name } => Ok(make_2d_benchmark(*name)),
            TargetSpec::Logistic {
                path,
                prior_var,
                standardize,
            } => {
                let data = match path {
                    Some(p) => {
                        crate::targets::load_logistic_dataset(p, *standardize).map_err(|e| {
                            Error::Dataset(format!(
                                "{e}; {}",
                                crate::harness::suites::expected_dataset_help()
                            ))
                        })?
                    }
                    None => parse_logistic_csv(SYNTHETIC_LOGISTIC_CSV, *standardize)?,
                };
                make_logistic_posterior(Arc::new(data), *prior_var)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            TargetSpec::Gaussian { dim, var, .. } => format!("gaussian_d{dim}_var{var}"),
            TargetSpec::Mixture {
                dim, components, ..
            } => format!("mixture{components}_d{dim}"),
            TargetSpec::Laplace { dim, .. } => format!("laplace_d{dim}"),
            TargetSpec::StudentT { dim, .. } => format!("student_t_d{dim}"),
            TargetSpec::Benchmark2d { name } => format!("{name:?}").to_lowercase(),
            TargetSpec::Logistic { path, .. } => match path {
                Some(p) => format!(
                    "logistic_{}",
                    p.file_stem().map(|s| s.to_string_lossy()).unwrap_or_default()
                ),
                None => "logistic_synthetic".into(),
            },
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProposalSpec {
    /// N(0, I), normalized. The default for every benchmark.
    #[default]
    StandardNormal,
    /// Isotropic Gaussian, normalized so importance weights target log Z.
    Gaussian { mean: f64, var: f64 },
}

impl ProposalSpec {
    pub fn build(&self, dim: usize) -> Result<DensityModel> {
        match self {
            ProposalSpec::StandardNormal => Ok(standard_normal(dim)),
            ProposalSpec::Gaussian { mean, var } => {
                normalized(make_gaussian(vec![*mean; dim], vec![*var; dim])?)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleSpec {
    Linear { m: usize },
    Exponential { m: usize, eps: f64 },
    Sigmoidal { m: usize, c: f64 },
    /// One tau per row, the format written by tune-then-test.
    Csv { path: PathBuf },
}

impl ScheduleSpec {
    pub fn build(&self) -> Result<Vec<f64>> {
        match self {
            ScheduleSpec::Linear { m } => heuristic_schedule(HeuristicKind::Linear, *m),
            ScheduleSpec::Exponential { m, eps } => {
                heuristic_schedule(HeuristicKind::Exponential { eps: *eps }, *m)
            }
            ScheduleSpec::Sigmoidal { m, c } => {
                heuristic_schedule(HeuristicKind::Sigmoidal { c: *c }, *m)
            }
            ScheduleSpec::Csv { path } => read_schedule_csv(path),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ScheduleSpec::Linear { .. } => "linear",
            ScheduleSpec::Exponential { .. } => "exponential",
            ScheduleSpec::Sigmoidal { .. } => "sigmoidal",
            ScheduleSpec::Csv { .. } => "csv",
        }
    }
}

fn default_delta() -> f64 {
    1.0 / 32.0
}

fn default_variance_threshold() -> f64 {
    1e-3
}

fn default_max_steps() -> usize {
    20_000
}

fn default_target_ratio() -> f64 {
    0.7
}

fn default_search_tol() -> f64 {
    1e-6
}

fn default_resample_trigger() -> f64 {
    0.9
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplerSpec {
    /// AIS on a fixed schedule over the alpha-power-mean path.
    Fixed {
        schedule: ScheduleSpec,
        #[serde(default)]
        alpha: f64,
    },
    /// Constant-rate AIS.
    CrAis {
        #[serde(default)]
        alpha: f64,
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default = "default_variance_threshold")]
        variance_threshold: f64,
        #[serde(default = "default_max_steps")]
        max_steps: usize,
    },
    /// Binary-search adaptive AIS.
    Adaptive {
        #[serde(default)]
        alpha: f64,
        mode: crate::schedules::AdaptiveMode,
        #[serde(default = "default_target_ratio")]
        target_ratio: f64,
        #[serde(default = "default_max_steps")]
        max_steps: usize,
        #[serde(default = "default_search_tol")]
        tol: f64,
    },
    /// Constant-rate SMC with adaptive resampling.
    CrSmc {
        #[serde(default)]
        alpha: f64,
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default = "default_variance_threshold")]
        variance_threshold: f64,
        #[serde(default = "default_max_steps")]
        max_steps: usize,
        #[serde(default = "default_resample_trigger")]
        resample_trigger: f64,
        #[serde(default)]
        systematic: bool,
    },
}

impl SamplerSpec {
    pub fn alpha(&self) -> f64 {
        match self {
            SamplerSpec::Fixed { alpha, .. }
            | SamplerSpec::CrAis { alpha, .. }
            | SamplerSpec::Adaptive { alpha, .. }
            | SamplerSpec::CrSmc { alpha, .. } => *alpha,
        }
    }

    pub fn label(&self) -> String {
        match self {
            SamplerSpec::Fixed { schedule, .. } => schedule.label().to_string(),
            SamplerSpec::CrAis { .. } => "cr_ais".into(),
            SamplerSpec::Adaptive { mode, target_ratio, .. } => {
                let m = match mode {
                    crate::schedules::AdaptiveMode::EssRatio => "ess",
                    crate::schedules::AdaptiveMode::CessRatio => "cess",
                };
                format!("adaptive_{m}{target_ratio}")
            }
            SamplerSpec::CrSmc { .. } => "cr_smc".into(),
        }
    }
}

fn default_n_particles() -> usize {
    1024
}

fn default_seeds() -> Vec<u64> {
    vec![0, 1, 2, 3, 4]
}

/// One experiment: a sampler applied to a target over a list of seeds.
/// Fully serializable; the hash of the serialized form is embedded in every
/// output file so reports can be traced back to their configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub target: TargetSpec,
    #[serde(default)]
    pub proposal: ProposalSpec,
    pub sampler: SamplerSpec,
    #[serde(default = "default_n_particles")]
    pub n_particles: usize,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub kernel: KernelConfig,
    #[serde(default)]
    pub clamp: StepClamp,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::Config("experiment name must not be empty".into()));
        }
        if self.n_particles == 0 {
            return Err(Error::Config("n_particles must be >= 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("need at least one seed".into()));
        }
        Ok(())
    }

    /// Hex prefix of the SHA-256 of the canonical JSON serialization.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Build the annealing path for this experiment.
    pub fn build_path(&self) -> Result<AnnealingPath> {
        let target = self.target.build()?;
        let proposal = self.proposal.build(target.dim())?;
        AnnealingPath::new(proposal, target, self.sampler.alpha())
    }

    /// Analytic truth, when the target carries one.
    pub fn true_log_z(&self) -> Result<Option<f64>> {
        Ok(self.target.build()?.true_log_z())
    }
}
