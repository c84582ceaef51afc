//! # crais
//!
//! Annealed importance sampling (AIS) for estimating log normalization
//! constants of intractable unnormalized densities, built around a
//! constant-rate adaptive schedule: instead of searching for the next
//! annealing step, the sampler measures how fast the chosen alpha-divergence
//! to the target is shrinking and sizes every step so the decrease stays
//! constant. Heuristic schedules (linear, exponential, sigmoidal), a
//! binary-search adaptive baseline, and an SMC variant with adaptive
//! resampling ship alongside it for comparison.
//!
//! ```
//! use crais::annealing::{divergence_table, AnnealingPath};
//! use crais::kernels::{HmcConfig, KernelConfig};
//! use crais::numerics::RngStream;
//! use crais::sampler::{run_cr_ais, CrAisConfig};
//! use crais::targets::{make_gaussian, standard_normal};
//!
//! let proposal = standard_normal(1);
//! let target = make_gaussian(vec![0.0], vec![0.25]).unwrap();
//! let truth = target.true_log_z().unwrap();
//!
//! let path = AnnealingPath::geometric(proposal, target).unwrap();
//! let run = run_cr_ais(
//!     &path,
//!     &divergence_table(0.0),
//!     &CrAisConfig::default(),
//!     &KernelConfig::Hmc(HmcConfig::new(0.5, 1).unwrap()),
//!     512,
//!     RngStream::new(0),
//! )
//! .unwrap();
//! assert!((run.report.log_z_is - truth).abs() < 0.2);
//! ```

pub mod annealing;
pub mod error;
pub mod harness;
pub mod kernels;
pub mod numerics;
pub mod sampler;
pub mod schedules;
pub mod targets;

pub use error::{Error, Result};
