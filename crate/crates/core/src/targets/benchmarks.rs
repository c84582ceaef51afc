//! Two-dimensional benchmark targets.
//!
//! The ring and bananas parameterizations below are repo-local conventions,
//! frozen here so results are reproducible within this project:
//! ring = Gaussian shell of radius 5 with shell sd 0.5; bananas = equal
//! mixture of two mirrored banana-warped Gaussians (sd_x = 2, sd_y = 0.5,
//! curvature 0.5, warped by the volume-preserving shear
//! y -> y -/+ c (x^2 - sd_x^2)); mixture4 = unit-variance components at
//! (+/-2, +/-2); narrow_gaussian = N(0, 0.01 I).

use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Density, DensityModel, Gaussian, GaussianMixture};
use crate::error::{Error, Result};
use crate::numerics::{logsumexp2, Generator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Benchmark2d {
    NarrowGaussian,
    Ring,
    Bananas,
    Mixture4,
}

impl FromStr for Benchmark2d {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "narrow_gaussian" => Ok(Self::NarrowGaussian),
            "ring" => Ok(Self::Ring),
            "bananas" => Ok(Self::Bananas),
            "mixture4" => Ok(Self::Mixture4),
            other => Err(Error::InvalidParameter(format!(
                "unknown 2d benchmark '{other}' (expected narrow_gaussian, ring, bananas or mixture4)"
            ))),
        }
    }
}

/// Gaussian shell in radius: log p(z) = -(|z| - radius)^2 / (2 sd^2).
#[derive(Clone, Debug)]
pub struct Ring {
    radius: f64,
    shell_sd: f64,
}

impl Ring {
    pub fn new(radius: f64, shell_sd: f64) -> Result<Self> {
        if !(radius > 0.0) || !(shell_sd > 0.0) {
            return Err(Error::InvalidParameter(
                "ring radius and shell sd must be positive".into(),
            ));
        }
        Ok(Self { radius, shell_sd })
    }
}

impl Density for Ring {
    fn dim(&self) -> usize {
        2
    }

    fn log_density(&self, z: &[f64]) -> f64 {
        let r = z[0].hypot(z[1]);
        let d = r - self.radius;
        -d * d / (2.0 * self.shell_sd * self.shell_sd)
    }

    fn grad_log_density(&self, z: &[f64]) -> Vec<f64> {
        let r = z[0].hypot(z[1]);
        if r < 1e-12 {
            return vec![0.0, 0.0];
        }
        let scale = -(r - self.radius) / (self.shell_sd * self.shell_sd * r);
        vec![scale * z[0], scale * z[1]]
    }

    fn name(&self) -> &str {
        "ring"
    }
}

/// Equal mixture of two mirrored banana-warped Gaussians. The shear
/// y -> y -/+ c (x^2 - sd_x^2) has unit Jacobian, so both components stay
/// normalized and the mixture's true log Z is exactly zero.
#[derive(Clone, Debug)]
pub struct Bananas {
    sd_x: f64,
    sd_y: f64,
    curvature: f64,
}

impl Bananas {
    pub fn new(sd_x: f64, sd_y: f64, curvature: f64) -> Result<Self> {
        if !(sd_x > 0.0) || !(sd_y > 0.0) {
            return Err(Error::InvalidParameter(
                "banana standard deviations must be positive".into(),
            ));
        }
        Ok(Self {
            sd_x,
            sd_y,
            curvature,
        })
    }

    fn warp(&self, x: f64) -> f64 {
        self.curvature * (x * x - self.sd_x * self.sd_x)
    }

    fn branch_log_density(&self, x: f64, y: f64, mirror: bool) -> f64 {
        let y_eff = if mirror { -y } else { y };
        let u = y_eff - self.warp(x);
        let log_norm = (2.0 * std::f64::consts::PI * self.sd_x * self.sd_y).ln();
        -x * x / (2.0 * self.sd_x * self.sd_x) - u * u / (2.0 * self.sd_y * self.sd_y) - log_norm
    }
}

impl Density for Bananas {
    fn dim(&self) -> usize {
        2
    }

    fn log_density(&self, z: &[f64]) -> f64 {
        let a = self.branch_log_density(z[0], z[1], false);
        let b = self.branch_log_density(z[0], z[1], true);
        // log(1/2 exp(a) + 1/2 exp(b))
        logsumexp2(a, b) - std::f64::consts::LN_2
    }

    fn grad_log_density(&self, z: &[f64]) -> Vec<f64> {
        let (x, y) = (z[0], z[1]);
        let a = self.branch_log_density(x, y, false);
        let b = self.branch_log_density(x, y, true);
        let m = a.max(b);
        let (wa, wb) = ((a - m).exp(), (b - m).exp());
        let (ra, rb) = (wa / (wa + wb), wb / (wa + wb));

        let sx2 = self.sd_x * self.sd_x;
        let sy2 = self.sd_y * self.sd_y;
        let dwarp = 2.0 * self.curvature * x;

        let ua = y - self.warp(x);
        let ga = [-x / sx2 + ua / sy2 * dwarp, -ua / sy2];
        let ub = -y - self.warp(x);
        let gb = [-x / sx2 + ub / sy2 * dwarp, ub / sy2];

        vec![ra * ga[0] + rb * gb[0], ra * ga[1] + rb * gb[1]]
    }

    fn true_log_z(&self) -> Option<f64> {
        Some(0.0)
    }

    fn is_samplable(&self) -> bool {
        true
    }

    fn sample(&self, rng: &mut Generator) -> Result<Vec<f64>> {
        let x = self.sd_x * rng.sample::<f64, _>(StandardNormal);
        let y = self.sd_y * rng.sample::<f64, _>(StandardNormal) + self.warp(x);
        if rng.random::<bool>() {
            Ok(vec![x, -y])
        } else {
            Ok(vec![x, y])
        }
    }

    fn name(&self) -> &str {
        "bananas"
    }
}

fn mixture4() -> GaussianMixture {
    GaussianMixture::new(
        vec![0.25; 4],
        vec![
            vec![2.0, 2.0],
            vec![-2.0, 2.0],
            vec![2.0, -2.0],
            vec![-2.0, -2.0],
        ],
        vec![vec![1.0; 2]; 4],
    )
    .expect("valid mixture4")
}

/// Centers of the four mixture4 modes, for mode-occupancy diagnostics.
pub fn mixture4_modes() -> Vec<Vec<f64>> {
    mixture4().means().to_vec()
}

pub fn make_2d_benchmark(which: Benchmark2d) -> DensityModel {
    match which {
        Benchmark2d::NarrowGaussian => {
            Arc::new(Gaussian::isotropic(2, 0.0, 0.01).expect("valid narrow gaussian"))
        }
        Benchmark2d::Ring => Arc::new(Ring::new(5.0, 0.5).expect("valid ring")),
        Benchmark2d::Bananas => Arc::new(Bananas::new(2.0, 0.5, 0.5).expect("valid bananas")),
        Benchmark2d::Mixture4 => Arc::new(mixture4()),
    }
}
