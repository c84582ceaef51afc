//! Log-space primitives, self-normalized weighted statistics and the
//! splittable RNG contract shared by every other module.
//!
//! Zero weights are encoded as `-inf` log-weights throughout; `NaN` entries
//! violate the contract of every function here. All reductions go through
//! [`pairwise_sum`] so that results do not depend on how work was divided
//! between threads.

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The concrete generator used everywhere. ChaCha keeps independent streams
/// for the same key, which is what makes [`RngStream`] splittable.
pub type Generator = rand_chacha::ChaCha8Rng;

/// A reproducible, splittable random stream.
///
/// The same `(seed, stream_id)` pair always yields the same draw sequence,
/// and distinct stream ids are statistically independent. Per-particle
/// streams derived with [`RngStream::split`] make results independent of
/// thread scheduling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream_id: 0 }
    }

    /// Derive a child stream. Deterministic in `(self, child_index)`;
    /// children of the same parent share a key but use distinct ChaCha
    /// streams, children of different parents get unrelated keys.
    pub fn split(&self, child_index: u64) -> Self {
        Self {
            seed: splitmix64(self.seed ^ splitmix64(self.stream_id)),
            stream_id: splitmix64(child_index),
        }
    }

    /// Materialize the generator positioned at the start of the stream.
    pub fn rng(&self) -> Generator {
        let mut rng = Generator::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Sum with a fixed pairwise tree. More accurate than left-to-right
/// accumulation and bit-identical no matter how many workers produced `v`.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// log(sum(exp(v_j))) by max shift. Returns `-inf` iff every entry is `-inf`.
pub fn logsumexp(v: &[f64]) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::EmptyInput("logsumexp"));
    }
    debug_assert!(v.iter().all(|x| !x.is_nan()), "NaN log-weight");
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let shifted: Vec<f64> = v.iter().map(|&x| (x - max).exp()).collect();
    Ok(max + pairwise_sum(&shifted).ln())
}

/// Two-term logsumexp, used on the hot bridge-evaluation path.
pub fn logsumexp2(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Normalized weights W_j = exp(logw_j - logsumexp(logw)).
pub fn normalized_weights(logw: &[f64]) -> Result<Vec<f64>> {
    let lse = logsumexp(logw)?;
    if lse == f64::NEG_INFINITY {
        return Err(Error::DegenerateEnsemble(
            "all log-weights are -inf".into(),
        ));
    }
    Ok(logw
        .iter()
        .map(|&x| {
            if x == f64::NEG_INFINITY {
                0.0
            } else {
                (x - lse).exp()
            }
        })
        .collect())
}

fn check_same_len(logw: &[f64], h: &[f64]) -> Result<()> {
    if logw.len() != h.len() {
        return Err(Error::LengthMismatch {
            expected: logw.len(),
            actual: h.len(),
        });
    }
    Ok(())
}

/// Self-normalized mean sum W_j h_j. Entries with zero weight are masked so
/// that their `h` values (which may be non-finite) cannot leak in.
pub fn self_normalized_mean(logw: &[f64], h: &[f64]) -> Result<f64> {
    check_same_len(logw, h)?;
    let w = normalized_weights(logw)?;
    let terms: Vec<f64> = w
        .iter()
        .zip(h)
        .map(|(&wj, &hj)| if wj == 0.0 { 0.0 } else { wj * hj })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Self-normalized variance sum W_j (h_j - m)^2 with m the weighted mean.
pub fn self_normalized_variance(logw: &[f64], h: &[f64]) -> Result<f64> {
    let m = self_normalized_mean(logw, h)?;
    let w = normalized_weights(logw)?;
    let terms: Vec<f64> = w
        .iter()
        .zip(h)
        .map(|(&wj, &hj)| {
            if wj == 0.0 {
                0.0
            } else {
                let d = hj - m;
                wj * d * d
            }
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Effective sample size (sum w)^2 / sum w^2, computed in log space.
/// Ranges over [1, N]; invariant under adding a constant to all log-weights.
pub fn ess(logw: &[f64]) -> Result<f64> {
    let l1 = logsumexp(logw)?;
    if l1 == f64::NEG_INFINITY {
        return Err(Error::DegenerateEnsemble(
            "all log-weights are -inf".into(),
        ));
    }
    let doubled: Vec<f64> = logw.iter().map(|&x| 2.0 * x).collect();
    let l2 = logsumexp(&doubled)?;
    Ok((2.0 * l1 - l2).exp())
}

/// ln Gamma(x) for x > 0 (Lanczos approximation, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection keeps the approximation in its accurate range.
        let pi = std::f64::consts::PI;
        return pi.ln() - (pi * x).sin().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = 0.999_999_999_999_809_93;
    for (i, c) in COEFFS.iter().enumerate() {
        acc += c / (x + (i + 1) as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Central finite differences of `f` with per-coordinate step
/// `1e-5 * (1 + |z_k|)`. Test oracle for analytic gradients.
pub fn finite_difference_gradient<F: Fn(&[f64]) -> f64>(f: F, z: &[f64]) -> Vec<f64> {
    let mut grad = vec![0.0; z.len()];
    let mut probe = z.to_vec();
    for k in 0..z.len() {
        let h = 1e-5 * (1.0 + z[k].abs());
        probe[k] = z[k] + h;
        let fp = f(&probe);
        probe[k] = z[k] - h;
        let fm = f(&probe);
        probe[k] = z[k];
        grad[k] = (fp - fm) / (2.0 * h);
    }
    grad
}

/// Largest per-coordinate relative error, with scale floored at 1 so that
/// near-zero gradients are compared absolutely.
pub fn max_relative_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).abs() / x.abs().max(y.abs()).max(1.0))
        .fold(0.0, f64::max)
}
