//! Bridging-density families between a proposal and a target, and the
//! alpha-divergence table whose g-function drives the constant-rate schedule.
//!
//! The path is the alpha-power mean q_t^alpha = t pi^alpha + (1-t) q0^alpha,
//! with alpha = 0 encoding its geometric-mean limit
//! log q_t = (1-t) log q0 + t log pi. Power-mean evaluation is forced
//! through logsumexp so that alpha * log-density magnitudes of order 1e4
//! (high-dimensional targets) never leave log space.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{
    logsumexp, logsumexp2, self_normalized_mean, self_normalized_variance,
};
use crate::targets::DensityModel;

/// t values within EPS_T of an endpoint short-circuit to the endpoint
/// density; interior log t / log(1-t) arguments are clamped at EPS_T.
const EPS_T: f64 = 1e-12;

/// An alpha-parameterized family interpolating proposal (t = 0) to
/// target (t = 1).
#[derive(Clone)]
pub struct AnnealingPath {
    proposal: DensityModel,
    target: DensityModel,
    alpha: f64,
    /// Endpoints are the same object: every bridge is the common density.
    /// Keeps degenerate-path runs exactly zero-weight, bit for bit.
    degenerate: bool,
}

impl AnnealingPath {
    pub fn new(proposal: DensityModel, target: DensityModel, alpha: f64) -> Result<Self> {
        if proposal.dim() != target.dim() {
            return Err(Error::LengthMismatch {
                expected: proposal.dim(),
                actual: target.dim(),
            });
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter("alpha must be finite".into()));
        }
        let degenerate = Arc::ptr_eq(&proposal, &target);
        Ok(Self {
            proposal,
            target,
            alpha,
            degenerate,
        })
    }

    /// Geometric-mean path (the alpha -> 0 member of the family).
    pub fn geometric(proposal: DensityModel, target: DensityModel) -> Result<Self> {
        Self::new(proposal, target, 0.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.proposal.dim()
    }

    pub fn proposal(&self) -> &DensityModel {
        &self.proposal
    }

    pub fn target(&self) -> &DensityModel {
        &self.target
    }

    /// Validated bridge handle at a fixed t, caching the log-mixture terms.
    pub fn bridge(&self, t: f64) -> Result<Bridge<'_>> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!(
                "bridge parameter t = {t} outside [0, 1]"
            )));
        }
        Ok(Bridge {
            path: self,
            t,
            ln_t: t.max(EPS_T).ln(),
            ln_1mt: (1.0 - t).max(EPS_T).ln(),
        })
    }

    /// Unnormalized log-density of the bridge at t.
    pub fn log_bridge(&self, t: f64, z: &[f64]) -> Result<f64> {
        Ok(self.bridge(t)?.log_density(z))
    }

    /// Gradient of the bridge log-density at t.
    pub fn grad_log_bridge(&self, t: f64, z: &[f64]) -> Result<Vec<f64>> {
        Ok(self.bridge(t)?.grad(z))
    }
}

/// A bridge at fixed t. Cheap to construct; reused across a particle sweep.
#[derive(Clone, Copy)]
pub struct Bridge<'a> {
    path: &'a AnnealingPath,
    t: f64,
    ln_t: f64,
    ln_1mt: f64,
}

impl Bridge<'_> {
    pub fn t(&self) -> f64 {
        self.t
    }

    /// Mix already-computed endpoint log-densities into the bridge value.
    /// This is what lets the constant-rate loop reuse its per-iteration
    /// columns without re-evaluating the target.
    pub fn combine(&self, log_q0: f64, log_pi: f64) -> f64 {
        if self.path.degenerate {
            return log_q0;
        }
        if self.t <= 0.0 {
            return log_q0;
        }
        if self.t >= 1.0 {
            return log_pi;
        }
        let alpha = self.path.alpha;
        if alpha == 0.0 {
            // Written as q0 + t (pi - q0) so identical endpoints stay exact.
            log_q0 + self.t * (log_pi - log_q0)
        } else {
            logsumexp2(self.ln_t + alpha * log_pi, self.ln_1mt + alpha * log_q0) / alpha
        }
    }

    pub fn log_density(&self, z: &[f64]) -> f64 {
        if self.path.degenerate || self.t <= 0.0 {
            return self.path.proposal.log_density(z);
        }
        if self.t >= 1.0 {
            return self.path.target.log_density(z);
        }
        self.combine(
            self.path.proposal.log_density(z),
            self.path.target.log_density(z),
        )
    }

    pub fn grad(&self, z: &[f64]) -> Vec<f64> {
        if self.path.degenerate || self.t <= 0.0 {
            return self.path.proposal.grad_log_density(z);
        }
        if self.t >= 1.0 {
            return self.path.target.grad_log_density(z);
        }
        let alpha = self.path.alpha;
        let g_q0 = self.path.proposal.grad_log_density(z);
        let g_pi = self.path.target.grad_log_density(z);
        if alpha == 0.0 {
            return g_q0
                .iter()
                .zip(&g_pi)
                .map(|(&gq, &gp)| gq + self.t * (gp - gq))
                .collect();
        }
        // Softmax of the two log-mixture terms, computed in log space.
        let a = self.ln_t + alpha * self.path.target.log_density(z);
        let b = self.ln_1mt + alpha * self.path.proposal.log_density(z);
        let m = a.max(b);
        let (wa, wb) = ((a - m).exp(), (b - m).exp());
        let w_pi = wa / (wa + wb);
        let w_q0 = wb / (wa + wb);
        g_q0.iter()
            .zip(&g_pi)
            .map(|(&gq, &gp)| w_pi * gp + w_q0 * gq)
            .collect()
    }

    /// Target-model calls incurred by one bridge density evaluation.
    pub fn target_calls_per_density(&self) -> u64 {
        if self.t <= 0.0 {
            0
        } else {
            1
        }
    }

    /// Target-model calls incurred by one bridge gradient evaluation
    /// (power-mean gradients also need the target density for the softmax).
    pub fn target_calls_per_grad(&self) -> u64 {
        if self.t <= 0.0 {
            0
        } else if self.t >= 1.0 || self.path.alpha == 0.0 {
            1
        } else {
            2
        }
    }
}

/// An f-divergence in the alpha family, with the g-function
/// g(u) = u f'(u) - f(u) that controls constant-rate step sizes.
///
/// g is normalized so that g(1) = 0 (alpha != 1); additive constants in g
/// shift only the objective's scale and cancel in the variance that the
/// schedule consumes, and this choice conditions best near convergence.
#[derive(Clone, Copy, Debug)]
pub struct AlphaDivergence {
    alpha: f64,
}

/// Look up the divergence for a given alpha. 1 is the KL divergence,
/// 0 the inverse KL, 2 Pearson chi^2, 0.5 squared Hellinger, -1 Neyman chi^2.
pub fn divergence_table(alpha: f64) -> AlphaDivergence {
    AlphaDivergence { alpha }
}

impl AlphaDivergence {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// f(u), convex with f(1) = 0.
    pub fn f(&self, u: f64) -> f64 {
        self.f_from_log(u.ln())
    }

    /// f evaluated from log u, for ratios that only exist in log space.
    pub fn f_from_log(&self, log_u: f64) -> f64 {
        let a = self.alpha;
        if a == 0.0 {
            -log_u
        } else if a == 1.0 {
            let u = log_u.exp();
            u * log_u
        } else {
            let u = log_u.exp();
            ((a * log_u).exp() - a * u) / (a * (a - 1.0)) + 1.0 / a
        }
    }

    /// g(u) = u f'(u) - f(u).
    pub fn g(&self, u: f64) -> f64 {
        self.g_from_log(u.ln())
    }

    pub fn g_from_log(&self, log_u: f64) -> f64 {
        let a = self.alpha;
        if a == 0.0 {
            log_u - 1.0
        } else if a == 1.0 {
            log_u.exp()
        } else {
            (a * log_u).exp_m1() / a
        }
    }
}

/// Monte Carlo estimate of D_f(pi || q_t) from an ensemble targeting q_t.
///
/// `logw` are the running weights without the current bridge factor,
/// `log_pi` and `log_qt` the per-particle target and bridge log-densities.
/// The ratio estimate r and the per-particle u_j follow the self-normalized
/// construction used by the tuning loop; the divergence is the
/// q_t-weighted mean of f(u_j).
pub fn estimate_f_divergence(
    div: &AlphaDivergence,
    logw: &[f64],
    log_pi: &[f64],
    log_qt: &[f64],
) -> Result<f64> {
    let terms = ratio_terms(logw, log_pi, log_qt)?;
    let f_vals: Vec<f64> = terms.log_u.iter().map(|&lu| div.f_from_log(lu)).collect();
    self_normalized_mean(&terms.lw_qt, &f_vals)
}

/// Empirical variance of g(u) under q_t, the v_i of the tuning loop.
///
/// For alpha != 0 this is computed as Var[u^alpha] / alpha^2 entirely in
/// log space, which survives u^alpha magnitudes that overflow f64; additive
/// constants in g do not change the result.
pub fn weighted_variance_of_g(
    div: &AlphaDivergence,
    logw_qt: &[f64],
    log_u: &[f64],
) -> Result<f64> {
    let a = div.alpha();
    if a == 0.0 {
        // g(u) = log u - 1; the constant does not move the variance.
        return self_normalized_variance(logw_qt, log_u);
    }
    let norm = logsumexp(logw_qt)?;
    if norm == f64::NEG_INFINITY {
        return Err(Error::DegenerateEnsemble(
            "all log-weights are -inf".into(),
        ));
    }
    let first: Vec<f64> = logw_qt
        .iter()
        .zip(log_u)
        .map(|(&w, &lu)| w - norm + a * lu)
        .collect();
    let second: Vec<f64> = logw_qt
        .iter()
        .zip(log_u)
        .map(|(&w, &lu)| w - norm + 2.0 * a * lu)
        .collect();
    let log_e1 = logsumexp(&first)?;
    let log_e2 = logsumexp(&second)?;
    // E[x^2] - E[x]^2 = exp(log_e2) (1 - exp(2 log_e1 - log_e2)) >= 0.
    let v = log_e2.exp() * (-(2.0 * log_e1 - log_e2).exp_m1());
    Ok(v.max(0.0) / (a * a))
}

/// The self-normalized ratio construction shared by the tuning loop and the
/// divergence diagnostic.
pub struct RatioTerms {
    /// logw_j + log pi_j (importance weights targeting pi).
    pub lw_pi: Vec<f64>,
    /// logw_j + log qt_j (importance weights targeting q_t).
    pub lw_qt: Vec<f64>,
    /// log of the normalizer ratio estimate Z_pi / Z_qt.
    pub log_r: f64,
    /// log u_j = log pi_j - log r - log qt_j.
    pub log_u: Vec<f64>,
}

/// Importance estimates of Z_pi and Z_qt from the same weights, their ratio,
/// and the per-particle normalized density ratios u_j.
pub fn ratio_terms(logw: &[f64], log_pi: &[f64], log_qt: &[f64]) -> Result<RatioTerms> {
    if logw.len() != log_pi.len() || logw.len() != log_qt.len() {
        return Err(Error::LengthMismatch {
            expected: logw.len(),
            actual: log_pi.len().min(log_qt.len()),
        });
    }
    let lw_pi: Vec<f64> = logw.iter().zip(log_pi).map(|(&w, &p)| w + p).collect();
    let lw_qt: Vec<f64> = logw.iter().zip(log_qt).map(|(&w, &q)| w + q).collect();
    let l_z_pi = logsumexp(&lw_pi)?;
    let l_z_qt = logsumexp(&lw_qt)?;
    if l_z_pi == f64::NEG_INFINITY || l_z_qt == f64::NEG_INFINITY {
        return Err(Error::DegenerateEnsemble(
            "importance weights carry no mass".into(),
        ));
    }
    let log_r = l_z_pi - l_z_qt;
    let log_u: Vec<f64> = log_pi
        .iter()
        .zip(log_qt)
        .map(|(&p, &q)| p - log_r - q)
        .collect();
    Ok(RatioTerms {
        lw_pi,
        lw_qt,
        log_r,
        log_u,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{
        finite_difference_gradient, max_relative_error, RngStream,
    };
    use crate::targets::{make_gaussian, standard_normal, DensityModel};
    use rand::Rng;

    const ALPHAS: [f64; 5] = [-0.5, 0.0, 0.5, 1.0, 2.0];

    fn test_pair() -> (DensityModel, DensityModel) {
        let q0 = standard_normal(2);
        let pi = make_gaussian(vec![1.0, -0.5], vec![0.5, 2.0]).unwrap();
        (q0, pi)
    }

    fn random_z(rng: &mut crate::numerics::Generator, d: usize, scale: f64) -> Vec<f64> {
        (0..d).map(|_| scale * (rng.random::<f64>() - 0.5)).collect()
    }

    #[test]
    fn endpoints_are_exact_for_all_alphas() {
        let (q0, pi) = test_pair();
        let mut rng = RngStream::new(3).rng();
        for &alpha in &ALPHAS {
            let path = AnnealingPath::new(q0.clone(), pi.clone(), alpha).unwrap();
            for _ in 0..100 {
                let z = random_z(&mut rng, 2, 8.0);
                let at0 = path.log_bridge(0.0, &z).unwrap();
                let at1 = path.log_bridge(1.0, &z).unwrap();
                assert!((at0 - q0.log_density(&z)).abs() < 1e-10);
                assert!((at1 - pi.log_density(&z)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn t_outside_unit_interval_is_an_error() {
        let (q0, pi) = test_pair();
        let path = AnnealingPath::geometric(q0, pi).unwrap();
        assert!(path.log_bridge(-0.1, &[0.0, 0.0]).is_err());
        assert!(path.log_bridge(1.1, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn geometric_bridge_hand_value() {
        // q0 = N(0,1) unnormalized, target = exp(-(z-2)^2/2), t = 1/2, z = 1:
        // 0.5 (-0.5) + 0.5 (-0.5) = -0.5.
        let q0 = make_gaussian(vec![0.0], vec![1.0]).unwrap();
        let pi = make_gaussian(vec![2.0], vec![1.0]).unwrap();
        let path = AnnealingPath::geometric(q0, pi).unwrap();
        let got = path.log_bridge(0.5, &[1.0]).unwrap();
        assert!((got + 0.5).abs() < 1e-14);
    }

    #[test]
    fn arithmetic_mean_identity_at_alpha_one() {
        let (q0, pi) = test_pair();
        let path = AnnealingPath::new(q0.clone(), pi.clone(), 1.0).unwrap();
        for z in [[0.3, -0.7], [1.0, 1.0], [-2.0, 0.1]] {
            let direct = (0.5 * pi.log_density(&z).exp() + 0.5 * q0.log_density(&z).exp()).ln();
            let got = path.log_bridge(0.5, &z).unwrap();
            assert!((got - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn gradients_match_finite_differences_over_grid() {
        let (q0, pi) = test_pair();
        let mut rng = RngStream::new(5).rng();
        for &alpha in &ALPHAS {
            let path = AnnealingPath::new(q0.clone(), pi.clone(), alpha).unwrap();
            for &t in &[0.1, 0.5, 0.9] {
                for _ in 0..50 {
                    let z = random_z(&mut rng, 2, 6.0);
                    let analytic = path.grad_log_bridge(t, &z).unwrap();
                    let numeric =
                        finite_difference_gradient(|x| path.log_bridge(t, x).unwrap(), &z);
                    let err = max_relative_error(&analytic, &numeric);
                    assert!(err < 1e-4, "alpha={alpha} t={t} err={err}");
                }
            }
        }
    }

    #[test]
    fn endpoint_gradients_are_exact() {
        let (q0, pi) = test_pair();
        for &alpha in &ALPHAS {
            let path = AnnealingPath::new(q0.clone(), pi.clone(), alpha).unwrap();
            let z = [0.4, -1.2];
            assert_eq!(path.grad_log_bridge(0.0, &z).unwrap(), q0.grad_log_density(&z));
            assert_eq!(path.grad_log_bridge(1.0, &z).unwrap(), pi.grad_log_density(&z));
        }
    }

    #[test]
    fn identical_endpoints_make_the_bridge_t_independent() {
        let q0 = standard_normal(2);
        for &alpha in &ALPHAS {
            let path = AnnealingPath::new(q0.clone(), q0.clone(), alpha).unwrap();
            let z = [0.7, -0.3];
            let base = q0.log_density(&z);
            for &t in &[0.0, 0.25, 0.5, 0.99, 1.0] {
                assert_eq!(path.log_bridge(t, &z).unwrap(), base);
                assert_eq!(path.grad_log_bridge(t, &z).unwrap(), q0.grad_log_density(&z));
            }
        }
        // Equal-but-separate endpoint objects stay t-independent to 1e-12.
        let a = standard_normal(2);
        let b = standard_normal(2);
        for &alpha in &ALPHAS {
            let path = AnnealingPath::new(a.clone(), b.clone(), alpha).unwrap();
            let z = [0.7, -0.3];
            let base = a.log_density(&z);
            for &t in &[0.25, 0.5, 0.75] {
                assert!((path.log_bridge(t, &z).unwrap() - base).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn geometric_bridge_is_monotone_in_t_where_target_dominates() {
        let (q0, pi) = test_pair();
        let path = AnnealingPath::geometric(q0.clone(), pi.clone()).unwrap();
        let z = [1.0, -0.5];
        assert!(pi.log_density(&z) > q0.log_density(&z));
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            let v = path.log_bridge(t, &z).unwrap();
            assert!(v > prev || i == 0);
            prev = v;
        }
    }

    #[test]
    fn small_alpha_approaches_the_geometric_path() {
        let (q0, pi) = test_pair();
        let geo = AnnealingPath::geometric(q0.clone(), pi.clone()).unwrap();
        let pow = AnnealingPath::new(q0, pi, 1e-6).unwrap();
        let mut rng = RngStream::new(11).rng();
        for _ in 0..50 {
            let z = random_z(&mut rng, 2, 6.0);
            for &t in &[0.2, 0.5, 0.8] {
                let a = geo.log_bridge(t, &z).unwrap();
                let b = pow.log_bridge(t, &z).unwrap();
                assert!((a - b).abs() < 1e-4, "t={t} {a} vs {b}");
            }
        }
    }

    #[test]
    fn power_mean_survives_huge_log_density_magnitudes() {
        // alpha * log-density of order 1e4 must stay in log space.
        let q0 = make_gaussian(vec![0.0; 512], vec![1.0; 512]).unwrap();
        let pi = make_gaussian(vec![0.0; 512], vec![0.01; 512]).unwrap();
        for &alpha in &[-0.5, 0.5, 2.0] {
            let path = AnnealingPath::new(q0.clone(), pi.clone(), alpha).unwrap();
            let z = vec![1.5; 512];
            let v = path.log_bridge(0.5, &z).unwrap();
            assert!(v.is_finite(), "alpha={alpha} gave {v}");
        }
    }

    #[test]
    fn g_closed_forms_match_the_table_rows() {
        // Pearson chi^2 (alpha = 2): our g = (u^2-1)/2, half the table's row.
        let d2 = divergence_table(2.0);
        for u in [0.25, 1.0, 3.0] {
            assert!((d2.g(u) - (u * u - 1.0) / 2.0).abs() < 1e-12);
        }
        // Inverse KL (alpha = 0): g(u) = log u - 1, so g(1) = -1.
        let d0 = divergence_table(0.0);
        assert!((d0.g(1.0) + 1.0).abs() < 1e-15);
        // Squared Hellinger (alpha = 1/2): our g = 2 (sqrt(u) - 1).
        let dh = divergence_table(0.5);
        for u in [0.25, 1.0, 4.0] {
            assert!((dh.g(u) - 2.0 * (u.sqrt() - 1.0)).abs() < 1e-12);
        }
        // Neyman chi^2 (alpha = -1): our g = 1 - 1/u, half the table's 2 - 2/u.
        let dn = divergence_table(-1.0);
        for u in [0.5, 1.0, 2.0] {
            assert!((dn.g(u) - (1.0 - 1.0 / u)).abs() < 1e-12);
        }
        // KL (alpha = 1): g(u) = u.
        let d1 = divergence_table(1.0);
        assert!((d1.g(2.5) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn f_is_zero_at_one_and_convex_on_a_grid() {
        for &alpha in &[-1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
            let div = divergence_table(alpha);
            assert!(div.f(1.0).abs() < 1e-12, "alpha={alpha}");
            // Numeric convexity: second differences non-negative.
            let us: Vec<f64> = (1..200).map(|i| 0.05 * i as f64).collect();
            for w in us.windows(3) {
                let second = div.f(w[0]) - 2.0 * div.f(w[1]) + div.f(w[2]);
                assert!(second > -1e-9, "alpha={alpha} u={}", w[1]);
            }
        }
    }

    #[test]
    fn g_consistent_with_numeric_u_fprime_minus_f() {
        // u f'(u) - f(u) should match g up to an additive constant.
        for &alpha in &[-1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
            let div = divergence_table(alpha);
            let us: Vec<f64> = (1..=100).map(|i| 0.1 * i as f64).collect();
            let h = 1e-6;
            let numeric: Vec<f64> = us
                .iter()
                .map(|&u| {
                    let fp = (div.f(u + h) - div.f(u - h)) / (2.0 * h);
                    u * fp - div.f(u)
                })
                .collect();
            let implemented: Vec<f64> = us.iter().map(|&u| div.g(u)).collect();
            let diffs: Vec<f64> = numeric
                .iter()
                .zip(&implemented)
                .map(|(n, g)| n - g)
                .collect();
            let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
            for d in &diffs {
                assert!(
                    (d - mean).abs() < 1e-5,
                    "alpha={alpha} residual {}",
                    (d - mean).abs()
                );
            }
        }
    }

    #[test]
    fn divergence_estimate_is_zero_for_identical_distributions() {
        let div = divergence_table(0.0);
        let logw = vec![0.0; 16];
        let dens = vec![-1.3; 16];
        let d = estimate_f_divergence(&div, &logw, &dens, &dens).unwrap();
        assert!(d.abs() < 1e-14);
    }

    #[test]
    fn divergence_estimate_matches_hand_computation_on_two_points() {
        // Two particles, uniform weights. u_j = (pi_j/q_j) / r with
        // r = (sum w pi) / (sum w q); divergence = sum W_j (-log u_j) with
        // W proportional to w_j q_j.
        let div = divergence_table(0.0);
        let logw = [0.0, 0.0];
        let log_pi = [(0.8f64).ln(), (0.2f64).ln()];
        let log_qt = [(0.5f64).ln(), (0.5f64).ln()];
        let r: f64 = (0.8 + 0.2) / (0.5 + 0.5);
        let u: [f64; 2] = [0.8 / 0.5 / r, 0.2 / 0.5 / r];
        let expected = 0.5 * -u[0].ln() + 0.5 * -u[1].ln();
        let got = estimate_f_divergence(&div, &logw, &log_pi, &log_qt).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn divergence_estimate_nonnegative_up_to_noise_on_gaussian_toy() {
        // Jensen: D_f >= 0 for convex f with f(1) = 0. Monte Carlo with
        // N = 1e5 exact samples from q and 3-SE slack.
        let n = 100_000;
        let q = standard_normal(1);
        let p = make_gaussian(vec![0.5], vec![1.0]).unwrap();
        let mut rng = RngStream::new(21).rng();
        let mut log_pi = Vec::with_capacity(n);
        let mut log_qt = Vec::with_capacity(n);
        for _ in 0..n {
            let z = q.sample(&mut rng).unwrap();
            log_pi.push(p.log_density(&z));
            log_qt.push(q.log_density(&z));
        }
        let logw = vec![0.0; n];
        for &alpha in &[0.0, 0.5, 1.0] {
            let div = divergence_table(alpha);
            let d = estimate_f_divergence(&div, &logw, &log_pi, &log_qt).unwrap();
            // SE of the f-mean, crude but adequate for the slack check.
            let terms = ratio_terms(&logw, &log_pi, &log_qt).unwrap();
            let fv: Vec<f64> = terms.log_u.iter().map(|&lu| div.f_from_log(lu)).collect();
            let var = self_normalized_variance(&terms.lw_qt, &fv).unwrap();
            let se = (var / n as f64).sqrt();
            assert!(d > -3.0 * se, "alpha={alpha} d={d} se={se}");
        }
    }

    #[test]
    fn variance_of_g_agrees_with_direct_route() {
        // The log-space variance must equal the plain self-normalized
        // variance of g(u) wherever the latter is representable.
        let logw_qt = [0.1, -0.4, 0.9, 0.0];
        let log_u = [0.2, -0.5, 0.1, 0.7];
        for &alpha in &[-0.5, 0.5, 1.0, 2.0] {
            let div = divergence_table(alpha);
            let direct_vals: Vec<f64> = log_u.iter().map(|&lu| div.g_from_log(lu)).collect();
            let direct = self_normalized_variance(&logw_qt, &direct_vals).unwrap();
            let stable = weighted_variance_of_g(&div, &logw_qt, &log_u).unwrap();
            assert!(
                (direct - stable).abs() < 1e-10 * (1.0 + direct),
                "alpha={alpha}: {direct} vs {stable}"
            );
        }
    }

    #[test]
    fn variance_of_g_survives_extreme_ratios() {
        let div = divergence_table(2.0);
        // u^2 would overflow; the log-space route must stay finite or inf,
        // never NaN.
        let logw_qt = [0.0, 0.0];
        let log_u = [500.0, -500.0];
        let v = weighted_variance_of_g(&div, &logw_qt, &log_u).unwrap();
        assert!(!v.is_nan());
    }
}
