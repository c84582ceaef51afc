//! Proposal and target models: unnormalized log-densities with analytic
//! gradients, optional ground-truth normalizers and samplers.
//!
//! Gaussian-family models store the *unnormalized* form and keep the
//! normalizer in `true_log_z`, so targets are exercised exactly as annealed
//! importance sampling assumes. Mixture components are stored normalized so
//! the mixture's true log Z is exactly zero.

mod benchmarks;
mod logistic;

pub use benchmarks::{make_2d_benchmark, mixture4_modes, Bananas, Benchmark2d, Ring};
pub use logistic::{
    load_logistic_dataset, make_logistic_posterior, parse_logistic_csv, LogisticPosterior,
    LogisticRegressionData, SYNTHETIC_LOGISTIC_CSV,
};

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal, StudentT as StudentTDistr};

use crate::error::{Error, Result};
use crate::numerics::{logsumexp, Generator};

/// An unnormalized density on R^d with analytic gradient.
///
/// Implementations must be pure and reentrant; models are immutable after
/// construction and safely shareable across workers.
pub trait Density: Send + Sync {
    fn dim(&self) -> usize;
    /// Unnormalized log-density in nats. Finite on all of R^d for every
    /// shipped model.
    fn log_density(&self, z: &[f64]) -> f64;
    fn grad_log_density(&self, z: &[f64]) -> Vec<f64>;
    /// Analytic log normalization constant, when known.
    fn true_log_z(&self) -> Option<f64> {
        None
    }
    fn is_samplable(&self) -> bool {
        false
    }
    fn sample(&self, _rng: &mut Generator) -> Result<Vec<f64>> {
        Err(Error::InvalidParameter(
            "model does not support direct sampling".into(),
        ))
    }
    fn name(&self) -> &str {
        "density"
    }
}

/// Shared handle to a density model.
pub type DensityModel = Arc<dyn Density>;

fn ensure_dim(model_dim: usize, z: &[f64]) {
    debug_assert_eq!(model_dim, z.len(), "dimension mismatch");
}

/// Diagonal Gaussian stored unnormalized: log p(z) = -sum (z-mu)^2 / (2 s^2).
#[derive(Clone, Debug)]
pub struct Gaussian {
    mean: Vec<f64>,
    var: Vec<f64>,
    sd: Vec<f64>,
    log_norm: f64,
}

impl Gaussian {
    pub fn new(mean: Vec<f64>, diag_var: Vec<f64>) -> Result<Self> {
        if mean.is_empty() || mean.len() != diag_var.len() {
            return Err(Error::InvalidParameter(
                "gaussian mean/variance lengths must match and be non-empty".into(),
            ));
        }
        if diag_var.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidParameter(
                "gaussian variances must be positive".into(),
            ));
        }
        let log_norm = diag_var
            .iter()
            .map(|&v| 0.5 * (2.0 * std::f64::consts::PI * v).ln())
            .sum();
        let sd = diag_var.iter().map(|&v| v.sqrt()).collect();
        Ok(Self {
            mean,
            var: diag_var,
            sd,
            log_norm,
        })
    }

    pub fn isotropic(dim: usize, mean: f64, var: f64) -> Result<Self> {
        Self::new(vec![mean; dim], vec![var; dim])
    }
}

impl Density for Gaussian {
    fn dim(&self) -> usize {
        self.mean.len()
    }

    fn log_density(&self, z: &[f64]) -> f64 {
        ensure_dim(self.dim(), z);
        let mut acc = 0.0;
        for k in 0..z.len() {
            let d = z[k] - self.mean[k];
            acc -= d * d / (2.0 * self.var[k]);
        }
        acc
    }

    fn grad_log_density(&self, z: &[f64]) -> Vec<f64> {
        ensure_dim(self.dim(), z);
        (0..z.len())
            .map(|k| -(z[k] - self.mean[k]) / self.var[k])
            .collect()
    }

    fn true_log_z(&self) -> Option<f64> {
        Some(self.log_norm)
    }

    fn is_samplable(&self) -> bool {
        true
    }

    fn sample(&self, rng: &mut Generator) -> Result<Vec<f64>> {
        Ok((0..self.dim())
            .map(|k| self.mean[k] + self.sd[k] * rng.sample::<f64, _>(StandardNormal))
            .collect())
    }

    fn name(&self) -> &str {
        "gaussian"
    }
}

/// Mixture of diagonal Gaussians with *normalized* components, so the
/// mixture integrates to one and `true_log_z` is exactly zero.
#[derive(Clone, Debug)]
pub struct GaussianMixture {
    log_weights: Vec<f64>,
    means: Vec<Vec<f64>>,
    vars: Vec<Vec<f64>>,
    comp_log_norm: Vec<f64>,
    dim: usize,
}

impl GaussianMixture {
    pub fn new(weights: Vec<f64>, means: Vec<Vec<f64>>, diag_vars: Vec<Vec<f64>>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("empty mixture".into()));
        }
        if means.len() != weights.len() || diag_vars.len() != weights.len() {
            return Err(Error::InvalidParameter(
                "mixture weights/means/variances must have equal lengths".into(),
            ));
        }
        let dim = means[0].len();
        if dim == 0 || means.iter().any(|m| m.len() != dim) {
            return Err(Error::InvalidParameter(
                "mixture means must share a positive dimension".into(),
            ));
        }
        if diag_vars
            .iter()
            .any(|v| v.len() != dim || v.iter().any(|&x| !(x > 0.0)))
        {
            return Err(Error::InvalidParameter(
                "mixture variances must be positive and match the dimension".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|&w| !(w > 0.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(
                "mixture weights must be positive and sum to one".into(),
            ));
        }
        let comp_log_norm = diag_vars
            .iter()
            .map(|v| {
                v.iter()
                    .map(|&x| 0.5 * (2.0 * std::f64::consts::PI * x).ln())
                    .sum()
            })
            .collect();
        Ok(Self {
            log_weights: weights.iter().map(|w| w.ln()).collect(),
            means,
            vars: diag_vars,
            comp_log_norm,
            dim,
        })
    }

    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }

    fn component_log_terms(&self, z: &[f64]) -> Vec<f64> {
        (0..self.log_weights.len())
            .map(|k| {
                let mut acc = self.log_weights[k] - self.comp_log_norm[k];
                for j in 0..self.dim {
                    let d = z[j] - self.means[k][j];
                    acc -= d * d / (2.0 * self.vars[k][j]);
                }
                acc
            })
            .collect()
    }
}

impl Density for GaussianMixture {
    fn dim(&self) -> usize {
        self.dim
    }

    fn log_density(&self, z: &[f64]) -> f64 {
        ensure_dim(self.dim, z);
        logsumexp(&self.component_log_terms(z)).expect("non-empty mixture")
    }

    fn grad_log_density(&self, z: &[f64]) -> Vec<f64> {
        ensure_dim(self.dim, z);
        let terms = self.component_log_terms(z);
        let lse = logsumexp(&terms).expect("non-empty mixture");
        let mut grad = vec![0.0; self.dim];
        for (k, &t) in terms.iter().enumerate() {
            let resp = (t - lse).exp();
            for j in 0..self.dim {
                grad[j] += resp * (-(z[j] - self.means[k][j]) / self.vars[k][j]);
            }
        }
        grad
    }

    fn true_log_z(&self) -> Option<f64> {
        Some(0.0)
    }

    fn is_samplable(&self) -> bool {
        true
    }

    fn sample(&self, rng: &mut Generator) -> Result<Vec<f64>> {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut pick = self.log_weights.len() - 1;
        for (k, lw) in self.log_weights.iter().enumerate() {
            acc += lw.exp();
            if u < acc {
                pick = k;
                break;
            }
        }
        Ok((0..self.dim)
            .map(|j| {
                self.means[pick][j]
                    + self.vars[pick][j].sqrt() * rng.sample::<f64, _>(StandardNormal)
            })
            .collect())
    }

    fn name(&self) -> &str {
        "gaussian_mixture"
    }
}

/// Factorized Laplace: log p(z) = -sum |z_k| / b, true log Z = d log(2b).
#[derive(Clone, Debug)]
pub struct Laplace {
    scale: f64,
    dim: usize,
}

impl Laplace {
    pub fn new(scale: f64, dim: usize) -> Result<Self> {
        if !(scale > 0.0) || dim == 0 {
            return Err(Error::InvalidParameter(
                "laplace scale must be positive and dim >= 1".into(),
            ));
        }
        Ok(Self { scale, dim })
    }
}

impl Density for Laplace {
    fn dim(&self) -> usize {
        self.dim
    }

    fn log_density(&self, z: &[f64]) -> f64 {
        ensure_dim(self.dim, z);
        -z.iter().map(|x| x.abs()).sum::<f64>() / self.scale
    }

    fn grad_log_density(&self, z: &[f64]) -> Vec<f64> {
        ensure_dim(self.dim, z);
        // Subgradient 0 at the kink.
        z.iter().map(|&x| -x.signum() / self.scale * if x == 0.0 { 0.0 } else { 1.0 }).collect()
    }

    fn true_log_z(&self) -> Option<f64> {
        Some(self.dim as f64 * (2.0 * self.scale).ln())
    }

    fn is_samplable(&self) -> bool {
        true
    }

    fn sample(&self, rng: &mut Generator) -> Result<Vec<f64>> {
        let exp = Exp::new(1.0 / self.scale).expect("positive rate");
        Ok((0..self.dim)
            .map(|_| {
                let mag = exp.sample(rng);
                if rng.random::<bool>() {
                    mag
                } else {
                    -mag
                }
            })
            .collect())
    }

    fn name(&self) -> &str {
        "laplace"
    }
}

/// Factorized Student-T: log p(z) = -((nu+1)/2) sum log(1 + z_k^2 / nu).
#[derive(Clone, Debug)]
pub struct StudentT {
    dof: f64,
    dim: usize,
}

impl StudentT {
    pub fn new(dof: f64, dim: usize) -> Result<Self> {
        if !(dof > 0.0) || dim == 0 {
            return Err(Error::InvalidParameter(
                "student-t dof must be positive and dim >= 1".into(),
            ));
        }
        Ok(Self { dof, dim })
    }
}

impl Density for StudentT {
    fn dim(&self) -> usize {
        self.dim
    }

    fn log_density(&self, z: &[f64]) -> f64 {
        ensure_dim(self.dim, z);
        let c = -(self.dof + 1.0) / 2.0;
        z.iter().map(|&x| c * (1.0 + x * x / self.dof).ln()).sum()
    }

    fn grad_log_density(&self, z: &[f64]) -> Vec<f64> {
        ensure_dim(self.dim, z);
        z.iter()
            .map(|&x| -(self.dof + 1.0) * x / (self.dof + x * x))
            .collect()
    }

    fn true_log_z(&self) -> Option<f64> {
        use crate::numerics::ln_gamma;
        let nu = self.dof;
        let per_dim = 0.5 * (nu * std::f64::consts::PI).ln() + ln_gamma(nu / 2.0)
            - ln_gamma((nu + 1.0) / 2.0);
        Some(self.dim as f64 * per_dim)
    }

    fn is_samplable(&self) -> bool {
        true
    }

    fn sample(&self, rng: &mut Generator) -> Result<Vec<f64>> {
        let t = StudentTDistr::new(self.dof)
            .map_err(|e| Error::InvalidParameter(format!("student-t sampler: {e}")))?;
        Ok((0..self.dim).map(|_| t.sample(rng)).collect())
    }

    fn name(&self) -> &str {
        "student_t"
    }
}

/// Wrapper that subtracts the analytic normalizer, yielding a density that
/// integrates to one (`true_log_z` becomes zero). Used for proposals, where
/// the importance-weight bookkeeping assumes a normalized q0.
struct NormalizedModel {
    inner: DensityModel,
    shift: f64,
}

impl Density for NormalizedModel {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn log_density(&self, z: &[f64]) -> f64 {
        self.inner.log_density(z) - self.shift
    }
    fn grad_log_density(&self, z: &[f64]) -> Vec<f64> {
        self.inner.grad_log_density(z)
    }
    fn true_log_z(&self) -> Option<f64> {
        Some(0.0)
    }
    fn is_samplable(&self) -> bool {
        self.inner.is_samplable()
    }
    fn sample(&self, rng: &mut Generator) -> Result<Vec<f64>> {
        self.inner.sample(rng)
    }
    fn name(&self) -> &str {
        self.inner.name()
    }
}

/// Normalize a model with known `true_log_z` by folding the constant in.
pub fn normalized(model: DensityModel) -> Result<DensityModel> {
    let shift = model.true_log_z().ok_or_else(|| {
        Error::InvalidParameter("cannot normalize a model without analytic log Z".into())
    })?;
    Ok(Arc::new(NormalizedModel {
        inner: model,
        shift,
    }))
}

/// The canonical proposal: a normalized standard Gaussian N(0, I).
pub fn standard_normal(dim: usize) -> DensityModel {
    normalized(Arc::new(
        Gaussian::isotropic(dim, 0.0, 1.0).expect("valid standard normal"),
    ))
    .expect("gaussian has analytic log Z")
}

/// Instrumented wrapper counting density and gradient calls. Used to audit
/// the samplers' evaluation accounting.
pub struct CountedDensity {
    inner: DensityModel,
    density_calls: AtomicU64,
    grad_calls: AtomicU64,
}

impl CountedDensity {
    pub fn new(inner: DensityModel) -> Arc<Self> {
        Arc::new(Self {
            inner,
            density_calls: AtomicU64::new(0),
            grad_calls: AtomicU64::new(0),
        })
    }

    pub fn density_calls(&self) -> u64 {
        self.density_calls.load(Ordering::Relaxed)
    }

    pub fn grad_calls(&self) -> u64 {
        self.grad_calls.load(Ordering::Relaxed)
    }
}

impl Density for CountedDensity {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn log_density(&self, z: &[f64]) -> f64 {
        self.density_calls.fetch_add(1, Ordering::Relaxed);
        self.inner.log_density(z)
    }
    fn grad_log_density(&self, z: &[f64]) -> Vec<f64> {
        self.grad_calls.fetch_add(1, Ordering::Relaxed);
        self.inner.grad_log_density(z)
    }
    fn true_log_z(&self) -> Option<f64> {
        self.inner.true_log_z()
    }
    fn is_samplable(&self) -> bool {
        self.inner.is_samplable()
    }
    fn sample(&self, rng: &mut Generator) -> Result<Vec<f64>> {
        self.inner.sample(rng)
    }
    fn name(&self) -> &str {
        self.inner.name()
    }
}

/// Diagonal Gaussian constructor returning a shared model handle.
pub fn make_gaussian(mean: Vec<f64>, diag_var: Vec<f64>) -> Result<DensityModel> {
    Ok(Arc::new(Gaussian::new(mean, diag_var)?))
}

pub fn make_gaussian_mixture(
    weights: Vec<f64>,
    means: Vec<Vec<f64>>,
    diag_vars: Vec<Vec<f64>>,
) -> Result<DensityModel> {
    Ok(Arc::new(GaussianMixture::new(weights, means, diag_vars)?))
}

pub fn make_laplace(scale: f64, dim: usize) -> Result<DensityModel> {
    Ok(Arc::new(Laplace::new(scale, dim)?))
}

pub fn make_student_t(dof: f64, dim: usize) -> Result<DensityModel> {
    Ok(Arc::new(StudentT::new(dof, dim)?))
}

/// Mixture of `k` unit-variance components with means drawn once from a
/// seeded standard normal scaled by `spread`. Normalized, so log Z = 0.
pub fn make_seeded_mixture(dim: usize, k: usize, spread: f64, seed: u64) -> Result<DensityModel> {
    if k == 0 {
        return Err(Error::InvalidParameter("empty mixture".into()));
    }
    let mut rng = crate::numerics::RngStream::new(seed).rng();
    let means: Vec<Vec<f64>> = (0..k)
        .map(|_| {
            (0..dim)
                .map(|_| spread * rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect();
    make_gaussian_mixture(vec![1.0 / k as f64; k], means, vec![vec![1.0; dim]; k])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{finite_difference_gradient, max_relative_error, RngStream};

    fn fd_check(model: &dyn Density, z: &[f64], tol: f64) {
        let analytic = model.grad_log_density(z);
        let numeric = finite_difference_gradient(|x| model.log_density(x), z);
        let err = max_relative_error(&analytic, &numeric);
        assert!(err < tol, "gradient mismatch {err} at {z:?}");
    }

    fn random_probes(model: &dyn Density, n: usize, scale: f64, seed: u64) -> Vec<Vec<f64>> {
        use rand::Rng;
        let mut rng = RngStream::new(seed).rng();
        (0..n)
            .map(|_| {
                (0..model.dim())
                    .map(|_| scale * (rng.random::<f64>() * 2.0 - 1.0))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn gaussian_mode_and_gradient() {
        let g = Gaussian::isotropic(1, 0.0, 1.0).unwrap();
        assert_eq!(g.log_density(&[0.0]), 0.0);
        assert_eq!(g.grad_log_density(&[0.0]), vec![0.0]);
    }

    #[test]
    fn gaussian_normalizer_matches_formula() {
        let g = Gaussian::isotropic(2, 0.0, 0.01).unwrap();
        let expected = 2.0 * 0.5 * (2.0 * std::f64::consts::PI * 0.01).ln();
        assert!((g.true_log_z().unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn gaussian_rejects_bad_variance() {
        assert!(Gaussian::isotropic(2, 0.0, 0.0).is_err());
        assert!(Gaussian::isotropic(2, 0.0, -1.0).is_err());
    }

    #[test]
    fn single_component_mixture_reduces_to_gaussian() {
        let g = Gaussian::new(vec![1.0, -0.5], vec![2.0, 0.5]).unwrap();
        let m = GaussianMixture::new(
            vec![1.0],
            vec![vec![1.0, -0.5]],
            vec![vec![2.0, 0.5]],
        )
        .unwrap();
        // The mixture folds the normalizer in, so the two differ by log Z.
        for z in [[0.0, 0.0], [1.3, -2.0], [-4.0, 0.7]] {
            let diff = g.log_density(&z) - m.log_density(&z);
            assert!((diff - g.true_log_z().unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_mixture_gradient_vanishes_at_center() {
        let m = GaussianMixture::new(
            vec![0.5, 0.5],
            vec![vec![2.0], vec![-2.0]],
            vec![vec![1.0], vec![1.0]],
        )
        .unwrap();
        let g = m.grad_log_density(&[0.0]);
        assert!(g[0].abs() < 1e-14);
    }

    #[test]
    fn two_component_density_hand_value() {
        // Means 0 and 2, unit variances, equal weights: at z = 1 both
        // components agree, so the density is exp(-1/2) / sqrt(2 pi).
        let m = GaussianMixture::new(
            vec![0.5, 0.5],
            vec![vec![0.0], vec![2.0]],
            vec![vec![1.0], vec![1.0]],
        )
        .unwrap();
        let expected = (-0.5_f64).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert!((m.log_density(&[1.0]) - expected.ln()).abs() < 1e-12);
    }

    #[test]
    fn mixture_rejects_bad_weights() {
        assert!(GaussianMixture::new(vec![], vec![], vec![]).is_err());
        assert!(GaussianMixture::new(
            vec![0.5, 0.6],
            vec![vec![0.0], vec![1.0]],
            vec![vec![1.0], vec![1.0]]
        )
        .is_err());
    }

    #[test]
    fn laplace_normalizer_is_log_two_in_one_dim() {
        let l = Laplace::new(1.0, 1).unwrap();
        assert!((l.true_log_z().unwrap() - 2.0_f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn student_t_gradient_values() {
        let t = StudentT::new(3.0, 1).unwrap();
        assert_eq!(t.grad_log_density(&[0.0]), vec![0.0]);
        // -(nu+1) z / (nu + z^2) at z = 1: -4/4 = -1.
        assert!((t.grad_log_density(&[1.0])[0] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn invalid_parameters_error() {
        assert!(Laplace::new(0.0, 1).is_err());
        assert!(StudentT::new(-3.0, 1).is_err());
        assert!(StudentT::new(3.0, 0).is_err());
    }

    #[test]
    fn gradients_match_finite_differences() {
        let models: Vec<DensityModel> = vec![
            Arc::new(Gaussian::new(vec![0.5, -1.0], vec![0.3, 2.0]).unwrap()),
            Arc::new(
                GaussianMixture::new(
                    vec![0.25, 0.75],
                    vec![vec![1.0, 1.0], vec![-1.0, 0.0]],
                    vec![vec![0.5, 1.5], vec![1.0, 1.0]],
                )
                .unwrap(),
            ),
            Arc::new(Laplace::new(0.7, 3).unwrap()),
            Arc::new(StudentT::new(3.0, 3).unwrap()),
        ];
        for (i, m) in models.iter().enumerate() {
            for z in random_probes(m.as_ref(), 100, 3.0, 100 + i as u64) {
                fd_check(m.as_ref(), &z, 1e-4);
            }
        }
    }

    #[test]
    fn normalized_model_integrates_to_one_in_log_space() {
        let g: DensityModel = Arc::new(Gaussian::isotropic(1, 0.0, 1.0).unwrap());
        let n = normalized(g).unwrap();
        assert_eq!(n.true_log_z(), Some(0.0));
        let expected = -0.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((n.log_density(&[0.0]) - expected).abs() < 1e-14);
    }

    // Trapezoid quadrature oracles for models with an analytic normalizer.
    fn trapezoid_1d(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut acc = 0.5 * (f(a) + f(b));
        for i in 1..n {
            acc += f(a + i as f64 * h);
        }
        acc * h
    }

    #[test]
    fn quadrature_confirms_normalizers_in_one_dim() {
        let cases: Vec<(DensityModel, f64)> = vec![
            (Arc::new(Gaussian::isotropic(1, 0.3, 0.5).unwrap()), 12.0),
            (Arc::new(Laplace::new(1.0, 1).unwrap()), 20.0),
            (Arc::new(StudentT::new(3.0, 1).unwrap()), 40.0),
        ];
        for (m, half_width) in cases {
            let z = trapezoid_1d(|x| m.log_density(&[x]).exp(), -half_width, half_width, 200_000);
            let rel = (z - m.true_log_z().unwrap().exp()).abs() / z;
            assert!(rel < 1e-3, "{} quadrature off by {rel}", m.name());
        }
    }

    #[test]
    fn quadrature_confirms_mixture_normalizer_in_two_dims() {
        let m = GaussianMixture::new(
            vec![0.25; 4],
            vec![
                vec![2.0, 2.0],
                vec![-2.0, 2.0],
                vec![2.0, -2.0],
                vec![-2.0, -2.0],
            ],
            vec![vec![1.0; 2]; 4],
        )
        .unwrap();
        let (lo, hi, n) = (-14.0, 14.0, 1400);
        let h = (hi - lo) / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let wx = if i == 0 || i == n { 0.5 } else { 1.0 };
            for j in 0..=n {
                let wy = if j == 0 || j == n { 0.5 } else { 1.0 };
                acc += wx * wy * m.log_density(&[lo + i as f64 * h, lo + j as f64 * h]).exp();
            }
        }
        acc *= h * h;
        assert!((acc - 1.0).abs() < 1e-3, "mixture mass {acc}");
    }

    #[test]
    fn sample_moments_match_analytic_values() {
        let n = 100_000;
        let cases: Vec<(DensityModel, f64, f64)> = vec![
            // (model, mean, variance) per coordinate
            (Arc::new(Gaussian::isotropic(2, 1.5, 0.25).unwrap()), 1.5, 0.25),
            (Arc::new(Laplace::new(1.0, 2).unwrap()), 0.0, 2.0),
            (Arc::new(StudentT::new(3.0, 2).unwrap()), 0.0, 3.0),
        ];
        for (idx, (m, want_mean, want_var)) in cases.iter().enumerate() {
            let mut rng = RngStream::new(900 + idx as u64).rng();
            let mut xs = Vec::with_capacity(n);
            for _ in 0..n {
                xs.push(m.sample(&mut rng).unwrap()[0]);
            }
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
            let mean_se = (want_var / n as f64).sqrt();
            assert!(
                (mean - want_mean).abs() < 5.0 * mean_se,
                "{} mean {mean} vs {want_mean}",
                m.name()
            );
            // Loose SE for the variance: fine for a smoke-level moment check.
            // Student-T with dof 3 has infinite kurtosis, so give it slack.
            let var_tol = if m.name() == "student_t" { 0.5 } else { 5.0 * want_var * (2.0 / n as f64).sqrt() };
            assert!(
                (var - want_var).abs() < var_tol.max(5.0 * want_var * (2.0 / n as f64).sqrt()),
                "{} variance {var} vs {want_var}",
                m.name()
            );
        }
    }

    #[test]
    fn counted_density_tracks_calls() {
        let g: DensityModel = Arc::new(Gaussian::isotropic(1, 0.0, 1.0).unwrap());
        let counted = CountedDensity::new(g);
        let as_model: DensityModel = counted.clone();
        as_model.log_density(&[0.1]);
        as_model.log_density(&[0.2]);
        as_model.grad_log_density(&[0.3]);
        assert_eq!(counted.density_calls(), 2);
        assert_eq!(counted.grad_calls(), 1);
    }
}
