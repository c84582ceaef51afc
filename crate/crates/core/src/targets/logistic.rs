//! Bayesian logistic regression: dataset loading and the posterior density.

use std::path::Path;
use std::sync::Arc;

use super::{Density, DensityModel};
use crate::error::{Error, Result};

/// A bundled 50-row synthetic binary classification dataset (3 features,
/// fixed-seed generated and committed), so the logistic benchmark runs
/// without external downloads.
pub const SYNTHETIC_LOGISTIC_CSV: &str = include_str!("../../data/synthetic_logistic.csv");

/// Design matrix plus binary labels.
#[derive(Clone, Debug)]
pub struct LogisticRegressionData {
    /// Row-major N x d feature matrix.
    features: Vec<f64>,
    labels: Vec<u8>,
    n: usize,
    d: usize,
    standardized: bool,
}

impl LogisticRegressionData {
    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_features(&self) -> usize {
        self.d
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn standardized(&self) -> bool {
        self.standardized
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.d..(i + 1) * self.d]
    }
}

fn parse_cell(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok()
}

/// Parse CSV text: numeric feature columns, last column a binary label.
/// A non-numeric first row is treated as a header and skipped.
pub fn parse_logistic_csv(text: &str, standardize: bool) -> Result<LogisticRegressionData> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .peekable();

    // Header auto-detection: skip the first row iff any cell is non-numeric.
    if let Some(first) = lines.peek() {
        if first.split(',').any(|c| parse_cell(c).is_none()) {
            lines.next();
        }
    }

    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut d = None;
    for (idx, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() < 2 {
            return Err(Error::Dataset(format!(
                "row {idx}: need at least one feature column and a label column"
            )));
        }
        let width = cells.len() - 1;
        match d {
            None => d = Some(width),
            Some(w) if w != width => {
                return Err(Error::Dataset(format!(
                    "row {idx}: expected {w} feature columns, found {width}"
                )))
            }
            _ => {}
        }
        for (col, cell) in cells[..width].iter().enumerate() {
            let v = parse_cell(cell).ok_or_else(|| {
                Error::Dataset(format!("row {idx}, column {col}: '{cell}' is not numeric"))
            })?;
            features.push(v);
        }
        let label_cell = cells[width];
        let label = match parse_cell(label_cell) {
            Some(v) if v == 0.0 => 0u8,
            Some(v) if v == 1.0 => 1u8,
            _ => {
                return Err(Error::Dataset(format!(
                    "row {idx}: label '{label_cell}' is not in {{0, 1}}"
                )))
            }
        };
        labels.push(label);
    }

    let d = d.ok_or_else(|| Error::Dataset("dataset has no rows".into()))?;
    let n = labels.len();
    let mut data = LogisticRegressionData {
        features,
        labels,
        n,
        d,
        standardized: false,
    };
    if standardize {
        standardize_columns(&mut data)?;
    }
    Ok(data)
}

fn standardize_columns(data: &mut LogisticRegressionData) -> Result<()> {
    let (n, d) = (data.n, data.d);
    for col in 0..d {
        let mean = (0..n).map(|i| data.features[i * d + col]).sum::<f64>() / n as f64;
        let var = (0..n)
            .map(|i| {
                let x = data.features[i * d + col] - mean;
                x * x
            })
            .sum::<f64>()
            / n as f64;
        if var < 1e-12 {
            return Err(Error::Dataset(format!(
                "column {col} is constant and cannot be standardized"
            )));
        }
        let sd = var.sqrt();
        for i in 0..n {
            data.features[i * d + col] = (data.features[i * d + col] - mean) / sd;
        }
    }
    data.standardized = true;
    Ok(())
}

/// Load a CSV dataset from disk. Errors name the offending row or column.
pub fn load_logistic_dataset(path: &Path, standardize: bool) -> Result<LogisticRegressionData> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Dataset(format!("cannot read {}: {e}", path.display()))
    })?;
    parse_logistic_csv(&text, standardize)
}

/// Posterior of logistic regression weights under a N(0, prior_var I) prior
/// with Bernoulli(sigmoid(x^T z)) likelihood. The prior is stored normalized,
/// so with no data the log normalizer is exactly zero.
pub struct LogisticPosterior {
    data: Arc<LogisticRegressionData>,
    prior_var: f64,
    with_bias: bool,
    dim: usize,
}

impl LogisticPosterior {
    pub fn new(data: Arc<LogisticRegressionData>, prior_var: f64) -> Result<Self> {
        if !(prior_var > 0.0) {
            return Err(Error::InvalidParameter(
                "prior variance must be positive".into(),
            ));
        }
        let dim = data.n_features();
        Ok(Self {
            data,
            prior_var,
            with_bias: false,
            dim,
        })
    }

    /// Append an intercept coordinate (an implicit all-ones feature column).
    /// Off by default, matching the plain sigmoid(x^T z) likelihood.
    pub fn with_bias(mut self) -> Self {
        self.with_bias = true;
        self.dim = self.data.n_features() + 1;
        self
    }

    fn logit(&self, z: &[f64], row: usize) -> f64 {
        let x = self.data.row(row);
        let mut a: f64 = x.iter().zip(z).map(|(xi, zi)| xi * zi).sum();
        if self.with_bias {
            a += z[self.dim - 1];
        }
        a
    }
}

// log sigmoid(a) = -log(1 + exp(-a)), stable at both tails.
fn log_sigmoid(a: f64) -> f64 {
    if a >= 0.0 {
        -(-a).exp().ln_1p()
    } else {
        a - a.exp().ln_1p()
    }
}

fn sigmoid(a: f64) -> f64 {
    if a >= 0.0 {
        1.0 / (1.0 + (-a).exp())
    } else {
        let e = a.exp();
        e / (1.0 + e)
    }
}

impl Density for LogisticPosterior {
    fn dim(&self) -> usize {
        self.dim
    }

    fn log_density(&self, z: &[f64]) -> f64 {
        debug_assert_eq!(z.len(), self.dim);
        let prior_norm = 0.5 * self.dim as f64 * (2.0 * std::f64::consts::PI * self.prior_var).ln();
        let mut acc =
            -z.iter().map(|x| x * x).sum::<f64>() / (2.0 * self.prior_var) - prior_norm;
        for i in 0..self.data.n_rows() {
            let a = self.logit(z, i);
            acc += if self.data.labels()[i] == 1 {
                log_sigmoid(a)
            } else {
                log_sigmoid(-a)
            };
        }
        acc
    }

    fn grad_log_density(&self, z: &[f64]) -> Vec<f64> {
        debug_assert_eq!(z.len(), self.dim);
        let mut grad: Vec<f64> = z.iter().map(|x| -x / self.prior_var).collect();
        for i in 0..self.data.n_rows() {
            let a = self.logit(z, i);
            let resid = self.data.labels()[i] as f64 - sigmoid(a);
            let x = self.data.row(i);
            for (k, xi) in x.iter().enumerate() {
                grad[k] += resid * xi;
            }
            if self.with_bias {
                grad[self.dim - 1] += resid;
            }
        }
        grad
    }

    fn name(&self) -> &str {
        "logistic_posterior"
    }
}

pub fn make_logistic_posterior(
    data: Arc<LogisticRegressionData>,
    prior_var: f64,
) -> Result<DensityModel> {
    Ok(Arc::new(LogisticPosterior::new(data, prior_var)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{finite_difference_gradient, max_relative_error};

    const TOY: &str = "0.5,1.0,0\n-0.25,2.0,1\n1.5,-1.0,1\n";

    #[test]
    fn toy_csv_round_trips() {
        let data = parse_logistic_csv(TOY, false).unwrap();
        assert_eq!(data.n_rows(), 3);
        assert_eq!(data.n_features(), 2);
        assert_eq!(data.labels(), &[0, 1, 1]);
        assert_eq!(data.row(2), &[1.5, -1.0]);
    }

    #[test]
    fn header_is_auto_detected() {
        let with_header = format!("a,b,label\n{TOY}");
        let data = parse_logistic_csv(&with_header, false).unwrap();
        assert_eq!(data.n_rows(), 3);
    }

    #[test]
    fn standardized_columns_have_zero_mean_unit_variance() {
        let data = parse_logistic_csv(TOY, true).unwrap();
        for col in 0..2 {
            let n = data.n_rows();
            let mean: f64 = (0..n).map(|i| data.row(i)[col]).sum::<f64>() / n as f64;
            let var: f64 =
                (0..n).map(|i| data.row(i)[col].powi(2)).sum::<f64>() / n as f64 - mean * mean;
            assert!(mean.abs() < 1e-8);
            assert!((var - 1.0).abs() < 1e-8);
        }
        assert!(data.standardized());
    }

    #[test]
    fn bad_inputs_give_descriptive_errors() {
        assert!(parse_logistic_csv("1.0,notanumber,0\n", false).is_err());
        assert!(parse_logistic_csv("1.0,2.0,7\n", false).is_err());
        // Constant column under standardization.
        assert!(parse_logistic_csv("3.0,1.0,0\n3.0,2.0,1\n", true).is_err());
        assert!(parse_logistic_csv("", false).is_err());
    }

    #[test]
    fn bundled_synthetic_dataset_loads() {
        let data = parse_logistic_csv(SYNTHETIC_LOGISTIC_CSV, true).unwrap();
        assert_eq!(data.n_rows(), 50);
        assert_eq!(data.n_features(), 3);
    }

    #[test]
    #[ignore = "requires a local copy of the Pima diabetes CSV"]
    fn pima_dataset_shape() {
        let path = std::env::var("CRAIS_PIMA_CSV").unwrap_or_else(|_| "data/pima.csv".into());
        let data = load_logistic_dataset(Path::new(&path), true).unwrap();
        assert_eq!(data.n_rows(), 768);
        assert_eq!(data.n_features(), 8);
    }

    #[test]
    fn log_density_at_zero_matches_closed_form() {
        let data = Arc::new(parse_logistic_csv(TOY, false).unwrap());
        let post = LogisticPosterior::new(data.clone(), 5.0).unwrap();
        let z = vec![0.0; 2];
        // Every likelihood term is log(1/2) at z = 0.
        let prior = -0.5 * 2.0 * (2.0 * std::f64::consts::PI * 5.0).ln();
        let expected = prior + 3.0 * 0.5_f64.ln();
        assert!((post.log_density(&z) - expected).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let data = Arc::new(parse_logistic_csv(SYNTHETIC_LOGISTIC_CSV, true).unwrap());
        let post = LogisticPosterior::new(data, 5.0).unwrap();
        for z in [
            vec![0.0, 0.0, 0.0],
            vec![0.5, -1.0, 2.0],
            vec![-2.0, 0.3, 0.7],
        ] {
            let analytic = post.grad_log_density(&z);
            let numeric = finite_difference_gradient(|x| post.log_density(x), &z);
            assert!(max_relative_error(&analytic, &numeric) < 1e-5);
        }
    }

    #[test]
    fn gradient_with_bias_matches_finite_differences() {
        let data = Arc::new(parse_logistic_csv(TOY, false).unwrap());
        let post = LogisticPosterior::new(data, 5.0).unwrap().with_bias();
        assert_eq!(post.dim(), 3);
        let z = vec![0.4, -0.2, 1.1];
        let analytic = post.grad_log_density(&z);
        let numeric = finite_difference_gradient(|x| post.log_density(x), &z);
        assert!(max_relative_error(&analytic, &numeric) < 1e-5);
    }

    #[test]
    fn empty_dataset_reduces_to_the_normalized_prior() {
        let data = Arc::new(LogisticRegressionData {
            features: vec![],
            labels: vec![],
            n: 0,
            d: 2,
            standardized: false,
        });
        let post = LogisticPosterior::new(data, 5.0).unwrap();
        let z = vec![0.3, -0.8];
        let prior = -z.iter().map(|x| x * x).sum::<f64>() / 10.0
            - 0.5 * 2.0 * (2.0 * std::f64::consts::PI * 5.0).ln();
        assert!((post.log_density(&z) - prior).abs() < 1e-12);
    }
}
