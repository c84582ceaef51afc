//! Discretization schedules: the classic heuristics, the constant-rate
//! beta recursion, the binary-search adaptive baseline, and schedule
//! interpolation for the tune-then-test workflow.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ess, logsumexp};

/// Bounds on a single tau increment. The recursion proposes a step and the
/// applied increment is clamped into `[min_step, max_step]`; the floor keeps
/// huge variance estimates from stalling the schedule, the ceiling keeps
/// underestimated variances from jumping straight to the target.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StepClamp {
    pub min_step: f64,
    pub max_step: f64,
}

impl Default for StepClamp {
    fn default() -> Self {
        Self {
            min_step: 1e-6,
            max_step: 1.0 / 16.0,
        }
    }
}

impl StepClamp {
    /// No clamping; used by tests that exercise the raw recursion.
    pub fn none() -> Self {
        Self {
            min_step: 0.0,
            max_step: 1.0,
        }
    }

    pub fn apply(&self, increment: f64) -> f64 {
        increment.clamp(self.min_step, self.max_step)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeuristicKind {
    Linear,
    Exponential { eps: f64 },
    Sigmoidal { c: f64 },
}

/// The three fixed schedules: linear i/M, exponential 1 - eps^i and
/// sigmoidal sigmoid(c (i/M - 1/2)), the latter two affinely rescaled to
/// end at exactly 1 (their raw forms never reach it). Returns tau_1..tau_M.
///
/// For aggressive parameters the raw values can collapse onto 1 at f64
/// resolution; ties are broken downward by ulps so schedules are always
/// strictly increasing.
pub fn heuristic_schedule(kind: HeuristicKind, m: usize) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::InvalidParameter("schedule length must be >= 1".into()));
    }
    let mf = m as f64;
    let mut taus = match kind {
        HeuristicKind::Linear => (1..=m).map(|i| i as f64 / mf).collect::<Vec<f64>>(),
        HeuristicKind::Exponential { eps } => {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::InvalidParameter(
                    "exponential schedule needs 0 < eps < 1".into(),
                ));
            }
            let raw: Vec<f64> = (1..=m).map(|i| 1.0 - eps.powi(i as i32)).collect();
            let last = raw[m - 1];
            raw.iter().map(|r| r / last).collect()
        }
        HeuristicKind::Sigmoidal { c } => {
            if !(c > 0.0) {
                return Err(Error::InvalidParameter(
                    "sigmoidal schedule needs c > 0".into(),
                ));
            }
            let sig = |x: f64| 1.0 / (1.0 + (-x).exp());
            let s0 = sig(-c / 2.0);
            let s1 = sig(c / 2.0);
            (1..=m)
                .map(|i| (sig(c * (i as f64 / mf - 0.5)) - s0) / (s1 - s0))
                .collect()
        }
    };
    for i in (0..m - 1).rev() {
        if taus[i] >= taus[i + 1] {
            taus[i] = next_down(taus[i + 1]);
        }
    }
    if taus[0] <= 0.0 {
        return Err(Error::InvalidParameter(
            "schedule parameters collapse below f64 resolution".into(),
        ));
    }
    debug_assert!(taus.windows(2).all(|w| w[0] < w[1]));
    debug_assert_eq!(*taus.last().unwrap(), 1.0);
    Ok(taus)
}

fn next_down(x: f64) -> f64 {
    debug_assert!(x > 0.0 && x.is_finite());
    f64::from_bits(x.to_bits() - 1)
}

/// Per-iteration statistics consumed by the constant-rate update:
/// the normalizer ratio r, the weighted variance v of g(u), and the
/// cumulative target-evaluation count at the time they were measured.
#[derive(Clone, Copy, Debug)]
pub struct TuningStats {
    pub r: f64,
    pub v: f64,
    pub evals: u64,
}

/// Running constant-rate schedule: the tau sequence so far, the current
/// beta, and the knobs of the recursion.
#[derive(Clone, Debug)]
pub struct ScheduleState {
    taus: Vec<f64>,
    beta: f64,
    delta: f64,
    clamp: StepClamp,
    alpha: f64,
}

impl ScheduleState {
    pub fn new(delta: f64, alpha: f64, clamp: StepClamp) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter("delta must be positive".into()));
        }
        Ok(Self {
            taus: Vec::new(),
            beta: 1.0,
            delta,
            clamp,
            alpha,
        })
    }

    pub fn tau(&self) -> f64 {
        self.taus.last().copied().unwrap_or(0.0)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// One constant-rate update: beta' = beta exp(-delta / (v r^alpha)),
    /// proposed tau' = 1 - beta', applied increment clamped. After clamping,
    /// beta is re-synced to 1 - tau so one bad variance estimate cannot
    /// poison every later step.
    pub fn advance(&mut self, stats: &TuningStats) -> Result<f64> {
        if !(stats.v > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "constant-rate update needs v > 0, got {}",
                stats.v
            )));
        }
        let exponent = self.delta / (stats.v * stats.r.powf(self.alpha));
        let beta_raw = self.beta * (-exponent).exp();
        let tau_last = self.tau();
        let proposed = 1.0 - beta_raw;
        let increment = self.clamp.apply(proposed - tau_last);
        let tau_new = (tau_last + increment).min(1.0);
        self.beta = 1.0 - tau_new;
        self.taus.push(tau_new);
        Ok(tau_new)
    }
}

/// Conditional effective sample size of a proposed weight increment:
/// N (sum W u)^2 / sum W u^2 with W the normalized current weights and
/// u_j = exp(log_incr_j). Ranges over (0, N].
pub fn cess(logw: &[f64], log_incr: &[f64]) -> Result<f64> {
    if logw.len() != log_incr.len() {
        return Err(Error::LengthMismatch {
            expected: logw.len(),
            actual: log_incr.len(),
        });
    }
    let n = logw.len() as f64;
    let lse_w = logsumexp(logw)?;
    if lse_w == f64::NEG_INFINITY {
        return Err(Error::DegenerateEnsemble(
            "all log-weights are -inf".into(),
        ));
    }
    let first: Vec<f64> = logw.iter().zip(log_incr).map(|(&w, &i)| w + i).collect();
    let second: Vec<f64> = logw
        .iter()
        .zip(log_incr)
        .map(|(&w, &i)| w + 2.0 * i)
        .collect();
    let l1 = logsumexp(&first)?;
    let l2 = logsumexp(&second)?;
    Ok(n * (2.0 * l1 - lse_w - l2).exp())
}

/// ESS ratio after/before a hypothetical weight update.
pub fn ess_ratio(logw: &[f64], log_incr: &[f64]) -> Result<f64> {
    let updated: Vec<f64> = logw.iter().zip(log_incr).map(|(&w, &i)| w + i).collect();
    Ok(ess(&updated)? / ess(logw)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdaptiveMode {
    /// ESS(updated weights) / ESS(current weights) against the target.
    EssRatio,
    /// CESS / N against the target.
    CessRatio,
}

/// Binary search for the largest next step whose quality ratio stays at or
/// above `target_ratio`.
///
/// `ratio_at(t')` must return the mode-appropriate ratio for a candidate
/// t' > current_t; it is probed O(30) times. The search never exceeds
/// `current_t + clamp.max_step`, never returns less than
/// `current_t + clamp.min_step`, and on an interior solution returns the
/// conservative lower endpoint of the final bisection interval.
pub fn adaptive_search_step<F: FnMut(f64) -> f64>(
    current_t: f64,
    mut ratio_at: F,
    target_ratio: f64,
    clamp: &StepClamp,
    tol: f64,
) -> f64 {
    debug_assert!((0.0..1.0).contains(&target_ratio) && target_ratio > 0.0);
    let hi_cap = (current_t + clamp.max_step).min(1.0);
    if ratio_at(hi_cap) >= target_ratio {
        return hi_cap;
    }
    let mut lo = current_t;
    let mut hi = hi_cap;
    for _ in 0..30 {
        if hi - lo < tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if ratio_at(mid) >= target_ratio {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo.max(current_t + clamp.min_step)).min(hi_cap)
}

/// Piecewise-linear interpolation of a tuned schedule onto a grid of M
/// points: tau is read as a function of normalized index (0 at the start),
/// then evaluated at j/M for j = 1..M. Preserves monotonicity and endpoints.
pub fn interpolate_schedule(taus: &[f64], m: usize) -> Result<Vec<f64>> {
    if taus.is_empty() || m == 0 {
        return Err(Error::InvalidParameter(
            "interpolation needs a non-empty schedule and M >= 1".into(),
        ));
    }
    if taus.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter(
            "schedule to interpolate must be monotone".into(),
        ));
    }
    if (taus.last().unwrap() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(
            "schedule to interpolate must end at 1".into(),
        ));
    }
    let k = taus.len() as f64;
    let value_at = |x: f64| -> f64 {
        // Piecewise linear through (i/K, tau_i) with tau_0 = 0 at x = 0.
        let pos = x * k;
        let idx = pos.floor() as usize;
        let frac = pos - idx as f64;
        let left = if idx == 0 { 0.0 } else { taus[idx - 1] };
        if idx >= taus.len() {
            return 1.0;
        }
        left + frac * (taus[idx] - left)
    };
    let mut out: Vec<f64> = (1..=m).map(|j| value_at(j as f64 / m as f64)).collect();
    *out.last_mut().unwrap() = 1.0;
    Ok(out)
}

/// One tau per row, the reuse format for tuned schedules.
pub fn write_schedule_csv(path: &Path, taus: &[f64]) -> Result<()> {
    let mut body = String::new();
    for t in taus {
        body.push_str(&format!("{t}\n"));
    }
    std::fs::write(path, body)?;
    Ok(())
}

/// Read a schedule written by [`write_schedule_csv`]; `#`-prefixed comment
/// lines (provenance headers) are skipped.
pub fn read_schedule_csv(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut taus = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        taus.push(line.parse::<f64>().map_err(|_| {
            Error::Dataset(format!("schedule row {i}: '{line}' is not a number"))
        })?);
    }
    if taus.is_empty() {
        return Err(Error::Dataset("schedule file has no rows".into()));
    }
    Ok(taus)
}
