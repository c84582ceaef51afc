//! The annealed importance sampling engine: weight bookkeeping, log-Z
//! estimators, the constant-rate tuning loop, fixed-schedule and
//! search-based adaptive drivers, and the SMC variant with resampling.
//!
//! Internally each particle carries its running importance weight (the
//! product of bridge ratios up to the current bridge) together with the
//! cached log-density of the current bridge at its position. Weight updates
//! touch only same-position density differences and kernel moves never touch
//! the weights, so degenerate identical-endpoint runs stay at exactly zero
//! log-weight through every code path.
//!
//! Per-particle RNG streams are split off the run stream by particle index,
//! and every reduction runs over index-ordered vectors, so a fixed seed
//! yields bit-identical results at any worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annealing::{
    ratio_terms, weighted_variance_of_g, AlphaDivergence, AnnealingPath, Bridge,
};
use crate::error::{Error, Result};
use crate::kernels::{hmc_step, rwm_step, KernelConfig, KernelOutcome};
use crate::numerics::{ess, logsumexp, normalized_weights, pairwise_sum, Generator, RngStream};
use crate::schedules::{
    adaptive_search_step, cess, ess_ratio, AdaptiveMode, ScheduleState, StepClamp, TuningStats,
};

/// Target log-density evaluation counters, split by what the evaluations
/// paid for. `weight` covers importance-weight updates, `schedule` covers
/// tuning statistics and binary-search probes, `kernel` covers evaluations
/// inside MCMC moves. The headline `target_evals` of a report is
/// weight + schedule, the same accounting used to compare samplers.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct EvalCounts {
    pub weight: u64,
    pub schedule: u64,
    pub kernel: u64,
}

impl EvalCounts {
    pub fn target_evals(&self) -> u64 {
        self.weight + self.schedule
    }

    pub fn total(&self) -> u64 {
        self.weight + self.schedule + self.kernel
    }
}

/// One per-iteration trace record, streamed to CSV by the harness.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TraceRow {
    pub iter: usize,
    pub tau: f64,
    pub beta: f64,
    pub r: Option<f64>,
    pub v: Option<f64>,
    pub ess: f64,
    pub f_div_estimate: Option<f64>,
}

/// Weighted particle ensemble after a completed run.
#[derive(Clone, Debug)]
pub struct ParticleEnsemble {
    dim: usize,
    positions: Vec<f64>,
    logw: Vec<f64>,
    iteration: usize,
    t_current: f64,
}

impl ParticleEnsemble {
    /// Assemble an ensemble from raw parts (row-major positions and final
    /// log-weights), e.g. to post-process externally stored runs.
    pub fn from_parts(dim: usize, positions: Vec<f64>, logw: Vec<f64>) -> Result<Self> {
        if dim == 0 || logw.is_empty() || positions.len() != dim * logw.len() {
            return Err(Error::InvalidParameter(
                "positions must be an N x dim matrix matching the weights".into(),
            ));
        }
        Ok(Self {
            dim,
            positions,
            logw,
            iteration: 0,
            t_current: 1.0,
        })
    }

    pub fn n_particles(&self) -> usize {
        self.logw.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major N x d positions.
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn position(&self, j: usize) -> &[f64] {
        &self.positions[j * self.dim..(j + 1) * self.dim]
    }

    pub fn logw(&self) -> &[f64] {
        &self.logw
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn t_current(&self) -> f64 {
        self.t_current
    }
}

/// Everything a run reports: both log-Z estimates, final ESS, the number of
/// annealing steps M, evaluation counters, the realized schedule and the
/// optional per-iteration divergence estimates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    /// Mean log-weight: a stochastic lower bound on log Z.
    pub log_z_lower: f64,
    /// logsumexp(logw) - log N: the importance-sampling average.
    pub log_z_is: f64,
    pub ess_final: f64,
    /// Number of annealing steps, i.e. the length of `schedule`.
    pub m: usize,
    /// weight + schedule evaluations; kernel-internal counts are reported
    /// separately inside `evals`.
    pub target_evals: u64,
    pub evals: EvalCounts,
    pub n_resamples: u64,
    pub schedule: Vec<f64>,
    pub divergence_trace: Option<Vec<f64>>,
    pub seed: u64,
    #[serde(skip)]
    pub trace: Vec<TraceRow>,
}

/// Both log-Z estimates from finalized weights: the lower-bound mean and the
/// importance-sampling average. The first never exceeds the second.
pub fn estimate_log_z(ensemble: &ParticleEnsemble) -> Result<(f64, f64)> {
    log_z_from_weights(ensemble.logw())
}

fn log_z_from_weights(logw: &[f64]) -> Result<(f64, f64)> {
    if logw.is_empty() {
        return Err(Error::EmptyInput("estimate_log_z"));
    }
    let lse = logsumexp(logw)?;
    if lse == f64::NEG_INFINITY {
        return Err(Error::DegenerateEnsemble(
            "all importance weights are zero".into(),
        ));
    }
    let n = logw.len() as f64;
    let lower = pairwise_sum(logw) / n;
    let is = lse - n.ln();
    Ok((lower, is))
}

/// Multinomial resampling of a finalized ensemble: draws N particles with
/// replacement proportional to the weights, then resets all log-weights to
/// logsumexp(logw) - log N so the total weight mass is preserved.
pub fn resample_multinomial(
    ensemble: &ParticleEnsemble,
    stream: RngStream,
) -> Result<ParticleEnsemble> {
    let n = ensemble.n_particles();
    let mut rng = stream.rng();
    let ancestors = multinomial_ancestors(ensemble.logw(), n, &mut rng)?;
    let lse = logsumexp(ensemble.logw())?;
    let level = lse - (n as f64).ln();
    let dim = ensemble.dim;
    let mut positions = Vec::with_capacity(n * dim);
    for &a in &ancestors {
        positions.extend_from_slice(ensemble.position(a));
    }
    Ok(ParticleEnsemble {
        dim,
        positions,
        logw: vec![level; n],
        iteration: ensemble.iteration,
        t_current: ensemble.t_current,
    })
}

fn multinomial_ancestors(logw: &[f64], n: usize, rng: &mut Generator) -> Result<Vec<usize>> {
    use rand::Rng;
    let w = normalized_weights(logw)?;
    let mut cdf = Vec::with_capacity(w.len());
    let mut acc = 0.0;
    for &x in &w {
        acc += x;
        cdf.push(acc);
    }
    let last = cdf.len() - 1;
    Ok((0..n)
        .map(|_| {
            let u: f64 = rng.random();
            match cdf.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
                Ok(i) | Err(i) => i.min(last),
            }
        })
        .collect())
}

fn systematic_ancestors(logw: &[f64], n: usize, rng: &mut Generator) -> Result<Vec<usize>> {
    use rand::Rng;
    let w = normalized_weights(logw)?;
    let offset: f64 = rng.random::<f64>() / n as f64;
    let mut ancestors = Vec::with_capacity(n);
    let mut acc = w[0];
    let mut i = 0usize;
    for j in 0..n {
        let u = offset + j as f64 / n as f64;
        while u > acc && i + 1 < w.len() {
            i += 1;
            acc += w[i];
        }
        ancestors.push(i);
    }
    Ok(ancestors)
}

/// Working state of a run. `logw` is the running attached weight (bridge
/// ratios up to the current bridge), `cached` the current bridge
/// log-density at each position.
struct Particles {
    dim: usize,
    n: usize,
    positions: Vec<f64>,
    logw: Vec<f64>,
    cached: Vec<f64>,
    rngs: Vec<Generator>,
    aux_rng: Generator,
    t: f64,
    moves: usize,
}

impl Particles {
    fn init(path: &AnnealingPath, n: usize, stream: RngStream) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("need at least one particle".into()));
        }
        let dim = path.dim();
        let proposal = path.proposal();
        if !proposal.is_samplable() {
            return Err(Error::InvalidParameter(
                "the proposal distribution must be samplable".into(),
            ));
        }
        let mut rngs: Vec<Generator> = (0..n)
            .map(|j| stream.split(j as u64 + 1).rng())
            .collect();
        let draws: Result<Vec<Vec<f64>>> = rngs
            .par_iter_mut()
            .map(|rng| proposal.sample(rng))
            .collect();
        let draws = draws?;
        let mut positions = Vec::with_capacity(n * dim);
        for d in &draws {
            positions.extend_from_slice(d);
        }
        let cached: Vec<f64> = positions
            .par_chunks(dim)
            .map(|z| proposal.log_density(z))
            .collect();
        Ok(Self {
            dim,
            n,
            positions,
            logw: vec![0.0; n],
            cached,
            rngs,
            aux_rng: stream.split(0).rng(),
            t: 0.0,
            moves: 0,
        })
    }

    fn column<F: Fn(&[f64]) -> f64 + Sync>(&self, f: F) -> Vec<f64> {
        self.positions.par_chunks(self.dim).map(|z| f(z)).collect()
    }

    /// Detached (Algorithm-style) weights: running weight without the
    /// current bridge factor.
    fn detached_logw(&self) -> Vec<f64> {
        self.logw
            .iter()
            .zip(&self.cached)
            .map(|(&a, &c)| a - c)
            .collect()
    }

    /// Weight update to a new bridge at the current positions:
    /// logw += bridge(z) - previous_bridge(z). `vals` must hold the new
    /// bridge log-densities at the current positions.
    fn attach(&mut self, bridge: &Bridge<'_>, vals: &[f64]) {
        for j in 0..self.n {
            self.logw[j] += vals[j] - self.cached[j];
            self.cached[j] = vals[j];
        }
        self.t = bridge.t();
    }

    /// Kernel sweep invariant w.r.t. the current bridge. Weights are
    /// untouched; positions and cached densities update, and the number of
    /// target evaluations inside the kernels is charged to `counts.kernel`.
    fn move_particles(
        &mut self,
        bridge: &Bridge<'_>,
        kernel: &KernelConfig,
        counts: &mut EvalCounts,
    ) -> Result<()> {
        let dim = self.dim;
        let cached = &self.cached;
        let outcomes: Result<Vec<KernelOutcome>> = self
            .positions
            .par_chunks(dim)
            .zip(self.rngs.par_iter_mut())
            .enumerate()
            .map(|(j, (z, rng))| kernel_move(kernel, bridge, z, cached[j], rng))
            .collect();
        let outcomes = outcomes?;
        let per_dens = bridge.target_calls_per_density();
        let per_grad = bridge.target_calls_per_grad();
        for (j, out) in outcomes.into_iter().enumerate() {
            counts.kernel += out.density_evals * per_dens + out.grad_evals * per_grad;
            self.positions[j * dim..(j + 1) * dim].copy_from_slice(&out.position);
            self.cached[j] = out.log_density;
        }
        self.moves += 1;
        Ok(())
    }

    /// Attach + move in one annealing step.
    fn advance(
        &mut self,
        bridge: &Bridge<'_>,
        vals: &[f64],
        kernel: &KernelConfig,
        counts: &mut EvalCounts,
    ) -> Result<()> {
        self.attach(bridge, vals);
        self.move_particles(bridge, kernel, counts)
    }

    fn ess(&self) -> Result<f64> {
        ess(&self.logw)
    }

    /// Resample proportional to the attached weights, resetting them to
    /// their logsumexp - log N. Preserves logsumexp(logw) exactly, so the
    /// running log-Z bookkeeping is unchanged by the event.
    fn resample(&mut self, systematic: bool) -> Result<()> {
        let ancestors = if systematic {
            systematic_ancestors(&self.logw, self.n, &mut self.aux_rng)?
        } else {
            multinomial_ancestors(&self.logw, self.n, &mut self.aux_rng)?
        };
        let lse = logsumexp(&self.logw)?;
        let level = lse - (self.n as f64).ln();
        let dim = self.dim;
        let mut positions = Vec::with_capacity(self.n * dim);
        let mut cached = Vec::with_capacity(self.n);
        for &a in &ancestors {
            positions.extend_from_slice(&self.positions[a * dim..(a + 1) * dim]);
            cached.push(self.cached[a]);
        }
        self.positions = positions;
        self.cached = cached;
        self.logw = vec![level; self.n];
        Ok(())
    }

    fn into_ensemble(self) -> ParticleEnsemble {
        ParticleEnsemble {
            dim: self.dim,
            positions: self.positions,
            logw: self.logw,
            iteration: self.moves,
            t_current: self.t,
        }
    }
}

fn kernel_move(
    kernel: &KernelConfig,
    bridge: &Bridge<'_>,
    z: &[f64],
    current_logp: f64,
    rng: &mut Generator,
) -> Result<KernelOutcome> {
    match kernel {
        KernelConfig::Hmc(cfg) => hmc_step(
            z,
            current_logp,
            |x| bridge.log_density(x),
            |x| bridge.grad(x),
            cfg,
            rng,
        ),
        KernelConfig::Rwm { proposal_sd } => rwm_step(
            z,
            current_logp,
            |x| bridge.log_density(x),
            *proposal_sd,
            rng,
        ),
    }
}

fn build_report(
    logw: &[f64],
    schedule: Vec<f64>,
    counts: EvalCounts,
    n_resamples: u64,
    divergence_trace: Option<Vec<f64>>,
    trace: Vec<TraceRow>,
    seed: u64,
) -> Result<RunReport> {
    let (lower, is) = log_z_from_weights(logw)?;
    Ok(RunReport {
        log_z_lower: lower,
        log_z_is: is,
        ess_final: ess(logw)?,
        m: schedule.len(),
        target_evals: counts.target_evals(),
        evals: counts,
        n_resamples,
        schedule,
        divergence_trace,
        seed,
        trace,
    })
}

fn validate_schedule(taus: &[f64]) -> Result<Vec<f64>> {
    if taus.is_empty() {
        return Err(Error::InvalidParameter("empty schedule".into()));
    }
    if taus.iter().any(|t| !(0.0..=1.0 + 1e-12).contains(t)) {
        return Err(Error::InvalidParameter(
            "schedule values must lie in [0, 1]".into(),
        ));
    }
    if taus.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("schedule must be monotone".into()));
    }
    let mut taus = taus.to_vec();
    let last = taus.last_mut().unwrap();
    if (*last - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter("schedule must end at 1".into()));
    }
    *last = 1.0;
    Ok(taus)
}

/// Annealed importance sampling over a fixed schedule: per step, update the
/// weights with the bridge ratio at the pre-move positions, then move the
/// particles with a kernel invariant w.r.t. the new bridge. The schedule
/// must be monotone and end at 1.
pub fn run_fixed_schedule_ais(
    path: &AnnealingPath,
    taus: &[f64],
    kernel: &KernelConfig,
    n: usize,
    stream: RngStream,
) -> Result<(ParticleEnsemble, RunReport)> {
    let taus = validate_schedule(taus)?;
    let mut st = Particles::init(path, n, stream)?;
    let mut counts = EvalCounts::default();
    let mut trace = Vec::with_capacity(taus.len());
    for (i, &t) in taus.iter().enumerate() {
        let bridge = path.bridge(t)?;
        let vals = st.column(|z| bridge.log_density(z));
        counts.weight += n as u64 * bridge.target_calls_per_density();
        st.advance(&bridge, &vals, kernel, &mut counts)?;
        trace.push(TraceRow {
            iter: i,
            tau: t,
            beta: 1.0 - t,
            r: None,
            v: None,
            ess: st.ess()?,
            f_div_estimate: None,
        });
    }
    let report = build_report(&st.logw, taus, counts, 0, None, trace, stream.seed())?;
    Ok((st.into_ensemble(), report))
}

/// Constant-rate tuning options.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CrAisConfig {
    pub delta: f64,
    pub clamp: StepClamp,
    /// Stop once the empirical variance of g(u) falls below this; the last
    /// bridge is then close enough to the target to jump directly.
    pub variance_threshold: f64,
    pub max_steps: usize,
}

impl Default for CrAisConfig {
    fn default() -> Self {
        Self {
            delta: 1.0 / 32.0,
            clamp: StepClamp::default(),
            variance_threshold: 1e-3,
            max_steps: 20_000,
        }
    }
}

pub struct CrAisRun {
    pub ensemble: ParticleEnsemble,
    pub report: RunReport,
    pub schedule_state: ScheduleState,
}

/// Constant-rate AIS: alternate standard AIS steps with schedule tuning.
///
/// Per iteration the ensemble estimates the normalizer ratio r and the
/// weighted variance v of g(u) from one fresh target-density column (the
/// bridge columns are recombined from it for free), then advances beta by
/// exp(-delta / (v r^alpha)). The loop stops when v drops below the
/// threshold, tau reaches 1, or `max_steps` is hit; the final weight update
/// jumps directly to the target.
pub fn run_cr_ais(
    path: &AnnealingPath,
    divergence: &AlphaDivergence,
    cfg: &CrAisConfig,
    kernel: &KernelConfig,
    n: usize,
    stream: RngStream,
) -> Result<CrAisRun> {
    if divergence.alpha() != path.alpha() {
        return Err(Error::InvalidParameter(format!(
            "divergence alpha {} does not match path alpha {}",
            divergence.alpha(),
            path.alpha()
        )));
    }
    run_cr_loop(path, divergence, cfg, kernel, n, stream, None)
}

/// CR-SMC options: CR-AIS plus adaptive resampling whenever the ESS drops
/// below `resample_trigger` times its value at the last resampling event.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CrSmcConfig {
    pub cr: CrAisConfig,
    pub resample_trigger: f64,
    pub systematic: bool,
}

impl Default for CrSmcConfig {
    fn default() -> Self {
        Self {
            cr: CrAisConfig::default(),
            resample_trigger: 0.9,
            systematic: false,
        }
    }
}

/// Sequential Monte Carlo variant of the constant-rate sampler.
pub fn run_cr_smc(
    path: &AnnealingPath,
    divergence: &AlphaDivergence,
    cfg: &CrSmcConfig,
    kernel: &KernelConfig,
    n: usize,
    stream: RngStream,
) -> Result<CrAisRun> {
    if !(cfg.resample_trigger > 0.0 && cfg.resample_trigger <= 1.0) {
        return Err(Error::InvalidParameter(
            "resample trigger must lie in (0, 1]".into(),
        ));
    }
    if divergence.alpha() != path.alpha() {
        return Err(Error::InvalidParameter(format!(
            "divergence alpha {} does not match path alpha {}",
            divergence.alpha(),
            path.alpha()
        )));
    }
    run_cr_loop(path, divergence, cfg.cr, kernel, n, stream, Some(cfg))
}

fn run_cr_loop(
    path: &AnnealingPath,
    divergence: &AlphaDivergence,
    cfg: impl std::borrow::Borrow<CrAisConfig>,
    kernel: &KernelConfig,
    n: usize,
    stream: RngStream,
    smc: Option<&CrSmcConfig>,
) -> Result<CrAisRun> {
    let cfg = cfg.borrow();
    if cfg.max_steps == 0 {
        return Err(Error::InvalidParameter("max_steps must be >= 1".into()));
    }
    let target = path.target().clone();
    let proposal = path.proposal().clone();
    let mut st = Particles::init(path, n, stream)?;
    let mut sched = ScheduleState::new(cfg.delta, path.alpha(), cfg.clamp)?;
    let mut counts = EvalCounts::default();
    let mut trace = Vec::new();
    let mut div_trace = Vec::new();
    let mut n_resamples = 0u64;
    let mut ess_baseline = n as f64;
    // The fresh target column of the current iteration; valid while the
    // positions are unchanged, so the closing jump can reuse it.
    let mut col_pi_current: Option<Vec<f64>> = None;

    for iter in 0..cfg.max_steps {
        let col_pi = st.column(|z| target.log_density(z));
        counts.schedule += n as u64;
        let col_q0 = st.column(|z| proposal.log_density(z));

        let logw_det = st.detached_logw();
        let terms = ratio_terms(&logw_det, &col_pi, &st.cached).map_err(|e| {
            Error::Aborted(format!("tuning statistics failed at iteration {iter}: {e}"))
        })?;
        let r = terms.log_r.exp();
        let v = weighted_variance_of_g(divergence, &terms.lw_qt, &terms.log_u)?;
        if !v.is_finite() {
            return Err(Error::Aborted(format!(
                "variance estimate became non-finite at iteration {iter} (tau = {})",
                st.t
            )));
        }
        let f_vals: Vec<f64> = terms
            .log_u
            .iter()
            .map(|&lu| divergence.f_from_log(lu))
            .collect();
        let d_hat = crate::numerics::self_normalized_mean(&terms.lw_qt, &f_vals)?;
        div_trace.push(d_hat);
        trace.push(TraceRow {
            iter,
            tau: st.t,
            beta: sched.beta(),
            r: Some(r),
            v: Some(v),
            ess: st.ess()?,
            f_div_estimate: Some(d_hat),
        });
        col_pi_current = Some(col_pi);

        if v < cfg.variance_threshold {
            break;
        }

        let tau_next = sched.advance(&TuningStats {
            r,
            v,
            evals: counts.target_evals(),
        })?;
        if tau_next >= 1.0 - 1e-9 {
            break;
        }

        // Both bridge columns recombine from the fresh columns; no new
        // target evaluations for the weight update.
        let bridge = path.bridge(tau_next)?;
        let col_pi = col_pi_current.take().expect("column computed above");
        let vals: Vec<f64> = col_q0
            .iter()
            .zip(&col_pi)
            .map(|(&q, &p)| bridge.combine(q, p))
            .collect();
        st.advance(&bridge, &vals, kernel, &mut counts)?;

        if let Some(smc_cfg) = smc {
            // ess_baseline is the ESS at the last resampling event (N right
            // after one, and N at initialization where weights are equal).
            let current_ess = st.ess()?;
            if current_ess < smc_cfg.resample_trigger * ess_baseline {
                st.resample(smc_cfg.systematic)?;
                n_resamples += 1;
                ess_baseline = n as f64;
            }
        }
    }

    // Close to the target: logw += log pi(z) - log bridge_tau(z). Reuse the
    // current column when the positions have not moved since it was taken.
    let final_bridge = path.bridge(1.0)?;
    let col_pi = match col_pi_current {
        Some(col) => col,
        None => {
            counts.weight += n as u64;
            st.column(|z| target.log_density(z))
        }
    };
    st.attach(&final_bridge, &col_pi);

    let mut schedule = sched.taus().to_vec();
    match schedule.last().copied() {
        Some(last) if last >= 1.0 - 1e-9 => *schedule.last_mut().unwrap() = 1.0,
        _ => schedule.push(1.0),
    }

    let report = build_report(
        &st.logw,
        schedule,
        counts,
        n_resamples,
        Some(div_trace),
        trace,
        stream.seed(),
    )?;
    Ok(CrAisRun {
        ensemble: st.into_ensemble(),
        report,
        schedule_state: sched,
    })
}

/// Search-based adaptive AIS options.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AdaptiveConfig {
    pub mode: AdaptiveMode,
    pub target_ratio: f64,
    pub clamp: StepClamp,
    pub max_steps: usize,
    pub tol: f64,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self {
            mode: AdaptiveMode::CessRatio,
            target_ratio: 0.7,
            clamp: StepClamp::default(),
            max_steps: 20_000,
            tol: 1e-6,
        }
    }
}

/// Adaptive AIS baseline: each step binary-searches for the largest next
/// tau whose ESS or CESS ratio stays above the target, then performs a
/// standard AIS step. Every bridge evaluation inside the search costs one
/// target evaluation per particle, which is what makes this baseline
/// expensive relative to the constant-rate sampler.
pub fn run_adaptive_ais(
    path: &AnnealingPath,
    cfg: &AdaptiveConfig,
    kernel: &KernelConfig,
    n: usize,
    stream: RngStream,
) -> Result<(ParticleEnsemble, RunReport)> {
    if !(cfg.target_ratio > 0.0 && cfg.target_ratio < 1.0) {
        return Err(Error::InvalidParameter(
            "adaptive target ratio must lie in (0, 1)".into(),
        ));
    }
    if cfg.max_steps == 0 {
        return Err(Error::InvalidParameter("max_steps must be >= 1".into()));
    }
    let mut st = Particles::init(path, n, stream)?;
    let mut counts = EvalCounts::default();
    let mut trace = Vec::new();
    let mut taus: Vec<f64> = Vec::new();

    for iter in 0..cfg.max_steps {
        if st.t >= 1.0 {
            break;
        }
        // Degenerate ensembles abort here rather than searching forever.
        st.ess()?;
        let probes = std::cell::Cell::new(0u64);
        let ratio_at = |t_probe: f64| -> f64 {
            probes.set(probes.get() + 1);
            let bridge = match path.bridge(t_probe) {
                Ok(b) => b,
                Err(_) => return 0.0,
            };
            let incr: Vec<f64> = st
                .positions
                .par_chunks(st.dim)
                .zip(st.cached.par_iter())
                .map(|(z, &c)| bridge.log_density(z) - c)
                .collect();
            let ratio = match cfg.mode {
                AdaptiveMode::CessRatio => cess(&st.logw, &incr).map(|c| c / n as f64),
                AdaptiveMode::EssRatio => ess_ratio(&st.logw, &incr),
            };
            ratio.unwrap_or(0.0)
        };
        let t_next = adaptive_search_step(st.t, ratio_at, cfg.target_ratio, &cfg.clamp, cfg.tol);
        counts.schedule += probes.get() * n as u64;

        let bridge = path.bridge(t_next)?;
        let vals = st.column(|z| bridge.log_density(z));
        counts.weight += n as u64 * bridge.target_calls_per_density();
        st.advance(&bridge, &vals, kernel, &mut counts)?;
        taus.push(t_next);
        trace.push(TraceRow {
            iter,
            tau: t_next,
            beta: 1.0 - t_next,
            r: None,
            v: None,
            ess: st.ess()?,
            f_div_estimate: None,
        });
    }

    if st.t < 1.0 {
        // Hit the step budget: close to the target directly.
        let bridge = path.bridge(1.0)?;
        let vals = st.column(|z| bridge.log_density(z));
        counts.weight += n as u64;
        st.attach(&bridge, &vals);
        taus.push(1.0);
    }

    let report = build_report(&st.logw, taus, counts, 0, None, trace, stream.seed())?;
    Ok((st.into_ensemble(), report))
}

/// Tune-then-test: adapt a schedule with one particle set, optionally
/// interpolate it to a target length, then rerun fixed-schedule AIS with
/// fresh particles on the frozen schedule.
pub struct TwoPhaseRun {
    pub tuned_schedule: Vec<f64>,
    pub test_schedule: Vec<f64>,
    pub tune_report: RunReport,
    pub test_report: RunReport,
    pub ensemble: ParticleEnsemble,
}

pub fn run_cr_ais_two_phase(
    path: &AnnealingPath,
    divergence: &AlphaDivergence,
    cfg: &CrAisConfig,
    kernel: &KernelConfig,
    n: usize,
    m_test: Option<usize>,
    tune_stream: RngStream,
    test_stream: RngStream,
) -> Result<TwoPhaseRun> {
    let tuned = run_cr_ais(path, divergence, cfg, kernel, n, tune_stream)?;
    let tuned_schedule = tuned.report.schedule.clone();
    let test_schedule = match m_test {
        Some(m) => crate::schedules::interpolate_schedule(&tuned_schedule, m)?,
        None => tuned_schedule.clone(),
    };
    let (ensemble, test_report) =
        run_fixed_schedule_ais(path, &test_schedule, kernel, n, test_stream)?;
    Ok(TwoPhaseRun {
        tuned_schedule,
        test_schedule,
        tune_report: tuned.report,
        test_report,
        ensemble,
    })
}
