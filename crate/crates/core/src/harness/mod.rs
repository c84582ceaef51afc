//! Experiment harness: configuration, run execution, report files and the
//! benchmark suites.
//!
//! Every run writes `report_seed<K>.json` (the run report wrapped with the
//! config hash) and `trace_seed<K>.csv`, plus one `summary.csv` row per
//! experiment. Reports contain no timestamps, so re-running a config
//! reproduces byte-identical files.

mod config;
mod suites;

pub use config::{ExperimentConfig, ProposalSpec, SamplerSpec, ScheduleSpec, TargetSpec};
pub use suites::{expected_dataset_help, mode_occupancy, run_suite, Suite, SuiteOptions};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::annealing::divergence_table;
use crate::error::{Error, Result};
use crate::numerics::RngStream;
use crate::sampler::{
    run_adaptive_ais, run_cr_ais, run_cr_smc, run_fixed_schedule_ais, AdaptiveConfig, CrAisConfig,
    CrSmcConfig, ParticleEnsemble, RunReport, TraceRow,
};
use crate::schedules::interpolate_schedule;

fn write_schedule_csv_with_header(path: &Path, taus: &[f64], header: &str) -> Result<()> {
    let mut body = format!("{header}\n");
    for t in taus {
        body.push_str(&format!("{t}\n"));
    }
    std::fs::write(path, body)?;
    Ok(())
}

/// A report file as written to disk: the run report plus provenance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportFile {
    pub config_hash: String,
    pub name: String,
    pub seed: u64,
    pub report: RunReport,
}

/// Outcome of a single seeded run.
pub struct SeedOutcome {
    pub seed: u64,
    pub report: RunReport,
    pub ensemble: ParticleEnsemble,
}

/// One summary.csv row: estimation error statistics over seeds (when the
/// truth is known), mean schedule length and mean evaluation counts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SummaryRow {
    pub name: String,
    pub config_hash: String,
    pub target: String,
    pub sampler: String,
    pub n_seeds: usize,
    pub log_z_true: Option<f64>,
    pub log_z_is_mean: f64,
    pub log_z_is_std: f64,
    pub log_z_lower_mean: f64,
    pub est_err_mean: Option<f64>,
    pub est_err_std: Option<f64>,
    pub m_mean: f64,
    pub target_evals_mean: f64,
    pub kernel_evals_mean: f64,
}

pub const SUMMARY_HEADER: &str = "name,config_hash,target,sampler,n_seeds,log_z_true,log_z_is_mean,log_z_is_std,log_z_lower_mean,est_err_mean,est_err_std,m_mean,target_evals_mean,kernel_evals_mean";

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl SummaryRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.name,
            self.config_hash,
            self.target,
            self.sampler,
            self.n_seeds,
            fmt_opt(self.log_z_true),
            self.log_z_is_mean,
            self.log_z_is_std,
            self.log_z_lower_mean,
            fmt_opt(self.est_err_mean),
            fmt_opt(self.est_err_std),
            self.m_mean,
            self.target_evals_mean,
            self.kernel_evals_mean
        )
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Compute the summary row for a set of per-seed reports.
pub fn summarize_reports(
    cfg: &ExperimentConfig,
    truth: Option<f64>,
    reports: &[&RunReport],
) -> SummaryRow {
    let is_vals: Vec<f64> = reports.iter().map(|r| r.log_z_is).collect();
    let lower_vals: Vec<f64> = reports.iter().map(|r| r.log_z_lower).collect();
    let (is_mean, is_std) = mean_std(&is_vals);
    let (lower_mean, _) = mean_std(&lower_vals);
    let (err_mean, err_std) = match truth {
        Some(t) => {
            let errs: Vec<f64> = is_vals.iter().map(|v| (v - t).abs()).collect();
            let (m, s) = mean_std(&errs);
            (Some(m), Some(s))
        }
        None => (None, None),
    };
    let m_mean = reports.iter().map(|r| r.m as f64).sum::<f64>() / reports.len() as f64;
    let evals_mean =
        reports.iter().map(|r| r.target_evals as f64).sum::<f64>() / reports.len() as f64;
    let kernel_mean =
        reports.iter().map(|r| r.evals.kernel as f64).sum::<f64>() / reports.len() as f64;
    SummaryRow {
        name: cfg.name.clone(),
        config_hash: cfg.hash(),
        target: cfg.target.label(),
        sampler: cfg.sampler.label(),
        n_seeds: reports.len(),
        log_z_true: truth,
        log_z_is_mean: is_mean,
        log_z_is_std: is_std,
        log_z_lower_mean: lower_mean,
        est_err_mean: err_mean,
        est_err_std: err_std,
        m_mean,
        target_evals_mean: evals_mean,
        kernel_evals_mean: kernel_mean,
    }
}

/// Execute one seed of an experiment.
pub fn run_config_seed(cfg: &ExperimentConfig, seed: u64) -> Result<SeedOutcome> {
    let path = cfg.build_path()?;
    let stream = RngStream::new(seed);
    let n = cfg.n_particles;
    let (ensemble, report) = match &cfg.sampler {
        SamplerSpec::Fixed { schedule, .. } => {
            let taus = schedule.build()?;
            run_fixed_schedule_ais(&path, &taus, &cfg.kernel, n, stream)?
        }
        SamplerSpec::CrAis {
            alpha,
            delta,
            variance_threshold,
            max_steps,
        } => {
            let cr = CrAisConfig {
                delta: *delta,
                clamp: cfg.clamp,
                variance_threshold: *variance_threshold,
                max_steps: *max_steps,
            };
            let run = run_cr_ais(&path, &divergence_table(*alpha), &cr, &cfg.kernel, n, stream)?;
            (run.ensemble, run.report)
        }
        SamplerSpec::Adaptive {
            mode,
            target_ratio,
            max_steps,
            tol,
            ..
        } => {
            let ac = AdaptiveConfig {
                mode: *mode,
                target_ratio: *target_ratio,
                clamp: cfg.clamp,
                max_steps: *max_steps,
                tol: *tol,
            };
            run_adaptive_ais(&path, &ac, &cfg.kernel, n, stream)?
        }
        SamplerSpec::CrSmc {
            alpha,
            delta,
            variance_threshold,
            max_steps,
            resample_trigger,
            systematic,
        } => {
            let sc = CrSmcConfig {
                cr: CrAisConfig {
                    delta: *delta,
                    clamp: cfg.clamp,
                    variance_threshold: *variance_threshold,
                    max_steps: *max_steps,
                },
                resample_trigger: *resample_trigger,
                systematic: *systematic,
            };
            let run = run_cr_smc(&path, &divergence_table(*alpha), &sc, &cfg.kernel, n, stream)?;
            (run.ensemble, run.report)
        }
    };
    Ok(SeedOutcome {
        seed,
        report,
        ensemble,
    })
}

/// Write a per-iteration trace as CSV with the columns
/// iter, tau, beta, r, v, ess, f_div_estimate (empty cells where a sampler
/// does not produce the statistic). Provenance goes into a leading comment.
pub fn write_trace_csv(path: &Path, trace: &[TraceRow]) -> Result<()> {
    write_trace_csv_with_provenance(path, trace, None)
}

pub fn write_trace_csv_with_provenance(
    path: &Path,
    trace: &[TraceRow],
    provenance: Option<(&str, u64)>,
) -> Result<()> {
    let mut body = String::new();
    if let Some((hash, seed)) = provenance {
        body.push_str(&format!("# config_hash={hash} seed={seed}\n"));
    }
    body.push_str("iter,tau,beta,r,v,ess,f_div_estimate\n");
    for row in trace {
        body.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.iter,
            row.tau,
            row.beta,
            fmt_opt(row.r),
            fmt_opt(row.v),
            row.ess,
            fmt_opt(row.f_div_estimate)
        ));
    }
    std::fs::write(path, body)?;
    Ok(())
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Run every seed of an experiment, writing per-seed reports and traces
/// plus a one-row summary.csv into `<out_dir>/<name>/`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<(SummaryRow, Vec<SeedOutcome>)> {
    cfg.validate()?;
    let dir = out_dir.join(sanitize(&cfg.name));
    std::fs::create_dir_all(&dir)?;
    let hash = cfg.hash();
    let truth = cfg.true_log_z()?;

    let mut outcomes = Vec::with_capacity(cfg.seeds.len());
    for &seed in &cfg.seeds {
        let outcome = run_config_seed(cfg, seed)?;
        let file = ReportFile {
            config_hash: hash.clone(),
            name: cfg.name.clone(),
            seed,
            report: outcome.report.clone(),
        };
        let json = serde_json::to_string_pretty(&file)?;
        std::fs::write(dir.join(format!("report_seed{seed}.json")), json)?;
        write_trace_csv_with_provenance(
            &dir.join(format!("trace_seed{seed}.csv")),
            &outcome.report.trace,
            Some((&hash, seed)),
        )?;
        outcomes.push(outcome);
    }

    let reports: Vec<&RunReport> = outcomes.iter().map(|o| &o.report).collect();
    let row = summarize_reports(cfg, truth, &reports);
    let mut summary = String::from(SUMMARY_HEADER);
    summary.push('\n');
    summary.push_str(&row.to_csv_line());
    summary.push('\n');
    std::fs::write(dir.join("summary.csv"), summary)?;
    Ok((row, outcomes))
}

/// `run` CLI entry: load a config, apply overrides, execute, append the
/// summary row to `<out_dir>/summary.csv`.
pub fn cli_run(
    config_path: &Path,
    out_dir: &Path,
    seed_override: Option<Vec<u64>>,
) -> Result<SummaryRow> {
    let mut cfg = ExperimentConfig::load(config_path)?;
    if let Some(seeds) = seed_override {
        cfg.seeds = seeds;
    }
    std::fs::create_dir_all(out_dir)?;
    let (row, _) = run_experiment(&cfg, out_dir)?;
    append_summary(&out_dir.join("summary.csv"), std::slice::from_ref(&row))?;
    Ok(row)
}

pub fn append_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut body = if path.exists() {
        std::fs::read_to_string(path)?
    } else {
        format!("{SUMMARY_HEADER}\n")
    };
    for row in rows {
        body.push_str(&row.to_csv_line());
        body.push('\n');
    }
    std::fs::write(path, body)?;
    Ok(())
}

/// Tune-then-test results: the tuning phase's cost is reported separately
/// from the estimation phase so the overhead is visible.
pub struct TuneTestOutcome {
    pub tuned_schedule: Vec<f64>,
    pub test_schedule: Vec<f64>,
    pub tune_evals: u64,
    pub tune_kernel_evals: u64,
    pub test_row: SummaryRow,
    pub test_reports: Vec<RunReport>,
}

/// Two-phase protocol: tune a schedule (constant-rate or adaptive), freeze
/// it, interpolate to `m_test` steps when given, then run fixed-schedule
/// AIS with fresh streams for every seed in the config.
pub fn cli_tune_then_test(
    config_path: &Path,
    m_test: Option<usize>,
    out_dir: &Path,
) -> Result<TuneTestOutcome> {
    let cfg = ExperimentConfig::load(config_path)?;
    tune_then_test(&cfg, m_test, out_dir)
}

pub fn tune_then_test(
    cfg: &ExperimentConfig,
    m_test: Option<usize>,
    out_dir: &Path,
) -> Result<TuneTestOutcome> {
    cfg.validate()?;
    match cfg.sampler {
        SamplerSpec::CrAis { .. } | SamplerSpec::Adaptive { .. } => {}
        _ => {
            return Err(Error::Config(
                "tune-then-test needs a cr_ais or adaptive sampler".into(),
            ))
        }
    }
    let dir = out_dir.join(sanitize(&cfg.name));
    std::fs::create_dir_all(&dir)?;

    // Tuning phase: one run on a stream disjoint from every test stream.
    let mut tune_cfg = cfg.clone();
    tune_cfg.seeds = vec![cfg.seeds[0]];
    let path = cfg.build_path()?;
    let tune_stream = RngStream::new(cfg.seeds[0]).split(0xEA7);
    let tune_report = {
        let outcome = match &cfg.sampler {
            SamplerSpec::CrAis {
                alpha,
                delta,
                variance_threshold,
                max_steps,
            } => {
                let cr = CrAisConfig {
                    delta: *delta,
                    clamp: cfg.clamp,
                    variance_threshold: *variance_threshold,
                    max_steps: *max_steps,
                };
                run_cr_ais(
                    &path,
                    &divergence_table(*alpha),
                    &cr,
                    &cfg.kernel,
                    cfg.n_particles,
                    tune_stream,
                )?
                .report
            }
            SamplerSpec::Adaptive {
                mode,
                target_ratio,
                max_steps,
                tol,
                ..
            } => {
                let ac = AdaptiveConfig {
                    mode: *mode,
                    target_ratio: *target_ratio,
                    clamp: cfg.clamp,
                    max_steps: *max_steps,
                    tol: *tol,
                };
                run_adaptive_ais(&path, &ac, &cfg.kernel, cfg.n_particles, tune_stream)?.1
            }
            _ => unreachable!("validated above"),
        };
        outcome
    };
    let tuned_schedule = tune_report.schedule.clone();
    let test_schedule = match m_test {
        Some(m) => interpolate_schedule(&tuned_schedule, m)?,
        None => tuned_schedule.clone(),
    };
    let provenance = format!("# config_hash={} seed={}", cfg.hash(), cfg.seeds[0]);
    write_schedule_csv_with_header(&dir.join("tuned_schedule.csv"), &tuned_schedule, &provenance)?;
    write_schedule_csv_with_header(&dir.join("test_schedule.csv"), &test_schedule, &provenance)?;
    let tune_file = ReportFile {
        config_hash: cfg.hash(),
        name: format!("{}__tune", cfg.name),
        seed: cfg.seeds[0],
        report: tune_report.clone(),
    };
    std::fs::write(
        dir.join("tune_report.json"),
        serde_json::to_string_pretty(&tune_file)?,
    )?;

    // Test phase: fixed-schedule AIS on the frozen schedule, fresh seeds.
    let mut test_reports = Vec::new();
    for &seed in &cfg.seeds {
        let (_, report) = run_fixed_schedule_ais(
            &path,
            &test_schedule,
            &cfg.kernel,
            cfg.n_particles,
            RngStream::new(seed),
        )?;
        let file = ReportFile {
            config_hash: cfg.hash(),
            name: format!("{}__test", cfg.name),
            seed,
            report: report.clone(),
        };
        std::fs::write(
            dir.join(format!("test_report_seed{seed}.json")),
            serde_json::to_string_pretty(&file)?,
        )?;
        write_trace_csv_with_provenance(
            &dir.join(format!("test_trace_seed{seed}.csv")),
            &report.trace,
            Some((&cfg.hash(), seed)),
        )?;
        test_reports.push(report);
    }
    let truth = cfg.true_log_z()?;
    let refs: Vec<&RunReport> = test_reports.iter().collect();
    let test_row = summarize_reports(cfg, truth, &refs);
    append_summary(&dir.join("summary.csv"), std::slice::from_ref(&test_row))?;

    Ok(TuneTestOutcome {
        tuned_schedule,
        test_schedule,
        tune_evals: tune_report.target_evals,
        tune_kernel_evals: tune_report.evals.kernel,
        test_row,
        test_reports,
    })
}
