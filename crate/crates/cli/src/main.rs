use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crais::harness::{cli_run, cli_tune_then_test, run_suite, Suite, SuiteOptions};

/// Annealed importance sampling with constant-rate adaptive schedules.
#[derive(Parser)]
#[command(name = "crais", version, about)]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Output directory for reports, traces and summaries.
    #[arg(long, global = true, default_value = "crais-out")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one experiment config (JSON) over its seed list.
    Run {
        config: PathBuf,
        /// Override the config's seed list.
        #[arg(long, value_delimiter = ',')]
        seed: Option<Vec<u64>>,
    },
    /// Run a bundled benchmark suite: demo2d, highdim or logistic.
    Benchmark {
        suite: String,
        /// Seeds for every experiment in the suite.
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
        seed: Vec<u64>,
        /// Particle-count override for quick runs.
        #[arg(long)]
        n_particles: Option<usize>,
    },
    /// Tune a schedule, freeze it, then estimate with fresh particles.
    TuneThenTest {
        config: PathBuf,
        /// Interpolate the tuned schedule to this many steps.
        #[arg(long)]
        m_test: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("warning: could not configure {} threads: {e}", cli.threads);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> crais::Result<()> {
    match cli.command {
        Command::Run { config, seed } => {
            let row = cli_run(&config, &cli.out_dir, seed)?;
            println!(
                "{}: log_z_is = {:.6} +/- {:.6} over {} seeds (M = {:.1}, target evals = {:.0})",
                row.name, row.log_z_is_mean, row.log_z_is_std, row.n_seeds, row.m_mean,
                row.target_evals_mean
            );
            if let (Some(err), Some(std)) = (row.est_err_mean, row.est_err_std) {
                println!("  |error| vs analytic log Z: {err:.6} +/- {std:.6}");
            }
            println!("  reports in {}", cli.out_dir.display());
        }
        Command::Benchmark {
            suite,
            seed,
            n_particles,
        } => {
            let suite: Suite = suite.parse()?;
            let opts = SuiteOptions {
                out_dir: cli.out_dir.clone(),
                seeds: seed,
                n_particles,
            };
            let dir = run_suite(suite, &opts)?;
            println!("suite reports in {}", dir.display());
        }
        Command::TuneThenTest { config, m_test } => {
            let outcome = cli_tune_then_test(&config, m_test, &cli.out_dir)?;
            println!(
                "tuned schedule: {} steps; test schedule: {} steps",
                outcome.tuned_schedule.len(),
                outcome.test_schedule.len()
            );
            println!(
                "tuning cost: {} target evals (+{} kernel); test: {:.0} target evals per seed",
                outcome.tune_evals,
                outcome.tune_kernel_evals,
                outcome.test_row.target_evals_mean
            );
            println!(
                "{}: log_z_is = {:.6} +/- {:.6}",
                outcome.test_row.name,
                outcome.test_row.log_z_is_mean,
                outcome.test_row.log_z_is_std
            );
        }
    }
    Ok(())
}
