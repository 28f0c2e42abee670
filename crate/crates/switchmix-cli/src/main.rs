use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use switchmix_cli::config::{Overrides, RunConfig};
use switchmix_cli::{runner, verify};

/// Online mixtures tracking the best switching estimate: run experiments,
/// sweep parameters, and verify the bound properties.
#[derive(Parser)]
#[command(name = "switchmix", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OverrideArgs {
    /// Expert scheme: exp, quad, or log.
    #[arg(long)]
    scheme: Option<String>,
    /// Transition weighting: naive, better, smarter (log only), optimal.
    #[arg(long)]
    weighting: Option<String>,
    /// Number of steps.
    #[arg(long)]
    horizon: Option<usize>,
    /// Competition segment count.
    #[arg(long)]
    segments: Option<usize>,
    /// Generator seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl From<&OverrideArgs> for Overrides {
    fn from(a: &OverrideArgs) -> Self {
        Overrides {
            scheme: a.scheme.clone(),
            weighting: a.weighting.clone(),
            horizon: a.horizon,
            segments: a.segments,
            seed: a.seed,
            out: a.out.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one configured experiment; writes trace.csv and report.csv.
    Run {
        /// Path to a key=value config file.
        config: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Run a (horizon x segments x seed) grid; writes sweep.csv.
    Sweep {
        /// Path to a key=value config file.
        config: PathBuf,
        /// Comma-separated horizons, e.g. 256,512,1024.
        #[arg(long, value_delimiter = ',', required = true)]
        horizons: Vec<usize>,
        /// Comma-separated segment counts.
        #[arg(long, value_delimiter = ',', required = true)]
        segments: Vec<usize>,
        /// Comma-separated seeds; may be empty.
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Run the full property suite and print one line per criterion.
    Verify,
}

fn run_command(command: Command) -> Result<bool> {
    match command {
        Command::Run { config, overrides } => {
            let cfg = RunConfig::load(&config, &(&overrides).into())?;
            let artifacts = runner::run(&cfg).context("run failed")?;
            let r = &artifacts.report;
            println!(
                "{}/{} T={} S={}: mix_loss={:.6} regret={:.6} W={:.4} (bound {:.4}) SE={}",
                r.scheme,
                r.weighting,
                r.horizon,
                r.segments,
                r.mix_loss,
                r.regret,
                r.w_measured,
                r.w_bound,
                r.s_e
            );
            println!("wrote {}", artifacts.trace_path.display());
            println!("wrote {}", artifacts.report_path.display());
            Ok(true)
        }
        Command::Sweep {
            config,
            horizons,
            segments,
            seeds,
            overrides,
        } => {
            let cfg = RunConfig::load(&config, &(&overrides).into())?;
            let (rows, path) = runner::sweep(&cfg, &horizons, &segments, &seeds)?;
            println!("{} rows -> {}", rows.len(), path.display());
            Ok(true)
        }
        Command::Verify => {
            let outcomes = verify::run_all();
            print!("{}", verify::render(&outcomes));
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            if failed > 0 {
                eprintln!("{failed} criterion(s) failed");
            }
            Ok(failed == 0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_command(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
