//! Execute configured runs and sweeps; persist traces and reports as CSV.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use switchmix_core::engine::{run_mixture, RunTrace, Scheme};
use switchmix_core::learner::LearnerKind;
use switchmix_core::loss::{LossFamily, Observation};
use switchmix_core::oracle::{best_switching, decompose_regret, RegretReport};
use switchmix_core::scheme::exp::ExpScheme;
use switchmix_core::scheme::log::LogScheme;
use switchmix_core::scheme::quad::QuadScheme;

use crate::config::{DataSource, RunConfig, SchemeChoice};
use crate::data::{generate, load_observations, GeneratorSpec};

/// Headroom for the decomposition inequality on every emitted row.
pub const COROLLARY_TOLERANCE: f64 = 1e-8;

/// Outputs of one run.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub trace: RunTrace<f64>,
    pub report: RegretReport<f64>,
    pub trace_path: PathBuf,
    pub report_path: PathBuf,
}

fn resolve_data(config: &RunConfig) -> Result<Vec<Observation<f64>>> {
    match &config.data {
        DataSource::Synthetic => {
            let spec = GeneratorSpec {
                segments: config.segments,
                means: config.means.clone(),
                sigma: config.sigma,
                placement: config.placement,
            };
            Ok(generate(&spec, config.horizon, config.seed)?.0)
        }
        DataSource::File(path) => {
            let data = load_observations(path)?;
            if data.len() != config.horizon {
                bail!(
                    "config horizon {} but {} observations in {}",
                    config.horizon,
                    data.len(),
                    path.display()
                );
            }
            Ok(data)
        }
    }
}

fn execute_scheme<S>(
    scheme: S,
    data: &[Observation<f64>],
    segments: usize,
) -> Result<(RunTrace<f64>, RegretReport<f64>)>
where
    S: Scheme<f64> + Clone,
{
    let family = LossFamily::<f64>::square();
    let learner = LearnerKind::FollowTheLeader;
    let trace = run_mixture(scheme.clone(), family.clone(), learner, data)?;
    let spec = best_switching(data, &family, segments)?;
    let report = decompose_regret(&scheme, &family, learner, &trace, &spec)?;
    Ok((trace, report))
}

/// Run the mixture described by a config and compute its regret report.
pub fn execute(config: &RunConfig) -> Result<(RunTrace<f64>, RegretReport<f64>)> {
    let data = resolve_data(config)?;
    let (trace, report) = match config.scheme {
        SchemeChoice::Exp(w) => {
            let scheme = ExpScheme::with_cap(w, config.horizon, config.exp_cap)?;
            execute_scheme(scheme, &data, config.segments)?
        }
        SchemeChoice::Quad(w) => {
            let scheme = QuadScheme::new(w, config.horizon)?;
            execute_scheme(scheme, &data, config.segments)?
        }
        SchemeChoice::Log(w) => execute_scheme(LogScheme::new(w), &data, config.segments)?,
    };
    if !report.corollary_holds(COROLLARY_TOLERANCE) {
        bail!(
            "regret decomposition violated: slack {} below -{COROLLARY_TOLERANCE}",
            report.corollary_slack
        );
    }
    Ok((trace, report))
}

/// Run and persist `trace.csv` and `report.csv` under the output directory.
pub fn run(config: &RunConfig) -> Result<RunArtifacts> {
    let (trace, report) = execute(config)?;
    std::fs::create_dir_all(&config.out)
        .with_context(|| format!("creating {}", config.out.display()))?;
    let trace_path = config.out.join("trace.csv");
    let report_path = config.out.join("report.csv");
    std::fs::write(&trace_path, trace.to_csv())?;
    let mut report_csv = String::new();
    let _ = writeln!(report_csv, "{}", RegretReport::<f64>::CSV_HEADER);
    let _ = writeln!(report_csv, "{}", report.csv_row());
    std::fs::write(&report_path, report_csv)?;
    Ok(RunArtifacts {
        trace,
        report,
        trace_path,
        report_path,
    })
}

/// One row of a sweep aggregate.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub seed: u64,
    pub report: RegretReport<f64>,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str =
        "scheme,weighting,T,S,seed,mix_loss,oracle_loss,regret,path_E,W_measured,W_bound,SE,regret_per_t";

    pub fn csv_row(&self) -> String {
        let r = &self.report;
        format!(
            "{},{},{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e}",
            r.scheme,
            r.weighting,
            r.horizon,
            r.segments,
            self.seed,
            r.mix_loss,
            r.oracle_loss,
            r.regret,
            r.path_e,
            r.w_measured,
            r.w_bound,
            r.s_e,
            r.regret / r.horizon as f64,
        )
    }
}

/// Run every (horizon, segments, seed) combination in parallel and write
/// one aggregate CSV, rows ordered by (horizon, segments, seed).
pub fn sweep(
    base: &RunConfig,
    horizons: &[usize],
    segment_counts: &[usize],
    seeds: &[u64],
) -> Result<(Vec<SweepRow>, PathBuf)> {
    let mut combos = Vec::new();
    for &horizon in horizons {
        for &segments in segment_counts {
            for &seed in seeds {
                let mut config = base.clone();
                config.horizon = horizon;
                config.segments = segments;
                config.seed = seed;
                config.validate().with_context(|| {
                    format!("combination T={horizon}, S={segments}, seed={seed}")
                })?;
                combos.push(config);
            }
        }
    }
    let mut rows: Vec<SweepRow> = combos
        .par_iter()
        .map(|config| {
            let (_, report) = execute(config)?;
            Ok(SweepRow {
                seed: config.seed,
                report,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.report.horizon, r.report.segments, r.seed));

    std::fs::create_dir_all(&base.out)?;
    let path = base.out.join("sweep.csv");
    let mut csv = String::new();
    let _ = writeln!(csv, "{}", SweepRow::CSV_HEADER);
    for row in &rows {
        let _ = writeln!(csv, "{}", row.csv_row());
    }
    std::fs::write(&path, csv)?;
    Ok((rows, path))
}
