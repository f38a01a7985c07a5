//! Experiment runner and CSV persistence.
//!
//! One row per (u, estimator) pair, u ascending and estimators in canonical
//! order. Replication streams are keyed by (seed, replication index), so the
//! CSV is byte-identical across reruns and worker counts; the only
//! nondeterministic quantity, wall-clock time, is written as zero unless
//! timing capture is requested.

use super::config::{ConfigError, ExperimentConfig};
use crate::analysis::{self, AnalysisError};
use crate::estimators::{self, EstimatorError, EstimatorKind, Method, Series};
use crate::model::{Model, ModelError};
use std::fmt::Write as _;
use std::io::{self, Write};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("cannot build worker pool: {0}")]
    Pool(String),
}

/// One output record of an experiment run.
///
/// `estimate` is the simulated series remainder R̂(u); `psi_hat` adds the
/// exact explicit part. The confidence interval is on the psi scale. The
/// bound columns place the truncation-error bracket of the discard series on
/// the psi scale (explicit part + z_n + bound), so they enclose the true
/// ruin probability on every row; `z_n` itself refers to the row's series.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub u: f64,
    pub series: Series,
    pub method: Method,
    pub n: u32,
    pub reps: usize,
    pub seed: u64,
    pub estimate: f64,
    pub psi_hat: f64,
    pub std_err: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub beta_hat: f64,
    pub corr_hat: f64,
    pub heavy_tail_approx: f64,
    pub z_n: f64,
    pub bound_lo: f64,
    pub bound_hi: f64,
    pub wall_ms: f64,
}

pub const CSV_HEADER: &str = "u,series,method,n,reps,seed,estimate,psi_hat,std_err,ci_lo,ci_hi,\
                              beta_hat,corr_hat,heavy_tail_approx,z_n,bound_lo,bound_hi,wall_ms";

/// An estimator cell that failed; the run carries on without its row.
#[derive(Debug)]
pub struct RunFailure {
    pub u: f64,
    pub kind: EstimatorKind,
    pub message: String,
}

#[derive(Debug)]
pub struct ExperimentOutcome {
    pub rows: Vec<ResultRow>,
    pub failures: Vec<RunFailure>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global default pool.
    pub workers: Option<usize>,
    /// Record wall-clock per row instead of zeros. Off by default so that
    /// rerunning a seed reproduces the CSV byte for byte.
    pub timing: bool,
}

/// Runs every (u, estimator) cell of the config and writes the CSV.
pub fn run_experiment(
    config: &ExperimentConfig,
    options: RunOptions,
) -> Result<ExperimentOutcome, HarnessError> {
    let model = config.model.build()?;
    let outcome = match options.workers {
        Some(workers) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| HarnessError::Pool(e.to_string()))?;
            pool.install(|| run_cells(config, &model, options.timing))
        }
        None => run_cells(config, &model, options.timing),
    }?;

    let path = &config.output.path;
    let file = std::fs::File::create(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut writer = io::BufWriter::new(file);
    write_csv(&outcome.rows, &mut writer).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    writer.flush().map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(outcome)
}

fn run_cells(
    config: &ExperimentConfig,
    model: &Model,
    timing: bool,
) -> Result<ExperimentOutcome, HarnessError> {
    let sim = &config.sim;
    let mut rows = Vec::with_capacity(sim.u_grid.len() * config.run.estimators.len());
    let mut failures = Vec::new();
    for &u in &sim.u_grid {
        // Per-u analytic columns shared by all estimator rows.
        let heavy_tail = analysis::heavy_tail_approx(model, u);
        let (bound_lo, bound_hi) = psi_scale_bounds(model, u, sim.n)?;
        for &kind in &config.run.estimators {
            let started = Instant::now();
            let outcome = estimators::run_estimator(kind, model, u, sim.n, sim.reps, sim.seed)
                .and_then(|remainder| {
                    let psi = estimators::assemble_psi(model, u, &remainder)?;
                    Ok((remainder, psi))
                });
            let wall_ms = if timing {
                started.elapsed().as_secs_f64() * 1e3
            } else {
                0.0
            };
            match outcome {
                Ok((remainder, psi)) => rows.push(ResultRow {
                    u,
                    series: kind.series,
                    method: kind.method,
                    n: sim.n,
                    reps: sim.reps,
                    seed: sim.seed,
                    estimate: remainder.estimate,
                    psi_hat: psi.estimate,
                    std_err: psi.std_err,
                    ci_lo: psi.ci95.0,
                    ci_hi: psi.ci95.1,
                    beta_hat: psi.beta_hat,
                    corr_hat: psi.corr_hat,
                    heavy_tail_approx: heavy_tail,
                    z_n: analysis::z_n(kind.series, model, u, sim.n),
                    bound_lo,
                    bound_hi,
                    wall_ms,
                }),
                Err(e) => failures.push(RunFailure {
                    u,
                    kind,
                    message: e.to_string(),
                }),
            }
        }
    }
    Ok(ExperimentOutcome { rows, failures })
}

/// Error bracket of the discard series lifted to the psi scale:
/// explicit part + z_n + [lower, upper] encloses the exact ψ(u).
fn psi_scale_bounds(model: &Model, u: f64, n: u32) -> Result<(f64, f64), HarnessError> {
    let explicit = estimators::explicit_part(model, Series::New, u)?;
    let z = analysis::z_n(Series::New, model, u, n);
    let (lo, hi) = analysis::error_bounds(model, u, n)?;
    Ok((explicit + z + lo, explicit + z + hi))
}

/// 17 significant digits, scientific notation.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv(rows: &[ResultRow], writer: &mut impl Write) -> io::Result<()> {
    writeln!(writer, "{CSV_HEADER}")?;
    for row in rows {
        let mut line = String::with_capacity(256);
        let _ = write!(
            line,
            "{},{},{},{},{},{}",
            fmt_f64(row.u),
            row.series,
            row.method,
            row.n,
            row.reps,
            row.seed
        );
        for value in [
            row.estimate,
            row.psi_hat,
            row.std_err,
            row.ci_lo,
            row.ci_hi,
            row.beta_hat,
            row.corr_hat,
            row.heavy_tail_approx,
            row.z_n,
            row.bound_lo,
            row.bound_hi,
            row.wall_ms,
        ] {
            let _ = write!(line, ",{}", fmt_f64(value));
        }
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

/// Asymptotic variance-reduction constants per truncation order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsRow {
    pub n: u32,
    pub ratio_new: f64,
    pub ratio_pk: f64,
    pub cross_cv: f64,
    pub cross_raw: f64,
}

pub fn constants_report(model: &Model, orders: &[u32]) -> Vec<ConstantsRow> {
    orders
        .iter()
        .map(|&n| {
            let c = analysis::variance_constants(model, n);
            ConstantsRow {
                n,
                ratio_new: c.ratio_new,
                ratio_pk: c.ratio_pk,
                cross_cv: c.cross_cv,
                cross_raw: c.cross_raw,
            }
        })
        .collect()
}
