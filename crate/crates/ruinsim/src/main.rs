use clap::{Args, Parser, Subcommand};
use ruinsim::estimators::{self, EstimatorKind};
use ruinsim::harness::{
    self, load_config, preset, ExperimentConfig, RunOptions, PRESET_NAMES,
};
use ruinsim::model::Model;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "ruinsim",
    version,
    about = "Rare-event simulation of ruin probabilities for mixed light/heavy-tailed claims"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single estimator at one initial capital and print the result
    Estimate(EstimateArgs),
    /// Run a preset or config-file experiment and write its CSV
    Experiment(ExperimentArgs),
    /// Print the asymptotic variance-reduction constants per order n
    Constants(ConstantsArgs),
}

/// Model source: a config file, a named preset, or inline parameters.
#[derive(Args)]
struct ModelSource {
    /// Config file providing [model] (and defaults for [sim])
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset: fig1, fig1b, fig2, fig3 or fig4
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Exponential rate of the light claim component
    #[arg(long, default_value_t = 3.0)]
    mu: f64,
    /// Pareto shape of the heavy claim component (a > 1)
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    /// Pareto scale of the heavy claim component
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// Probability that a claim is heavy
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Target traffic intensity (exclusive with --lambda; default 0.99)
    #[arg(long, conflicts_with = "lambda")]
    rho: Option<f64>,
    /// Poisson arrival rate (exclusive with --rho)
    #[arg(long)]
    lambda: Option<f64>,
}

impl ModelSource {
    /// The base config: file, preset, or one synthesized from the inline
    /// model flags with fig2-scale simulation defaults.
    fn base_config(&self) -> Result<ExperimentConfig, String> {
        if let Some(path) = &self.config {
            return load_config(path).map_err(|e| e.to_string());
        }
        if let Some(name) = &self.preset {
            return preset(name).ok_or_else(|| {
                format!("unknown preset {name:?}; available: {}", PRESET_NAMES.join(", "))
            });
        }
        let mut text = format!(
            "[model]\nmu = {}\na = {}\nb = {}\nepsilon = {}\n",
            self.mu, self.a, self.b, self.epsilon
        );
        match (self.rho, self.lambda) {
            (Some(_), Some(_)) => unreachable!("clap enforces exclusivity"),
            (None, Some(lambda)) => text.push_str(&format!("lambda = {lambda}\n")),
            (Some(rho), None) => text.push_str(&format!("rho = {rho}\n")),
            (None, None) => text.push_str("rho = 0.99\n"),
        }
        text.push_str(
            "\n[sim]\nn = 100\nreps = 10000\nseed = 20260810\nu_grid = [1.0]\n\
             \n[run]\nestimators = [\"new:cv_max\"]\n\
             \n[output]\npath = \"ruinsim.csv\"\nformat = \"csv\"\n",
        );
        harness::parse_config(&text).map_err(|e| e.to_string())
    }
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    source: ModelSource,
    /// Initial capital u
    #[arg(long)]
    u: f64,
    /// Estimator, e.g. new:cv_max (series new|pk, method crude|cv_max|ak|ak_cv)
    #[arg(long)]
    estimator: EstimatorKind,
    /// Truncation order of the control variate
    #[arg(long)]
    n: Option<u32>,
    /// Number of replications
    #[arg(long)]
    reps: Option<usize>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (RUINSIM_WORKERS overrides)
    #[arg(long)]
    workers: Option<usize>,
    /// Also append the result as a one-row CSV to this path
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Built-in preset: fig1, fig1b, fig2, fig3 or fig4
    #[arg(long, value_name = "NAME", conflicts_with = "config")]
    preset: Option<String>,
    /// Config file path
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override the master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the replication count
    #[arg(long)]
    reps: Option<usize>,
    /// Override the output CSV path
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads (RUINSIM_WORKERS overrides)
    #[arg(long)]
    workers: Option<usize>,
    /// Record wall-clock per row (breaks byte-identical reruns)
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct ConstantsArgs {
    #[command(flatten)]
    source: ModelSource,
    /// Comma-separated truncation orders, e.g. 2,10,100
    #[arg(long, value_name = "LIST", default_value = "100")]
    n: String,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Estimate(args) => run_estimate(args),
        Command::Experiment(args) => run_experiment_cmd(args),
        Command::Constants(args) => run_constants(args),
    }
    .unwrap_or_else(|message| {
        eprintln!("error: {message}");
        ExitCode::from(2)
    })
}

fn run_estimate(args: EstimateArgs) -> Result<ExitCode, String> {
    if !(args.u.is_finite() && args.u >= 0.0) {
        return Err(format!("u must be nonnegative and finite, got {}", args.u));
    }
    let mut config = args.source.base_config()?;
    config.sim.u_grid = vec![args.u];
    config.run.estimators = vec![args.estimator];
    if let Some(n) = args.n {
        config.sim.n = n;
    }
    if let Some(reps) = args.reps {
        config.sim.reps = reps;
    }
    if let Some(seed) = args.seed {
        config.sim.seed = seed;
    }
    let model = config.model.build().map_err(|e| e.to_string())?;
    let workers = harness::resolve_workers(args.workers);

    let run = || -> Result<_, String> {
        let started = Instant::now();
        let remainder = estimators::run_estimator(
            args.estimator,
            &model,
            args.u,
            config.sim.n,
            config.sim.reps,
            config.sim.seed,
        )
        .map_err(|e| e.to_string())?;
        let psi = estimators::assemble_psi(&model, args.u, &remainder).map_err(|e| e.to_string())?;
        Ok((remainder, psi, started.elapsed().as_secs_f64() * 1e3))
    };
    let (remainder, psi, wall_ms) = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| e.to_string())?
            .install(run)?,
        None => run()?,
    };

    let rates = model.rates();
    println!("estimator      {}", args.estimator);
    println!("u              {}", args.u);
    println!("reps           {}", config.sim.reps);
    println!("seed           {}", config.sim.seed);
    println!("n              {}", config.sim.n);
    println!("rho / rho_d    {} / {}", rates.rho, rates.rho_d);
    println!("q / r          {} / {}", rates.q, rates.r);
    println!("R_hat          {:.10e}", remainder.estimate);
    println!("psi_hat        {:.10e}", psi.estimate);
    println!("std_err        {:.10e}", psi.std_err);
    println!("ci95           [{:.10e}, {:.10e}]", psi.ci95.0, psi.ci95.1);
    println!("beta_hat       {:.6}", psi.beta_hat);
    println!("corr_hat       {:.6}", psi.corr_hat);
    println!(
        "heavy_tail     {:.10e}",
        ruinsim::analysis::heavy_tail_approx(&model, args.u)
    );
    eprintln!("wall_ms        {wall_ms:.1}");

    if let Some(out) = args.out {
        config.output.path = out.clone();
        let row = harness::ResultRow {
            u: args.u,
            series: args.estimator.series,
            method: args.estimator.method,
            n: config.sim.n,
            reps: config.sim.reps,
            seed: config.sim.seed,
            estimate: remainder.estimate,
            psi_hat: psi.estimate,
            std_err: psi.std_err,
            ci_lo: psi.ci95.0,
            ci_hi: psi.ci95.1,
            beta_hat: psi.beta_hat,
            corr_hat: psi.corr_hat,
            heavy_tail_approx: ruinsim::analysis::heavy_tail_approx(&model, args.u),
            z_n: ruinsim::analysis::z_n(args.estimator.series, &model, args.u, config.sim.n),
            bound_lo: f64::NAN,
            bound_hi: f64::NAN,
            wall_ms,
        };
        let bounds = bounds_for(&model, args.u, config.sim.n)?;
        let row = harness::ResultRow {
            bound_lo: bounds.0,
            bound_hi: bounds.1,
            ..row
        };
        let file = std::fs::File::create(&out).map_err(|e| e.to_string())?;
        let mut writer = std::io::BufWriter::new(file);
        harness::write_csv(&[row], &mut writer).map_err(|e| e.to_string())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn bounds_for(model: &Model, u: f64, n: u32) -> Result<(f64, f64), String> {
    let explicit = estimators::explicit_part(model, ruinsim::Series::New, u).map_err(|e| e.to_string())?;
    let z = ruinsim::analysis::z_n(ruinsim::Series::New, model, u, n);
    let (lo, hi) = ruinsim::analysis::error_bounds(model, u, n).map_err(|e| e.to_string())?;
    Ok((explicit + z + lo, explicit + z + hi))
}

fn run_experiment_cmd(args: ExperimentArgs) -> Result<ExitCode, String> {
    let mut config = match (&args.preset, &args.config) {
        (Some(name), None) => preset(name).ok_or_else(|| {
            format!("unknown preset {name:?}; available: {}", PRESET_NAMES.join(", "))
        })?,
        (None, Some(path)) => load_config(path).map_err(|e| e.to_string())?,
        (None, None) => return Err("one of --preset or --config is required".into()),
        (Some(_), Some(_)) => unreachable!("clap enforces exclusivity"),
    };
    if let Some(seed) = args.seed {
        config.sim.seed = seed;
    }
    if let Some(reps) = args.reps {
        if reps < 2 {
            return Err(format!("reps must be at least 2, got {reps}"));
        }
        config.sim.reps = reps;
    }
    if let Some(out) = args.out {
        config.output.path = out;
    }
    let options = RunOptions {
        workers: harness::resolve_workers(args.workers),
        timing: args.timing,
    };
    let started = Instant::now();
    let outcome = harness::run_experiment(&config, options).map_err(|e| e.to_string())?;
    eprintln!(
        "wrote {} rows to {} in {:.1} s",
        outcome.rows.len(),
        config.output.path.display(),
        started.elapsed().as_secs_f64()
    );
    if outcome.failures.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for f in &outcome.failures {
            eprintln!("estimator {} failed at u = {}: {}", f.kind, f.u, f.message);
        }
        Ok(ExitCode::from(3))
    }
}

fn run_constants(args: ConstantsArgs) -> Result<ExitCode, String> {
    let orders: Vec<u32> = args
        .n
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| format!("invalid order {t:?} in --n"))
        })
        .collect::<Result<_, _>>()?;
    if orders.is_empty() {
        return Err("--n must name at least one order".into());
    }
    let config = args.source.base_config()?;
    let model = config.model.build().map_err(|e| e.to_string())?;
    let rows = harness::constants_report(&model, &orders);
    println!(
        "{:>6} {:>14} {:>14} {:>14} {:>14}",
        "n", "ratio_new", "ratio_pk", "cross_cv", "cross_raw"
    );
    for r in rows {
        println!(
            "{:>6} {:>14.6} {:>14.6} {:>14.6} {:>14.6}",
            r.n, r.ratio_new, r.ratio_pk, r.cross_cv, r.cross_raw
        );
    }
    Ok(ExitCode::SUCCESS)
}
