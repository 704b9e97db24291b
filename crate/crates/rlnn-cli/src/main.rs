//! `rlnn` — regress-later pricing and semi-static hedging experiments.

mod config;
mod hedgecmd;
mod output;
mod selftest;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{parse_seeds, resolve, Experiment, FileConfig};
use output::{emit, render_csv, render_json, PriceRow};
use rlnn_core::{bound_report, rlnn_backward, RlnnResult};

#[derive(Parser)]
#[command(
    name = "rlnn",
    about = "Monte Carlo pricing of Bermudan-style claims with shallow-network regression, duality bounds, and semi-static hedging",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct ExperimentFlags {
    /// Named parameter set (set1..set5)
    #[arg(long)]
    set: Option<String>,
    /// Initial price override (applied to every asset)
    #[arg(long)]
    s0: Option<f64>,
    /// Number of assets (set3 only)
    #[arg(long)]
    dim: Option<usize>,
    /// Barrier level override (set5)
    #[arg(long)]
    barrier: Option<f64>,
    /// Strike override
    #[arg(long)]
    strike: Option<f64>,
    /// Hidden units per date network (defaults to the set's standard value)
    #[arg(long)]
    hidden: Option<usize>,
    /// Training paths
    #[arg(long)]
    n_train: Option<usize>,
    /// Fresh evaluation paths for the bounds
    #[arg(long)]
    n_eval: Option<usize>,
    /// Seed, list (1,2,9) or range (0..30) for repeat mode
    #[arg(long)]
    seeds: Option<String>,
    /// Output path ('-' for stdout)
    #[arg(long)]
    out: Option<String>,
    /// Output format
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// TOML config file; command-line flags override its fields
    #[arg(long)]
    config: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Train the per-date networks and report direct estimate plus bounds
    Price {
        #[command(flatten)]
        flags: ExperimentFlags,
        /// Write the trained result (all networks + metadata) as JSON
        #[arg(long)]
        save_model: Option<String>,
    },
    /// Recompute bounds from a saved model on fresh paths
    Bounds {
        /// Path to a result JSON produced by `price --save-model`
        #[arg(long)]
        model: String,
        #[arg(long)]
        seeds: Option<String>,
        #[arg(long)]
        n_eval: Option<usize>,
        #[arg(long)]
        out: Option<String>,
        #[arg(long, value_parser = ["csv", "json"])]
        format: Option<String>,
    },
    /// Hedging-error backtests (set4: vanilla put, set5: barrier call)
    Hedge {
        #[command(flatten)]
        flags: ExperimentFlags,
        /// Options per static portfolio, e.g. 10,25,50
        #[arg(long)]
        legs: Option<String>,
        /// Moneyness levels K/S for set4, e.g. 0.5,1,1.5
        #[arg(long)]
        moneyness: Option<String>,
        /// Barrier levels for set5, e.g. 0.91,0.93,0.95,0.97
        #[arg(long)]
        barriers: Option<String>,
        /// Delta-hedge rebalance count over the holding period
        #[arg(long)]
        rebalances: Option<usize>,
        /// Backtest paths
        #[arg(long)]
        n_paths: Option<usize>,
    },
    /// Export one date's static hedge portfolio as CSV
    ExportPortfolio {
        /// Path to a result JSON produced by `price --save-model`
        #[arg(long)]
        model: String,
        /// Monitoring date index (1-based)
        #[arg(long, default_value_t = 1)]
        date: usize,
        #[arg(long)]
        out: Option<String>,
    },
    /// Run the built-in oracle and invariant checks
    Selftest,
}

fn load_config(flags: &ExperimentFlags) -> Result<FileConfig> {
    let mut cfg = match &flags.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let e = &mut cfg.experiment;
    if flags.set.is_some() {
        e.set = flags.set.clone();
    }
    if flags.s0.is_some() {
        e.s0 = flags.s0;
    }
    if flags.dim.is_some() {
        e.dim = flags.dim;
    }
    if flags.barrier.is_some() {
        e.barrier = flags.barrier;
    }
    if flags.strike.is_some() {
        e.strike = flags.strike;
    }
    if flags.hidden.is_some() {
        e.hidden = flags.hidden;
    }
    if flags.n_train.is_some() {
        e.n_train = flags.n_train;
    }
    if flags.n_eval.is_some() {
        e.n_eval = flags.n_eval;
    }
    if flags.seeds.is_some() {
        e.seeds = flags.seeds.clone();
    }
    if flags.out.is_some() {
        e.out = flags.out.clone();
    }
    if flags.format.is_some() {
        e.format = flags.format.clone();
    }
    Ok(cfg)
}

fn cmd_price(flags: &ExperimentFlags, save_model: Option<&str>) -> Result<()> {
    let cfg = load_config(flags)?;
    let save_model = save_model.or(cfg.experiment.save_model.as_deref());
    let exp: Experiment = resolve(&cfg)?;
    let instrument = format!("{}:{}", exp.name, exp.payoff.kind.label());
    let mut rows = Vec::new();
    let mut saved = false;
    for &seed in &exp.seeds {
        let result = rlnn_backward(
            &exp.model,
            &exp.schedule,
            &exp.payoff,
            exp.n_train,
            exp.hidden,
            &exp.train,
            seed,
        )?;
        let report = bound_report(
            &result,
            &exp.model,
            &exp.schedule,
            &exp.payoff,
            exp.n_eval,
            seed,
        )?;
        eprintln!(
            "seed {seed}: direct {:.6} lower {:.6} upper {:.6}",
            result.direct_estimate, report.lower, report.upper
        );
        if let (Some(path), false) = (save_model, saved) {
            std::fs::write(path, result.to_json()?)
                .with_context(|| format!("cannot write model to `{path}`"))?;
            saved = true;
        }
        rows.push(PriceRow::new(&instrument, &result, &report, seed));
    }
    let out = cfg.experiment.out.as_deref();
    match cfg.experiment.format.as_deref().unwrap_or("csv") {
        "json" => emit(out, &render_json(&rows))?,
        _ => emit(out, &render_csv(&rows))?,
    }
    Ok(())
}

fn cmd_bounds(
    model_path: &str,
    seeds: Option<&str>,
    n_eval: Option<usize>,
    out: Option<&str>,
    format: Option<&str>,
) -> Result<()> {
    let text = std::fs::read_to_string(model_path)
        .with_context(|| format!("cannot read model `{model_path}`"))?;
    let result = RlnnResult::from_json(&text)?;
    let seeds = parse_seeds(seeds.unwrap_or("0"))?;
    let n_eval = n_eval.unwrap_or(200_000);
    let instrument = format!("saved:{}", result.payoff.kind.label());
    // undo the stored normalization so the consistency check sees the
    // original units
    let mut raw_model = result.model.clone();
    for s in &mut raw_model.spot {
        *s *= result.scale;
    }
    let mut raw_payoff = result.payoff.clone();
    raw_payoff.strike *= result.scale;
    if let Some(b) = raw_payoff.barrier.as_mut() {
        *b *= result.scale;
    }
    let schedule = result.schedule.clone();
    let mut rows = Vec::new();
    for &seed in &seeds {
        let report = bound_report(&result, &raw_model, &schedule, &raw_payoff, n_eval, seed)?;
        rows.push(PriceRow::new(&instrument, &result, &report, seed));
    }
    match format.unwrap_or("csv") {
        "json" => emit(out, &render_json(&rows))?,
        _ => emit(out, &render_csv(&rows))?,
    }
    Ok(())
}

fn cmd_export(model_path: &str, date: usize, out: Option<&str>) -> Result<()> {
    let text = std::fs::read_to_string(model_path)
        .with_context(|| format!("cannot read model `{model_path}`"))?;
    let result = RlnnResult::from_json(&text)?;
    if date == 0 || date > result.nets.len() {
        return Err(anyhow!(
            "date index {date} out of range 1..={}",
            result.nets.len()
        ));
    }
    let port = rlnn_core::extract_portfolio(result.net_at(date), result.schedule.times()[date]);
    emit(out, &port.to_csv())
}

fn main() {
    if let Ok(threads) = std::env::var("RLNN_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .ok();
            }
            _ => {
                eprintln!("error: RLNN_THREADS must be a positive integer, got `{threads}`");
                std::process::exit(2);
            }
        }
    }
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Price { flags, save_model } => cmd_price(flags, save_model.as_deref()),
        Command::Bounds {
            model,
            seeds,
            n_eval,
            out,
            format,
        } => cmd_bounds(
            model,
            seeds.as_deref(),
            *n_eval,
            out.as_deref(),
            format.as_deref(),
        ),
        Command::Hedge {
            flags,
            legs,
            moneyness,
            barriers,
            rebalances,
            n_paths,
        } => hedgecmd::run(
            flags,
            legs.as_deref(),
            moneyness.as_deref(),
            barriers.as_deref(),
            *rebalances,
            *n_paths,
        ),
        Command::ExportPortfolio { model, date, out } => cmd_export(model, *date, out.as_deref()),
        Command::Selftest => std::process::exit(selftest::run()),
    };
    if let Err(err) = outcome {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
