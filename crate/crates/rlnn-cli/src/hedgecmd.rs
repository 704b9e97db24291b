//! Hedging-error experiments: static replication vs dynamic delta hedging.
//!
//! Emits one CSV table per run, shaped like the study layout: rows are
//! metric x hedge type x option count, columns are the moneyness levels
//! (vanilla put) or barrier levels (knock-out call).

use anyhow::{anyhow, bail, Result};

use crate::config::parse_seeds;
use crate::output::{emit, fmt_sig};
use crate::ExperimentFlags;
use rlnn_core::{
    delta_backtest, extract_portfolio, fit_european_put_hedge, rlnn_backward, sets,
    static_backtest, HedgeStats, HedgeTarget, TrainConfig,
};

fn parse_list<T: std::str::FromStr>(spec: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|e| anyhow!("bad {what} `{s}`: {e}"))
        })
        .collect()
}

struct Column {
    label: String,
    static_stats: Vec<HedgeStats>, // one per legs count
    dynamic_stats: HedgeStats,
}

fn render(legs: &[usize], columns: &[Column]) -> String {
    let mut out = String::from("metric,hedge_type,options_count");
    for c in columns {
        out.push(',');
        out.push_str(&c.label);
    }
    out.push('\n');
    let metrics: [(&str, fn(&HedgeStats) -> f64); 4] = [
        ("mean", |s| s.mean),
        ("std", |s| s.std),
        ("var95", |s| s.var95),
        ("cvar95", |s| s.cvar95),
    ];
    for (name, get) in metrics {
        for (i, p) in legs.iter().enumerate() {
            out.push_str(&format!("{name},static,{p}"));
            for c in columns {
                out.push(',');
                out.push_str(&fmt_sig(get(&c.static_stats[i]), 6));
            }
            out.push('\n');
        }
        out.push_str(&format!("{name},dynamic,NA"));
        for c in columns {
            out.push(',');
            out.push_str(&fmt_sig(get(&c.dynamic_stats), 6));
        }
        out.push('\n');
    }
    out
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    flags: &ExperimentFlags,
    legs: Option<&str>,
    moneyness: Option<&str>,
    barriers: Option<&str>,
    rebalances: Option<usize>,
    n_paths: Option<usize>,
) -> Result<()> {
    let cfg = crate::load_config(flags)?;
    let set_name = cfg
        .experiment
        .set
        .clone()
        .ok_or_else(|| anyhow!("hedge requires --set set4 or --set set5"))?;
    let n_paths = n_paths
        .or(cfg.hedge.n_paths)
        .unwrap_or(50_000);
    let seed = match &cfg.experiment.seeds {
        Some(s) => *parse_seeds(s)?
            .first()
            .ok_or_else(|| anyhow!("empty seed list"))?,
        None => cfg.hedge.seed.unwrap_or(0),
    };
    let train = TrainConfig::default();
    let out = cfg.experiment.out.as_deref();

    match set_name.as_str() {
        "set4" => {
            let legs: Vec<usize> = match legs {
                Some(s) => parse_list(s, "legs")?,
                None => cfg.hedge.legs.clone().unwrap_or_else(|| vec![10, 25, 50]),
            };
            let moneyness: Vec<f64> = match moneyness {
                Some(s) => parse_list(s, "moneyness")?,
                None => cfg
                    .hedge
                    .moneyness
                    .clone()
                    .unwrap_or_else(|| vec![0.5, 1.0, 1.5]),
            };
            let rebalances = rebalances.or(cfg.hedge.rebalances).unwrap_or(25);
            let set = sets::european_put_hedging();
            let horizon = 1.0 / 12.0;
            let maturity = set.schedule.maturity();
            let mut columns = Vec::new();
            for &m in &moneyness {
                let strike = m * set.model.spot[0];
                let target = HedgeTarget::EuropeanPut { strike, maturity };
                let mut static_stats = Vec::new();
                for &p in &legs {
                    let (net, _) = fit_european_put_hedge(
                        &set.model, strike, maturity, horizon, 50_000, p, &train, seed,
                    )?;
                    let port = extract_portfolio(&net, horizon);
                    static_stats.push(static_backtest(
                        &target, &port, horizon, &set.model, n_paths, seed,
                    )?);
                }
                let dynamic_stats =
                    delta_backtest(&target, horizon, rebalances, &set.model, n_paths, seed)?;
                eprintln!("moneyness {m}: done");
                columns.push(Column {
                    label: fmt_sig(m, 6),
                    static_stats,
                    dynamic_stats,
                });
            }
            emit(out, &render(&legs, &columns))
        }
        "set5" => {
            let legs: Vec<usize> = match legs {
                Some(s) => parse_list(s, "legs")?,
                None => cfg.hedge.legs.clone().unwrap_or_else(|| vec![5, 10, 20]),
            };
            let barriers: Vec<f64> = match barriers {
                Some(s) => parse_list(s, "barriers")?,
                None => cfg
                    .hedge
                    .barriers
                    .clone()
                    .unwrap_or_else(|| vec![0.91, 0.93, 0.95, 0.97]),
            };
            // daily rebalancing over the 12-day holding period
            let rebalances = rebalances.or(cfg.hedge.rebalances).unwrap_or(12);
            let mut columns = Vec::new();
            for &b in &barriers {
                let set = sets::barrier_call_hedging().with_barrier(b);
                let horizon = set.schedule.times()[1];
                let mut static_stats = Vec::new();
                let mut last_result = None;
                for &p in &legs {
                    let result = rlnn_backward(
                        &set.model,
                        &set.schedule,
                        &set.payoff,
                        50_000,
                        p,
                        &train,
                        seed,
                    )?;
                    let port = extract_portfolio(result.net_at(1), horizon);
                    let target = HedgeTarget::BarrierClaim { result: &result };
                    static_stats.push(static_backtest(
                        &target, &port, horizon, &set.model, n_paths, seed,
                    )?);
                    last_result = Some(result);
                }
                let result = last_result.expect("at least one legs count");
                let target = HedgeTarget::BarrierClaim { result: &result };
                let dynamic_stats =
                    delta_backtest(&target, horizon, rebalances, &set.model, n_paths, seed)?;
                eprintln!("barrier {b}: done");
                columns.push(Column {
                    label: fmt_sig(b, 6),
                    static_stats,
                    dynamic_stats,
                });
            }
            emit(out, &render(&legs, &columns))
        }
        other => bail!("hedge supports set4 and set5, got `{other}`"),
    }
}
