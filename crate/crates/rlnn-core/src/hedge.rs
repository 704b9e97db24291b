//! Static hedge extraction and hedging-error backtests.
//!
//! A trained network IS a portfolio: hidden unit i is a basket option with
//! composition `w1_i`, strike offset `b1_i` and quantity `w2_i`, plus `b2` in
//! cash at maturity. The portfolio payoff reproduces the network output
//! exactly, and its value at an earlier date is the same closed-form
//! expectation the pricer uses, so replication claims can be checked to the
//! bit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{bs_delta, bs_price, classify_leg_1d, ContinuationKernel, LegClassification};
use crate::error::{Result, RlnnError};
use crate::market::{simulate_paths, ExerciseSchedule, GbmModel};
use crate::math::{mean_and_se, pairwise_sum};
use crate::network::{fit, FitReport, InputSpace, ShallowNet, TrainConfig};
use crate::pricer::RlnnResult;

/// One basket-option position extracted from a hidden unit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HedgeLeg {
    /// Basket composition over the (log-)price inputs.
    pub weights: Vec<f64>,
    /// Strike offset; the leg pays `max(weights . x + bias, 0)`.
    pub bias: f64,
    /// Amount of the leg held.
    pub quantity: f64,
    /// Payoff date in years.
    pub maturity: f64,
    /// Sign-pattern interpretation; populated for one-dimensional inputs
    /// (the effective strike is in input units).
    pub classification: Option<LegClassification>,
}

/// The full static hedge for one monitoring interval: one leg per hidden
/// unit plus cash paid at maturity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StaticHedgePortfolio {
    pub legs: Vec<HedgeLeg>,
    pub cash: f64,
    pub maturity: f64,
    pub input_space: InputSpace,
    pub dim: usize,
}

/// Turns a trained per-date network into its hedge portfolio.
pub fn extract_portfolio(net: &ShallowNet, maturity: f64) -> StaticHedgePortfolio {
    let legs = (0..net.hidden)
        .map(|i| {
            let weights = net.unit_weights(i).to_vec();
            let classification = if net.dim == 1 {
                Some(classify_leg_1d(weights[0], net.b1[i]))
            } else {
                None
            };
            HedgeLeg {
                weights,
                bias: net.b1[i],
                quantity: net.w2[i],
                maturity,
                classification,
            }
        })
        .collect();
    StaticHedgePortfolio {
        legs,
        cash: net.b2,
        maturity,
        input_space: net.input_space,
        dim: net.dim,
    }
}

impl StaticHedgePortfolio {
    /// Realized payoff at maturity given the input-space coordinates `x`;
    /// reproduces the source network output exactly.
    pub fn payoff(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(RlnnError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut acc = 0.0;
        for leg in &self.legs {
            let mut a = leg.bias;
            for (w, xi) in leg.weights.iter().zip(x) {
                a += w * xi;
            }
            if a > 0.0 {
                acc += leg.quantity * a;
            }
        }
        Ok(acc + self.cash)
    }

    /// Payoff expressed in prices (applies the log transform when needed).
    pub fn payoff_at_prices(&self, s: &[f64]) -> Result<f64> {
        match self.input_space {
            InputSpace::LogPrice => {
                let logs: Vec<f64> = s.iter().map(|v| v.ln()).collect();
                self.payoff(&logs)
            }
            InputSpace::Price => self.payoff(s),
        }
    }

    /// Reassembles the source network (lossless).
    pub fn to_net(&self) -> ShallowNet {
        let mut w1 = Vec::with_capacity(self.legs.len() * self.dim);
        let mut b1 = Vec::with_capacity(self.legs.len());
        let mut w2 = Vec::with_capacity(self.legs.len());
        for leg in &self.legs {
            w1.extend_from_slice(&leg.weights);
            b1.push(leg.bias);
            w2.push(leg.quantity);
        }
        ShallowNet {
            hidden: self.legs.len(),
            dim: self.dim,
            input_space: self.input_space,
            w1,
            b1,
            w2,
            b2: self.cash,
        }
    }

    /// Arbitrage-free value of the portfolio at `t <= maturity` given prices
    /// `s`: the discounted sum of the legs' closed-form expectations plus the
    /// discounted cash. At `t == maturity` this is the realized payoff.
    pub fn value(&self, s: &[f64], t: f64, model: &GbmModel) -> Result<f64> {
        if t > self.maturity {
            return Err(RlnnError::StalePortfolio {
                t,
                maturity: self.maturity,
            });
        }
        if t == self.maturity {
            return self.payoff_at_prices(s);
        }
        let kernel = ContinuationKernel::new(&self.to_net(), model, self.maturity - t)?;
        Ok(kernel.eval(s))
    }

    /// CSV export: `leg_index,maturity,quantity,bias,w_1..w_d,classification`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("leg_index,maturity,quantity,bias");
        for k in 1..=self.dim {
            out.push_str(&format!(",w_{k}"));
        }
        out.push_str(",classification\n");
        for (i, leg) in self.legs.iter().enumerate() {
            out.push_str(&format!("{i},{},{},{}", leg.maturity, leg.quantity, leg.bias));
            for w in &leg.weights {
                out.push_str(&format!(",{w}"));
            }
            let label = match leg.classification {
                Some(LegClassification::Forward) => "forward".to_string(),
                Some(LegClassification::CallLike(k)) => format!("call_like(strike={k})"),
                Some(LegClassification::PutLike(k)) => format!("put_like(strike={k})"),
                Some(LegClassification::Worthless) => "worthless".to_string(),
                None => String::new(),
            };
            out.push(',');
            out.push_str(&label);
            out.push('\n');
        }
        out.push_str(&format!(
            "cash,{},{},0",
            self.maturity, self.cash
        ));
        for _ in 0..self.dim {
            out.push_str(",0");
        }
        out.push_str(",\n");
        out
    }
}

/// Hedging-error summary in the loss-positive convention
/// (`loss = target value - hedge value`).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HedgeStats {
    pub mean: f64,
    pub std: f64,
    pub var95: f64,
    pub cvar95: f64,
}

impl HedgeStats {
    fn from_losses(losses: &[f64], level: f64) -> Self {
        let (mean, se) = mean_and_se(losses);
        let std = se * (losses.len() as f64).sqrt();
        let (var, cvar) = var_cvar(losses, level);
        Self {
            mean,
            std,
            var95: var,
            cvar95: cvar,
        }
    }
}

/// Empirical quantile (linear interpolation between order statistics) and
/// the mean of the losses at or beyond it.
pub fn var_cvar(losses: &[f64], level: f64) -> (f64, f64) {
    assert!(!losses.is_empty(), "empty loss sample");
    assert!((0.0..1.0).contains(&level), "level must be in [0,1)");
    let mut sorted = losses.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite losses"));
    let n = sorted.len();
    let pos = (n - 1) as f64 * level;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    let var = if lo + 1 < n {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[n - 1]
    };
    let tail: Vec<f64> = sorted.iter().copied().filter(|&x| x >= var).collect();
    let cvar = if tail.is_empty() {
        var
    } else {
        pairwise_sum(&tail) / tail.len() as f64
    };
    (var, cvar)
}

/// What the writer is short: either a vanilla European put (valued in closed
/// form), a discretely monitored knock-out claim (valued through the stored
/// networks), or another portfolio (for replication sanity checks).
pub enum HedgeTarget<'a> {
    EuropeanPut { strike: f64, maturity: f64 },
    BarrierClaim { result: &'a RlnnResult },
    Portfolio(&'a StaticHedgePortfolio),
}

impl<'a> HedgeTarget<'a> {
    fn barrier(&self) -> Option<f64> {
        match self {
            HedgeTarget::BarrierClaim { result } => result.payoff.barrier,
            _ => None,
        }
    }

    /// Monitoring dates in `(0, horizon]` where the knock-out is checked.
    fn monitor_dates(&self, horizon: f64) -> Vec<f64> {
        match self {
            HedgeTarget::BarrierClaim { result } => result
                .schedule
                .times()
                .iter()
                .copied()
                .filter(|&t| t > 0.0 && t <= horizon + 1e-12)
                .collect(),
            _ => Vec::new(),
        }
    }

    fn validate(&self, model: &GbmModel) -> Result<()> {
        if let HedgeTarget::BarrierClaim { result } = self {
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()));
            if !close(result.scale, 1.0) {
                return Err(RlnnError::InvalidConfig(
                    "barrier backtests expect a unit initial price".into(),
                ));
            }
            if model.dim != 1
                || !close(model.rate, result.model.rate)
                || !close(model.vol[0], result.model.vol[0])
            {
                return Err(RlnnError::InvalidConfig(
                    "backtest model does not match the trained result".into(),
                ));
            }
        }
        Ok(())
    }

    /// Value at `(s, t)` conditional on having survived all monitoring dates
    /// up to and including `t`.
    fn value_alive(&self, s: &[f64], t: f64, model: &GbmModel) -> Result<f64> {
        match self {
            HedgeTarget::EuropeanPut { strike, maturity } => Ok(bs_price(
                s[0],
                *strike,
                model.rate,
                model.dividend[0],
                model.vol[0],
                maturity - t,
                false,
            )),
            HedgeTarget::Portfolio(port) => port.value(s, t, model),
            HedgeTarget::BarrierClaim { result } => {
                let times = result.schedule.times();
                let maturity = result.schedule.maturity();
                let h = result.payoff.evaluator();
                if t >= maturity - 1e-12 {
                    return Ok(h(s).max(0.0));
                }
                // value through the net maturing at the next monitoring date
                let next = times
                    .iter()
                    .position(|&tm| tm > t + 1e-12)
                    .expect("t before maturity");
                let kernel = ContinuationKernel::new(
                    result.net_at(next),
                    &result.model,
                    times[next] - t,
                )?;
                Ok(kernel.eval(s))
            }
        }
    }

    /// Hedge ratio at `(s, t)`: closed form for the vanilla put, central
    /// finite differences of the stored-net value otherwise.
    fn delta(&self, s: &[f64], t: f64, model: &GbmModel) -> Result<f64> {
        match self {
            HedgeTarget::EuropeanPut { strike, maturity } => Ok(bs_delta(
                s[0],
                *strike,
                model.rate,
                model.dividend[0],
                model.vol[0],
                maturity - t,
                false,
            )),
            _ => {
                let eps = 1e-5 * s[0].max(1e-8);
                let up = self.value_alive(&[s[0] + eps], t, model)?;
                let dn = self.value_alive(&[s[0] - eps], t, model)?;
                Ok((up - dn) / (2.0 * eps))
            }
        }
    }
}

/// Holds the portfolio fixed to the horizon and measures the terminal
/// difference against the target value (no rebalancing, no premium drift).
pub fn static_backtest(
    target: &HedgeTarget,
    port: &StaticHedgePortfolio,
    horizon: f64,
    model: &GbmModel,
    n_paths: usize,
    seed: u64,
) -> Result<HedgeStats> {
    if horizon > port.maturity {
        return Err(RlnnError::StalePortfolio {
            t: horizon,
            maturity: port.maturity,
        });
    }
    target.validate(model)?;
    let mut grid = target.monitor_dates(horizon);
    if grid.last().map_or(true, |&t| (t - horizon).abs() > 1e-12) {
        grid.push(horizon);
    }
    let mut times = vec![0.0];
    times.extend_from_slice(&grid);
    let schedule = ExerciseSchedule::new(times)?;
    let paths = simulate_paths(model, &schedule, n_paths, seed)?;
    let barrier = target.barrier();
    let last = schedule.times().len() - 1;

    let losses: Vec<f64> = (0..n_paths)
        .into_par_iter()
        .map(|p| {
            let s_h = paths.state(p, last);
            let alive = match barrier {
                Some(b) => (1..=last).all(|m| paths.state(p, m)[0] > b),
                None => true,
            };
            let hedge = port.value(s_h, horizon, model).expect("horizon <= maturity");
            let target_value = if alive {
                target.value_alive(s_h, horizon, model).expect("valid target")
            } else {
                0.0
            };
            target_value - hedge
        })
        .collect();
    Ok(HedgeStats::from_losses(&losses, 0.95))
}

/// Self-financing delta hedge started at the target's model value,
/// rebalanced at `n_rebalances` equispaced times on `[0, horizon)`, marked
/// against the target value at the horizon.
pub fn delta_backtest(
    target: &HedgeTarget,
    horizon: f64,
    n_rebalances: usize,
    model: &GbmModel,
    n_paths: usize,
    seed: u64,
) -> Result<HedgeStats> {
    if n_rebalances == 0 {
        return Err(RlnnError::InvalidConfig("need at least one rebalance".into()));
    }
    target.validate(model)?;
    // union of the rebalance grid and the monitoring dates
    let mut times: Vec<f64> = (0..n_rebalances)
        .map(|j| horizon * j as f64 / n_rebalances as f64)
        .collect();
    times.extend(target.monitor_dates(horizon));
    times.push(horizon);
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let rebalance_step = horizon / n_rebalances as f64;
    let is_rebalance =
        |t: f64| (t / rebalance_step - (t / rebalance_step).round()).abs() < 1e-9;
    let schedule = ExerciseSchedule::new(times.clone())?;
    let paths = simulate_paths(model, &schedule, n_paths, seed)?;
    let barrier = target.barrier();
    let monitors = target.monitor_dates(horizon);
    let is_monitor = |t: f64| monitors.iter().any(|&m| (m - t).abs() < 1e-12);
    let last = times.len() - 1;

    let losses: Vec<f64> = (0..n_paths)
        .into_par_iter()
        .map(|p| {
            let s0 = paths.state(p, 0);
            let v0 = target.value_alive(s0, 0.0, model).expect("valid target");
            let mut shares = target.delta(s0, 0.0, model).expect("valid target");
            let mut cash = v0 - shares * s0[0];
            let mut alive = true;
            for k in 1..=last {
                let t = times[k];
                let dt = t - times[k - 1];
                cash *= (model.rate * dt).exp();
                // continuous dividends reinvested in the stock
                shares *= (model.dividend[0] * dt).exp();
                let s = paths.state(p, k);
                if alive && barrier.is_some() && is_monitor(t) {
                    alive = s[0] > barrier.unwrap();
                }
                let account = cash + shares * s[0];
                if k < last {
                    if alive {
                        if is_rebalance(t) {
                            shares = target.delta(s, t, model).expect("valid target");
                            cash = account - shares * s[0];
                        }
                    } else {
                        // claim is dead: liquidate and let cash accrue
                        cash = account;
                        shares = 0.0;
                    }
                } else {
                    let target_value = if alive {
                        target.value_alive(s, horizon, model).expect("valid target")
                    } else {
                        0.0
                    };
                    return target_value - account;
                }
            }
            unreachable!("loop returns at the horizon")
        })
        .collect();
    Ok(HedgeStats::from_losses(&losses, 0.95))
}

/// Trains a network to replicate the value of a European put at the horizon
/// using exact closed-form labels on simulated states, and returns it with
/// its fit diagnostics. This is the hedge-construction path for the vanilla
/// hedging study: label noise is zero, so the backtest error isolates the
/// replication quality of the portfolio itself.
#[allow(clippy::too_many_arguments)]
pub fn fit_european_put_hedge(
    model: &GbmModel,
    strike: f64,
    maturity: f64,
    horizon: f64,
    n_samples: usize,
    hidden: usize,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<(ShallowNet, FitReport)> {
    use rand::SeedableRng;
    if model.dim != 1 {
        return Err(RlnnError::InvalidConfig(
            "vanilla hedge construction is one-dimensional".into(),
        ));
    }
    let schedule = ExerciseSchedule::new(vec![0.0, horizon])?;
    let paths = simulate_paths(model, &schedule, n_samples, seed)?;
    let mut xs = Vec::with_capacity(n_samples);
    let mut ys = Vec::with_capacity(n_samples);
    for p in 0..n_samples {
        let s = paths.state(p, 1)[0];
        xs.push(s.ln());
        ys.push(bs_price(
            s,
            strike,
            model.rate,
            model.dividend[0],
            model.vol[0],
            maturity - horizon,
            false,
        ));
    }
    let drift = (model.rate - model.dividend[0] - 0.5 * model.vol[0] * model.vol[0]) * horizon;
    let sd = model.vol[0] * horizon.sqrt();
    let (lo, hi) = ([drift - 2.0 * sd], [drift + 2.0 * sd]);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(crate::rng::derive_seed(seed, 0x4ed6e));
    let initial = ShallowNet::random_in_domain(hidden, 1, InputSpace::LogPrice, &lo, &hi, &mut rng);
    fit(&initial, &xs, &ys, cfg, crate::rng::derive_seed(seed, 0xf17))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::continuation_value;
    use crate::sets;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn portfolio_payoff_reproduces_network_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let net = ShallowNet::random(7, 3, InputSpace::LogPrice, &mut rng);
        let port = extract_portfolio(&net, 0.5);
        assert_eq!(port.legs.len(), 7);
        for _ in 0..1000 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let a = net.forward(&x).unwrap();
            let b = port.payoff(&x).unwrap();
            assert_eq!(a, b, "payoff differs at {x:?}");
        }
    }

    #[test]
    fn call_like_rows_classify_as_calls() {
        let net = ShallowNet {
            hidden: 3,
            dim: 1,
            input_space: InputSpace::Price,
            w1: vec![1.0, 2.0, 0.5],
            b1: vec![-40.0, -10.0, -40.0],
            w2: vec![1.0, 1.0, 1.0],
            b2: 0.0,
        };
        let port = extract_portfolio(&net, 1.0);
        for leg in &port.legs {
            assert!(
                matches!(leg.classification, Some(LegClassification::CallLike(_))),
                "{:?}",
                leg.classification
            );
        }
        assert_eq!(
            port.legs[0].classification,
            Some(LegClassification::CallLike(40.0))
        );
    }

    #[test]
    fn portfolio_value_is_bit_identical_to_continuation_value() {
        let set = sets::bermudan_put_single_asset();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut norm_model = set.model.clone();
        norm_model.spot = vec![1.0];
        let net = ShallowNet::random(16, 1, InputSpace::LogPrice, &mut rng);
        let t_prev = 0.4;
        let t_next = 0.5;
        let port = extract_portfolio(&net, t_next);
        for s in [0.8, 0.95, 1.0, 1.1, 1.3] {
            let via_port = port.value(&[s], t_prev, &norm_model).unwrap();
            let via_kernel =
                continuation_value(&net, &[s], &norm_model, t_next - t_prev).unwrap();
            assert_eq!(via_port, via_kernel, "bitwise mismatch at s = {s}");
        }
    }

    #[test]
    fn portfolio_value_at_maturity_is_the_payoff() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let net = ShallowNet::random(4, 1, InputSpace::LogPrice, &mut rng);
        let model = GbmModel::single_asset(1.0, 0.05, 0.0, 0.3);
        let port = extract_portfolio(&net, 0.25);
        let s = [1.07];
        assert_eq!(
            port.value(&s, 0.25, &model).unwrap(),
            net.forward(&[s[0].ln()]).unwrap()
        );
        assert!(matches!(
            port.value(&s, 0.3, &model),
            Err(RlnnError::StalePortfolio { .. })
        ));
    }

    #[test]
    fn var_cvar_on_zero_losses() {
        assert_eq!(var_cvar(&[0.0; 32], 0.95), (0.0, 0.0));
    }

    #[test]
    fn var_cvar_on_integer_ladder() {
        let losses: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let (var, cvar) = var_cvar(&losses, 0.95);
        assert!((var - 95.05).abs() < 1e-12, "var {var}");
        assert!((cvar - 98.0).abs() < 1e-12, "cvar {cvar}");
    }

    proptest! {
        #[test]
        fn cvar_dominates_var(
            losses in proptest::collection::vec(-10.0f64..10.0, 5..200),
            level in 0.5f64..0.99,
        ) {
            let (var, cvar) = var_cvar(&losses, level);
            prop_assert!(cvar >= var - 1e-12);
        }
    }

    #[test]
    fn replicating_portfolio_hedges_itself_perfectly() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let net = ShallowNet::random(5, 1, InputSpace::LogPrice, &mut rng);
        let model = GbmModel::single_asset(1.0, 0.1, 0.0, 0.3);
        let port = extract_portfolio(&net, 1.0 / 12.0);
        let target = HedgeTarget::Portfolio(&port);
        let stats =
            static_backtest(&target, &port, 1.0 / 12.0, &model, 2000, 77).unwrap();
        assert_eq!(stats.mean, 0.0);
        assert_eq!(stats.std, 0.0);
        assert_eq!(stats.var95, 0.0);
        assert_eq!(stats.cvar95, 0.0);
    }

    #[test]
    fn deterministic_market_delta_hedges_exactly() {
        // zero volatility: the put value is linear in the spot, so a delta
        // hedge replicates it at any rebalance frequency
        let model = GbmModel::single_asset(1.0, 0.05, 0.0, 1e-16);
        let target = HedgeTarget::EuropeanPut {
            strike: 1.2,
            maturity: 1.0,
        };
        let stats = delta_backtest(&target, 1.0 / 12.0, 5, &model, 200, 3).unwrap();
        assert!(stats.mean.abs() < 1e-10, "mean {}", stats.mean);
        assert!(stats.std < 1e-10, "std {}", stats.std);
        assert!(stats.cvar95.abs() < 1e-10, "cvar {}", stats.cvar95);
    }

    #[test]
    fn more_rebalances_reduce_hedging_noise() {
        let set = sets::european_put_hedging();
        let target = HedgeTarget::EuropeanPut {
            strike: 1.0,
            maturity: 1.0,
        };
        let horizon = 1.0 / 12.0;
        let coarse = delta_backtest(&target, horizon, 25, &set.model, 20_000, 9).unwrap();
        let fine = delta_backtest(&target, horizon, 50, &set.model, 20_000, 9).unwrap();
        assert!(
            fine.std < coarse.std,
            "doubling rebalances: std {} -> {}",
            coarse.std,
            fine.std
        );
    }

    #[test]
    fn hedge_fit_reaches_tight_replication() {
        let set = sets::european_put_hedging();
        let (net, report) = fit_european_put_hedge(
            &set.model,
            1.0,
            1.0,
            1.0 / 12.0,
            20_000,
            25,
            &TrainConfig::default(),
            5,
        )
        .unwrap();
        assert!(
            report.validation_mse < 1e-6,
            "validation mse {:e}",
            report.validation_mse
        );
        assert_eq!(net.hidden, 25);
    }

    #[test]
    fn portfolio_csv_has_one_row_per_leg_plus_cash() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let net = ShallowNet::random(3, 2, InputSpace::LogPrice, &mut rng);
        let csv = extract_portfolio(&net, 0.1).to_csv();
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 1 + 3 + 1);
        assert_eq!(lines[0], "leg_index,maturity,quantity,bias,w_1,w_2,classification");
        assert!(lines[4].starts_with("cash,"));
    }
}
