//! Backward-induction pricer: one regression network per monitoring date.
//!
//! Prices are normalized so every asset starts at 1 (strike and barrier are
//! rescaled along with them, which is exact because all supported payoffs are
//! positively homogeneous of degree one). Labels are the iterated value
//! estimates, not realized payoffs: at each date the label is the larger of
//! intrinsic and the closed-form continuation value of the net fitted one
//! date later.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::ContinuationKernel;
use crate::error::{Result, RlnnError};
use crate::market::{simulate_paths, ExerciseSchedule, GbmModel};
use crate::network::{fit, warm_start, FitReport, InputSpace, ShallowNet, TrainConfig};
use crate::payoff::{PayoffKind, PayoffSpec};
use crate::rng::derive_seed;

const INIT_SEED_TAG: u64 = 0x5eed_1a1e;

/// One trained per-date network with its training diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DateFit {
    /// Monitoring-date index m in 1..=M.
    pub date_index: usize,
    /// The date t_m in years.
    pub time: f64,
    pub net: ShallowNet,
    pub report: FitReport,
}

/// Everything the backward induction produces: the per-date networks (in
/// normalized log-price coordinates), the direct price estimate in original
/// currency units, and the normalized market the nets were trained against.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RlnnResult {
    pub nets: Vec<DateFit>,
    pub direct_estimate: f64,
    /// Price divisor applied before training (the initial price of asset 1);
    /// estimates scale back up by this factor.
    pub scale: f64,
    /// Normalized model: every spot equals 1.
    pub model: GbmModel,
    pub schedule: ExerciseSchedule,
    /// Normalized payoff (strike, barrier and weights rescaled).
    pub payoff: PayoffSpec,
    pub hidden: usize,
    pub n_train: usize,
    pub seed: u64,
}

impl RlnnResult {
    /// Network fitted at monitoring date m (1-based).
    pub fn net_at(&self, m: usize) -> &ShallowNet {
        &self.nets[m - 1].net
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// A market/payoff pair rescaled so every asset starts at 1.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub model: GbmModel,
    pub payoff: PayoffSpec,
    pub scale: f64,
}

/// Rescales prices by the initial level of each asset and the cash
/// quantities (strike, barrier) by asset 1's. Basket weights absorb the
/// per-asset factors. A max-call payoff cannot absorb asymmetric factors, so
/// it requires a uniform initial price.
pub fn normalize(model: &GbmModel, payoff: &PayoffSpec) -> Result<Normalized> {
    payoff.validate(model.dim, &model.spot)?;
    let lambda = model.spot[0];
    if payoff.kind == PayoffKind::MaxCall
        && model.spot.iter().any(|&s| (s - lambda).abs() > 1e-12 * lambda)
    {
        return Err(RlnnError::InvalidModel(
            "max-call normalization requires a uniform initial price".into(),
        ));
    }
    let mut m = model.clone();
    m.spot = vec![1.0; model.dim];
    let mut p = payoff.clone();
    p.strike /= lambda;
    if let Some(b) = p.barrier.as_mut() {
        *b /= lambda;
    }
    if let Some(w) = p.basket_weights.as_mut() {
        for (wk, sk) in w.iter_mut().zip(&model.spot) {
            *wk *= sk / lambda;
        }
    }
    Ok(Normalized {
        model: m,
        payoff: p,
        scale: lambda,
    })
}

/// Exercise rule: exercise strictly dominates holding.
#[inline]
pub fn exercise_decision(h: f64, q: f64) -> bool {
    h > q
}

/// Value-iteration update at an exercise date. The option is worth at least
/// zero, so the no-exercise branch is floored; exercising pays `max(h, 0)`.
#[inline]
pub(crate) fn value_update(h: f64, q: f64) -> f64 {
    if exercise_decision(h, q) {
        h.max(0.0)
    } else {
        q.max(0.0)
    }
}

/// Per-path knock-out indicators for every date (all true for claims without
/// a barrier).
fn survival_table(paths: &crate::market::PathSet, payoff: &PayoffSpec) -> Vec<Vec<bool>> {
    let n = paths.n_paths;
    let dates = paths.n_dates;
    let barrier = payoff.barrier.expect("barrier payoff");
    let mut alive = vec![vec![true; n]; dates];
    for m in 1..dates {
        for p in 0..n {
            alive[m][p] = alive[m - 1][p] && paths.state(p, m)[0] > barrier;
        }
    }
    alive
}

/// Trains one network per monitoring date, backwards from maturity, and
/// returns them with the direct price estimate.
#[allow(clippy::too_many_arguments)]
pub fn rlnn_backward(
    model: &GbmModel,
    schedule: &ExerciseSchedule,
    spec: &PayoffSpec,
    n_train: usize,
    hidden: usize,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<RlnnResult> {
    cfg.validate()?;
    if hidden < 1 {
        return Err(RlnnError::InvalidConfig("hidden must be >= 1".into()));
    }
    let norm = normalize(model, spec)?;
    let dates = schedule.monitoring_dates();
    let dim = model.dim;
    let paths = simulate_paths(&norm.model, schedule, n_train, seed)?;
    let h = norm.payoff.evaluator();
    let exercisable = norm.payoff.exercisable();
    let barrier = norm.payoff.has_barrier();
    let alive = if barrier {
        survival_table(&paths, &norm.payoff)
    } else {
        Vec::new()
    };

    // terminal values
    let mut labels: Vec<f64> = (0..n_train)
        .map(|p| {
            let payoff = h(paths.state(p, dates)).max(0.0);
            if barrier && !alive[dates][p] {
                0.0
            } else {
                payoff
            }
        })
        .collect();

    // initial knots cover the terminal log-price range (about two standard
    // deviations around the mean), so every unit starts active somewhere on
    // the training data
    let horizon = schedule.maturity();
    let mut lo = vec![0.0; dim];
    let mut hi = vec![0.0; dim];
    for k in 0..dim {
        let m = &norm.model;
        let drift = (m.rate - m.dividend[k] - 0.5 * m.vol[k] * m.vol[k]) * horizon;
        let sd = m.vol[k] * horizon.sqrt();
        lo[k] = drift - 2.0 * sd;
        hi[k] = drift + 2.0 * sd;
    }
    let mut init_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, INIT_SEED_TAG));
    let mut current =
        ShallowNet::random_in_domain(hidden, dim, InputSpace::LogPrice, &lo, &hi, &mut init_rng);
    let mut fits_desc: Vec<DateFit> = Vec::with_capacity(dates);
    let mut q_below = vec![0.0; n_train];

    for m in (1..=dates).rev() {
        // For barrier claims, fit on paths alive ENTERING the interval, with
        // labels already zeroed by the knock-out check at this date. Those
        // samples are label-consistent (an alive-entering path at or below
        // the barrier is worth exactly 0), and they teach the net the ramp
        // to zero below the barrier, which is what makes the closed-form
        // expectation price the coming knock-out correctly.
        let rows: Vec<usize> = if barrier {
            (0..n_train).filter(|&p| alive[m - 1][p]).collect()
        } else {
            (0..n_train).collect()
        };
        if rows.len() < 10 {
            return Err(RlnnError::InvalidData(format!(
                "only {} surviving paths at date {m}; cannot fit",
                rows.len()
            )));
        }
        let mut xs = Vec::with_capacity(rows.len() * dim);
        let mut ys = Vec::with_capacity(rows.len());
        for &p in &rows {
            xs.extend(paths.state(p, m).iter().map(|s| s.ln()));
            ys.push(labels[p]);
        }
        let (net, report) = fit(&current, &xs, &ys, cfg, derive_seed(seed, m as u64))?;

        let kernel = ContinuationKernel::new(&net, &norm.model, schedule.dt(m))?;
        q_below = (0..n_train)
            .into_par_iter()
            .map(|p| {
                if barrier && !alive[m - 1][p] {
                    0.0
                } else {
                    kernel.eval(paths.state(p, m - 1))
                }
            })
            .collect();

        if m > 1 {
            labels = (0..n_train)
                .map(|p| {
                    if exercisable {
                        value_update(h(paths.state(p, m - 1)), q_below[p])
                    } else {
                        q_below[p].max(0.0)
                    }
                })
                .collect();
        }

        current = warm_start(&net);
        fits_desc.push(DateFit {
            date_index: m,
            time: schedule.times()[m],
            net,
            report,
        });
    }
    fits_desc.reverse();

    let q0 = q_below[0]; // every path shares the t_0 state
    let direct_norm = if exercisable {
        let h0 = h(paths.state(0, 0));
        h0.max(0.0).max(q0.max(0.0))
    } else {
        q0.max(0.0)
    };
    drop(h);

    Ok(RlnnResult {
        nets: fits_desc,
        direct_estimate: norm.scale * direct_norm,
        scale: norm.scale,
        model: norm.model,
        schedule: schedule.clone(),
        payoff: norm.payoff,
        hidden,
        n_train,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::bs_price;
    use crate::sets;
    use proptest::prelude::*;

    fn quick_cfg() -> TrainConfig {
        TrainConfig::default()
    }

    #[test]
    fn exercise_rule_is_strict() {
        assert!(!exercise_decision(1.0, 1.0));
        assert!(exercise_decision(5.0, 3.0));
        assert!(!exercise_decision(0.0, 0.01));
    }

    proptest! {
        #[test]
        fn value_update_dominates_exercise_floor(h in -10.0f64..10.0, q in -10.0f64..10.0) {
            let v = value_update(h, q);
            prop_assert!(v >= h.max(0.0) - 1e-12);
            prop_assert!(v >= 0.0);
        }
    }

    #[test]
    fn normalization_rescales_strike_and_weights() {
        let set = sets::bermudan_put_single_asset();
        let norm = normalize(&set.model, &set.payoff).unwrap();
        assert_eq!(norm.scale, 40.0);
        assert_eq!(norm.model.spot, vec![1.0]);
        assert_eq!(norm.payoff.strike, 1.0);

        let mut basket = sets::basket_put_five_assets();
        basket.model.spot = vec![2.0, 2.0, 2.0, 2.0, 2.0];
        let norm = normalize(&basket.model, &basket.payoff).unwrap();
        assert_eq!(norm.scale, 2.0);
        // weights pick up spot_k / lambda = 1
        assert_eq!(
            norm.payoff.basket_weights.as_deref().unwrap(),
            basket.payoff.basket_weights.as_deref().unwrap()
        );
        assert_eq!(norm.payoff.strike, 0.5);
    }

    #[test]
    fn max_call_with_uneven_spots_cannot_normalize() {
        let model = GbmModel::new(
            vec![90.0, 110.0],
            0.05,
            vec![0.0; 2],
            vec![0.2; 2],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        assert!(normalize(&model, &PayoffSpec::max_call(100.0)).is_err());
    }

    #[test]
    fn single_date_european_put_matches_black_scholes() {
        let set = sets::bermudan_put_single_asset();
        let schedule = ExerciseSchedule::equally_spaced(1.0, 1).unwrap();
        let result = rlnn_backward(
            &set.model,
            &schedule,
            &set.payoff,
            20_000,
            32,
            &quick_cfg(),
            42,
        )
        .unwrap();
        let bs = bs_price(40.0, 40.0, 0.06, 0.0, 0.2, 1.0, false);
        let rel = (result.direct_estimate - bs).abs() / bs;
        assert!(
            rel < 0.01,
            "direct {} vs closed form {bs} (rel {rel})",
            result.direct_estimate
        );
    }

    #[test]
    fn worthless_deterministic_claim_prices_to_zero() {
        // zero volatility and K below the deterministic forward path
        let model = GbmModel::single_asset(40.0, 0.06, 0.0, 1e-16);
        let schedule = ExerciseSchedule::equally_spaced(1.0, 4).unwrap();
        let spec = PayoffSpec::vanilla_put(30.0);
        let result = rlnn_backward(&model, &schedule, &spec, 2000, 4, &quick_cfg(), 7).unwrap();
        assert_eq!(result.direct_estimate, 0.0);
    }

    #[test]
    fn result_is_deterministic_and_serializable() {
        let set = sets::bermudan_put_single_asset();
        let schedule = ExerciseSchedule::equally_spaced(1.0, 2).unwrap();
        let run = || {
            rlnn_backward(&set.model, &schedule, &set.payoff, 3000, 4, &quick_cfg(), 9).unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.direct_estimate, b.direct_estimate);
        for (x, y) in a.nets.iter().zip(&b.nets) {
            assert_eq!(x.net, y.net);
        }
        let js = a.to_json().unwrap();
        let back = RlnnResult::from_json(&js).unwrap();
        assert_eq!(back.direct_estimate, a.direct_estimate);
        assert_eq!(back.nets.len(), 2);
        assert_eq!(back.net_at(1), a.net_at(1));
    }

    #[test]
    fn barrier_claim_prices_below_vanilla() {
        let set = sets::barrier_call_hedging();
        let result = rlnn_backward(
            &set.model,
            &set.schedule,
            &set.payoff,
            20_000,
            10,
            &quick_cfg(),
            3,
        )
        .unwrap();
        let vanilla = bs_price(1.0, 1.0, 0.1, 0.0, 0.3, 0.2, true);
        assert!(result.direct_estimate >= 0.0);
        assert!(
            result.direct_estimate < vanilla,
            "down-and-out {} must stay below vanilla {vanilla}",
            result.direct_estimate
        );
        // knocking the barrier upward can only destroy value
        let closer = sets::barrier_call_hedging().with_barrier(0.99);
        let higher = rlnn_backward(
            &closer.model,
            &closer.schedule,
            &closer.payoff,
            20_000,
            10,
            &quick_cfg(),
            3,
        )
        .unwrap();
        assert!(
            higher.direct_estimate < result.direct_estimate + 5e-3,
            "B=0.99 gives {} vs B=0.97 {}",
            higher.direct_estimate,
            result.direct_estimate
        );
    }
}
