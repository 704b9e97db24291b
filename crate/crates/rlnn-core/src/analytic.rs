//! Closed-form conditional expectations of network outputs under GBM, the
//! single-asset price-space case analysis, and Black-Scholes utilities.
//!
//! For a log-price-input net, each hidden unit is a geometric basket option:
//! conditioned on the current state, `w . log S_next + b` is normal, so its
//! ReLU expectation is available in closed form. Summing units and
//! discounting gives the continuation value exactly — the step that lets the
//! backward induction and the dual martingale run without sub-simulation.

use serde::{Deserialize, Serialize};

use crate::error::{Result, RlnnError};
use crate::market::GbmModel;
use crate::math::{normal_cdf, normal_pdf};
use crate::network::{InputSpace, ShallowNet};

/// Interpretation of a single-asset price-space hidden unit by the signs of
/// its weight and bias.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "strike")]
pub enum LegClassification {
    /// Positive everywhere: a forward position (plus cash).
    Forward,
    /// Call-like with effective strike -b/w.
    CallLike(f64),
    /// Put-like with effective strike -b/w.
    PutLike(f64),
    /// Never pays.
    Worthless,
}

/// Mean and variance of the normal variable `w . log S_next + b` conditioned
/// on the current state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalMoments {
    pub mean: f64,
    pub variance: f64,
}

/// `E[max(Y, 0)]` for `Y ~ N(mu, sd^2)`: `sd phi(mu/sd) + mu Phi(mu/sd)`.
///
/// Degenerate spreads (`sd < 1e-14`) collapse to `max(mu, 0)`.
pub fn relu_expectation_normal(mu: f64, sd: f64) -> f64 {
    debug_assert!(sd >= 0.0, "sd must be nonnegative, got {sd}");
    if sd < 1e-14 {
        return mu.max(0.0);
    }
    let z = mu / sd;
    sd * normal_pdf(z) + mu * normal_cdf(z)
}

/// Conditional moments of `w . log S_{t+dt} + b` given prices `s_prev` now.
pub fn log_moments(
    model: &GbmModel,
    s_prev: &[f64],
    dt: f64,
    w: &[f64],
    b: f64,
) -> Result<NormalMoments> {
    let d = model.dim;
    if s_prev.len() != d || w.len() != d {
        return Err(RlnnError::DimensionMismatch {
            expected: d,
            got: s_prev.len().min(w.len()),
        });
    }
    let mut mean = b;
    for k in 0..d {
        let drift = (model.rate - model.dividend[k] - 0.5 * model.vol[k] * model.vol[k]) * dt;
        mean += w[k] * (s_prev[k].ln() + drift);
    }
    // w' Sigma w dt with Sigma_ij = rho_ij sigma_i sigma_j
    let mut variance = 0.0;
    for i in 0..d {
        let mut row = 0.0;
        for j in 0..d {
            row += model.corr[i][j] * model.vol[i] * model.vol[j] * w[j];
        }
        variance += w[i] * row;
    }
    Ok(NormalMoments {
        mean,
        variance: (variance * dt).max(0.0),
    })
}

/// Precomputed per-unit constants for evaluating the continuation value of
/// one network over many states of the same model and interval.
///
/// Both the backward induction and portfolio valuation route through this
/// kernel, so the two produce bit-identical numbers for the same inputs.
pub struct ContinuationKernel {
    hidden: usize,
    dim: usize,
    w1: Vec<f64>,
    w2: Vec<f64>,
    /// Per-unit constant `w_i . drift dt + b_i`.
    offset: Vec<f64>,
    /// Per-unit spread `sqrt(w_i' Sigma w_i dt)`.
    sd: Vec<f64>,
    cash: f64,
    discount: f64,
    price_space_1d: Option<PriceSpace1d>,
}

/// Closed-form pieces for the d = 1 price-space cross-check path.
struct PriceSpace1d {
    model: GbmModel,
    dt: f64,
}

impl ContinuationKernel {
    pub fn new(net: &ShallowNet, model: &GbmModel, dt: f64) -> Result<Self> {
        if net.dim != model.dim {
            return Err(RlnnError::DimensionMismatch {
                expected: model.dim,
                got: net.dim,
            });
        }
        if !(dt > 0.0) {
            return Err(RlnnError::InvalidConfig(format!(
                "interval length must be positive, got {dt}"
            )));
        }
        let discount = (-model.rate * dt).exp();
        if net.input_space == InputSpace::Price {
            if net.dim != 1 {
                return Err(RlnnError::InputSpaceMismatch);
            }
            return Ok(Self {
                hidden: net.hidden,
                dim: 1,
                w1: net.w1.clone(),
                w2: net.w2.clone(),
                offset: net.b1.clone(),
                sd: Vec::new(),
                cash: net.b2,
                discount,
                price_space_1d: Some(PriceSpace1d {
                    model: model.clone(),
                    dt,
                }),
            });
        }

        let d = model.dim;
        let cov = model.covariance();
        let mut offset = vec![0.0; net.hidden];
        let mut sd = vec![0.0; net.hidden];
        for i in 0..net.hidden {
            let w = net.unit_weights(i);
            let mut c = net.b1[i];
            for k in 0..d {
                c += w[k] * (model.rate - model.dividend[k] - 0.5 * model.vol[k] * model.vol[k]) * dt;
            }
            offset[i] = c;
            let mut var = 0.0;
            for a in 0..d {
                let mut row = 0.0;
                for b in 0..d {
                    row += cov[a][b] * w[b];
                }
                var += w[a] * row;
            }
            sd[i] = (var * dt).max(0.0).sqrt();
        }
        Ok(Self {
            hidden: net.hidden,
            dim: d,
            w1: net.w1.clone(),
            w2: net.w2.clone(),
            offset,
            sd,
            cash: net.b2,
            discount,
            price_space_1d: None,
        })
    }

    /// Discounted conditional expectation of the network payoff one interval
    /// ahead, given current prices `s_prev`.
    pub fn eval(&self, s_prev: &[f64]) -> f64 {
        debug_assert_eq!(s_prev.len(), self.dim);
        if let Some(ps) = &self.price_space_1d {
            let mut acc = 0.0;
            for i in 0..self.hidden {
                acc += self.w2[i]
                    * price_leg_expectation(self.w1[i], self.offset[i], s_prev[0], &ps.model, ps.dt);
            }
            return self.discount * (acc + self.cash);
        }
        let mut acc = 0.0;
        for i in 0..self.hidden {
            let w = &self.w1[i * self.dim..(i + 1) * self.dim];
            let mut mu = self.offset[i];
            for (wk, sk) in w.iter().zip(s_prev) {
                mu += wk * sk.ln();
            }
            acc += self.w2[i] * relu_expectation_normal(mu, self.sd[i]);
        }
        self.discount * (acc + self.cash)
    }
}

/// Discounted continuation value of a log-price network: the price at
/// `s_prev` of the basket-option portfolio paying the network output after
/// `dt` years.
pub fn continuation_value(
    net: &ShallowNet,
    s_prev: &[f64],
    model: &GbmModel,
    dt: f64,
) -> Result<f64> {
    if net.input_space != InputSpace::LogPrice {
        return Err(RlnnError::InputSpaceMismatch);
    }
    if s_prev.len() != model.dim {
        return Err(RlnnError::DimensionMismatch {
            expected: model.dim,
            got: s_prev.len(),
        });
    }
    Ok(ContinuationKernel::new(net, model, dt)?.eval(s_prev))
}

/// Same conditioning for the d = 1 price-space cross-check path, using the
/// forward/call/put case split instead of the log-normal moments.
pub fn continuation_value_price_1d(
    net: &ShallowNet,
    s_prev: f64,
    model: &GbmModel,
    dt: f64,
) -> Result<f64> {
    if net.input_space != InputSpace::Price || net.dim != 1 || model.dim != 1 {
        return Err(RlnnError::InputSpaceMismatch);
    }
    Ok(ContinuationKernel::new(net, model, dt)?.eval(&[s_prev]))
}

/// Undiscounted `E[max(w S_next + b, 0) | S_now = s]` for one asset; the
/// sign pattern of `(w, b)` decides between a forward, a call, a put and
/// nothing.
fn price_leg_expectation(w: f64, b: f64, s: f64, model: &GbmModel, dt: f64) -> f64 {
    let fwd = s * ((model.rate - model.dividend[0]) * dt).exp();
    let grow = (model.rate * dt).exp();
    if w == 0.0 {
        return b.max(0.0);
    }
    if w > 0.0 && b >= 0.0 {
        w * fwd + b
    } else if w > 0.0 {
        w * grow * bs_price(s, -b / w, model.rate, model.dividend[0], model.vol[0], dt, true)
    } else if b > 0.0 {
        -w * grow * bs_price(s, -b / w, model.rate, model.dividend[0], model.vol[0], dt, false)
    } else {
        0.0
    }
}

/// Sign-pattern classification of a single-asset price-space hidden unit.
pub fn classify_leg_1d(w: f64, b: f64) -> LegClassification {
    if w > 0.0 && b >= 0.0 {
        LegClassification::Forward
    } else if w > 0.0 {
        LegClassification::CallLike(-b / w)
    } else if w < 0.0 && b > 0.0 {
        LegClassification::PutLike(-b / w)
    } else if w == 0.0 && b > 0.0 {
        // pure cash leg
        LegClassification::Forward
    } else {
        LegClassification::Worthless
    }
}

/// Black-Scholes price with continuous dividend yield. `tau = 0` returns the
/// intrinsic value; vanishing total variance falls back to the discounted
/// deterministic payoff.
pub fn bs_price(
    spot: f64,
    strike: f64,
    rate: f64,
    dividend: f64,
    vol: f64,
    tau: f64,
    is_call: bool,
) -> f64 {
    let sign = if is_call { 1.0 } else { -1.0 };
    if tau <= 0.0 {
        return (sign * (spot - strike)).max(0.0);
    }
    let sd = vol * tau.sqrt();
    if sd < 1e-14 {
        let fwd = spot * ((rate - dividend) * tau).exp();
        return (-rate * tau).exp() * (sign * (fwd - strike)).max(0.0);
    }
    let d1 = ((spot / strike).ln() + (rate - dividend + 0.5 * vol * vol) * tau) / sd;
    let d2 = d1 - sd;
    sign * (spot * (-dividend * tau).exp() * normal_cdf(sign * d1)
        - strike * (-rate * tau).exp() * normal_cdf(sign * d2))
}

/// Black-Scholes delta; at `tau = 0` the indicator of being in the money.
pub fn bs_delta(
    spot: f64,
    strike: f64,
    rate: f64,
    dividend: f64,
    vol: f64,
    tau: f64,
    is_call: bool,
) -> f64 {
    if tau <= 0.0 {
        return match (is_call, spot > strike) {
            (true, true) => 1.0,
            (true, false) => 0.0,
            (false, true) => 0.0,
            (false, false) => -1.0,
        };
    }
    let sd = vol * tau.sqrt();
    if sd < 1e-14 {
        let fwd = spot * ((rate - dividend) * tau).exp();
        let itm = if is_call { fwd > strike } else { fwd < strike };
        let unit = if is_call { 1.0 } else { -1.0 };
        return if itm {
            unit * ((rate - dividend) * tau).exp() * (-rate * tau).exp()
        } else {
            0.0
        };
    }
    let d1 = ((spot / strike).ln() + (rate - dividend + 0.5 * vol * vol) * tau) / sd;
    let q = (-dividend * tau).exp();
    if is_call {
        q * normal_cdf(d1)
    } else {
        -q * normal_cdf(-d1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{simulate_paths, ExerciseSchedule};
    use crate::math::mean_and_se;
    use crate::rng::CounterRng;
    use crate::sets;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn relu_expectation_standard_normal() {
        // E[max(N(0,1),0)] = 1/sqrt(2 pi)
        let got = relu_expectation_normal(0.0, 1.0);
        assert!((got - 0.3989422804014326779399).abs() < 1e-15);
    }

    #[test]
    fn relu_expectation_degenerate_spread() {
        assert_eq!(relu_expectation_normal(5.0, 1e-20), 5.0);
        assert_eq!(relu_expectation_normal(-2.0, 0.0), 0.0);
    }

    #[test]
    fn relu_expectation_closed_form_reference() {
        // 40-digit references
        assert!((relu_expectation_normal(-0.3, 0.7) - 0.1545204339315511024374).abs() < 1e-15);
        assert!((relu_expectation_normal(0.4, 1.3) - 0.7429833863870084132192).abs() < 1e-15);
    }

    #[test]
    fn relu_expectation_matches_monte_carlo() {
        let (mu, sd) = (-0.3, 0.7);
        let mut rng = CounterRng::new(2024, 0, u32::MAX);
        let n = 10_000_000usize;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let v = (mu + sd * rng.next_normal()).max(0.0);
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / n as f64;
        let se = ((sumsq / n as f64 - mean * mean) / n as f64).sqrt();
        let exact = relu_expectation_normal(mu, sd);
        assert!(
            (exact - mean).abs() < 3.0 * se,
            "exact {exact} vs mc {mean} (se {se})"
        );
    }

    proptest! {
        #[test]
        fn relu_expectation_dominates_hockey_stick(
            mu in -5.0f64..5.0,
            sd in 0.0f64..3.0,
        ) {
            let v = relu_expectation_normal(mu, sd);
            prop_assert!(v >= mu.max(0.0) - 1e-12);
            // nondecreasing in sd
            let v2 = relu_expectation_normal(mu, sd + 0.1);
            prop_assert!(v2 >= v - 1e-12);
        }
    }

    #[test]
    fn log_moments_constant_leg() {
        let set = sets::basket_put_five_assets();
        let m = log_moments(&set.model, &[1.0; 5], 0.1, &[0.0; 5], 2.5).unwrap();
        assert_eq!(m.mean, 2.5);
        assert_eq!(m.variance, 0.0);
    }

    #[test]
    fn log_moments_single_asset_identity() {
        let model = GbmModel::single_asset(1.0, 0.05, 0.01, 0.3);
        let dt = 0.25;
        let m = log_moments(&model, &[1.0], dt, &[1.0], 0.0).unwrap();
        assert!((m.variance - 0.09 * dt).abs() < 1e-15);
        assert!((m.mean - (0.05 - 0.01 - 0.045) * dt).abs() < 1e-15);
    }

    #[test]
    fn log_moments_basket_first_axis() {
        let set = sets::basket_put_five_assets();
        let dt = 0.1;
        let mut w = [0.0; 5];
        w[0] = 1.0;
        let m = log_moments(&set.model, &[1.0; 5], dt, &w, 0.0).unwrap();
        assert!((m.variance - 0.518 * 0.518 * dt).abs() < 1e-15);
    }

    #[test]
    fn continuation_of_pure_cash_is_discounted_cash() {
        let model = GbmModel::single_asset(1.0, 0.06, 0.0, 0.2);
        let net = ShallowNet {
            hidden: 2,
            dim: 1,
            input_space: InputSpace::LogPrice,
            w1: vec![0.3, -0.4],
            b1: vec![0.1, 0.2],
            w2: vec![0.0, 0.0],
            b2: 3.5,
        };
        let q = continuation_value(&net, &[1.0], &model, 0.5).unwrap();
        assert!((q - 3.5 * (-0.03f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn continuation_rejects_price_space_input() {
        let model = GbmModel::single_asset(1.0, 0.06, 0.0, 0.2);
        let net = ShallowNet {
            hidden: 1,
            dim: 1,
            input_space: InputSpace::Price,
            w1: vec![1.0],
            b1: vec![0.0],
            w2: vec![1.0],
            b2: 0.0,
        };
        assert!(matches!(
            continuation_value(&net, &[1.0], &model, 0.5),
            Err(RlnnError::InputSpaceMismatch)
        ));
    }

    #[test]
    fn continuation_zero_time_limit_is_forward_value() {
        let set = sets::bermudan_put_single_asset();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let net = ShallowNet::random(6, 1, InputSpace::LogPrice, &mut rng);
        let s = 1.05;
        let q = continuation_value(&net, &[s], &set.model, 1e-12).unwrap();
        let fwd = net.forward(&[s.ln()]).unwrap();
        assert!((q - fwd).abs() < 1e-6, "q {q} vs forward {fwd}");
    }

    #[test]
    fn continuation_matches_monte_carlo_transition() {
        // the module's central correctness check: closed form vs simulation
        let set = sets::bermudan_put_single_asset();
        let model = GbmModel::single_asset(1.0, set.model.rate, 0.0, set.model.vol[0]);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let net = ShallowNet::random(8, 1, InputSpace::LogPrice, &mut rng);
        let dt = 0.1;
        let s0 = 0.97;
        let q = continuation_value(&net, &[s0], &model, dt).unwrap();

        let mut start = model.clone();
        start.spot = vec![s0];
        let schedule = ExerciseSchedule::new(vec![0.0, dt]).unwrap();
        let n = 1_000_000;
        let paths = simulate_paths(&start, &schedule, n, 555).unwrap();
        let disc = (-model.rate * dt).exp();
        let xs: Vec<f64> = (0..n)
            .map(|p| disc * net.forward(&[paths.state(p, 1)[0].ln()]).unwrap())
            .collect();
        let (mean, se) = mean_and_se(&xs);
        assert!(
            (q - mean).abs() < 3.0 * se,
            "closed form {q} vs mc {mean} (se {se})"
        );
    }

    #[test]
    fn continuation_multi_asset_matches_monte_carlo() {
        let set = sets::basket_put_five_assets();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let net = ShallowNet::random(5, 5, InputSpace::LogPrice, &mut rng);
        let dt = 0.1;
        let s0 = [1.02, 0.95, 1.1, 0.9, 1.0];
        let q = continuation_value(&net, &s0, &set.model, dt).unwrap();

        let mut start = set.model.clone();
        start.spot = s0.to_vec();
        let schedule = ExerciseSchedule::new(vec![0.0, dt]).unwrap();
        let n = 1_000_000;
        let paths = simulate_paths(&start, &schedule, n, 556).unwrap();
        let disc = (-set.model.rate * dt).exp();
        let xs: Vec<f64> = (0..n)
            .map(|p| {
                let s = paths.state(p, 1);
                let logs: Vec<f64> = s.iter().map(|v| v.ln()).collect();
                disc * net.forward(&logs).unwrap()
            })
            .collect();
        let (mean, se) = mean_and_se(&xs);
        assert!(
            (q - mean).abs() < 3.0 * se,
            "closed form {q} vs mc {mean} (se {se})"
        );
    }

    #[test]
    fn continuation_is_smooth_in_the_state() {
        let set = sets::bermudan_put_single_asset();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let net = ShallowNet::random(16, 1, InputSpace::LogPrice, &mut rng);
        let kernel = ContinuationKernel::new(&net, &set.model, 0.1).unwrap();
        let mut prev = kernel.eval(&[30.0]);
        for i in 1..=400 {
            let s = 30.0 + i as f64 * 0.05;
            let cur = kernel.eval(&[s]);
            assert!(
                (cur - prev).abs() < 0.05 * (1.0 + prev.abs()),
                "jump at s = {s}"
            );
            prev = cur;
        }
    }

    #[test]
    fn classify_sign_patterns() {
        assert_eq!(classify_leg_1d(1.0, -40.0), LegClassification::CallLike(40.0));
        assert_eq!(classify_leg_1d(-2.0, 80.0), LegClassification::PutLike(40.0));
        assert_eq!(classify_leg_1d(-1.0, -1.0), LegClassification::Worthless);
        assert_eq!(classify_leg_1d(0.5, 0.0), LegClassification::Forward);
        assert_eq!(classify_leg_1d(0.0, 2.0), LegClassification::Forward);
        assert_eq!(classify_leg_1d(0.0, -2.0), LegClassification::Worthless);
    }

    #[test]
    fn price_space_continuation_matches_monte_carlo() {
        let model = GbmModel::single_asset(40.0, 0.06, 0.01, 0.2);
        let net = ShallowNet {
            hidden: 4,
            dim: 1,
            input_space: InputSpace::Price,
            w1: vec![1.0, 1.0, -1.5, -0.2],
            b1: vec![2.0, -42.0, 70.0, -1.0],
            w2: vec![0.5, 1.0, 0.8, 3.0],
            b2: -1.0,
        };
        let dt = 0.25;
        let q = continuation_value_price_1d(&net, 40.0, &model, dt).unwrap();
        let schedule = ExerciseSchedule::new(vec![0.0, dt]).unwrap();
        let n = 2_000_000;
        let paths = simulate_paths(&model, &schedule, n, 77).unwrap();
        let disc = (-model.rate * dt).exp();
        let xs: Vec<f64> = (0..n)
            .map(|p| disc * net.forward(&[paths.state(p, 1)[0]]).unwrap())
            .collect();
        let (mean, se) = mean_and_se(&xs);
        assert!(
            (q - mean).abs() < 3.0 * se,
            "closed form {q} vs mc {mean} (se {se})"
        );
    }

    #[test]
    fn bs_put_zero_vol_at_the_money_is_worthless() {
        let p = bs_price(40.0, 40.0, 0.0, 0.0, 1e-16, 1.0, false);
        assert_eq!(p, 0.0);
    }

    #[test]
    fn bs_reference_values() {
        // 40-digit references
        let p = bs_price(40.0, 40.0, 0.06, 0.0, 0.2, 1.0, false);
        assert!((p - 2.066401004420343524517).abs() < 1e-14, "{p}");
        let p = bs_price(36.0, 40.0, 0.06, 0.0, 0.2, 1.0, false);
        assert!((p - 3.844307791596841311485).abs() < 1e-14, "{p}");
        let c = bs_price(100.0, 100.0, 0.05, 0.1, 0.2, 3.0, true);
        assert!((c - 6.020788799419933525678).abs() < 1e-13, "{c}");
        let d = bs_delta(40.0, 40.0, 0.06, 0.0, 0.2, 1.0, false);
        assert!((d + 0.3445782583896758332631).abs() < 1e-14, "{d}");
    }

    proptest! {
        #[test]
        fn put_call_parity(
            spot in 10.0f64..200.0,
            strike in 10.0f64..200.0,
            rate in 0.0f64..0.1,
            dividend in 0.0f64..0.05,
            vol in 0.05f64..0.8,
            tau in 0.05f64..3.0,
        ) {
            let call = bs_price(spot, strike, rate, dividend, vol, tau, true);
            let put = bs_price(spot, strike, rate, dividend, vol, tau, false);
            let parity = spot * (-dividend * tau).exp() - strike * (-rate * tau).exp();
            prop_assert!(
                (call - put - parity).abs() < 1e-12 * (1.0 + spot + strike),
                "parity violated: {} vs {}", call - put, parity
            );
        }
    }

    #[test]
    fn random_nets_continuation_vs_mc_property() {
        // 50 random nets / random states; within 3 s.e. of an MC estimate
        let mut failures = 0;
        for trial in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + trial);
            let d = 1 + (trial % 3) as usize;
            let corr: Vec<Vec<f64>> = (0..d)
                .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.3 }).collect())
                .collect();
            let model = GbmModel::new(
                vec![1.0; d],
                rng.gen_range(0.0..0.08),
                vec![0.0; d],
                (0..d).map(|_| rng.gen_range(0.1..0.5)).collect(),
                corr,
            )
            .unwrap();
            let net = ShallowNet::random(4, d, InputSpace::LogPrice, &mut rng);
            let dt = rng.gen_range(0.05..0.4);
            let s0: Vec<f64> = (0..d).map(|_| rng.gen_range(0.8..1.2)).collect();
            let q = continuation_value(&net, &s0, &model, dt).unwrap();

            let mut start = model.clone();
            start.spot = s0.clone();
            let schedule = ExerciseSchedule::new(vec![0.0, dt]).unwrap();
            let n = 200_000;
            let paths = simulate_paths(&start, &schedule, n, 9000 + trial).unwrap();
            let disc = (-model.rate * dt).exp();
            let xs: Vec<f64> = (0..n)
                .map(|p| {
                    let logs: Vec<f64> = paths.state(p, 1).iter().map(|v| v.ln()).collect();
                    disc * net.forward(&logs).unwrap()
                })
                .collect();
            let (mean, se) = mean_and_se(&xs);
            if (q - mean).abs() >= 3.0 * se {
                failures += 1;
            }
        }
        assert!(failures <= 3, "{failures}/50 outside 3 s.e.");
    }
}
