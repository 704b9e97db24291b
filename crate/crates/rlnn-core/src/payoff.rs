//! Intrinsic values of the supported instruments and the knock-out state of
//! the discretely monitored barrier claim.

use serde::{Deserialize, Serialize};

use crate::error::{Result, RlnnError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayoffKind {
    VanillaPut,
    VanillaCall,
    ArithmeticBasketPut,
    MaxCall,
    /// Down-and-out call, knocked out when asset 1 is at or below the barrier
    /// on a monitoring date. No early exercise.
    DownOutCall,
}

impl PayoffKind {
    /// Stable snake_case name (matches the serialized form).
    pub fn label(&self) -> &'static str {
        match self {
            PayoffKind::VanillaPut => "vanilla_put",
            PayoffKind::VanillaCall => "vanilla_call",
            PayoffKind::ArithmeticBasketPut => "basket_put",
            PayoffKind::MaxCall => "max_call",
            PayoffKind::DownOutCall => "down_out_call",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PayoffSpec {
    pub kind: PayoffKind,
    pub strike: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub basket_weights: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub barrier: Option<f64>,
}

impl PayoffSpec {
    pub fn vanilla_put(strike: f64) -> Self {
        Self {
            kind: PayoffKind::VanillaPut,
            strike,
            basket_weights: None,
            barrier: None,
        }
    }

    pub fn vanilla_call(strike: f64) -> Self {
        Self {
            kind: PayoffKind::VanillaCall,
            strike,
            basket_weights: None,
            barrier: None,
        }
    }

    pub fn basket_put(strike: f64, weights: Vec<f64>) -> Self {
        Self {
            kind: PayoffKind::ArithmeticBasketPut,
            strike,
            basket_weights: Some(weights),
            barrier: None,
        }
    }

    pub fn max_call(strike: f64) -> Self {
        Self {
            kind: PayoffKind::MaxCall,
            strike,
            basket_weights: None,
            barrier: None,
        }
    }

    pub fn down_out_call(strike: f64, barrier: f64) -> Self {
        Self {
            kind: PayoffKind::DownOutCall,
            strike,
            basket_weights: None,
            barrier: Some(barrier),
        }
    }

    /// Whether the holder has early-exercise rights before maturity.
    pub fn exercisable(&self) -> bool {
        self.kind != PayoffKind::DownOutCall
    }

    pub fn has_barrier(&self) -> bool {
        self.kind == PayoffKind::DownOutCall
    }

    /// Checks the spec against a market of dimension `dim` with initial state
    /// `spot`.
    pub fn validate(&self, dim: usize, spot: &[f64]) -> Result<()> {
        if !(self.strike > 0.0) {
            return Err(RlnnError::InvalidData(format!(
                "strike must be positive, got {}",
                self.strike
            )));
        }
        match self.kind {
            PayoffKind::ArithmeticBasketPut => {
                let w = self
                    .basket_weights
                    .as_ref()
                    .ok_or(RlnnError::MissingField("basket_weights"))?;
                if w.len() != dim {
                    return Err(RlnnError::DimensionMismatch {
                        expected: dim,
                        got: w.len(),
                    });
                }
            }
            PayoffKind::DownOutCall => {
                let b = self.barrier.ok_or(RlnnError::MissingField("barrier"))?;
                if !(b < spot[0]) {
                    return Err(RlnnError::InvalidData(format!(
                        "barrier {b} must lie below the initial price {}",
                        spot[0]
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Raw intrinsic value h(s); the exercise payoff is `max(h, 0)`.
    pub fn intrinsic(&self, s: &[f64]) -> Result<f64> {
        Ok(match self.kind {
            PayoffKind::VanillaPut => self.strike - s[0],
            PayoffKind::VanillaCall => s[0] - self.strike,
            PayoffKind::ArithmeticBasketPut => {
                let w = self
                    .basket_weights
                    .as_ref()
                    .ok_or(RlnnError::MissingField("basket_weights"))?;
                if w.len() != s.len() {
                    return Err(RlnnError::DimensionMismatch {
                        expected: s.len(),
                        got: w.len(),
                    });
                }
                let basket: f64 = w.iter().zip(s).map(|(wi, si)| wi * si).sum();
                self.strike - basket
            }
            PayoffKind::MaxCall => s.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - self.strike,
            // Survival is tracked separately; intrinsic ignores the barrier.
            PayoffKind::DownOutCall => s[0] - self.strike,
        })
    }

    /// Infallible intrinsic evaluator for hot loops; call `validate` first.
    pub(crate) fn evaluator(&self) -> impl Fn(&[f64]) -> f64 + Sync + '_ {
        let kind = self.kind;
        let strike = self.strike;
        let weights = self.basket_weights.as_deref();
        move |s: &[f64]| match kind {
            PayoffKind::VanillaPut => strike - s[0],
            PayoffKind::VanillaCall | PayoffKind::DownOutCall => s[0] - strike,
            PayoffKind::ArithmeticBasketPut => {
                let w = weights.expect("validated basket weights");
                let basket: f64 = w.iter().zip(s).map(|(wi, si)| wi * si).sum();
                strike - basket
            }
            PayoffKind::MaxCall => {
                s.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - strike
            }
        }
    }
}

/// Knock-out state of one path; monotone (an absorbed path stays absorbed).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SurvivalState {
    pub alive: bool,
}

impl SurvivalState {
    pub fn new() -> Self {
        Self { alive: true }
    }
}

impl Default for SurvivalState {
    fn default() -> Self {
        Self::new()
    }
}

/// Applies one monitoring-date barrier check. Touching the barrier exactly
/// counts as a breach. Non-barrier payoffs pass through unchanged.
pub fn update_survival(state: SurvivalState, s: &[f64], spec: &PayoffSpec) -> SurvivalState {
    match (spec.kind, spec.barrier) {
        (PayoffKind::DownOutCall, Some(b)) => SurvivalState {
            alive: state.alive && s[0] > b,
        },
        _ => state,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn max_call_intrinsic() {
        let spec = PayoffSpec::max_call(100.0);
        assert_eq!(spec.intrinsic(&[90.0, 110.0, 95.0]).unwrap(), 10.0);
    }

    #[test]
    fn basket_put_at_the_money_is_zero() {
        let w = vec![0.381, 0.065, 0.057, 0.270, 0.227];
        let spec = PayoffSpec::basket_put(1.0, w.clone());
        let h = spec.intrinsic(&[1.0; 5]).unwrap();
        let want = 1.0 - w.iter().sum::<f64>();
        assert!((h - want).abs() < 1e-15);
        assert!(h.abs() < 1e-12, "Set II weights sum to 1");
    }

    #[test]
    fn deep_itm_put_floor() {
        let spec = PayoffSpec::vanilla_put(40.0);
        assert_eq!(spec.intrinsic(&[36.0]).unwrap(), 4.0);
    }

    #[test]
    fn missing_weights_is_an_error() {
        let spec = PayoffSpec {
            kind: PayoffKind::ArithmeticBasketPut,
            strike: 1.0,
            basket_weights: None,
            barrier: None,
        };
        assert!(matches!(
            spec.intrinsic(&[1.0]),
            Err(RlnnError::MissingField("basket_weights"))
        ));
        assert!(spec.validate(1, &[1.0]).is_err());
    }

    #[test]
    fn barrier_breach_and_absorption() {
        let spec = PayoffSpec::down_out_call(1.0, 0.91);
        let alive = SurvivalState::new();
        let dead = update_survival(alive, &[0.90], &spec);
        assert!(!dead.alive);
        // absorbed forever, even if the price recovers
        assert!(!update_survival(dead, &[2.0], &spec).alive);
        // touch counts as a breach
        assert!(!update_survival(alive, &[0.91], &spec).alive);
        assert!(update_survival(alive, &[0.9100001], &spec).alive);
    }

    proptest! {
        #[test]
        fn survival_is_monotone(prices in proptest::collection::vec(0.5f64..1.5, 1..20)) {
            let spec = PayoffSpec::down_out_call(1.0, 0.95);
            let mut state = SurvivalState::new();
            let mut seen_dead = false;
            for p in prices {
                state = update_survival(state, &[p], &spec);
                if seen_dead {
                    prop_assert!(!state.alive);
                }
                seen_dead = seen_dead || !state.alive;
            }
        }

        #[test]
        fn intrinsic_is_continuous_in_price(
            s in 0.01f64..200.0,
            ds in -1e-7f64..1e-7,
        ) {
            for spec in [
                PayoffSpec::vanilla_put(40.0),
                PayoffSpec::vanilla_call(40.0),
                PayoffSpec::max_call(40.0),
                PayoffSpec::down_out_call(40.0, 0.5),
            ] {
                let a = spec.intrinsic(&[s]).unwrap();
                let b = spec.intrinsic(&[s + ds]).unwrap();
                prop_assert!((a - b).abs() <= ds.abs() + 1e-12);
            }
        }
    }
}
