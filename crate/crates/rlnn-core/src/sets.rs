//! Built-in parameter sets for the standard experiments.
//!
//! Each set bundles a market model, a monitoring schedule, an instrument and
//! the default number of hidden units used in its headline runs.

use crate::error::Result;
use crate::market::{ExerciseSchedule, GbmModel};
use crate::payoff::PayoffSpec;

#[derive(Clone, Debug)]
pub struct ParameterSet {
    pub name: &'static str,
    pub model: GbmModel,
    pub schedule: ExerciseSchedule,
    pub payoff: PayoffSpec,
    pub default_hidden: usize,
}

impl ParameterSet {
    /// Replaces every spot with `s0` (the tables vary the initial level with
    /// all other parameters fixed).
    pub fn with_spot(mut self, s0: f64) -> Self {
        for s in &mut self.model.spot {
            *s = s0;
        }
        self
    }

    /// Rescales the barrier of a knock-out instrument, if present.
    pub fn with_barrier(mut self, barrier: f64) -> Self {
        if let Some(b) = self.payoff.barrier.as_mut() {
            *b = barrier;
        }
        self
    }

    pub fn with_strike(mut self, strike: f64) -> Self {
        self.payoff.strike = strike;
        self
    }
}

/// Set I: Bermudan put on one asset.
/// S0 = 40, K = 40, r = 0.06, sigma = 0.2, T = 1, M = 10.
pub fn bermudan_put_single_asset() -> ParameterSet {
    ParameterSet {
        name: "set1",
        model: GbmModel::single_asset(40.0, 0.06, 0.0, 0.2),
        schedule: ExerciseSchedule::equally_spaced(1.0, 10).expect("valid schedule"),
        payoff: PayoffSpec::vanilla_put(40.0),
        default_hidden: 32,
    }
}

/// Set II: Bermudan arithmetic basket put on five assets.
/// S0 = 1, K = 1, r = 0.05, q = 0, T = 1, M = 10.
pub fn basket_put_five_assets() -> ParameterSet {
    let vol = vec![0.518, 0.648, 0.623, 0.570, 0.530];
    let corr = vec![
        vec![1.00, 0.79, 0.82, 0.91, 0.84],
        vec![0.79, 1.00, 0.73, 0.80, 0.76],
        vec![0.82, 0.73, 1.00, 0.77, 0.72],
        vec![0.91, 0.80, 0.77, 1.00, 0.90],
        vec![0.84, 0.76, 0.72, 0.90, 1.00],
    ];
    let weights = vec![0.381, 0.065, 0.057, 0.270, 0.227];
    ParameterSet {
        name: "set2",
        model: GbmModel::new(vec![1.0; 5], 0.05, vec![0.0; 5], vol, corr)
            .expect("valid five-asset model"),
        schedule: ExerciseSchedule::equally_spaced(1.0, 10).expect("valid schedule"),
        payoff: PayoffSpec::basket_put(1.0, weights),
        default_hidden: 64,
    }
}

/// Set III: Bermudan max call on `dim` independent assets.
/// S0 = 100, K = 100, r = 0.05, q = 0.1, sigma = 0.2, rho = 0, T = 3, M = 9.
pub fn max_call(dim: usize) -> Result<ParameterSet> {
    let corr: Vec<Vec<f64>> = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let model = GbmModel::new(
        vec![100.0; dim],
        0.05,
        vec![0.1; dim],
        vec![0.2; dim],
        corr,
    )?;
    let default_hidden = match dim {
        0..=2 => 256,
        3 => 512,
        _ => 1024,
    };
    Ok(ParameterSet {
        name: "set3",
        model,
        schedule: ExerciseSchedule::equally_spaced(3.0, 9)?,
        payoff: PayoffSpec::max_call(100.0),
        default_hidden,
    })
}

/// Set IV: European put used in the hedging study.
/// S0 = 1, K = 1, r = 0.1, sigma = 0.3, T = 1.
pub fn european_put_hedging() -> ParameterSet {
    ParameterSet {
        name: "set4",
        model: GbmModel::single_asset(1.0, 0.1, 0.0, 0.3),
        schedule: ExerciseSchedule::equally_spaced(1.0, 1).expect("valid schedule"),
        payoff: PayoffSpec::vanilla_put(1.0),
        default_hidden: 50,
    }
}

/// Set V: discretely monitored down-and-out call used in the hedging study.
/// S0 = 1, K = 1, r = 0.1, sigma = 0.3, T = 0.2, M = 5.
pub fn barrier_call_hedging() -> ParameterSet {
    ParameterSet {
        name: "set5",
        model: GbmModel::single_asset(1.0, 0.1, 0.0, 0.3),
        schedule: ExerciseSchedule::equally_spaced(0.2, 5).expect("valid schedule"),
        payoff: PayoffSpec::down_out_call(1.0, 0.97),
        default_hidden: 20,
    }
}

/// Looks a set up by its CLI name (`set1` .. `set5`).
pub fn by_name(name: &str, dim: Option<usize>) -> Result<ParameterSet> {
    match name {
        "set1" => Ok(bermudan_put_single_asset()),
        "set2" => Ok(basket_put_five_assets()),
        "set3" => max_call(dim.unwrap_or(2)),
        "set4" => Ok(european_put_hedging()),
        "set5" => Ok(barrier_call_hedging()),
        other => Err(crate::error::RlnnError::InvalidConfig(format!(
            "unknown parameter set `{other}` (expected set1..set5)"
        ))),
    }
}
