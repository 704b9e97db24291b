//! Monte Carlo pricing of discretely monitored (possibly multi-asset,
//! path-dependent) claims by regress-later value iteration with shallow ReLU
//! networks.
//!
//! At each monitoring date a two-layer network is fitted to the iterated
//! value estimates; because each hidden unit is a basket option on the (log)
//! prices, its one-step conditional expectation is closed form, which gives
//!
//! * the continuation values of the backward induction without nested
//!   simulation,
//! * a lower bound (price of the learned policy on fresh paths) and a dual
//!   upper bound whose martingale comes straight from the trained nets, and
//! * an explicit semi-static hedge portfolio per monitoring interval, with
//!   backtests against dynamic delta hedging.
//!
//! Everything is deterministic in the seeds: paths come from counter-based
//! substreams and every parallel reduction has a fixed tree, so results are
//! bit-identical across thread counts.

pub mod analytic;
pub mod bounds;
pub mod error;
pub mod hedge;
pub mod market;
pub mod math;
pub mod network;
pub mod oracle;
pub mod payoff;
pub mod pricer;
pub mod rng;
pub mod sets;

pub use analytic::{
    bs_delta, bs_price, classify_leg_1d, continuation_value, continuation_value_price_1d,
    log_moments, relu_expectation_normal, ContinuationKernel, LegClassification, NormalMoments,
};
pub use bounds::{bound_report, dual_martingale_path, lower_bound, upper_bound, BoundReport,
    DualMartingale};
pub use error::{Result, RlnnError};
pub use hedge::{
    delta_backtest, extract_portfolio, fit_european_put_hedge, static_backtest, var_cvar,
    HedgeLeg, HedgeStats, HedgeTarget, StaticHedgePortfolio,
};
pub use market::{cholesky, simulate_paths, ExerciseSchedule, GbmModel, PathSet};
pub use network::{
    adam_step, fit, gradient, mse, warm_start, AdamState, FitReport, InputSpace, ParamVec,
    ShallowNet, TrainConfig,
};
pub use oracle::{binomial_bermudan_1d, mc_expectation, ExerciseStyle, TreeSpec};
pub use payoff::{update_survival, PayoffKind, PayoffSpec, SurvivalState};
pub use pricer::{exercise_decision, normalize, rlnn_backward, DateFit, Normalized, RlnnResult};
pub use sets::ParameterSet;
