//! Price bounds from a trained backward-induction result.
//!
//! The lower bound prices the learned exercise policy on fresh paths, so it
//! is unbiased from below. The upper bound uses the duality with the
//! martingale assembled from discounted network payoffs minus their
//! closed-form one-step expectations — every term is already available from
//! the trained nets, so no sub-simulation is needed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::ContinuationKernel;
use crate::error::{Result, RlnnError};
use crate::market::{simulate_paths, ExerciseSchedule, GbmModel, PathSet};
use crate::math::mean_and_se;
use crate::payoff::PayoffSpec;
use crate::pricer::{exercise_decision, normalize, RlnnResult};

/// Seed separation between training and evaluation paths.
const EVAL_SEED_XOR: u64 = 0x9E37_79B9_7F4A_7C15;

/// Lower/upper bound estimates with their per-path standard errors.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundReport {
    pub lower: f64,
    pub lower_se: f64,
    pub upper: f64,
    pub upper_se: f64,
    pub n_paths: usize,
    /// `(lower - 1.96 lower_se, upper + 1.96 upper_se)`.
    pub ci95: (f64, f64),
}

impl BoundReport {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn brackets(&self, price: f64) -> bool {
        self.ci95.0 <= price && price <= self.ci95.1
    }
}

/// Shared per-date machinery for both bounds: one continuation kernel per
/// interval and the discount factors on the monitoring grid.
pub struct DualMartingale<'a> {
    result: &'a RlnnResult,
    kernels: Vec<ContinuationKernel>,
    disc: Vec<f64>,
}

impl<'a> DualMartingale<'a> {
    pub fn new(result: &'a RlnnResult) -> Result<Self> {
        let m_count = result.schedule.monitoring_dates();
        if result.nets.len() != m_count {
            return Err(RlnnError::InvalidData(format!(
                "result holds {} nets for {m_count} monitoring dates",
                result.nets.len()
            )));
        }
        let mut kernels = Vec::with_capacity(m_count);
        for m in 1..=m_count {
            kernels.push(ContinuationKernel::new(
                result.net_at(m),
                &result.model,
                result.schedule.dt(m),
            )?);
        }
        let disc = result
            .schedule
            .times()
            .iter()
            .map(|t| (-result.model.rate * t).exp())
            .collect();
        Ok(Self {
            result,
            kernels,
            disc,
        })
    }

    /// Continuation value at date index `m` (0-based state date), i.e. the
    /// closed-form expectation of the net fitted at `m + 1`.
    #[inline]
    pub fn continuation(&self, m: usize, state: &[f64]) -> f64 {
        self.kernels[m].eval(state)
    }

    /// Martingale path `M_{t_0..t_M}` along one simulated path; `M_{t_0}` is
    /// identically zero and each increment is a discounted network payoff
    /// minus its conditional expectation.
    pub fn martingale(&self, paths: &PathSet, path: usize) -> Vec<f64> {
        let m_count = self.result.schedule.monitoring_dates();
        let mut out = Vec::with_capacity(m_count + 1);
        out.push(0.0);
        let mut acc = 0.0;
        let mut logs = vec![0.0; paths.dim];
        for i in 0..m_count {
            let next = paths.state(path, i + 1);
            for (l, s) in logs.iter_mut().zip(next) {
                *l = s.ln();
            }
            let g = self.result.net_at(i + 1).eval(&logs);
            let q = self.continuation(i, paths.state(path, i));
            acc += self.disc[i + 1] * g - self.disc[i] * q;
            out.push(acc);
        }
        out
    }
}

fn check_consistency(
    result: &RlnnResult,
    model: &GbmModel,
    schedule: &ExerciseSchedule,
    spec: &PayoffSpec,
) -> Result<()> {
    let norm = normalize(model, spec)?;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()));
    let model_ok = norm.model.dim == result.model.dim
        && close(norm.model.rate, result.model.rate)
        && norm
            .model
            .vol
            .iter()
            .zip(&result.model.vol)
            .all(|(a, b)| close(*a, *b))
        && norm
            .model
            .dividend
            .iter()
            .zip(&result.model.dividend)
            .all(|(a, b)| close(*a, *b));
    let payoff_ok = norm.payoff.kind == result.payoff.kind
        && close(norm.payoff.strike, result.payoff.strike)
        && close(norm.scale, result.scale);
    let schedule_ok = schedule.times() == result.schedule.times();
    if !(model_ok && payoff_ok && schedule_ok) {
        return Err(RlnnError::InvalidConfig(
            "model/schedule/payoff do not match the trained result".into(),
        ));
    }
    Ok(())
}

fn eval_paths(result: &RlnnResult, n_eval: usize, seed: u64) -> Result<PathSet> {
    simulate_paths(
        &result.model,
        &result.schedule,
        n_eval,
        seed ^ EVAL_SEED_XOR,
    )
}

fn survival_to(paths: &PathSet, path: usize, barrier: f64, through: usize) -> bool {
    (1..=through).all(|m| paths.state(path, m)[0] > barrier)
}

fn lower_values(engine: &DualMartingale, paths: &PathSet) -> Vec<f64> {
    let result = engine.result;
    let h = result.payoff.evaluator();
    let m_count = result.schedule.monitoring_dates();
    let disc = &engine.disc;

    if result.payoff.exercisable() {
        // identical initial state: the t_0 decision is global
        let h0 = h(paths.state(0, 0));
        let q0 = engine.continuation(0, paths.state(0, 0));
        if exercise_decision(h0, q0) {
            return vec![h0.max(0.0); paths.n_paths];
        }
        (0..paths.n_paths)
            .into_par_iter()
            .map(|p| {
                for m in 1..m_count {
                    let s = paths.state(p, m);
                    let hm = h(s);
                    if exercise_decision(hm, engine.continuation(m, s)) {
                        return disc[m] * hm.max(0.0);
                    }
                }
                disc[m_count] * h(paths.state(p, m_count)).max(0.0)
            })
            .collect()
    } else {
        let barrier = result.payoff.barrier.expect("barrier payoff");
        (0..paths.n_paths)
            .into_par_iter()
            .map(|p| {
                if survival_to(paths, p, barrier, m_count) {
                    disc[m_count] * h(paths.state(p, m_count)).max(0.0)
                } else {
                    0.0
                }
            })
            .collect()
    }
}

fn upper_values(engine: &DualMartingale, paths: &PathSet) -> Vec<f64> {
    let result = engine.result;
    let h = result.payoff.evaluator();
    let m_count = result.schedule.monitoring_dates();
    let disc = &engine.disc;
    let exercisable = result.payoff.exercisable();
    let barrier = result.payoff.barrier;

    (0..paths.n_paths)
        .into_par_iter()
        .map(|p| {
            let mut logs = vec![0.0; paths.dim];
            let mut mart = 0.0;
            let mut alive = true;
            let mut best = if exercisable {
                h(paths.state(p, 0)).max(0.0)
            } else {
                f64::NEG_INFINITY
            };
            for i in 0..m_count {
                let s_now = paths.state(p, i);
                let s_next = paths.state(p, i + 1);
                let q = engine.continuation(i, s_now);
                for (l, s) in logs.iter_mut().zip(s_next) {
                    *l = s.ln();
                }
                let g = result.net_at(i + 1).eval(&logs);
                mart += disc[i + 1] * g - disc[i] * q;
                if let Some(b) = barrier {
                    alive = alive && s_next[0] > b;
                }
                let payoff = if exercisable {
                    h(s_next).max(0.0)
                } else if i + 1 == m_count {
                    // single payoff date; a knocked-out claim expires worthless
                    if alive {
                        h(s_next).max(0.0)
                    } else {
                        0.0
                    }
                } else {
                    continue;
                };
                let candidate = disc[i + 1] * payoff - mart;
                if candidate > best {
                    best = candidate;
                }
            }
            best
        })
        .collect()
}

/// Unbiased value of the learned policy on fresh paths (original currency).
pub fn lower_bound(
    result: &RlnnResult,
    model: &GbmModel,
    schedule: &ExerciseSchedule,
    spec: &PayoffSpec,
    n_eval: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    check_consistency(result, model, schedule, spec)?;
    let engine = DualMartingale::new(result)?;
    let paths = eval_paths(result, n_eval, seed)?;
    let (mean, se) = mean_and_se(&lower_values(&engine, &paths));
    Ok((result.scale * mean, result.scale * se))
}

/// Duality upper bound on fresh paths (original currency).
pub fn upper_bound(
    result: &RlnnResult,
    model: &GbmModel,
    schedule: &ExerciseSchedule,
    spec: &PayoffSpec,
    n_eval: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    check_consistency(result, model, schedule, spec)?;
    let engine = DualMartingale::new(result)?;
    let paths = eval_paths(result, n_eval, seed)?;
    let (mean, se) = mean_and_se(&upper_values(&engine, &paths));
    Ok((result.scale * mean, result.scale * se))
}

/// Dual martingale along one row of a path set simulated under the result's
/// (normalized) model.
pub fn dual_martingale_path(
    result: &RlnnResult,
    paths: &PathSet,
    path: usize,
) -> Result<Vec<f64>> {
    let engine = DualMartingale::new(result)?;
    Ok(engine.martingale(paths, path))
}

/// Both bounds on one shared fresh path set.
pub fn bound_report(
    result: &RlnnResult,
    model: &GbmModel,
    schedule: &ExerciseSchedule,
    spec: &PayoffSpec,
    n_eval: usize,
    seed: u64,
) -> Result<BoundReport> {
    check_consistency(result, model, schedule, spec)?;
    let engine = DualMartingale::new(result)?;
    let paths = eval_paths(result, n_eval, seed)?;
    let (lower, lower_se) = mean_and_se(&lower_values(&engine, &paths));
    let (upper, upper_se) = mean_and_se(&upper_values(&engine, &paths));
    let s = result.scale;
    Ok(BoundReport {
        lower: s * lower,
        lower_se: s * lower_se,
        upper: s * upper,
        upper_se: s * upper_se,
        n_paths: n_eval,
        ci95: (
            s * (lower - 1.96 * lower_se),
            s * (upper + 1.96 * upper_se),
        ),
    })
}
