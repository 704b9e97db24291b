//! Risk-neutral market model and correlated path generation.
//!
//! Assets follow a multivariate geometric Brownian motion simulated with the
//! exact log-normal transition on the monitoring grid, so the only error in
//! downstream estimates is statistical. Normals come from counter-based
//! substreams keyed by `(seed, path, transition)`, making a `PathSet` a pure
//! function of its seed regardless of thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RlnnError};
use crate::rng::CounterRng;

/// Multivariate GBM under the risk-neutral measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbmModel {
    pub dim: usize,
    pub spot: Vec<f64>,
    pub rate: f64,
    pub dividend: Vec<f64>,
    pub vol: Vec<f64>,
    /// Instantaneous correlation of the driving Brownian motions.
    pub corr: Vec<Vec<f64>>,
}

impl GbmModel {
    pub fn new(
        spot: Vec<f64>,
        rate: f64,
        dividend: Vec<f64>,
        vol: Vec<f64>,
        corr: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let dim = spot.len();
        if dim == 0 {
            return Err(RlnnError::InvalidModel("no assets".into()));
        }
        for (name, v) in [("dividend", &dividend), ("vol", &vol)] {
            if v.len() != dim {
                return Err(RlnnError::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            let _ = name;
        }
        if spot.iter().any(|&s| !(s > 0.0)) {
            return Err(RlnnError::InvalidModel("spot must be strictly positive".into()));
        }
        if vol.iter().any(|&s| !(s > 0.0)) {
            return Err(RlnnError::InvalidModel("vol must be strictly positive".into()));
        }
        if corr.len() != dim || corr.iter().any(|row| row.len() != dim) {
            return Err(RlnnError::InvalidModel("corr must be d x d".into()));
        }
        for i in 0..dim {
            if (corr[i][i] - 1.0).abs() > 1e-12 {
                return Err(RlnnError::InvalidModel(format!(
                    "corr[{i}][{i}] = {} is not 1",
                    corr[i][i]
                )));
            }
            for j in 0..i {
                if (corr[i][j] - corr[j][i]).abs() > 1e-12 {
                    return Err(RlnnError::InvalidModel(format!(
                        "corr not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self {
            dim,
            spot,
            rate,
            dividend,
            vol,
            corr,
        })
    }

    pub fn single_asset(spot: f64, rate: f64, dividend: f64, vol: f64) -> Self {
        Self::new(vec![spot], rate, vec![dividend], vec![vol], vec![vec![1.0]])
            .expect("single-asset parameters")
    }

    /// Instantaneous log-return covariance per unit time: `rho_ij vol_i vol_j`.
    pub fn covariance(&self) -> Vec<Vec<f64>> {
        let d = self.dim;
        let mut cov = vec![vec![0.0; d]; d];
        for i in 0..d {
            for j in 0..d {
                cov[i][j] = self.corr[i][j] * self.vol[i] * self.vol[j];
            }
        }
        cov
    }
}

/// Monitoring grid `t_0 = 0 < t_1 < ... < t_M = T` (year fractions).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExerciseSchedule {
    times: Vec<f64>,
}

impl ExerciseSchedule {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(RlnnError::InvalidSchedule(
                "need t_0 and at least one monitoring date".into(),
            ));
        }
        if times[0] != 0.0 {
            return Err(RlnnError::InvalidSchedule(format!(
                "t_0 must be 0, got {}",
                times[0]
            )));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(RlnnError::InvalidSchedule(
                "times must be strictly increasing".into(),
            ));
        }
        Ok(Self { times })
    }

    /// `M` equally spaced monitoring dates on `(0, maturity]`.
    pub fn equally_spaced(maturity: f64, dates: usize) -> Result<Self> {
        if dates == 0 || maturity <= 0.0 {
            return Err(RlnnError::InvalidSchedule(
                "need maturity > 0 and at least one date".into(),
            ));
        }
        let times = (0..=dates)
            .map(|m| maturity * m as f64 / dates as f64)
            .collect();
        Self::new(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of monitoring dates M (excluding t_0).
    pub fn monitoring_dates(&self) -> usize {
        self.times.len() - 1
    }

    pub fn maturity(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Interval length `t_m - t_{m-1}` for m in 1..=M.
    pub fn dt(&self, m: usize) -> f64 {
        self.times[m] - self.times[m - 1]
    }
}

/// Simulated price tensor: `n_paths x (M+1) x dim`, immutable once built.
#[derive(Clone, Debug)]
pub struct PathSet {
    values: Vec<f64>,
    pub n_paths: usize,
    pub n_dates: usize,
    pub dim: usize,
    pub seed: u64,
    pub schedule: ExerciseSchedule,
}

impl PathSet {
    /// Price vector of one path at one date.
    #[inline]
    pub fn state(&self, path: usize, date: usize) -> &[f64] {
        let start = (path * self.n_dates + date) * self.dim;
        &self.values[start..start + self.dim]
    }
}

/// Lower-triangular Cholesky factor of a correlation matrix.
///
/// Pivots below -1e-12 report failure; tiny negative pivots from rounding are
/// clamped to zero so rank-deficient (perfectly correlated) matrices factor.
pub fn cholesky(corr: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = corr.len();
    let mut l = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let mut s = corr[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s < -1e-12 {
                    return Err(RlnnError::NotPositiveSemiDefinite { pivot: s, index: i });
                }
                l[i][j] = s.max(0.0).sqrt();
            } else if l[j][j] > 0.0 {
                l[i][j] = s / l[j][j];
            } else {
                l[i][j] = 0.0;
            }
        }
    }
    Ok(l)
}

/// Exact log-space GBM simulation on the monitoring grid.
pub fn simulate_paths(
    model: &GbmModel,
    schedule: &ExerciseSchedule,
    n_paths: usize,
    seed: u64,
) -> Result<PathSet> {
    if n_paths == 0 {
        return Err(RlnnError::InvalidConfig("n_paths must be >= 1".into()));
    }
    let d = model.dim;
    let chol = cholesky(&model.corr)?;
    let n_dates = schedule.times().len();
    let n_steps = n_dates - 1;

    // Per-interval drift and diffusion scale, shared across paths.
    let mut drift = vec![0.0; n_steps * d];
    let mut sig_dt = vec![0.0; n_steps * d];
    for m in 0..n_steps {
        let dt = schedule.dt(m + 1);
        for k in 0..d {
            drift[m * d + k] =
                (model.rate - model.dividend[k] - 0.5 * model.vol[k] * model.vol[k]) * dt;
            sig_dt[m * d + k] = model.vol[k] * dt.sqrt();
        }
    }

    let mut values = vec![0.0; n_paths * n_dates * d];
    let stride = n_dates * d;
    values
        .par_chunks_mut(stride)
        .enumerate()
        .for_each(|(path, row)| {
            row[..d].copy_from_slice(&model.spot);
            let mut z = vec![0.0; d];
            let mut y = vec![0.0; d];
            for m in 0..n_steps {
                let mut rng = CounterRng::new(seed, path as u64, (m + 1) as u32);
                rng.fill_normals(&mut z);
                for i in 0..d {
                    let mut acc = 0.0;
                    for k in 0..=i {
                        acc += chol[i][k] * z[k];
                    }
                    y[i] = acc;
                }
                let (prev, next) = row.split_at_mut((m + 1) * d);
                let prev = &prev[m * d..];
                for k in 0..d {
                    next[k] = prev[k] * (drift[m * d + k] + sig_dt[m * d + k] * y[k]).exp();
                }
            }
        });

    Ok(PathSet {
        values,
        n_paths,
        n_dates,
        dim: d,
        seed,
        schedule: schedule.clone(),
    })
}
