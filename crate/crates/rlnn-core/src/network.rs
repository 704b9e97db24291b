//! The per-date regression network and its training loop.
//!
//! Architecture: one ReLU hidden layer of `p` units feeding a single linear
//! output, i.e. `G(x) = sum_i w2_i max(w1_i . x + b1_i, 0) + b2`. Each hidden
//! unit is a basket-option payoff, so a trained net doubles as the static
//! hedge description for the interval ending at its date.
//!
//! Training minimises mean squared error with Adam on seeded mini-batches and
//! restores the best weights seen on a held-out validation split.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RlnnError};

/// Coordinate system of the network input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSpace {
    /// Element-wise log of the asset prices (the default everywhere).
    LogPrice,
    /// Raw prices; closed-form conditioning is supported for d = 1 only.
    Price,
}

/// Two-layer regression network; also the static-hedge description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShallowNet {
    /// Hidden units p.
    #[serde(rename = "p")]
    pub hidden: usize,
    /// Input dimension d.
    #[serde(rename = "d")]
    pub dim: usize,
    pub input_space: InputSpace,
    /// p x d, row-major; row i is the basket composition of unit i.
    pub w1: Vec<f64>,
    /// Length p; strike offsets.
    pub b1: Vec<f64>,
    /// Length p; quantities held of each unit.
    pub w2: Vec<f64>,
    /// Cash position.
    pub b2: f64,
}

impl ShallowNet {
    /// Fresh network with uniform random weights: layer weights on
    /// +-sqrt(6/(fan_in+fan_out)), first-layer biases on [-1, 1] so the ReLU
    /// knots land inside the normalized price domain, output bias 0.
    pub fn random<R: Rng>(hidden: usize, dim: usize, input_space: InputSpace, rng: &mut R) -> Self {
        assert!(hidden >= 1, "need at least one hidden unit");
        let a1 = (6.0 / (dim + hidden) as f64).sqrt();
        let a2 = (6.0 / (hidden + 1) as f64).sqrt();
        let w1 = (0..hidden * dim).map(|_| rng.gen_range(-a1..a1)).collect();
        let b1 = (0..hidden).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w2 = (0..hidden).map(|_| rng.gen_range(-a2..a2)).collect();
        Self {
            hidden,
            dim,
            input_space,
            w1,
            b1,
            w2,
            b2: 0.0,
        }
    }

    /// Fresh network whose ReLU knots all start inside the data region:
    /// layer weights as in [`ShallowNet::random`], but each unit's bias is
    /// derived from a uniformly drawn crossing point in the box
    /// `[lo, hi]^d`, so no unit begins dead or degenerate-linear over the
    /// training domain.
    pub fn random_in_domain<R: Rng>(
        hidden: usize,
        dim: usize,
        input_space: InputSpace,
        lo: &[f64],
        hi: &[f64],
        rng: &mut R,
    ) -> Self {
        let mut net = Self::random(hidden, dim, input_space, rng);
        for i in 0..hidden {
            let mut b = 0.0;
            for k in 0..dim {
                let c = if hi[k] > lo[k] {
                    rng.gen_range(lo[k]..hi[k])
                } else {
                    lo[k]
                };
                b -= net.w1[i * dim + k] * c;
            }
            net.b1[i] = b;
        }
        net
    }

    /// Number of free parameters `1 + p + p + p*d`.
    pub fn param_count(&self) -> usize {
        1 + 2 * self.hidden + self.hidden * self.dim
    }

    #[inline]
    pub fn unit_weights(&self, i: usize) -> &[f64] {
        &self.w1[i * self.dim..(i + 1) * self.dim]
    }

    /// Network output at `x`; `x` must already live in `input_space`.
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(RlnnError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.eval(x))
    }

    #[inline]
    pub(crate) fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        let mut acc = 0.0;
        for i in 0..self.hidden {
            let row = self.unit_weights(i);
            let mut a = self.b1[i];
            for (w, xi) in row.iter().zip(x) {
                a += w * xi;
            }
            if a > 0.0 {
                acc += self.w2[i] * a;
            }
        }
        acc + self.b2
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Training hyper-parameters; the defaults are the ones used throughout the
/// standard experiments.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    /// Mini-batch size as a fraction of the full sample.
    pub batch_fraction: f64,
    /// Epochs without validation improvement before stopping.
    pub patience: usize,
    /// Fraction of the sample used for training (rest validates).
    pub split: f64,
    pub max_epochs: usize,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            batch_fraction: 0.1,
            patience: 6,
            split: 0.7,
            max_epochs: 3000,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.split > 0.0 && self.split < 1.0) {
            return Err(RlnnError::InvalidConfig(format!(
                "split must be in (0,1), got {}",
                self.split
            )));
        }
        if self.patience < 1 {
            return Err(RlnnError::InvalidConfig("patience must be >= 1".into()));
        }
        if !(self.batch_fraction > 0.0 && self.batch_fraction <= 1.0) {
            return Err(RlnnError::InvalidConfig(format!(
                "batch_fraction must be in (0,1], got {}",
                self.batch_fraction
            )));
        }
        if !(self.learning_rate > 0.0) {
            return Err(RlnnError::InvalidConfig("learning_rate must be > 0".into()));
        }
        Ok(())
    }
}

/// Outcome of one `fit` call.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitReport {
    pub train_mse: f64,
    pub validation_mse: f64,
    pub epochs: usize,
    pub early_stopped: bool,
}

/// Parameter-shaped buffer used for gradients and Adam moments.
#[derive(Clone, Debug)]
pub struct ParamVec {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl ParamVec {
    pub fn zeros_like(net: &ShallowNet) -> Self {
        Self {
            w1: vec![0.0; net.w1.len()],
            b1: vec![0.0; net.b1.len()],
            w2: vec![0.0; net.w2.len()],
            b2: 0.0,
        }
    }

    fn add_assign(&mut self, other: &ParamVec) {
        for (a, b) in self.w1.iter_mut().zip(&other.w1) {
            *a += b;
        }
        for (a, b) in self.b1.iter_mut().zip(&other.b1) {
            *a += b;
        }
        for (a, b) in self.w2.iter_mut().zip(&other.w2) {
            *a += b;
        }
        self.b2 += other.b2;
    }

    fn scale(&mut self, c: f64) {
        for a in &mut self.w1 {
            *a *= c;
        }
        for a in &mut self.b1 {
            *a *= c;
        }
        for a in &mut self.w2 {
            *a *= c;
        }
        self.b2 *= c;
    }
}

/// Adam first/second moment state.
#[derive(Clone, Debug)]
pub struct AdamState {
    m: ParamVec,
    v: ParamVec,
    step: u64,
}

impl AdamState {
    pub fn new(net: &ShallowNet) -> Self {
        Self {
            m: ParamVec::zeros_like(net),
            v: ParamVec::zeros_like(net),
            step: 0,
        }
    }
}

// Gradient chunk size: fixed so the reduction tree (and therefore the result
// bits) do not depend on the number of worker threads.
const GRAD_CHUNK: usize = 512;

fn accumulate_rows(
    net: &ShallowNet,
    xs: &[f64],
    ys: &[f64],
    rows: &[usize],
    grad: &mut ParamVec,
    act: &mut [f64],
) {
    let d = net.dim;
    for &r in rows {
        let x = &xs[r * d..(r + 1) * d];
        let mut out = net.b2;
        for i in 0..net.hidden {
            let row = net.unit_weights(i);
            let mut a = net.b1[i];
            for (w, xi) in row.iter().zip(x) {
                a += w * xi;
            }
            act[i] = a;
            if a > 0.0 {
                out += net.w2[i] * a;
            }
        }
        let e = 2.0 * (out - ys[r]);
        grad.b2 += e;
        for i in 0..net.hidden {
            // subgradient 0 at the kink: strictly positive activations only
            let a = act[i];
            if a > 0.0 {
                grad.w2[i] += e * a;
                let back = e * net.w2[i];
                grad.b1[i] += back;
                let gw = &mut grad.w1[i * d..(i + 1) * d];
                for (g, xi) in gw.iter_mut().zip(x) {
                    *g += back * xi;
                }
            }
        }
    }
}

fn gradient_rows(net: &ShallowNet, xs: &[f64], ys: &[f64], rows: &[usize]) -> ParamVec {
    let chunks: Vec<ParamVec> = rows
        .par_chunks(GRAD_CHUNK)
        .map(|chunk| {
            let mut local = ParamVec::zeros_like(net);
            let mut act = vec![0.0; net.hidden];
            accumulate_rows(net, xs, ys, chunk, &mut local, &mut act);
            local
        })
        .collect();
    let mut total = ParamVec::zeros_like(net);
    for c in &chunks {
        total.add_assign(c);
    }
    total.scale(1.0 / rows.len() as f64);
    total
}

/// Gradient of the mean squared error over the given batch.
pub fn gradient(net: &ShallowNet, inputs: &[f64], targets: &[f64]) -> Result<ParamVec> {
    let n = targets.len();
    if inputs.len() != n * net.dim {
        return Err(RlnnError::DimensionMismatch {
            expected: n * net.dim,
            got: inputs.len(),
        });
    }
    if n == 0 {
        return Err(RlnnError::InvalidData("empty batch".into()));
    }
    let rows: Vec<usize> = (0..n).collect();
    Ok(gradient_rows(net, inputs, targets, &rows))
}

fn mse_rows(net: &ShallowNet, xs: &[f64], ys: &[f64], rows: &[usize]) -> f64 {
    let d = net.dim;
    let partials: Vec<f64> = rows
        .par_chunks(GRAD_CHUNK)
        .map(|chunk| {
            let mut s = 0.0;
            for &r in chunk {
                let e = net.eval(&xs[r * d..(r + 1) * d]) - ys[r];
                s += e * e;
            }
            s
        })
        .collect();
    crate::math::pairwise_sum(&partials) / rows.len() as f64
}

/// Mean squared error of `net` on a full sample.
pub fn mse(net: &ShallowNet, inputs: &[f64], targets: &[f64]) -> Result<f64> {
    let n = targets.len();
    if inputs.len() != n * net.dim {
        return Err(RlnnError::DimensionMismatch {
            expected: n * net.dim,
            got: inputs.len(),
        });
    }
    if n == 0 {
        return Err(RlnnError::InvalidData("empty sample".into()));
    }
    let rows: Vec<usize> = (0..n).collect();
    Ok(mse_rows(net, inputs, targets, &rows))
}

fn adam_update_slice(
    p: &mut [f64],
    g: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    lr: f64,
    b1: f64,
    b2: f64,
    eps: f64,
    bc1: f64,
    bc2: f64,
) {
    for i in 0..p.len() {
        m[i] = b1 * m[i] + (1.0 - b1) * g[i];
        v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
        let mhat = m[i] / bc1;
        let vhat = v[i] / bc2;
        p[i] -= lr * mhat / (vhat.sqrt() + eps);
    }
}

/// One Adam update with bias correction.
pub fn adam_step(net: &mut ShallowNet, grad: &ParamVec, state: &mut AdamState, cfg: &TrainConfig) {
    state.step += 1;
    let bc1 = 1.0 - cfg.adam_beta1.powi(state.step as i32);
    let bc2 = 1.0 - cfg.adam_beta2.powi(state.step as i32);
    adam_update_slice(
        &mut net.w1, &grad.w1, &mut state.m.w1, &mut state.v.w1,
        cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps, bc1, bc2,
    );
    adam_update_slice(
        &mut net.b1, &grad.b1, &mut state.m.b1, &mut state.v.b1,
        cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps, bc1, bc2,
    );
    adam_update_slice(
        &mut net.w2, &grad.w2, &mut state.m.w2, &mut state.v.w2,
        cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps, bc1, bc2,
    );
    let mut p = [net.b2];
    let mut m = [state.m.b2];
    let mut v = [state.v.b2];
    adam_update_slice(
        &mut p, &[grad.b2], &mut m, &mut v,
        cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps, bc1, bc2,
    );
    net.b2 = p[0];
    state.m.b2 = m[0];
    state.v.b2 = v[0];
}

/// Copies the network trained at the following date as the starting point for
/// the current one; values barely move between adjacent dates, so this saves
/// most of the descent.
pub fn warm_start(net_next_date: &ShallowNet) -> ShallowNet {
    net_next_date.clone()
}

/// Fits `initial` to `(inputs, targets)` by seeded mini-batch Adam with
/// validation-based early stopping. Returns the weights with the best
/// validation MSE observed, which is never worse than the initial weights'.
pub fn fit(
    initial: &ShallowNet,
    inputs: &[f64],
    targets: &[f64],
    cfg: &TrainConfig,
    seed: u64,
) -> Result<(ShallowNet, FitReport)> {
    cfg.validate()?;
    let d = initial.dim;
    let n = targets.len();
    if n < 10 {
        return Err(RlnnError::InvalidData(format!(
            "need at least 10 samples, got {n}"
        )));
    }
    if inputs.len() != n * d {
        return Err(RlnnError::DimensionMismatch {
            expected: n * d,
            got: inputs.len(),
        });
    }
    if !targets.iter().all(|t| t.is_finite()) {
        return Err(RlnnError::InvalidData("targets must be finite".into()));
    }

    // Constant targets have an exact representation; skip descent entirely.
    if targets.iter().all(|&t| t == targets[0]) {
        let mut net = initial.clone();
        net.w2.fill(0.0);
        net.b2 = targets[0];
        return Ok((
            net,
            FitReport {
                train_mse: 0.0,
                validation_mse: 0.0,
                epochs: 0,
                early_stopped: false,
            },
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng);
    let n_train = ((cfg.split * n as f64).round() as usize).clamp(1, n - 1);
    let (train_rows, val_rows) = idx.split_at(n_train);
    let mut train_rows = train_rows.to_vec();
    let val_rows = val_rows.to_vec();
    let batch = ((cfg.batch_fraction * n as f64).round() as usize).clamp(1, n_train);

    let initial_val = mse_rows(initial, inputs, targets, &val_rows);
    let mut net = initial.clone();
    let mut state = AdamState::new(&net);
    let mut best = net.clone();
    // The patience counter measures stagnation of the running fit, so the
    // baseline starts at infinity: a warm start whose first epochs undo the
    // optimizer's opening kick still gets room to re-converge.
    let mut best_val = f64::INFINITY;
    let mut strikes = 0;
    let mut early_stopped = false;
    let mut epochs = 0;

    for _ in 0..cfg.max_epochs {
        epochs += 1;
        train_rows.shuffle(&mut rng);
        for rows in train_rows.chunks(batch) {
            let g = gradient_rows(&net, inputs, targets, rows);
            adam_step(&mut net, &g, &mut state, cfg);
        }
        let val = mse_rows(&net, inputs, targets, &val_rows);
        if val < best_val {
            best_val = val;
            best.clone_from(&net);
            strikes = 0;
        } else {
            strikes += 1;
            if strikes >= cfg.patience {
                early_stopped = true;
                break;
            }
        }
    }

    // never hand back anything worse than the weights we were given
    if initial_val <= best_val {
        best = initial.clone();
        best_val = initial_val;
    }

    let train_mse = mse_rows(&best, inputs, targets, &train_rows);
    Ok((
        best,
        FitReport {
            train_mse,
            validation_mse: best_val,
            epochs,
            early_stopped,
        },
    ))
}
