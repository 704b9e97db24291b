//! Experiment configuration: TOML file with sections, every field
//! overridable from the command line.

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use rlnn_core::{ExerciseSchedule, GbmModel, ParameterSet, PayoffSpec, TrainConfig};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub experiment: ExperimentSection,
    pub model: Option<ModelSection>,
    pub instrument: Option<InstrumentSection>,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub hedge: HedgeSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub set: Option<String>,
    pub s0: Option<f64>,
    pub dim: Option<usize>,
    pub barrier: Option<f64>,
    pub strike: Option<f64>,
    pub hidden: Option<usize>,
    pub n_train: Option<usize>,
    pub n_eval: Option<usize>,
    pub seeds: Option<String>,
    pub format: Option<String>,
    pub out: Option<String>,
    pub save_model: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub spot: Vec<f64>,
    pub rate: f64,
    pub dividend: Option<Vec<f64>>,
    pub vol: Vec<f64>,
    pub corr: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstrumentSection {
    pub kind: String,
    pub strike: f64,
    pub weights: Option<Vec<f64>>,
    pub barrier: Option<f64>,
    pub maturity: f64,
    pub dates: usize,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub learning_rate: Option<f64>,
    pub batch_fraction: Option<f64>,
    pub patience: Option<usize>,
    pub split: Option<f64>,
    pub max_epochs: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HedgeSection {
    pub legs: Option<Vec<usize>>,
    pub moneyness: Option<Vec<f64>>,
    pub barriers: Option<Vec<f64>>,
    pub rebalances: Option<usize>,
    pub n_paths: Option<usize>,
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file `{path}`"))?;
        toml::from_str(&text).with_context(|| format!("malformed config file `{path}`"))
    }
}

/// A fully resolved pricing experiment.
pub struct Experiment {
    pub name: String,
    pub model: GbmModel,
    pub schedule: ExerciseSchedule,
    pub payoff: PayoffSpec,
    pub hidden: usize,
    pub n_train: usize,
    pub n_eval: usize,
    pub seeds: Vec<u64>,
    pub train: TrainConfig,
}

pub fn parse_seeds(spec: &str) -> Result<Vec<u64>> {
    let spec = spec.trim();
    if let Some((a, b)) = spec.split_once("..") {
        let lo: u64 = a.trim().parse().context("seed range start")?;
        let hi: u64 = b.trim().parse().context("seed range end")?;
        if hi <= lo {
            bail!("empty seed range `{spec}`");
        }
        return Ok((lo..hi).collect());
    }
    spec.split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|e| anyhow!("bad seed `{s}`: {e}")))
        .collect()
}

fn payoff_from_instrument(ins: &InstrumentSection) -> Result<PayoffSpec> {
    Ok(match ins.kind.as_str() {
        "vanilla_put" => PayoffSpec::vanilla_put(ins.strike),
        "vanilla_call" => PayoffSpec::vanilla_call(ins.strike),
        "basket_put" => PayoffSpec::basket_put(
            ins.strike,
            ins.weights
                .clone()
                .ok_or_else(|| anyhow!("instrument.weights required for basket_put"))?,
        ),
        "max_call" => PayoffSpec::max_call(ins.strike),
        "down_out_call" => PayoffSpec::down_out_call(
            ins.strike,
            ins.barrier
                .ok_or_else(|| anyhow!("instrument.barrier required for down_out_call"))?,
        ),
        other => bail!("unknown instrument.kind `{other}`"),
    })
}

fn train_config(section: &TrainSection) -> TrainConfig {
    let mut cfg = TrainConfig::default();
    if let Some(v) = section.learning_rate {
        cfg.learning_rate = v;
    }
    if let Some(v) = section.batch_fraction {
        cfg.batch_fraction = v;
    }
    if let Some(v) = section.patience {
        cfg.patience = v;
    }
    if let Some(v) = section.split {
        cfg.split = v;
    }
    if let Some(v) = section.max_epochs {
        cfg.max_epochs = v;
    }
    cfg
}

/// Resolves a named set or an explicit model/instrument block into a runnable
/// experiment.
pub fn resolve(cfg: &FileConfig) -> Result<Experiment> {
    let exp = &cfg.experiment;
    let (name, model, schedule, payoff, default_hidden) = if let Some(set_name) = &exp.set {
        let mut set: ParameterSet = rlnn_core::sets::by_name(set_name, exp.dim)?;
        if let Some(s0) = exp.s0 {
            set = set.with_spot(s0);
        }
        if let Some(b) = exp.barrier {
            set = set.with_barrier(b);
        }
        if let Some(k) = exp.strike {
            set = set.with_strike(k);
        }
        (
            set.name.to_string(),
            set.model,
            set.schedule,
            set.payoff,
            set.default_hidden,
        )
    } else {
        let model_section = cfg
            .model
            .as_ref()
            .ok_or_else(|| anyhow!("either experiment.set or a [model] block is required"))?;
        let ins = cfg
            .instrument
            .as_ref()
            .ok_or_else(|| anyhow!("[instrument] block required with [model]"))?;
        let d = model_section.spot.len();
        let corr = model_section.corr.clone().unwrap_or_else(|| {
            (0..d)
                .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect()
        });
        let mut model = GbmModel::new(
            model_section.spot.clone(),
            model_section.rate,
            model_section
                .dividend
                .clone()
                .unwrap_or_else(|| vec![0.0; d]),
            model_section.vol.clone(),
            corr,
        )?;
        if let Some(s0) = exp.s0 {
            for s in &mut model.spot {
                *s = s0;
            }
        }
        let mut payoff = payoff_from_instrument(ins)?;
        if let Some(k) = exp.strike {
            payoff.strike = k;
        }
        if let Some(b) = exp.barrier {
            payoff.barrier = Some(b);
        }
        let schedule = ExerciseSchedule::equally_spaced(ins.maturity, ins.dates)?;
        ("custom".to_string(), model, schedule, payoff, 32)
    };

    let seeds = parse_seeds(exp.seeds.as_deref().unwrap_or("0"))?;
    Ok(Experiment {
        name,
        model,
        schedule,
        payoff,
        hidden: exp.hidden.unwrap_or(default_hidden),
        n_train: exp.n_train.unwrap_or(50_000),
        n_eval: exp.n_eval.unwrap_or(200_000),
        seeds,
        train: train_config(&cfg.train),
    })
}
