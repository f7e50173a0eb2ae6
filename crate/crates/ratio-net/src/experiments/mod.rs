//! Experiment pipelines. Each returns its results in memory; [`write`] turns
//! them into files.

pub mod classify;
pub mod cusum;
pub mod glrt;
pub mod hyptest;
pub mod kl;
pub mod local;
pub mod mi;

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use ratio_core::data::Samples;
use ratio_core::estimators::Provenance;
use ratio_core::loss::PresetLoss;
use ratio_core::{trainer, Mlp2, RatioEstimator, Target, TrainTrace};

use crate::config::{ExperimentConfig, ExperimentKind, MethodConfig};
use crate::error::{Error, Result};

/// A method trained on two samples.
#[derive(Debug, Clone)]
pub struct TrainedMethod {
    pub name: String,
    pub estimator: RatioEstimator,
    pub trace: TrainTrace,
}

/// Results of one seed of one experiment.
#[derive(Debug, Clone)]
pub enum Outcome {
    Hyptest(hyptest::HyptestResult),
    Classify(classify::ClassifyResult),
    Glrt(glrt::GlrtResult),
    Cusum(cusum::CusumResult),
    Kl(kl::KlResult),
    Mi(mi::MiResult),
    Local(local::LocalResult),
}

/// Runs the experiment of a resolved config for one seed.
pub fn run(cfg: &ExperimentConfig, seed: u64) -> Result<Outcome> {
    Ok(match cfg.experiment {
        ExperimentKind::Hyptest => Outcome::Hyptest(hyptest::run(cfg, seed)?),
        ExperimentKind::Classify => Outcome::Classify(classify::run(cfg, seed)?),
        ExperimentKind::Glrt => Outcome::Glrt(glrt::run(cfg, seed)?),
        ExperimentKind::Cusum => Outcome::Cusum(cusum::run(cfg, seed)?),
        ExperimentKind::Kl => Outcome::Kl(kl::run(cfg, seed)?),
        ExperimentKind::Mi => Outcome::Mi(mi::run(cfg, seed)?),
        ExperimentKind::Local => Outcome::Local(local::run(cfg, seed)?),
    })
}

impl Outcome {
    /// Writes the per-seed artifacts into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        match self {
            Outcome::Hyptest(r) => r.write(dir),
            Outcome::Classify(r) => r.write(dir),
            Outcome::Glrt(r) => r.write(dir),
            Outcome::Cusum(r) => r.write(dir),
            Outcome::Kl(r) => r.write(dir),
            Outcome::Mi(r) => r.write(dir),
            Outcome::Local(r) => r.write(dir),
        }
    }

    pub fn summary_header(kind: ExperimentKind) -> &'static [&'static str] {
        match kind {
            ExperimentKind::Hyptest | ExperimentKind::Glrt => &["seed", "curve", "auc", "pd_at_0.05", "pd_at_0.1"],
            ExperimentKind::Classify => &["seed", "method", "test_error"],
            ExperimentKind::Cusum => &["seed", "detector", "delay_at_100", "delay_at_1000", "delay_at_10000"],
            ExperimentKind::Kl | ExperimentKind::Mi => &["seed", "method", "estimate", "exact"],
            ExperimentKind::Local => &["seed", "method", "mae"],
        }
    }

    pub fn summary_rows(&self, seed: u64) -> Vec<Vec<String>> {
        let s = seed.to_string();
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        match self {
            Outcome::Hyptest(hyptest::HyptestResult { curves, .. }) | Outcome::Glrt(glrt::GlrtResult { curves, .. }) => {
                curves
                    .iter()
                    .map(|(name, c)| {
                        vec![
                            s.clone(),
                            name.clone(),
                            c.auc.to_string(),
                            c.detection_at(0.05).to_string(),
                            c.detection_at(0.1).to_string(),
                        ]
                    })
                    .collect()
            }
            Outcome::Classify(r) => {
                let mut rows: Vec<Vec<String>> = r
                    .methods
                    .iter()
                    .zip(&r.test_errors)
                    .map(|(m, e)| vec![s.clone(), m.name.clone(), e.to_string()])
                    .collect();
                if let Some(o) = r.optimum_error {
                    rows.push(vec![s.clone(), "optimum".into(), o.to_string()]);
                }
                rows
            }
            Outcome::Cusum(r) => r
                .detectors
                .iter()
                .map(|d| {
                    let mut row = vec![s.clone(), d.name.clone()];
                    row.extend([1e2, 1e3, 1e4].map(|p| opt(d.curve.delay_at_period(p))));
                    row
                })
                .collect(),
            Outcome::Kl(kl::KlResult { methods, estimates, exact })
            | Outcome::Mi(mi::MiResult { methods, estimates, exact }) => methods
                .iter()
                .zip(estimates)
                .map(|(m, e)| vec![s.clone(), m.name.clone(), e.to_string(), exact.to_string()])
                .collect(),
            Outcome::Local(r) => r
                .methods
                .iter()
                .map(|m| vec![s.clone(), m.name.clone(), m.mae.to_string()])
                .collect(),
        }
    }
}

/// Builds every method's loss, failing on the first bad one.
pub fn build_methods(cfg: &ExperimentConfig) -> Result<Vec<(MethodConfig, PresetLoss)>> {
    cfg.methods
        .iter()
        .map(|m| {
            let loss = if cfg.experiment == ExperimentKind::Local { m.loss()? } else { m.build()? };
            Ok((m.clone(), loss))
        })
        .collect()
}

/// Initial `k x N x 1` network for `loss`; every method of a run shares the
/// initial weights of the seed.
pub fn initial_net(cfg: &ExperimentConfig, k: usize, loss: &PresetLoss, seed: u64) -> Result<Mlp2> {
    Ok(Mlp2::init(k, cfg.network.hidden(), loss.output, seed)?.with_hidden(cfg.network.activation()?))
}

pub fn estimator(net: Mlp2, loss: &PresetLoss, cfg: &ExperimentConfig, seed: u64) -> Result<RatioEstimator> {
    let provenance = Provenance { preset: loss.preset.as_str().into(), config: cfg.train_config(seed) };
    Ok(RatioEstimator::new(net, Target::for_preset(loss.preset), Some(provenance))?)
}

/// Trains every configured method on the same two samples, in parallel.
pub fn train_methods(
    cfg: &ExperimentConfig,
    data0: &Samples,
    data1: &Samples,
    seed: u64,
    metric: Option<&(dyn Fn(&RatioEstimator) -> f64 + Sync)>,
) -> Result<Vec<TrainedMethod>> {
    let methods = build_methods(cfg)?;
    let tc = cfg.train_config(seed);
    methods
        .par_iter()
        .map(|(m, loss)| {
            let net = initial_net(cfg, data0.dim(), loss, seed)?;
            let target = Target::for_preset(loss.preset);
            let mut hook = |net: &Mlp2| {
                let est = RatioEstimator { net: net.clone(), target, provenance: None };
                metric.map_or(0.0, |f| f(&est))
            };
            let hook_ref: Option<trainer::MetricHook<'_>> = if metric.is_some() { Some(&mut hook) } else { None };
            let (net, trace) = trainer::train_two_sample(&net, &loss.pair, data0, data1, &tc, hook_ref)?;
            Ok(TrainedMethod { name: m.name.clone(), estimator: estimator(net, loss, cfg, seed)?, trace })
        })
        .collect()
}

/// Writes `trace_<name>.csv` and `model_<name>.json` for every method.
pub fn write_methods(dir: &Path, methods: &[TrainedMethod], metric: Option<&str>) -> Result<()> {
    for m in methods {
        crate::formats::write_trace(&dir.join(format!("trace_{}.csv", m.name)), &m.trace, metric)?;
        crate::formats::write_bundle(&dir.join(format!("model_{}.json", m.name)), &m.estimator)?;
    }
    Ok(())
}
