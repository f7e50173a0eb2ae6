//! Block tests between `N(0, I)` and `N(m 1, s I)` from trained estimators,
//! against the exact log-likelihood ratio.

use std::path::Path;

use rayon::prelude::*;
use ratio_core::data::{sample_gaussian_with, GaussianSpec, Samples};
use ratio_core::estimators::block_log_lr;
use ratio_core::eval::{roc, GaussianPair, RocCurve};
use ratio_core::rng;

use super::{train_methods, write_methods, TrainedMethod};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::formats;

#[derive(Debug, Clone)]
pub struct HyptestResult {
    pub methods: Vec<TrainedMethod>,
    /// `optimum` first, then the methods in config order.
    pub curves: Vec<(String, RocCurve)>,
}

const TRAIN0: u64 = 0;
const TRAIN1: u64 = 1;
const EVAL: u64 = 1 << 32;

pub fn pair(cfg: &ExperimentConfig) -> Result<GaussianPair> {
    let h = cfg.hyptest.clone().unwrap_or_default();
    let m = h.alternative_mean.unwrap_or(1.0 / (h.dim as f64).sqrt());
    Ok(GaussianPair::new(
        GaussianSpec::standard(h.dim),
        GaussianSpec::new(vec![m; h.dim], h.alternative_variance)?,
    )?)
}

pub fn run(cfg: &ExperimentConfig, seed: u64) -> Result<HyptestResult> {
    let h = cfg.hyptest.clone().unwrap_or_default();
    let truth = pair(cfg)?;
    let d0 = sample_gaussian_with(&truth.nominal, h.train_size, &mut rng::stream(seed, TRAIN0));
    let d1 = sample_gaussian_with(&truth.alternative, h.train_size, &mut rng::stream(seed, TRAIN1));
    let methods = train_methods(cfg, &d0, &d1, seed, None)?;

    // scores[t][hyp][detector], detector 0 the optimum
    let scores: Vec<[Vec<f64>; 2]> = (0..h.trials as u64)
        .into_par_iter()
        .map(|t| {
            let score = |hyp: u64, spec: &GaussianSpec| -> Result<Vec<f64>> {
                let block: Samples =
                    sample_gaussian_with(spec, h.block_size, &mut rng::stream(seed, EVAL + 2 * t + hyp));
                let mut s = vec![block_log_lr(&truth, &block)?];
                for m in &methods {
                    s.push(block_log_lr(&m.estimator, &block)?);
                }
                Ok(s)
            };
            Ok([score(0, &truth.nominal)?, score(1, &truth.alternative)?])
        })
        .collect::<Result<_>>()?;
    let names = std::iter::once("optimum".to_string()).chain(methods.iter().map(|m| m.name.clone()));
    let curves = names
        .enumerate()
        .map(|(j, name)| {
            let s0: Vec<f64> = scores.iter().map(|s| s[0][j]).collect();
            let s1: Vec<f64> = scores.iter().map(|s| s[1][j]).collect();
            Ok((name, roc(&s0, &s1)?))
        })
        .collect::<Result<_>>()?;
    Ok(HyptestResult { methods, curves })
}

impl HyptestResult {
    pub fn curve(&self, name: &str) -> Option<&RocCurve> {
        self.curves.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_methods(dir, &self.methods, None)?;
        for (name, c) in &self.curves {
            formats::write_roc(&dir.join(format!("roc_{name}.csv")), c)?;
        }
        Ok(())
    }
}
