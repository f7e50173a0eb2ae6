//! KL number `E1[log f1/f0]` of two isotropic Gaussians from a trained
//! log-likelihood-ratio estimator.

use std::path::Path;

use ratio_core::data::{sample_gaussian_with, GaussianSpec};
use ratio_core::estimators::kl_estimate;
use ratio_core::rng;

use super::{train_methods, write_methods, TrainedMethod};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::formats;

#[derive(Debug, Clone)]
pub struct KlResult {
    pub methods: Vec<TrainedMethod>,
    pub estimates: Vec<f64>,
    pub exact: f64,
}

/// `KL(f1 || f0)` for `f_i = N(m_i 1, s_i I)` in `dim` dimensions.
pub fn gaussian_kl(dim: usize, m0: f64, s0: f64, m1: f64, s1: f64) -> f64 {
    let k = dim as f64;
    0.5 * k * (s1 / s0 - 1.0 - (s1 / s0).ln()) + 0.5 * k * (m1 - m0) * (m1 - m0) / s0
}

pub fn run(cfg: &ExperimentConfig, seed: u64) -> Result<KlResult> {
    let c = cfg.kl.clone().unwrap_or_default();
    let f0 = GaussianSpec::new(vec![c.nominal_mean; c.dim], c.nominal_variance)?;
    let f1 = GaussianSpec::new(vec![c.alternative_mean; c.dim], c.alternative_variance)?;
    let d0 = sample_gaussian_with(&f0, c.train_size, &mut rng::stream(seed, 0));
    let d1 = sample_gaussian_with(&f1, c.train_size, &mut rng::stream(seed, 1));
    let eval = sample_gaussian_with(&f1, c.eval_size, &mut rng::stream(seed, 2));
    let methods = train_methods(cfg, &d0, &d1, seed, None)?;
    let estimates = methods.iter().map(|m| kl_estimate(&m.estimator, &eval)).collect::<ratio_core::Result<_>>()?;
    let exact = gaussian_kl(c.dim, c.nominal_mean, c.nominal_variance, c.alternative_mean, c.alternative_variance);
    Ok(KlResult { methods, estimates, exact })
}

impl KlResult {
    pub fn write(&self, dir: &Path) -> Result<()> {
        write_methods(dir, &self.methods, None)?;
        let rows: Vec<Vec<String>> = self
            .methods
            .iter()
            .zip(&self.estimates)
            .map(|(m, e)| vec![m.name.clone(), e.to_string(), self.exact.to_string()])
            .collect();
        formats::write_rows(&dir.join("kl.csv"), &["method", "estimate", "exact"], &rows)
    }
}
