//! Mutual information of a standard bivariate Gaussian with correlation `rho`.

use std::path::Path;

use rayon::prelude::*;
use ratio_core::data::Samples;
use ratio_core::estimators::mi_estimate;
use ratio_core::rng::{self, StreamRng};
use ratio_core::trainer;

use super::{build_methods, estimator, initial_net, write_methods, TrainedMethod};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::formats;

#[derive(Debug, Clone)]
pub struct MiResult {
    pub methods: Vec<TrainedMethod>,
    pub estimates: Vec<f64>,
    pub exact: f64,
}

/// `n` pairs `(X, rho X + sqrt(1 - rho^2) W)`; `permute` shuffles the `Y`s.
pub fn sample_pairs(rho: f64, n: usize, permute: bool, rng: &mut StreamRng) -> (Samples, Samples) {
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    let w = (1.0 - rho * rho).sqrt();
    for _ in 0..n {
        let x = rng::normal(rng);
        xs.push(x);
        ys.push(rho * x + w * rng::normal(rng));
    }
    if permute {
        let mut perm: Vec<usize> = (0..n).collect();
        rng::shuffle_indices(rng, &mut perm);
        ys = perm.iter().map(|&i| ys[i]).collect();
    }
    (Samples::scalars(xs), Samples::scalars(ys))
}

pub fn run(cfg: &ExperimentConfig, seed: u64) -> Result<MiResult> {
    let c = cfg.mi.clone().unwrap_or_default();
    let (xs, ys) = sample_pairs(c.correlation, c.train_size, c.permute, &mut rng::stream(seed, 0));
    let (ex, ey) = sample_pairs(c.correlation, c.eval_size, c.permute, &mut rng::stream(seed, 1));
    let tc = cfg.train_config(seed);
    let methods: Vec<TrainedMethod> = build_methods(cfg)?
        .par_iter()
        .map(|(m, loss)| {
            let net = initial_net(cfg, 2, loss, seed)?;
            let (net, trace) = trainer::train_mutual_information(&net, &loss.pair, &xs, &ys, &tc, None)?;
            Ok(TrainedMethod { name: m.name.clone(), estimator: estimator(net, loss, cfg, seed)?, trace })
        })
        .collect::<Result<_>>()?;
    let estimates =
        methods.iter().map(|m| mi_estimate(&m.estimator, &ex, &ey)).collect::<ratio_core::Result<_>>()?;
    let exact = if c.permute { 0.0 } else { -0.5 * (1.0 - c.correlation * c.correlation).ln() };
    Ok(MiResult { methods, estimates, exact })
}

impl MiResult {
    pub fn write(&self, dir: &Path) -> Result<()> {
        write_methods(dir, &self.methods, None)?;
        let rows: Vec<Vec<String>> = self
            .methods
            .iter()
            .zip(&self.estimates)
            .map(|(m, e)| vec![m.name.clone(), e.to_string(), self.exact.to_string()])
            .collect();
        formats::write_rows(&dir.join("mi.csv"), &["method", "estimate", "exact"], &rows)
    }
}
