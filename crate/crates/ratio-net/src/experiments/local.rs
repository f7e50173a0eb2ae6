//! Local statistics of standard Gaussian data, compared with their closed
//! forms `delta . x` (translation) and `1 - |x|^2` (scale).

use std::path::Path;

use rayon::prelude::*;
use ratio_core::data::{sample_gaussian_with, GaussianSpec, Samples};
use ratio_core::local_stat::{scale_spec, translation_spec};
use ratio_core::{rng, trainer, Mlp2, TrainTrace};

use super::{build_methods, initial_net};
use crate::config::{ExperimentConfig, LocalKind};
use crate::error::Result;
use crate::formats;

#[derive(Debug, Clone)]
pub struct LocalMethod {
    pub name: String,
    pub net: Mlp2,
    pub trace: TrainTrace,
    /// `u` at each evaluation point.
    pub outputs: Vec<f64>,
    pub mae: f64,
}

#[derive(Debug, Clone)]
pub struct LocalResult {
    pub points: Samples,
    pub truth: Vec<f64>,
    pub methods: Vec<LocalMethod>,
}

pub fn run(cfg: &ExperimentConfig, seed: u64) -> Result<LocalResult> {
    let c = cfg.local.clone().unwrap_or_default();
    let (spec, truth_fn): (_, Box<dyn Fn(&[f64]) -> f64 + Sync>) = match c.spec {
        LocalKind::Translation => {
            let delta = c.delta.clone().unwrap_or_else(|| {
                let mut e = vec![0.0; c.dim];
                e[0] = 1.0;
                e
            });
            let d = delta.clone();
            (translation_spec(&delta)?, Box::new(move |x: &[f64]| x.iter().zip(&d).map(|(a, b)| a * b).sum()))
        }
        LocalKind::Scale => (scale_spec(c.dim)?, Box::new(|x: &[f64]| 1.0 - x.iter().map(|v| v * v).sum::<f64>())),
    };
    let data = sample_gaussian_with(&GaussianSpec::standard(c.dim), c.train_size, &mut rng::stream(seed, 0));
    let points = if c.dim == 1 {
        let n = c.eval_points;
        let grid = (0..n).map(|i| if n == 1 { 0.0 } else { -2.0 + 4.0 * i as f64 / (n - 1) as f64 }).collect();
        Samples::scalars(grid)
    } else {
        let mut r = rng::stream(seed, 1);
        let v = (0..c.eval_points * c.dim).map(|_| rng::uniform(&mut r, -2.0, 2.0)).collect();
        Samples::new(c.dim, v)?
    };
    let truth: Vec<f64> = points.rows().map(&truth_fn).collect();
    let tc = cfg.train_config(seed);
    let methods = build_methods(cfg)?
        .par_iter()
        .map(|(m, loss)| {
            let net = initial_net(cfg, c.dim, loss, seed)?;
            let (net, trace) = trainer::train_local(&net, &loss.pair, &spec, &data, &tc, None)?;
            let outputs = points.rows().map(|x| net.forward(x)).collect::<ratio_core::Result<Vec<_>>>()?;
            let mae = outputs.iter().zip(&truth).map(|(u, r)| (u - r).abs()).sum::<f64>() / truth.len() as f64;
            Ok(LocalMethod { name: m.name.clone(), net, trace, outputs, mae })
        })
        .collect::<Result<_>>()?;
    Ok(LocalResult { points, truth, methods })
}

impl LocalResult {
    pub fn write(&self, dir: &Path) -> Result<()> {
        let dim = self.points.dim();
        let mut header: Vec<String> = (1..=dim).map(|l| format!("x{l}")).collect();
        header.push("truth".into());
        for m in &self.methods {
            formats::write_trace(&dir.join(format!("trace_{}.csv", m.name)), &m.trace, None)?;
            formats::write_model(&dir.join(format!("model_{}.txt", m.name)), &m.net)?;
            header.push(m.name.clone());
        }
        let rows: Vec<Vec<String>> = self
            .points
            .rows()
            .enumerate()
            .map(|(i, x)| {
                let mut row: Vec<String> = x.iter().map(|v| v.to_string()).collect();
                row.push(self.truth[i].to_string());
                row.extend(self.methods.iter().map(|m| m.outputs[i].to_string()));
                row
            })
            .collect();
        let header: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
        formats::write_rows(&dir.join("local.csv"), &header, &rows)
    }
}
