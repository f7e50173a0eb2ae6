//! Scalar Gaussian tests with an unknown alternative: exact optimum, GLRT with
//! a known nominal, GLRT with a nominal data set, and networks trained on the
//! nominal set against the block under test.

use std::path::Path;

use rayon::prelude::*;
use ratio_core::data::{sample_gaussian_with, GaussianSpec, Samples};
use ratio_core::estimators::block_log_lr;
use ratio_core::eval::{glrt1_statistic, glrt2_statistic, roc, GaussianPair, RocCurve};
use ratio_core::{rng, trainer, RatioEstimator, Target};

use super::{build_methods, initial_net};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::formats;

#[derive(Debug, Clone)]
pub struct GlrtResult {
    /// `<detector>_n<size>` for detectors `optimum`, `glrt1`, `glrt2` and the
    /// methods, sizes in config order.
    pub curves: Vec<(String, RocCurve)>,
}

const NOMINAL: u64 = 0;
const BLOCK0: u64 = 1;
const BLOCK1: u64 = 2;

fn stream_id(size_index: usize, trial: u64, role: u64) -> u64 {
    ((size_index as u64) << 40) | (trial << 2) | role
}

pub fn run(cfg: &ExperimentConfig, seed: u64) -> Result<GlrtResult> {
    let g = cfg.glrt.clone().unwrap_or_default();
    let truth = GaussianPair::new(
        GaussianSpec::new(vec![g.nominal_mean], g.nominal_variance)?,
        GaussianSpec::new(vec![g.alternative_mean], g.alternative_variance)?,
    )?;
    let methods = build_methods(cfg)?;
    let tc = cfg.train_config(seed);
    let neural = g.neural_trials.min(g.trials);
    let mut curves = Vec::new();
    for (si, &n) in g.sizes.iter().enumerate() {
        let fixed = sample_gaussian_with(&truth.nominal, n, &mut rng::stream(seed, stream_id(si, 0, NOMINAL) | 1 << 39));
        // per trial: [hyp][detector], detectors optimum, glrt1, glrt2, methods
        let per_trial: Vec<[Vec<f64>; 2]> = (0..g.trials as u64)
            .into_par_iter()
            .map(|t| {
                let nominal: Samples = if g.redraw_nominal {
                    sample_gaussian_with(&truth.nominal, n, &mut rng::stream(seed, stream_id(si, t, NOMINAL)))
                } else {
                    fixed.clone()
                };
                let score = |hyp: u64| -> Result<Vec<f64>> {
                    let spec = if hyp == 0 { &truth.nominal } else { &truth.alternative };
                    let role = if hyp == 0 { BLOCK0 } else { BLOCK1 };
                    let block = sample_gaussian_with(spec, n, &mut rng::stream(seed, stream_id(si, t, role)));
                    let mut s = vec![
                        block_log_lr(&truth, &block)?,
                        glrt1_statistic(&truth.nominal, block.as_slice())?,
                        glrt2_statistic(nominal.as_slice(), block.as_slice())?,
                    ];
                    if (t as usize) < neural {
                        for (_, loss) in &methods {
                            let net = initial_net(cfg, 1, loss, seed)?;
                            let (net, _) = trainer::train_two_sample(&net, &loss.pair, &nominal, &block, &tc, None)?;
                            let est = RatioEstimator::new(net, Target::for_preset(loss.preset), None)?;
                            s.push(block_log_lr(&est, &block)?);
                        }
                    }
                    Ok(s)
                };
                Ok([score(0)?, score(1)?])
            })
            .collect::<Result<_>>()?;
        let mut names = vec!["optimum".to_string(), "glrt1".into(), "glrt2".into()];
        names.extend(methods.iter().map(|(m, _)| m.name.clone()));
        for (j, name) in names.iter().enumerate() {
            let rows = if j < 3 { &per_trial[..] } else { &per_trial[..neural] };
            if rows.is_empty() {
                continue;
            }
            let s0: Vec<f64> = rows.iter().map(|s| s[0][j]).collect();
            let s1: Vec<f64> = rows.iter().map(|s| s[1][j]).collect();
            curves.push((format!("{name}_n{n}"), roc(&s0, &s1)?));
        }
    }
    Ok(GlrtResult { curves })
}

impl GlrtResult {
    pub fn curve(&self, name: &str) -> Option<&RocCurve> {
        self.curves.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        for (name, c) in &self.curves {
            formats::write_roc(&dir.join(format!("roc_{name}.csv")), c)?;
        }
        Ok(())
    }
}
