//! Change detection from i.i.d. standard normal data to square-root feedback
//! data: exact CUSUM against CUSUM on conditional log-likelihood ratios
//! estimated from training series.

use std::path::Path;

use rayon::prelude::*;
use ratio_core::data::{sample_markov_with, MarkovSpec};
use ratio_core::estimators::Provenance;
use ratio_core::eval::{cusum_trial, DelayCurve};
use ratio_core::markov::{fit_conditional, ConditionalLr, ConditionalNets, ExactConditional, IncrementSource};
use ratio_core::rng;

use super::build_methods;
use crate::config::{CusumConfig, ExperimentConfig};
use crate::error::Result;
use crate::formats;

pub const NOMINAL: MarkovSpec = MarkovSpec::IidStandardNormal;
pub const ALTERNATIVE: MarkovSpec = MarkovSpec::SqrtFeedback;

const MAIN: u64 = 1 << 40;
const PILOT: u64 = 2 << 40;
const SERIES: u64 = 3 << 40;

#[derive(Debug, Clone)]
pub struct DetectorResult {
    /// `exact` or `<method>_n<training length>`.
    pub name: String,
    pub thresholds: Vec<f64>,
    pub curve: DelayCurve,
    /// Stopping times under the nominal and the alternative, kept when the
    /// trial log is requested.
    pub runs: Option<(Vec<Vec<Option<usize>>>, Vec<Vec<Option<usize>>>)>,
    pub estimator: Option<ConditionalLr>,
}

#[derive(Debug, Clone)]
pub struct CusumResult {
    pub detectors: Vec<DetectorResult>,
}

/// Nominal and alternative training series of `length` samples.
pub fn training_series(length: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut r0 = rng::stream(seed, SERIES + 2 * length as u64);
    let mut r1 = rng::stream(seed, SERIES + 2 * length as u64 + 1);
    (
        sample_markov_with(NOMINAL, length, None, || rng::normal(&mut r0)),
        sample_markov_with(ALTERNATIVE, length, None, || rng::normal(&mut r1)),
    )
}

/// Thresholds from `threshold_start` in `threshold_step` steps up to the
/// first whose pilot false-alarm period reaches `target_period`. Pilot runs
/// are censored at four times the target period.
pub fn pilot_thresholds<S: IncrementSource + Sync + ?Sized>(src: &S, c: &CusumConfig, seed: u64) -> Result<Vec<f64>> {
    let wide: Vec<f64> = (0..c.max_thresholds).map(|i| c.threshold_start + c.threshold_step * i as f64).collect();
    let cap = ((4.0 * c.target_period) as usize).clamp(1, c.horizon);
    let runs: Vec<Vec<Option<usize>>> = (0..c.pilot_trials as u64)
        .into_par_iter()
        .map(|i| Ok(cusum_trial(src, NOMINAL, &wide, cap, &mut rng::stream(seed, PILOT + i))?))
        .collect::<Result<_>>()?;
    let curve = DelayCurve::aggregate(&wide, &runs, &runs, cap);
    let last = curve
        .points
        .iter()
        .position(|p| p.false_alarm_period >= c.target_period)
        .unwrap_or(wide.len() - 1);
    Ok(wide[..=last].to_vec())
}

/// Delay curve of `src` over `trials` Monte-Carlo runs per hypothesis.
pub fn monte_carlo<S: IncrementSource + Sync + ?Sized>(
    src: &S,
    thresholds: &[f64],
    c: &CusumConfig,
    seed: u64,
) -> Result<(DelayCurve, Vec<Vec<Option<usize>>>, Vec<Vec<Option<usize>>>)> {
    ratio_core::eval::check_thresholds(thresholds)?;
    let runs: Vec<(Vec<Option<usize>>, Vec<Option<usize>>)> = (0..c.trials as u64)
        .into_par_iter()
        .map(|i| {
            let a = cusum_trial(src, NOMINAL, thresholds, c.horizon, &mut rng::stream(seed, MAIN + 2 * i))?;
            let b = cusum_trial(src, ALTERNATIVE, thresholds, c.horizon, &mut rng::stream(seed, MAIN + 2 * i + 1))?;
            Ok((a, b))
        })
        .collect::<Result<_>>()?;
    let (nominal, alternative): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    Ok((DelayCurve::aggregate(thresholds, &nominal, &alternative, c.horizon), nominal, alternative))
}

fn detect<S: IncrementSource + Sync + ?Sized>(
    name: String,
    src: &S,
    c: &CusumConfig,
    seed: u64,
    estimator: Option<ConditionalLr>,
) -> Result<DetectorResult> {
    let thresholds = match &c.thresholds {
        Some(t) => t.clone(),
        None => pilot_thresholds(src, c, seed)?,
    };
    let (curve, nominal, alternative) = monte_carlo(src, &thresholds, c, seed)?;
    let runs = c.trial_log.then_some((nominal, alternative));
    Ok(DetectorResult { name, thresholds, curve, runs, estimator })
}

pub fn run(cfg: &ExperimentConfig, seed: u64) -> Result<CusumResult> {
    let c = cfg.cusum.clone().unwrap_or_default();
    let tc = cfg.train_config(seed);
    let nets = ConditionalNets { hidden_k: c.hidden_k, hidden_k1: c.hidden_k1, init_seed: seed };
    let mut fits = Vec::new();
    for (m, loss) in build_methods(cfg)? {
        for &n in &c.train_lengths {
            fits.push((format!("{}_n{n}", m.name), loss.clone(), n));
        }
    }
    let trained: Vec<(String, ConditionalLr)> = fits
        .par_iter()
        .map(|(name, loss, n)| {
            let (s0, s1) = training_series(*n, seed);
            let mut clr = fit_conditional(&s0, &s1, c.order, loss, nets, &tc)?;
            let prov = Provenance { preset: loss.preset.as_str().into(), config: tc };
            clr = with_provenance(clr, prov)?;
            Ok((name.clone(), clr))
        })
        .collect::<Result<_>>()?;
    let mut detectors = vec![detect(
        "exact".into(),
        &ExactConditional { nominal: NOMINAL, alternative: ALTERNATIVE },
        &c,
        seed,
        None,
    )?];
    for (name, clr) in trained {
        detectors.push(detect(name, &clr, &c, seed, Some(clr.clone()))?);
    }
    Ok(CusumResult { detectors })
}

fn with_provenance(clr: ConditionalLr, prov: Provenance) -> Result<ConditionalLr> {
    let tag = |e: &ratio_core::RatioEstimator| {
        let mut e = e.clone();
        e.provenance = Some(prov.clone());
        e
    };
    Ok(ConditionalLr::new(clr.order(), clr.u_k().map(tag), tag(clr.u_k1()))?)
}

impl CusumResult {
    pub fn detector(&self, name: &str) -> Option<&DetectorResult> {
        self.detectors.iter().find(|d| d.name == name)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        for d in &self.detectors {
            formats::write_delay_curve(&dir.join(format!("delay_{}.csv", d.name)), &d.curve)?;
            if let Some((n, a)) = &d.runs {
                formats::write_trial_log(&dir.join(format!("trials_{}.csv", d.name)), &d.thresholds, n, a)?;
            }
            if let Some(clr) = &d.estimator {
                formats::write_bundle(&dir.join(format!("model_{}_k1.json", d.name)), clr.u_k1())?;
                if let Some(u) = clr.u_k() {
                    formats::write_bundle(&dir.join(format!("model_{}_k.json", d.name)), u)?;
                }
            }
        }
        Ok(())
    }
}
