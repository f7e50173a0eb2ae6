//! ROC curves, exact-density baselines, GLRT statistics, CUSUM Monte Carlo and
//! classification error.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::data::{GaussianSpec, LabeledImageSet, MarkovSpec, Samples};
use crate::error::{Error, Result};
use crate::estimators::LogRatio;
use crate::markov::{CusumState, IncrementSource};
use crate::rng;

/// Empirical ROC: `(P_fa, P_d)` for every pooled unique threshold, swept from
/// high to low, starting at `(0, 0)` and ending at `(1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<(f64, f64)>,
    /// Threshold of each point; `+inf` for the origin.
    pub thresholds: Vec<f64>,
    pub auc: f64,
}

impl RocCurve {
    /// Detection probability at false-alarm level `fa`, linear between points.
    /// At vertical segments the highest detection probability is taken.
    pub fn detection_at(&self, fa: f64) -> f64 {
        let pts = &self.points;
        let i = pts.partition_point(|p| p.0 <= fa);
        if i == 0 {
            return 0.0;
        }
        let (x0, y0) = pts[i - 1];
        if x0 == fa || i == pts.len() {
            return y0;
        }
        let (x1, y1) = pts[i];
        y0 + (y1 - y0) * (fa - x0) / (x1 - x0)
    }
}

/// Scores at or above the threshold count as detections.
pub fn roc(scores0: &[f64], scores1: &[f64]) -> Result<RocCurve> {
    if scores0.is_empty() || scores1.is_empty() {
        return Err(Error::EmptyInput);
    }
    if scores0.iter().chain(scores1).any(|s| s.is_nan()) {
        return Err(Error::Param("ROC scores must not be NaN".into()));
    }
    let desc = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    };
    let (s0, s1) = (desc(scores0), desc(scores1));
    let (n0, n1) = (s0.len() as f64, s1.len() as f64);
    let mut points = vec![(0.0, 0.0)];
    let mut thresholds = vec![f64::INFINITY];
    let (mut i, mut j) = (0, 0);
    while i < s0.len() || j < s1.len() {
        let t = match (s0.get(i), s1.get(j)) {
            (Some(&a), Some(&b)) => a.max(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        while i < s0.len() && s0[i] >= t {
            i += 1;
        }
        while j < s1.len() && s1[j] >= t {
            j += 1;
        }
        points.push((i as f64 / n0, j as f64 / n1));
        thresholds.push(t);
    }
    let auc = points.windows(2).map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0).sum();
    Ok(RocCurve { points, thresholds, auc })
}

/// Exact log-LR of two isotropic Gaussians.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPair {
    pub nominal: GaussianSpec,
    pub alternative: GaussianSpec,
}

impl GaussianPair {
    pub fn new(nominal: GaussianSpec, alternative: GaussianSpec) -> Result<Self> {
        if nominal.dim() != alternative.dim() {
            return Err(Error::Dimension { expected: nominal.dim(), got: alternative.dim() });
        }
        Ok(GaussianPair { nominal, alternative })
    }

    /// Bayes error under equal priors. Needs equal variance scales.
    pub fn bayes_error(&self) -> Result<f64> {
        if self.nominal.variance_scale != self.alternative.variance_scale {
            return Err(Error::Param("closed-form Bayes error needs equal covariances".into()));
        }
        let d2: f64 = self.nominal.mean.iter().zip(&self.alternative.mean).map(|(a, b)| (a - b) * (a - b)).sum();
        let half = d2.sqrt() / (2.0 * self.nominal.variance_scale.sqrt());
        Ok(0.5 * libm::erfc(half / core::f64::consts::SQRT_2))
    }
}

impl LogRatio for GaussianPair {
    fn dim(&self) -> usize {
        self.nominal.dim()
    }

    /// Sum of per-coordinate terms, so equal specs give exactly 0.
    fn log_lr(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: x.len() });
        }
        let (s0, s1) = (self.nominal.variance_scale, self.alternative.variance_scale);
        let half_log = 0.5 * (s0 / s1).ln();
        Ok(x
            .iter()
            .zip(self.nominal.mean.iter().zip(&self.alternative.mean))
            .map(|(&v, (&m0, &m1))| half_log - (v - m1) * (v - m1) / (2.0 * s1) + (v - m0) * (v - m0) / (2.0 * s0))
            .sum())
    }
}

/// Exact `log f1(x)/f0(x)` for an isotropic Gaussian pair.
pub fn optimum_log_lr(pair: &GaussianPair, x: &[f64]) -> Result<f64> {
    pair.log_lr(x)
}

/// Exact conditional log-LR `log f1(x_t | x_{t-1}) / f0(x_t | x_{t-1})`.
pub fn optimum_conditional_log_lr(nominal: MarkovSpec, alternative: MarkovSpec, x: f64, prev: f64) -> f64 {
    alternative.conditional_log_density(x, prev) - nominal.conditional_log_density(x, prev)
}

fn ml_fit(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    if !(var > 0.0) {
        return Err(Error::DegenerateVariance);
    }
    Ok((mean, var))
}

fn gaussian_log_lik(xs: &[f64], mean: f64, var: f64) -> f64 {
    let n = xs.len() as f64;
    -0.5 * n * (2.0 * core::f64::consts::PI * var).ln() - xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (2.0 * var)
}

/// `log` of the GLRT against a known scalar Gaussian nominal, with the ML
/// mean and variance of the block in the numerator.
pub fn glrt1_statistic(nominal: &GaussianSpec, block: &[f64]) -> Result<f64> {
    if nominal.dim() != 1 {
        return Err(Error::Dimension { expected: 1, got: nominal.dim() });
    }
    if block.len() < 2 {
        return Err(Error::InsufficientData { windows: block.len() });
    }
    let (m, v) = ml_fit(block)?;
    Ok(gaussian_log_lik(block, m, v) - gaussian_log_lik(block, nominal.mean[0], nominal.variance_scale))
}

/// GLRT with the nominal replaced by its ML fit on `nominal_data`.
pub fn glrt2_statistic(nominal_data: &[f64], block: &[f64]) -> Result<f64> {
    let (m0, v0) = ml_fit(nominal_data)?;
    glrt1_statistic(&GaussianSpec { mean: vec![m0], variance_scale: v0 }, block)
}

/// Stopping times (in increments after the `k` history samples) of one CUSUM
/// trajectory for each of the ascending `thresholds`. Thresholds not reached
/// by `horizon` are censored at `horizon`, flagged by `None`.
pub fn cusum_trial<S: IncrementSource + ?Sized>(
    src: &S,
    spec: MarkovSpec,
    thresholds: &[f64],
    horizon: usize,
    rng: &mut rng::StreamRng,
) -> Result<Vec<Option<usize>>> {
    let k = src.order();
    let mut out = vec![None; thresholds.len()];
    // newest first; the first k samples are history, the initial state is
    // drawn standard normal
    let mut window = vec![0.0; k + 1];
    let mut prev = rng::normal(rng);
    if k > 0 {
        window[k - 1] = prev;
        for i in (0..k - 1).rev() {
            prev = spec.conditional_mean(prev) + rng::normal(rng);
            window[i] = prev;
        }
    }
    let mut state = CusumState::new(f64::INFINITY, k);
    let mut next = 0;
    for step in 1..=horizon {
        prev = spec.conditional_mean(prev) + rng::normal(rng);
        window.copy_within(0..k, 1);
        window[0] = prev;
        state.advance(src.increment(&window)?)?;
        while next < thresholds.len() && state.s_hat >= thresholds[next] {
            out[next] = Some(step);
            next += 1;
        }
        if next == thresholds.len() {
            break;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayPoint {
    pub threshold: f64,
    pub false_alarm_period: f64,
    pub detection_delay: f64,
    pub censored_false_alarms: usize,
    pub censored_delays: usize,
}

/// Average detection delay against average false-alarm period, one point per
/// threshold.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DelayCurve {
    pub points: Vec<DelayPoint>,
}

impl DelayCurve {
    /// Averages per-trial stopping times; censored trials count as `horizon`.
    pub fn aggregate(
        thresholds: &[f64],
        nominal: &[Vec<Option<usize>>],
        alternative: &[Vec<Option<usize>>],
        horizon: usize,
    ) -> Self {
        let mean = |runs: &[Vec<Option<usize>>], i: usize| {
            let mut total = 0u64;
            let mut censored = 0;
            for r in runs {
                match r[i] {
                    Some(t) => total += t as u64,
                    None => {
                        total += horizon as u64;
                        censored += 1;
                    }
                }
            }
            (total as f64 / runs.len().max(1) as f64, censored)
        };
        let points = thresholds
            .iter()
            .enumerate()
            .map(|(i, &threshold)| {
                let (fa, cf) = mean(nominal, i);
                let (dd, cd) = mean(alternative, i);
                DelayPoint {
                    threshold,
                    false_alarm_period: fa,
                    detection_delay: dd,
                    censored_false_alarms: cf,
                    censored_delays: cd,
                }
            })
            .collect();
        DelayCurve { points }
    }

    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| {
            w[1].false_alarm_period >= w[0].false_alarm_period && w[1].detection_delay >= w[0].detection_delay
        })
    }

    /// Delay at false-alarm period `period`, linear in `log period`. `None`
    /// outside the sampled range.
    pub fn delay_at_period(&self, period: f64) -> Option<f64> {
        let lp = period.ln();
        self.points.windows(2).find_map(|w| {
            let (a, b) = (w[0].false_alarm_period.ln(), w[1].false_alarm_period.ln());
            if a <= lp && lp <= b {
                if b == a {
                    return Some(w[0].detection_delay);
                }
                let f = (lp - a) / (b - a);
                Some(w[0].detection_delay + f * (w[1].detection_delay - w[0].detection_delay))
            } else {
                None
            }
        })
    }
}

/// CUSUM Monte Carlo: false-alarm periods under `spec0`, delays under `spec1`
/// with the change at time 0. Trial `i` draws from streams `2i` and `2i + 1` of
/// `seed`, so trials may be run in any order or in parallel via [`cusum_trial`].
pub fn cusum_monte_carlo<S: IncrementSource + ?Sized>(
    src: &S,
    spec0: MarkovSpec,
    spec1: MarkovSpec,
    thresholds: &[f64],
    trials: usize,
    horizon: usize,
    seed: u64,
) -> Result<DelayCurve> {
    check_thresholds(thresholds)?;
    if trials == 0 {
        return Err(Error::Param("trials must be at least 1".into()));
    }
    let mut nominal = Vec::with_capacity(trials);
    let mut alternative = Vec::with_capacity(trials);
    for i in 0..trials as u64 {
        nominal.push(cusum_trial(src, spec0, thresholds, horizon, &mut rng::stream(seed, 2 * i))?);
        alternative.push(cusum_trial(src, spec1, thresholds, horizon, &mut rng::stream(seed, 2 * i + 1))?);
    }
    Ok(DelayCurve::aggregate(thresholds, &nominal, &alternative, horizon))
}

pub fn check_thresholds(thresholds: &[f64]) -> Result<()> {
    if thresholds.is_empty() {
        return Err(Error::EmptyInput);
    }
    if thresholds.windows(2).any(|w| !(w[0] < w[1])) || thresholds.iter().any(|t| !t.is_finite()) {
        return Err(Error::Param("thresholds must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// Fraction of items whose sign-of-score decision (`score >= 0` means
/// `positive_label`) disagrees with the label.
pub fn classification_error(
    score: impl Fn(&[f64]) -> Result<f64>,
    set: &LabeledImageSet,
    positive_label: u8,
) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut wrong = 0usize;
    for (x, &l) in set.images.rows().zip(&set.labels) {
        if (score(x)? >= 0.0) != (l == positive_label) {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / set.len() as f64)
}

/// Equal-prior error `(P(score >= 0 | neg) + P(score < 0 | pos)) / 2`.
pub fn balanced_error(score: impl Fn(&[f64]) -> Result<f64>, negatives: &Samples, positives: &Samples) -> Result<f64> {
    if negatives.is_empty() || positives.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut fa = 0usize;
    for x in negatives.rows() {
        if score(x)? >= 0.0 {
            fa += 1;
        }
    }
    let mut miss = 0usize;
    for x in positives.rows() {
        if score(x)? < 0.0 {
            miss += 1;
        }
    }
    Ok(0.5 * (fa as f64 / negatives.len() as f64 + miss as f64 / positives.len() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_and_identical_roc() {
        assert_eq!(roc(&[0.0, 0.0], &[1.0, 1.0]).unwrap().auc, 1.0);
        let s = [0.3, -1.0, 2.0, 0.3];
        let r = roc(&s, &s).unwrap();
        assert!((r.auc - 0.5).abs() < 1e-15);
        assert_eq!(r.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(r.points.last(), Some(&(1.0, 1.0)));
        assert_eq!(roc(&[], &[1.0]), Err(Error::EmptyInput));
    }

    #[test]
    fn detection_interpolation() {
        let r = roc(&[0.0, 1.0], &[0.5, 2.0]).unwrap();
        // thresholds 2, 1, 0.5, 0
        assert_eq!(r.points, [(0.0, 0.0), (0.0, 0.5), (0.5, 0.5), (0.5, 1.0), (1.0, 1.0)]);
        assert_eq!(r.detection_at(0.0), 0.5);
        assert_eq!(r.detection_at(0.25), 0.5);
        assert_eq!(r.detection_at(0.5), 1.0);
    }

    #[test]
    fn gaussian_log_lr_values() {
        let p = GaussianPair::new(GaussianSpec::standard(1), GaussianSpec::new(vec![0.4], 1.2).unwrap()).unwrap();
        let v = optimum_log_lr(&p, &[0.4]).unwrap();
        let expected = -0.5 * 1.2f64.ln() + 0.08;
        assert!((v - expected).abs() < 1e-15);
        assert!((v - (-0.0112)).abs() < 5e-5);
        let same = GaussianPair::new(GaussianSpec::standard(3), GaussianSpec::standard(3)).unwrap();
        assert_eq!(same.log_lr(&[0.3, -2.0, 5.0]).unwrap(), 0.0);
    }

    #[test]
    fn glrt_hand_values() {
        let nominal = GaussianSpec::standard(1);
        assert!((glrt1_statistic(&nominal, &[0.0, 2.0]).unwrap() - 1.0).abs() < 1e-14);
        assert!(glrt1_statistic(&nominal, &[-1.0, 1.0]).unwrap().abs() < 1e-14);
        assert_eq!(glrt1_statistic(&nominal, &[3.0, 3.0]), Err(Error::DegenerateVariance));
        assert!(glrt2_statistic(&[0.5, 1.7, -0.2], &[0.5, 1.7, -0.2]).unwrap().abs() < 1e-14);
        // nominal fit (1, 1) against block {1, 3}: fit (2, 1)
        assert!((glrt2_statistic(&[0.0, 2.0], &[1.0, 3.0]).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(glrt2_statistic(&[1.0, 1.0], &[0.0, 2.0]), Err(Error::DegenerateVariance));
    }

    struct Constant(f64);

    impl IncrementSource for Constant {
        fn order(&self) -> usize {
            1
        }

        fn increment(&self, _: &[f64]) -> Result<f64> {
            Ok(self.0)
        }
    }

    #[test]
    fn deterministic_ramps() {
        let up = cusum_monte_carlo(&Constant(1.0), MarkovSpec::IidStandardNormal, MarkovSpec::SqrtFeedback, &[5.0], 4, 100, 1)
            .unwrap();
        assert_eq!(up.points[0].detection_delay, 5.0);
        let down =
            cusum_monte_carlo(&Constant(-1.0), MarkovSpec::IidStandardNormal, MarkovSpec::SqrtFeedback, &[5.0], 4, 50, 1)
                .unwrap();
        assert_eq!(down.points[0].censored_false_alarms, 4);
        assert_eq!(down.points[0].false_alarm_period, 50.0);
    }

    #[test]
    fn threshold_checks() {
        assert!(check_thresholds(&[1.0, 1.0]).is_err());
        assert!(check_thresholds(&[]).is_err());
        assert!(check_thresholds(&[1.0, 2.0]).is_ok());
    }

    #[test]
    fn classification_errors() {
        let imgs = Samples::new(1, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let set = LabeledImageSet::new(imgs, vec![9, 4, 4, 4]).unwrap();
        assert_eq!(classification_error(|_| Ok(1.0), &set, 9).unwrap(), 0.75);
        let oracle = |x: &[f64]| Ok(if x[0] < 0.15 { 1.0 } else { -1.0 });
        assert_eq!(classification_error(oracle, &set, 9).unwrap(), 0.0);
    }

    #[test]
    fn bayes_error_of_separated_means() {
        let p = GaussianPair::new(GaussianSpec::standard(1), GaussianSpec::new(vec![2.0], 1.0).unwrap()).unwrap();
        // Phi(-1)
        assert!((p.bayes_error().unwrap() - 0.15865525393145707).abs() < 1e-12);
    }
}
