//! Two-class image classification with every method's test error traced
//! during training. Data come from MNIST IDX files or from a Gaussian image
//! surrogate whose optimum error is known.

use std::path::Path;

use ratio_core::data::{sample_gaussian_with, GaussianSpec, LabeledImageSet, Samples};
use ratio_core::eval::{balanced_error, classification_error, GaussianPair};
use ratio_core::{rng, RatioEstimator};

use super::{train_methods, write_methods, TrainedMethod};
use crate::config::{ClassifyConfig, ExperimentConfig, ImageSource};
use crate::error::Result;
use crate::{formats, idx};

pub const PIXELS: usize = 784;

#[derive(Debug, Clone)]
pub struct ClassifyData {
    pub train0: Samples,
    pub train1: Samples,
    pub test0: Samples,
    pub test1: Samples,
    /// Exact optimum error, when known.
    pub optimum_error: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ClassifyResult {
    pub methods: Vec<TrainedMethod>,
    pub test_errors: Vec<f64>,
    pub optimum_error: Option<f64>,
}

/// Class means of the surrogate: a template with 20% of pixels at 0.8, and a
/// copy with `toggles` pixels moved by `delta` towards the other level.
pub fn surrogate_means(c: &ClassifyConfig) -> (Vec<f64>, Vec<f64>) {
    let mut r = rng::seeded(c.template_seed);
    let m0: Vec<f64> = (0..PIXELS).map(|_| if rng::uniform(&mut r, 0.0, 1.0) < 0.2 { 0.8 } else { 0.0 }).collect();
    let mut m1 = m0.clone();
    for i in 0..c.surrogate_toggles {
        let p = (i * 97 + 13) % PIXELS;
        m1[p] = if m0[p] > 0.0 { m0[p] - c.surrogate_delta } else { m0[p] + c.surrogate_delta };
    }
    (m0, m1)
}

pub fn surrogate_pair(c: &ClassifyConfig) -> Result<GaussianPair> {
    let (m0, m1) = surrogate_means(c);
    let v = c.surrogate_sigma * c.surrogate_sigma;
    Ok(GaussianPair::new(GaussianSpec::new(m0, v)?, GaussianSpec::new(m1, v)?)?)
}

pub fn load_data(c: &ClassifyConfig, seed: u64) -> Result<ClassifyData> {
    match c.source {
        ImageSource::Surrogate => {
            let pair = surrogate_pair(c)?;
            let draw = |spec: &GaussianSpec, n: usize, s: u64| sample_gaussian_with(spec, n, &mut rng::stream(seed, s));
            Ok(ClassifyData {
                train0: draw(&pair.nominal, c.train_per_class, 0),
                train1: draw(&pair.alternative, c.train_per_class, 1),
                test0: draw(&pair.nominal, c.test_per_class, 2),
                test1: draw(&pair.alternative, c.test_per_class, 3),
                optimum_error: Some(pair.bayes_error()?),
            })
        }
        ImageSource::Mnist => {
            let dir = c.mnist_dir.clone().unwrap_or_default();
            let keep = [c.negative_label, c.positive_label];
            let train = idx::load_mnist(
                &dir.join("train-images-idx3-ubyte"),
                &dir.join("train-labels-idx1-ubyte"),
                &keep,
                Some(c.train_per_class),
            )?;
            let test =
                idx::load_mnist(&dir.join("t10k-images-idx3-ubyte"), &dir.join("t10k-labels-idx1-ubyte"), &keep, None)?;
            Ok(ClassifyData {
                train0: train.class(c.negative_label),
                train1: train.class(c.positive_label),
                test0: test.class(c.negative_label),
                test1: test.class(c.positive_label),
                optimum_error: None,
            })
        }
    }
}

/// Fraction of misclassified test images, pooled over both classes.
pub fn test_error(est: &RatioEstimator, test0: &Samples, test1: &Samples) -> Result<f64> {
    let score = |x: &[f64]| est.decide(x).map(f64::from);
    if test0.len() == test1.len() {
        return Ok(balanced_error(score, test0, test1)?);
    }
    let mut images = test0.clone();
    for x in test1.rows() {
        images.push(x)?;
    }
    let labels = std::iter::repeat(0).take(test0.len()).chain(std::iter::repeat(1).take(test1.len())).collect();
    Ok(classification_error(score, &LabeledImageSet { images, labels }, 1)?)
}

pub fn run_on(cfg: &ExperimentConfig, data: &ClassifyData, seed: u64) -> Result<ClassifyResult> {
    let metric = |est: &RatioEstimator| test_error(est, &data.test0, &data.test1).unwrap_or(f64::NAN);
    let methods = train_methods(cfg, &data.train0, &data.train1, seed, Some(&metric))?;
    let test_errors = methods
        .iter()
        .map(|m| test_error(&m.estimator, &data.test0, &data.test1))
        .collect::<Result<_>>()?;
    Ok(ClassifyResult { methods, test_errors, optimum_error: data.optimum_error })
}

pub fn run(cfg: &ExperimentConfig, seed: u64) -> Result<ClassifyResult> {
    let c = cfg.classify.clone().unwrap_or_default();
    run_on(cfg, &load_data(&c, seed)?, seed)
}

impl ClassifyResult {
    pub fn write(&self, dir: &Path) -> Result<()> {
        write_methods(dir, &self.methods, Some("test_error"))?;
        let mut rows: Vec<Vec<String>> = self
            .methods
            .iter()
            .zip(&self.test_errors)
            .map(|(m, e)| vec![m.name.clone(), e.to_string()])
            .collect();
        if let Some(o) = self.optimum_error {
            rows.push(vec!["optimum".into(), o.to_string()]);
        }
        formats::write_rows(&dir.join("errors.csv"), &["method", "test_error"], &rows)
    }
}
