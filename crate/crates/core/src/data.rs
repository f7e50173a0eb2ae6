//! Sample containers and synthetic generators.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::rng;

/// `len` samples of dimension `dim`, stored row-major.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Samples {
    dim: usize,
    data: Vec<f64>,
}

impl Samples {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() % dim != 0 {
            return Err(Error::Dimension { expected: dim.max(1), got: data.len() });
        }
        Ok(Samples { dim, data })
    }

    /// One-dimensional samples.
    pub fn scalars(values: Vec<f64>) -> Self {
        Samples { dim: 1, data: values }
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).ok_or(Error::EmptyDataset)?;
        let mut data = Vec::with_capacity(dim * rows.len());
        for r in rows {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::Dimension { expected: dim, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Samples::new(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim.max(1))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn push(&mut self, row: &[f64]) -> Result<()> {
        if self.dim == 0 {
            self.dim = row.len();
        }
        if row.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: row.len() });
        }
        self.data.extend_from_slice(row);
        Ok(())
    }

    /// Rows `range` as a new set.
    pub fn slice(&self, range: core::ops::Range<usize>) -> Samples {
        Samples { dim: self.dim, data: self.data[range.start * self.dim..range.end * self.dim].to_vec() }
    }
}

/// Isotropic Gaussian `N(mean, scale I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSpec {
    pub mean: Vec<f64>,
    pub variance_scale: f64,
}

impl GaussianSpec {
    pub fn new(mean: Vec<f64>, variance_scale: f64) -> Result<Self> {
        if mean.is_empty() {
            return Err(Error::Param("Gaussian mean must be non-empty".into()));
        }
        if !(variance_scale > 0.0 && variance_scale.is_finite()) {
            return Err(Error::Param(alloc::format!("variance scale must be positive, got {variance_scale}")));
        }
        Ok(GaussianSpec { mean, variance_scale })
    }

    pub fn standard(k: usize) -> Self {
        GaussianSpec { mean: alloc::vec![0.0; k], variance_scale: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn log_density(&self, x: &[f64]) -> f64 {
        let s = self.variance_scale;
        let q: f64 = x.iter().zip(&self.mean).map(|(a, m)| (a - m) * (a - m)).sum();
        -0.5 * self.dim() as f64 * (2.0 * core::f64::consts::PI * s).ln() - q / (2.0 * s)
    }
}

pub fn sample_gaussian(spec: &GaussianSpec, n: usize, seed: u64) -> Samples {
    sample_gaussian_with(spec, n, &mut rng::seeded(seed))
}

pub fn sample_gaussian_with(spec: &GaussianSpec, n: usize, rng: &mut rng::StreamRng) -> Samples {
    let sd = spec.variance_scale.sqrt();
    let mut data = Vec::with_capacity(n * spec.dim());
    for _ in 0..n {
        for m in &spec.mean {
            data.push(m + sd * rng::normal(rng));
        }
    }
    Samples { dim: spec.dim(), data }
}

/// Scalar Markov regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkovSpec {
    IidStandardNormal,
    /// `x_t = sign(x_{t-1}) sqrt|x_{t-1}| + w_t`.
    SqrtFeedback,
}

impl MarkovSpec {
    /// Conditional mean of `x_t` given `x_{t-1}`.
    pub fn conditional_mean(&self, prev: f64) -> f64 {
        match self {
            MarkovSpec::IidStandardNormal => 0.0,
            MarkovSpec::SqrtFeedback => prev.signum() * prev.abs().sqrt(),
        }
    }

    /// `log f(x | prev)`; unit-variance Gaussian around the conditional mean.
    pub fn conditional_log_density(&self, x: f64, prev: f64) -> f64 {
        let d = x - self.conditional_mean(prev);
        -0.5 * (2.0 * core::f64::consts::PI).ln() - 0.5 * d * d
    }
}

/// Series of `length` values starting at `x0` (element 0). `x0 = None` draws it
/// standard normal.
pub fn sample_markov(spec: MarkovSpec, length: usize, seed: u64, x0: Option<f64>) -> Vec<f64> {
    let mut rng = rng::seeded(seed);
    sample_markov_with(spec, length, x0, || rng::normal(&mut rng))
}

/// As [`sample_markov`] with an explicit innovation source.
pub fn sample_markov_with(
    spec: MarkovSpec,
    length: usize,
    x0: Option<f64>,
    mut noise: impl FnMut() -> f64,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(length);
    if length == 0 {
        return out;
    }
    let mut x = match x0 {
        Some(v) => v,
        None => noise(),
    };
    out.push(x);
    while out.len() < length {
        x = spec.conditional_mean(x) + noise();
        out.push(x);
    }
    out
}

/// Images with labels, pixels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledImageSet {
    pub images: Samples,
    pub labels: Vec<u8>,
}

impl LabeledImageSet {
    pub fn new(images: Samples, labels: Vec<u8>) -> Result<Self> {
        if images.len() != labels.len() {
            return Err(Error::Dimension { expected: images.len(), got: labels.len() });
        }
        if images.as_slice().iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Param("pixel values must lie in [0, 1]".into()));
        }
        Ok(LabeledImageSet { images, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Images carrying `label`.
    pub fn class(&self, label: u8) -> Samples {
        let mut out = Samples { dim: self.images.dim(), data: Vec::new() };
        for (row, &l) in self.images.rows().zip(&self.labels) {
            if l == label {
                out.data.extend_from_slice(row);
            }
        }
        out
    }

    pub fn count(&self, label: u8) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }
}
