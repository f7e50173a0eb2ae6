//! Trained networks as estimators of a transformed likelihood ratio.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::data::Samples;
use crate::error::{Error, Result};
use crate::loss::{Interval, Preset};
use crate::network::{Mlp2, OutputNonlinearity};
use crate::trainer::TrainConfig;

/// A log-likelihood-ratio map. Implemented by trained estimators and by exact
/// densities, so the downstream arithmetic can be checked against oracles.
pub trait LogRatio {
    fn dim(&self) -> usize;
    fn log_lr(&self, x: &[f64]) -> Result<f64>;
}

impl<F: Fn(&[f64]) -> f64> LogRatio for (usize, F) {
    fn dim(&self) -> usize {
        self.0
    }

    fn log_lr(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.0 {
            return Err(Error::Dimension { expected: self.0, got: x.len() });
        }
        Ok((self.1)(x))
    }
}

/// Which transform of the likelihood ratio `r` the network output represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    LikelihoodRatio,
    LogLikelihoodRatio,
    /// `r / (1 + r)`.
    Posterior,
    /// A smoothed or hard sign of `log r`.
    SignLogLr,
}

impl Target {
    pub fn for_preset(p: Preset) -> Target {
        match p {
            Preset::A1 | Preset::A2 | Preset::A3 => Target::LikelihoodRatio,
            Preset::B1 | Preset::B2 | Preset::B3 | Preset::Exponential => Target::LogLikelihoodRatio,
            Preset::C1 | Preset::C2 => Target::Posterior,
            Preset::D1 | Preset::D1Linear | Preset::D3 | Preset::D3Hinge => Target::SignLogLr,
        }
    }

    pub fn natural_range(&self) -> Interval {
        match self {
            Target::LikelihoodRatio => Interval::POSITIVE,
            Target::LogLikelihoodRatio => Interval::REAL,
            Target::Posterior => Interval::UNIT,
            Target::SignLogLr => Interval::SYMMETRIC_UNIT,
        }
    }

    /// Whether outputs of `g0` stay inside this target's range. Sign targets
    /// only use the sign of the output, so any `g0` is accepted.
    pub fn accepts(&self, g0: &OutputNonlinearity) -> bool {
        let r = g0.range();
        match self {
            Target::LikelihoodRatio => r.lo >= 0.0 && r.hi == f64::INFINITY,
            Target::LogLikelihoodRatio => r.is_real_line(),
            Target::Posterior => r.lo >= 0.0 && r.hi <= 1.0,
            Target::SignLogLr => true,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Target::LikelihoodRatio => "likelihood_ratio",
            Target::LogLikelihoodRatio => "log_likelihood_ratio",
            Target::Posterior => "posterior",
            Target::SignLogLr => "sign_log_lr",
        }
    }

    pub fn parse(s: &str) -> Result<Target> {
        [Target::LikelihoodRatio, Target::LogLikelihoodRatio, Target::Posterior, Target::SignLogLr]
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Param(alloc::format!("unknown estimator target `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub preset: String,
    pub config: TrainConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioEstimator {
    pub net: Mlp2,
    pub target: Target,
    pub provenance: Option<Provenance>,
}

impl RatioEstimator {
    pub fn new(net: Mlp2, target: Target, provenance: Option<Provenance>) -> Result<Self> {
        if !target.accepts(&net.g0) {
            return Err(Error::Param(alloc::format!(
                "output nonlinearity {} (range {}) does not fit target {}",
                net.g0.kind(),
                net.g0.range(),
                target.as_str()
            )));
        }
        Ok(RatioEstimator { net, target, provenance })
    }

    pub fn output(&self, x: &[f64]) -> Result<f64> {
        self.net.forward(x)
    }

    /// Converts the output to `log r`. Sigmoid, exp and the lower ELU branch
    /// are inverted through the pre-output, so saturated outputs stay finite.
    pub fn to_log_lr(&self, x: &[f64]) -> Result<f64> {
        let mut cache = self.net.new_cache();
        let u = self.net.forward_cached(x, &mut cache)?;
        let v = cache.v();
        match (self.target, self.net.g0) {
            (Target::Posterior, OutputNonlinearity::Sigmoid) | (Target::LikelihoodRatio, OutputNonlinearity::Exp) => {
                Ok(v)
            }
            (Target::LikelihoodRatio, OutputNonlinearity::Elu(c)) if v <= 0.0 => Ok(c.ln() + v),
            _ => output_to_log_lr(self.target, u),
        }
    }

    /// Sum of `to_log_lr` over an i.i.d. block.
    pub fn block_log_lr(&self, block: &Samples) -> Result<f64> {
        block_log_lr(self, block)
    }

    /// `+1` when the output favours the alternative, `-1` otherwise.
    pub fn decide(&self, x: &[f64]) -> Result<i8> {
        let u = self.output(x)?;
        let centre = match self.target {
            Target::LikelihoodRatio => 1.0,
            Target::Posterior => 0.5,
            Target::LogLikelihoodRatio | Target::SignLogLr => 0.0,
        };
        Ok(if u >= centre { 1 } else { -1 })
    }
}

/// `log u`, `u`, or `logit u` depending on the target.
pub fn output_to_log_lr(target: Target, u: f64) -> Result<f64> {
    match target {
        Target::LikelihoodRatio if u > 0.0 => Ok(u.ln()),
        Target::LogLikelihoodRatio => Ok(u),
        Target::Posterior if u > 0.0 && u < 1.0 => Ok((u / (1.0 - u)).ln()),
        Target::SignLogLr => Err(Error::Sign),
        t => Err(Error::Domain { value: u, interval: alloc::format!("{}", t.natural_range()) }),
    }
}

impl LogRatio for RatioEstimator {
    fn dim(&self) -> usize {
        self.net.input_size()
    }

    fn log_lr(&self, x: &[f64]) -> Result<f64> {
        self.to_log_lr(x)
    }
}

pub fn block_log_lr<E: LogRatio + ?Sized>(est: &E, block: &Samples) -> Result<f64> {
    if block.is_empty() {
        return Err(Error::EmptyInput);
    }
    block.rows().map(|x| est.log_lr(x)).sum()
}

/// `(1/n) sum log r(X)` over samples of the alternative.
pub fn kl_estimate<E: LogRatio + ?Sized>(est: &E, data1: &Samples) -> Result<f64> {
    if data1.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(block_log_lr(est, data1)? / data1.len() as f64)
}

/// `(1/n) sum u(X_i, Y_i)` over joint samples.
pub fn mi_estimate<E: LogRatio + ?Sized>(est: &E, xs: &Samples, ys: &Samples) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if xs.len() != ys.len() {
        return Err(Error::Dimension { expected: xs.len(), got: ys.len() });
    }
    let mut buf = Vec::with_capacity(xs.dim() + ys.dim());
    let mut total = 0.0;
    for (x, y) in xs.rows().zip(ys.rows()) {
        buf.clear();
        buf.extend_from_slice(x);
        buf.extend_from_slice(y);
        total += est.log_lr(&buf)?;
    }
    Ok(total / xs.len() as f64)
}
