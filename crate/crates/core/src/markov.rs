//! Conditional log-likelihood ratios of order-`k` Markov data and the SPRT and
//! CUSUM recursions driven by them.
//!
//! The conditional log-LR of `x_t` given the `k` previous samples is the
//! difference of two joint log-LRs, one on `k + 1` consecutive samples and one
//! on `k`. Each is learned by its own network. Windows are ordered newest
//! first: `[x_t, x_{t-1}, ..., x_{t-k}]`.

use alloc::vec::Vec;

use crate::data::{MarkovSpec, Samples};
use crate::error::{Error, Result};
use crate::estimators::{LogRatio, RatioEstimator, Target};
use crate::loss::PresetLoss;
use crate::network::Mlp2;
use crate::trainer::{self, TrainConfig};

/// Anything producing conditional log-LR increments from windows of length
/// `order() + 1`.
pub trait IncrementSource {
    fn order(&self) -> usize;
    fn increment(&self, window: &[f64]) -> Result<f64>;
}

/// `u_{k+1}(x_t..x_{t-k}) - u_k(x_{t-1}..x_{t-k})`; for `k = 0`, `u_0 = 0`.
#[derive(Debug, Clone)]
pub struct ConditionalLr<E = RatioEstimator> {
    k: usize,
    u_k: Option<E>,
    u_k1: E,
}

impl<E: LogRatio> ConditionalLr<E> {
    pub fn new(k: usize, u_k: Option<E>, u_k1: E) -> Result<Self> {
        if u_k1.dim() != k + 1 {
            return Err(Error::Dimension { expected: k + 1, got: u_k1.dim() });
        }
        match (&u_k, k) {
            (None, 0) => {}
            (Some(u), _) if u.dim() == k && k > 0 => {}
            (Some(u), _) => return Err(Error::Dimension { expected: k, got: u.dim() }),
            (None, _) => return Err(Error::Param(alloc::format!("order {k} needs a k-sample estimator"))),
        }
        Ok(ConditionalLr { k, u_k, u_k1 })
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn u_k(&self) -> Option<&E> {
        self.u_k.as_ref()
    }

    pub fn u_k1(&self) -> &E {
        &self.u_k1
    }
}

impl<E: LogRatio> IncrementSource for ConditionalLr<E> {
    fn order(&self) -> usize {
        self.k
    }

    fn increment(&self, window: &[f64]) -> Result<f64> {
        conditional_increment(self, window)
    }
}

pub fn conditional_increment<E: LogRatio>(clr: &ConditionalLr<E>, window: &[f64]) -> Result<f64> {
    if window.len() != clr.k + 1 {
        return Err(Error::Dimension { expected: clr.k + 1, got: window.len() });
    }
    let past = match &clr.u_k {
        Some(u) => u.log_lr(&window[1..])?,
        None => 0.0,
    };
    Ok(clr.u_k1.log_lr(window)? - past)
}

/// `l_hat + increment`.
pub fn sprt_update<S: IncrementSource + ?Sized>(l_hat: f64, src: &S, window: &[f64]) -> Result<f64> {
    Ok(l_hat + src.increment(window)?)
}

/// Exact conditional log-LR of two first-order Gaussian regimes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactConditional {
    pub nominal: MarkovSpec,
    pub alternative: MarkovSpec,
}

impl IncrementSource for ExactConditional {
    fn order(&self) -> usize {
        1
    }

    fn increment(&self, window: &[f64]) -> Result<f64> {
        if window.len() != 2 {
            return Err(Error::Dimension { expected: 2, got: window.len() });
        }
        let (x, prev) = (window[0], window[1]);
        Ok(self.alternative.conditional_log_density(x, prev) - self.nominal.conditional_log_density(x, prev))
    }
}

/// Sliding windows of `size` consecutive samples, newest first:
/// `[x_t, ..., x_{t-size+1}]` for `t = size-1 .. n-1`.
pub fn windows(series: &[f64], size: usize) -> Result<Samples> {
    if size == 0 {
        return Err(Error::Param("window size must be positive".into()));
    }
    let count = (series.len() + 1).saturating_sub(size);
    let mut data = Vec::with_capacity(count * size);
    for t in size - 1..series.len() {
        data.extend((0..size).map(|i| series[t - i]));
    }
    Samples::new(size, data)
}

/// Network sizes and output used by [`fit_conditional`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalNets {
    pub hidden_k: usize,
    pub hidden_k1: usize,
    pub init_seed: u64,
}

/// Trains `u_k` and `u_{k+1}` on sliding windows of the two series. The preset
/// must estimate the log-LR.
pub fn fit_conditional(
    train0: &[f64],
    train1: &[f64],
    k: usize,
    loss: &PresetLoss,
    nets: ConditionalNets,
    cfg: &TrainConfig,
) -> Result<ConditionalLr> {
    if Target::for_preset(loss.preset) != Target::LogLikelihoodRatio {
        return Err(Error::Param(alloc::format!("{} does not estimate the log-likelihood ratio", loss.preset)));
    }
    let fit = |size: usize, hidden: usize, seed: u64| -> Result<RatioEstimator> {
        let w0 = windows(train0, size)?;
        let w1 = windows(train1, size)?;
        let fewest = w0.len().min(w1.len());
        if fewest < 2 {
            return Err(Error::InsufficientData { windows: fewest });
        }
        let net = Mlp2::init(size, hidden, loss.output, seed)?;
        let (net, _) = trainer::train_two_sample(&net, &loss.pair, &w0, &w1, cfg, None)?;
        RatioEstimator::new(net, Target::LogLikelihoodRatio, None)
    };
    let u_k1 = fit(k + 1, nets.hidden_k1, nets.init_seed)?;
    let u_k = if k == 0 { None } else { Some(fit(k, nets.hidden_k, nets.init_seed.wrapping_add(1))?) };
    ConditionalLr::new(k, u_k, u_k1)
}

/// Running CUSUM statistic `S_t = max(S_{t-1}, 0) + increment`, `S_k = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CusumState {
    pub s_hat: f64,
    pub threshold: f64,
    pub stopped_at: Option<usize>,
    pub t: usize,
}

impl CusumState {
    /// Fresh state at time `k`, the first `k` samples being consumed as history.
    pub fn new(threshold: f64, k: usize) -> Self {
        CusumState { s_hat: 0.0, threshold, stopped_at: None, t: k }
    }

    pub fn is_stopped(&self) -> bool {
        self.stopped_at.is_some()
    }

    /// Advances by one increment.
    pub fn advance(&mut self, increment: f64) -> Result<()> {
        if let Some(t) = self.stopped_at {
            return Err(Error::Stopped(t));
        }
        self.s_hat = self.s_hat.max(0.0) + increment;
        self.t += 1;
        if self.s_hat >= self.threshold {
            self.stopped_at = Some(self.t);
        }
        Ok(())
    }
}

pub fn cusum_step<S: IncrementSource + ?Sized>(state: CusumState, src: &S, window: &[f64]) -> Result<CusumState> {
    if let Some(t) = state.stopped_at {
        return Err(Error::Stopped(t));
    }
    let mut next = state;
    next.advance(src.increment(window)?)?;
    Ok(next)
}
