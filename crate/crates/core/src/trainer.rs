//! Gradient training of [`Mlp2`] on the sample costs, with elementwise
//! second-moment gradient normalization.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::data::Samples;
use crate::error::{Error, Result};
use crate::local_stat::{self, LocalSpec};
use crate::loss::LossPair;
use crate::network::Mlp2;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainMode {
    /// Every iteration uses all samples.
    FullBatch,
    /// Every iteration uses one sample from each set, cycling through
    /// reshuffled data.
    StochasticPaired,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub step_size: f64,
    pub smoothing: f64,
    pub iterations: usize,
    pub mode: TrainMode,
    pub epsilon: f64,
    pub seed: u64,
    /// The metric hook runs after every `metric_stride`-th update.
    pub metric_stride: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            step_size: 2e-4,
            smoothing: 0.99,
            iterations: 1000,
            mode: TrainMode::FullBatch,
            epsilon: 1e-8,
            seed: 0,
            metric_stride: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |m: &str| Err(Error::Param(m.into()));
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return err("step_size must be positive");
        }
        if !(0.0..1.0).contains(&self.smoothing) {
            return err("smoothing must lie in [0, 1)");
        }
        if self.iterations == 0 {
            return err("iterations must be at least 1");
        }
        if !(self.epsilon > 0.0) {
            return err("epsilon must be positive");
        }
        if self.metric_stride == 0 {
            return err("metric_stride must be at least 1");
        }
        Ok(())
    }
}

/// Per-iteration costs, evaluated at the parameters entering each update.
/// In stochastic mode the cost is that of the sampled pair.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainTrace {
    pub costs: Vec<f64>,
    /// `(iteration, value)`, iteration counted from 1 after the update.
    pub metrics: Vec<(usize, f64)>,
}

pub type MetricHook<'a> = &'a mut dyn FnMut(&Mlp2) -> f64;

/// Elementwise normalizer `m = l m + (1 - l) g^2`, step `mu g / sqrt(m + eps)`.
#[derive(Debug, Clone)]
pub struct Normalizer {
    m: Vec<f64>,
    smoothing: f64,
    step_size: f64,
    epsilon: f64,
}

impl Normalizer {
    pub fn new(len: usize, cfg: &TrainConfig) -> Self {
        Normalizer { m: vec![0.0; len], smoothing: cfg.smoothing, step_size: cfg.step_size, epsilon: cfg.epsilon }
    }

    /// Replaces `grad` in place by the step to subtract.
    pub fn step(&mut self, grad: &mut [f64]) {
        let l = self.smoothing;
        for (g, m) in grad.iter_mut().zip(self.m.iter_mut()) {
            *m = l * *m + (1.0 - l) * *g * *g;
            *g = self.step_size * *g / (*m + self.epsilon).sqrt();
        }
    }

    pub fn second_moment(&self) -> &[f64] {
        &self.m
    }
}

/// Shuffled index stream, reshuffled at every pass.
struct Cycler {
    perm: Vec<usize>,
    pos: usize,
    rng: rng::StreamRng,
}

impl Cycler {
    fn new(n: usize, seed: u64, stream: u64) -> Self {
        let mut c = Cycler { perm: (0..n).collect(), pos: 0, rng: rng::stream(seed, stream) };
        rng::shuffle_indices(&mut c.rng, &mut c.perm);
        c
    }

    fn next(&mut self) -> usize {
        if self.pos == self.perm.len() {
            rng::shuffle_indices(&mut self.rng, &mut self.perm);
            self.pos = 0;
        }
        self.pos += 1;
        self.perm[self.pos - 1]
    }
}

/// The update loop. `grad` fills the gradient at the current parameters and
/// returns the cost.
fn optimize(
    net: &Mlp2,
    cfg: &TrainConfig,
    mut hook: Option<MetricHook<'_>>,
    mut grad: impl FnMut(&Mlp2, &mut [f64]) -> Result<f64>,
) -> Result<(Mlp2, TrainTrace)> {
    cfg.validate()?;
    let mut net = net.clone();
    let mut norm = Normalizer::new(net.param_count(), cfg);
    let mut g = vec![0.0; net.param_count()];
    let mut trace = TrainTrace { costs: Vec::with_capacity(cfg.iterations), metrics: Vec::new() };
    for t in 0..cfg.iterations {
        g.iter_mut().for_each(|v| *v = 0.0);
        let cost = grad(&net, &mut g)?;
        if !cost.is_finite() || g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { iteration: t });
        }
        trace.costs.push(cost);
        norm.step(&mut g);
        net.apply_step(&g);
        if let Some(h) = hook.as_mut() {
            if (t + 1) % cfg.metric_stride == 0 {
                trace.metrics.push((t + 1, h(&net)));
            }
        }
    }
    Ok((net, trace))
}

fn check_set(net: &Mlp2, data: &Samples) -> Result<()> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if data.dim() != net.input_size() {
        return Err(Error::Dimension { expected: net.input_size(), got: data.dim() });
    }
    Ok(())
}

/// Minimizes `mean phi(u(X0)) + mean psi(u(X1))`.
pub fn train_two_sample(
    net: &Mlp2,
    pair: &LossPair,
    data0: &Samples,
    data1: &Samples,
    cfg: &TrainConfig,
    hook: Option<MetricHook<'_>>,
) -> Result<(Mlp2, TrainTrace)> {
    check_set(net, data0)?;
    check_set(net, data1)?;
    let mut cache = net.new_cache();
    match cfg.mode {
        TrainMode::FullBatch => {
            let (w0, w1) = (1.0 / data0.len() as f64, 1.0 / data1.len() as f64);
            optimize(net, cfg, hook, |net, g| {
                let mut cost = 0.0;
                for x in data0.rows() {
                    let u = net.forward_cached(x, &mut cache)?;
                    cost += w0 * pair.phi_value(u);
                    net.accumulate_grad_theta(x, &cache, w0 * pair.phi_prime(u), g);
                }
                for x in data1.rows() {
                    let u = net.forward_cached(x, &mut cache)?;
                    cost += w1 * pair.psi_value(u);
                    net.accumulate_grad_theta(x, &cache, w1 * pair.psi_prime(u), g);
                }
                Ok(cost)
            })
        }
        TrainMode::StochasticPaired => {
            let mut c0 = Cycler::new(data0.len(), cfg.seed, 0);
            let mut c1 = Cycler::new(data1.len(), cfg.seed, 1);
            optimize(net, cfg, hook, |net, g| {
                let x0 = data0.row(c0.next());
                let u0 = net.forward_cached(x0, &mut cache)?;
                net.accumulate_grad_theta(x0, &cache, pair.phi_prime(u0), g);
                let x1 = data1.row(c1.next());
                let u1 = net.forward_cached(x1, &mut cache)?;
                net.accumulate_grad_theta(x1, &cache, pair.psi_prime(u1), g);
                Ok(pair.phi_value(u0) + pair.psi_value(u1))
            })
        }
    }
}

/// Minimizes `(1/n^2) sum_ij phi(u(X_i, Y_j)) + (1/n) sum_i psi(u(X_i, Y_i))`.
///
/// Full batch evaluates the whole double sum, `O(n^2)` forward passes per
/// iteration. Stochastic mode pairs each joint sample with one product sample
/// `(X_i, Y_j)`, `j` drawn from an independent shuffle.
pub fn train_mutual_information(
    net: &Mlp2,
    pair: &LossPair,
    xs: &Samples,
    ys: &Samples,
    cfg: &TrainConfig,
    hook: Option<MetricHook<'_>>,
) -> Result<(Mlp2, TrainTrace)> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if xs.len() != ys.len() {
        return Err(Error::Dimension { expected: xs.len(), got: ys.len() });
    }
    let (dx, dy) = (xs.dim(), ys.dim());
    if dx + dy != net.input_size() {
        return Err(Error::Dimension { expected: net.input_size(), got: dx + dy });
    }
    let n = xs.len();
    let mut cache = net.new_cache();
    let mut buf = vec![0.0; dx + dy];
    let join = move |i: usize, j: usize, buf: &mut Vec<f64>| {
        buf[..dx].copy_from_slice(xs.row(i));
        buf[dx..].copy_from_slice(ys.row(j));
    };
    match cfg.mode {
        TrainMode::FullBatch => {
            let (w2, w1) = (1.0 / (n * n) as f64, 1.0 / n as f64);
            optimize(net, cfg, hook, |net, g| {
                let mut cost = 0.0;
                for j in 0..n {
                    for i in 0..n {
                        join(i, j, &mut buf);
                        let u = net.forward_cached(&buf, &mut cache)?;
                        cost += w2 * pair.phi_value(u);
                        net.accumulate_grad_theta(&buf, &cache, w2 * pair.phi_prime(u), g);
                    }
                }
                for i in 0..n {
                    join(i, i, &mut buf);
                    let u = net.forward_cached(&buf, &mut cache)?;
                    cost += w1 * pair.psi_value(u);
                    net.accumulate_grad_theta(&buf, &cache, w1 * pair.psi_prime(u), g);
                }
                Ok(cost)
            })
        }
        TrainMode::StochasticPaired => {
            let mut joint = Cycler::new(n, cfg.seed, 0);
            let mut partner = Cycler::new(n, cfg.seed, 1);
            optimize(net, cfg, hook, |net, g| {
                let i = joint.next();
                join(i, partner.next(), &mut buf);
                let u0 = net.forward_cached(&buf, &mut cache)?;
                net.accumulate_grad_theta(&buf, &cache, pair.phi_prime(u0), g);
                join(i, i, &mut buf);
                let u1 = net.forward_cached(&buf, &mut cache)?;
                net.accumulate_grad_theta(&buf, &cache, pair.psi_prime(u1), g);
                Ok(pair.phi_value(u0) + pair.psi_value(u1))
            })
        }
    }
}

/// Minimizes `mean Omega(X)` for a local statistic. Stochastic mode uses one
/// sample per iteration.
pub fn train_local(
    net: &Mlp2,
    pair: &LossPair,
    spec: &LocalSpec,
    data: &Samples,
    cfg: &TrainConfig,
    hook: Option<MetricHook<'_>>,
) -> Result<(Mlp2, TrainTrace)> {
    local_stat::check_pair(pair)?;
    check_set(net, data)?;
    if spec.k != net.input_size() {
        return Err(Error::Dimension { expected: net.input_size(), got: spec.k });
    }
    let mut cache = net.new_cache();
    let mut p = vec![0.0; spec.k];
    match cfg.mode {
        TrainMode::FullBatch => {
            let w = 1.0 / data.len() as f64;
            optimize(net, cfg, hook, |net, g| {
                let mut cost = 0.0;
                for x in data.rows() {
                    cost += w * local_stat::accumulate_omega_grad(spec, pair, net, x, &mut cache, &mut p, w, g)?;
                }
                Ok(cost)
            })
        }
        TrainMode::StochasticPaired => {
            let mut c = Cycler::new(data.len(), cfg.seed, 0);
            optimize(net, cfg, hook, |net, g| {
                let x = data.row(c.next());
                local_stat::accumulate_omega_grad(spec, pair, net, x, &mut cache, &mut p, 1.0, g)
            })
        }
    }
}
