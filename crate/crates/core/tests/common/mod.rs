#![allow(dead_code)]

use ratio_core::rng::{self, StreamRng};
use ratio_core::{HiddenActivation, Mlp2, OutputNonlinearity};

pub const OUTPUTS: [OutputNonlinearity; 7] = [
    OutputNonlinearity::Identity,
    OutputNonlinearity::Relu,
    OutputNonlinearity::Elu(0.01),
    OutputNonlinearity::Sigmoid,
    OutputNonlinearity::Tanh,
    OutputNonlinearity::BoundedRational(2.0),
    OutputNonlinearity::Exp,
];

pub const HIDDEN: [HiddenActivation; 3] = [HiddenActivation::Relu, HiddenActivation::Softplus, HiddenActivation::Tanh];

/// Net with every parameter, offsets included, drawn uniform on `[-1, 1]`.
pub fn random_net(k: usize, n: usize, g0: OutputNonlinearity, g1: HiddenActivation, rng: &mut StreamRng) -> Mlp2 {
    let mut net = Mlp2::zeros(k, n, g0).unwrap().with_hidden(g1);
    let p: Vec<f64> = (0..net.param_count()).map(|_| rng::uniform(rng, -1.0, 1.0)).collect();
    net.set_params(&p).unwrap();
    net
}

pub fn random_point(k: usize, rng: &mut StreamRng) -> Vec<f64> {
    (0..k).map(|_| rng::uniform(rng, -2.0, 2.0)).collect()
}

/// Away from hidden kinks and from output kinks of ReLU and ELU.
pub fn well_inside(net: &Mlp2, x: &[f64]) -> bool {
    if net.kink_margin(x).unwrap() < 1e-3 {
        return false;
    }
    let mut cache = net.new_cache();
    net.forward_cached(x, &mut cache).unwrap();
    match net.g0 {
        OutputNonlinearity::Relu | OutputNonlinearity::Elu(_) | OutputNonlinearity::BoundedRational(_) => {
            cache.v().abs() > 1e-3
        }
        _ => true,
    }
}

pub fn central(mut f: impl FnMut(f64) -> f64, x: f64, h: f64) -> f64 {
    f(x + h) / (2.0 * h) - f(x - h) / (2.0 * h)
}

/// `|a - b| <= rel * max(|a|, |b|) + abs`.
pub fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + abs
}

/// Central differences of `f` with respect to each parameter of `net`.
pub fn fd_params(net: &Mlp2, h: f64, f: impl Fn(&Mlp2) -> f64) -> Vec<f64> {
    let p = net.params();
    let mut probe = net.clone();
    (0..p.len())
        .map(|i| {
            central(
                |t| {
                    let mut q = p.clone();
                    q[i] = t;
                    probe.set_params(&q).unwrap();
                    f(&probe)
                },
                p[i],
                h,
            )
        })
        .collect()
}
