//! Self-checks behind `verify-losses` and `gradcheck`.

use ratio_core::loss::{catalog, check_convexity, preset, verify_catalog, PresetReport};
use ratio_core::rng::{self, StreamRng};
use ratio_core::{HiddenActivation, Mlp2, OutputNonlinearity, Preset, PresetParams};

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

/// Property suite over the whole catalog.
pub fn verify_losses(samples: usize, seed: u64) -> Vec<PresetReport> {
    verify_catalog(&catalog(), samples, seed)
}

/// Convexity flags of the A1 pair on `(0, inf)` for each `alpha`.
pub fn a1_convexity(alphas: &[f64]) -> ratio_core::Result<Vec<(f64, bool)>> {
    alphas
        .iter()
        .map(|&a| {
            let p = preset(Preset::A1, PresetParams::alpha(a).positive())?;
            Ok((a, check_convexity(&p.rho, &p.omega, 2000)?))
        })
        .collect()
}

/// Worst relative finite-difference error of one gradient kind over the
/// checked configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct GradcheckRow {
    pub output: &'static str,
    pub hidden: &'static str,
    pub configs: usize,
    pub theta: f64,
    pub input: f64,
    pub mixed: f64,
}

impl GradcheckRow {
    pub fn worst(&self) -> f64 {
        self.theta.max(self.input).max(self.mixed)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-3)
}

fn random_net(k: usize, n: usize, g0: OutputNonlinearity, g1: HiddenActivation, r: &mut StreamRng) -> Mlp2 {
    let mut net = Mlp2::zeros(k, n, g0).expect("positive sizes").with_hidden(g1);
    let p: Vec<f64> = (0..net.param_count()).map(|_| rng::uniform(r, -1.0, 1.0)).collect();
    net.set_params(&p).expect("matching length");
    net
}

/// Away from hidden kinks and from the kinks of ReLU, ELU and bounded-rational outputs.
fn well_inside(net: &Mlp2, x: &[f64]) -> bool {
    if net.kink_margin(x).unwrap_or(0.0) < 1e-3 {
        return false;
    }
    let mut cache = net.new_cache();
    if net.forward_cached(x, &mut cache).is_err() {
        return false;
    }
    match net.g0 {
        OutputNonlinearity::Relu | OutputNonlinearity::Elu(_) | OutputNonlinearity::BoundedRational(_) => {
            cache.v().abs() > 1e-3
        }
        _ => true,
    }
}

fn central(mut f: impl FnMut(f64) -> f64, x: f64, h: f64) -> f64 {
    f(x + h) / (2.0 * h) - f(x - h) / (2.0 * h)
}

/// Analytic `grad_theta u`, `grad_x u` and `grad_theta (w . grad_x u)` against
/// central differences on `configs` random `k x n x 1` networks per
/// activation combination.
pub fn gradcheck(k: usize, n: usize, configs: usize, seed: u64) -> ratio_core::Result<Vec<GradcheckRow>> {
    let h = 1e-6;
    let mut rows = Vec::new();
    let mut r = rng::seeded(seed);
    for g0 in OUTPUTS {
        for g1 in HIDDEN {
            let mut row =
                GradcheckRow { output: g0.kind(), hidden: g1.kind(), configs: 0, theta: 0.0, input: 0.0, mixed: 0.0 };
            while row.configs < configs {
                let net = random_net(k, n, g0, g1, &mut r);
                let x: Vec<f64> = (0..k).map(|_| rng::uniform(&mut r, -2.0, 2.0)).collect();
                let w: Vec<f64> = (0..k).map(|_| rng::uniform(&mut r, -1.0, 1.0)).collect();
                if !well_inside(&net, &x) {
                    continue;
                }
                let p = net.params();
                let gt = net.grad_theta(&x)?;
                let gx = net.grad_input(&x)?;
                let gm = net.grad_theta_of_input_grad(&x, &w)?;
                let mut probe = net.clone();
                for i in 0..p.len() {
                    let mut at = |t: f64, f: &dyn Fn(&Mlp2) -> f64| {
                        let mut q = p.clone();
                        q[i] = t;
                        probe.set_params(&q).expect("matching length");
                        f(&probe)
                    };
                    let fd_u = central(|t| at(t, &|m| m.forward(&x).unwrap()), p[i], h);
                    let dir = |m: &Mlp2| m.grad_input(&x).unwrap().iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
                    let fd_m = central(|t| at(t, &dir), p[i], h);
                    row.theta = row.theta.max(rel(gt[i], fd_u));
                    row.mixed = row.mixed.max(rel(gm[i], fd_m));
                }
                for l in 0..k {
                    let fd = central(
                        |t| {
                            let mut y = x.clone();
                            y[l] = t;
                            net.forward(&y).unwrap()
                        },
                        x[l],
                        h,
                    );
                    row.input = row.input.max(rel(gx[l], fd));
                }
                row.configs += 1;
            }
            rows.push(row);
        }
    }
    Ok(rows)
}
