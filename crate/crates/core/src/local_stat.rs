//! Local statistics `r(X) = d(X) + sum_l p_l(X) d/dx_l log f0(X)` and the
//! data-only cost `Omega` whose minimizer over `u` is `r`.
//!
//! Integrating by parts turns `E0[r psi(u)]` into an expectation of known
//! terms: `Omega = phi(u) + psi(u)(d - div p) - psi'(u) p . grad_x u`. This
//! assumes `f0 p_l psi(u)` vanishes at infinity, which cannot be checked from
//! data; a saturating output keeps `psi(u)` bounded.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::loss::LossPair;
use crate::network::{Cache, Mlp2};
use crate::rng;

pub type FieldFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// The known functions `d`, `p_1..p_k` and `div p` of a local statistic.
#[derive(Clone)]
pub struct LocalSpec {
    pub k: usize,
    pub d: FieldFn,
    pub p: Vec<FieldFn>,
    pub p_div: FieldFn,
}

impl core::fmt::Debug for LocalSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("LocalSpec").field("k", &self.k).finish_non_exhaustive()
    }
}

impl LocalSpec {
    pub fn new(k: usize, d: FieldFn, p: Vec<FieldFn>, p_div: FieldFn) -> Result<Self> {
        if p.len() != k || k == 0 {
            return Err(Error::Dimension { expected: k, got: p.len() });
        }
        Ok(LocalSpec { k, d, p, p_div })
    }

    pub fn p_at(&self, x: &[f64], out: &mut [f64]) {
        for (o, p) in out.iter_mut().zip(&self.p) {
            *o = p(x);
        }
    }

    /// Worst relative mismatch between `p_div` and a central-difference
    /// divergence of `p` at `points` random standard-normal locations.
    pub fn divergence_error(&self, points: usize, seed: u64) -> f64 {
        let mut rng = rng::seeded(seed);
        let mut x = vec![0.0; self.k];
        let mut worst = 0.0f64;
        for _ in 0..points {
            x.iter_mut().for_each(|v| *v = rng::normal(&mut rng));
            let mut fd = 0.0;
            for l in 0..self.k {
                let h = 1e-5 * x[l].abs().max(1.0);
                let orig = x[l];
                x[l] = orig + h;
                let up = (self.p[l])(&x);
                x[l] = orig - h;
                let down = (self.p[l])(&x);
                x[l] = orig;
                fd += (up - down) / (2.0 * h);
            }
            let exact = (self.p_div)(&x);
            worst = worst.max((fd - exact).abs() / exact.abs().max(1.0));
        }
        worst
    }
}

/// Shift along `delta`: `d = 0`, `p_l = -delta_l`, `div p = 0`.
pub fn translation_spec(delta: &[f64]) -> Result<LocalSpec> {
    let p = delta
        .iter()
        .map(|&dl| Arc::new(move |_: &[f64]| -dl) as FieldFn)
        .collect();
    LocalSpec::new(delta.len(), Arc::new(|_: &[f64]| 0.0), p, Arc::new(|_: &[f64]| 0.0))
}

/// Scale change: `d = 1`, `p_l = x_l`, `div p = k`.
pub fn scale_spec(k: usize) -> Result<LocalSpec> {
    let p = (0..k).map(|l| Arc::new(move |x: &[f64]| x[l]) as FieldFn).collect();
    let kf = k as f64;
    LocalSpec::new(k, Arc::new(|_: &[f64]| 1.0), p, Arc::new(move |_: &[f64]| kf))
}

/// `Omega` needs closed-form `phi`, `psi` on the whole real line.
pub fn check_pair(pair: &LossPair) -> Result<()> {
    if !pair.z_interval.is_real_line() {
        return Err(Error::PairDomain(alloc::format!("{}", pair.z_interval)));
    }
    if !pair.has_closed_forms() {
        return Err(Error::MissingClosedForm);
    }
    Ok(())
}

pub fn omega_cost(spec: &LocalSpec, pair: &LossPair, net: &Mlp2, x: &[f64]) -> Result<f64> {
    check_pair(pair)?;
    check_dims(spec, net)?;
    let mut cache = net.new_cache();
    let mut p = vec![0.0; spec.k];
    omega_terms(spec, pair, net, x, &mut cache, &mut p).map(|t| t.cost)
}

/// `grad_theta Omega(x)`.
pub fn omega_grad(spec: &LocalSpec, pair: &LossPair, net: &Mlp2, x: &[f64]) -> Result<Vec<f64>> {
    check_pair(pair)?;
    check_dims(spec, net)?;
    let mut cache = net.new_cache();
    let mut p = vec![0.0; spec.k];
    let mut g = vec![0.0; net.param_count()];
    accumulate_omega_grad(spec, pair, net, x, &mut cache, &mut p, 1.0, &mut g)?;
    Ok(g)
}

/// `phi(u) + r psi(u)`, the integrand `Omega` replaces.
pub fn direct_cost(pair: &LossPair, net: &Mlp2, x: &[f64], r: f64) -> Result<f64> {
    let u = net.forward(x)?;
    Ok(pair.phi_value(u) + r * pair.psi_value(u))
}

fn check_dims(spec: &LocalSpec, net: &Mlp2) -> Result<()> {
    if spec.k != net.input_size() {
        return Err(Error::Dimension { expected: net.input_size(), got: spec.k });
    }
    Ok(())
}

struct Terms {
    cost: f64,
    u: f64,
    source: f64,
    slope: f64,
}

fn omega_terms(
    spec: &LocalSpec,
    pair: &LossPair,
    net: &Mlp2,
    x: &[f64],
    cache: &mut Cache,
    p: &mut [f64],
) -> Result<Terms> {
    let u = net.forward_cached(x, cache)?;
    spec.p_at(x, p);
    let source = (spec.d)(x) - (spec.p_div)(x);
    let slope = net.directional_input_grad(cache, p);
    let cost = pair.phi_value(u) + pair.psi_value(u) * source - pair.psi_prime(u) * slope;
    Ok(Terms { cost, u, source, slope })
}

/// Adds `coef * grad_theta Omega(x)` into `out` and returns `Omega(x)`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn accumulate_omega_grad(
    spec: &LocalSpec,
    pair: &LossPair,
    net: &Mlp2,
    x: &[f64],
    cache: &mut Cache,
    p: &mut [f64],
    coef: f64,
    out: &mut [f64],
) -> Result<f64> {
    let t = omega_terms(spec, pair, net, x, cache, p)?;
    let psi1 = pair.psi_prime(t.u);
    let a = pair.phi_prime(t.u) + psi1 * t.source - pair.psi_second(t.u) * t.slope;
    net.accumulate_grad_theta(x, cache, coef * a, out);
    net.accumulate_grad_theta_of_input_grad(x, p, cache, -coef * psi1, out);
    Ok(t.cost)
}
