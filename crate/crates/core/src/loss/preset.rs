use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;

use super::{scalar_fn, GeneratorRho, Interval, LossPair, OmegaTransform, ScalarFn};
use crate::error::{Error, Result};
use crate::network::OutputNonlinearity;

/// Cataloged loss pairs.
///
/// `D1` and `D3` are the finite-parameter monotone and hinge families;
/// `D1Linear` and `D3Hinge` are their limits. `Exponential` is the `B1`,
/// `alpha = 1/2` objective in the scaled form `phi = e^{z/2}`, `psi = e^{-z/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    A1,
    A2,
    A3,
    B1,
    B2,
    B3,
    C1,
    C2,
    D1,
    D1Linear,
    D3,
    D3Hinge,
    Exponential,
}

impl Preset {
    pub const ALL: [Preset; 13] = [
        Preset::A1,
        Preset::A2,
        Preset::A3,
        Preset::B1,
        Preset::B2,
        Preset::B3,
        Preset::C1,
        Preset::C2,
        Preset::D1,
        Preset::D1Linear,
        Preset::D3,
        Preset::D3Hinge,
        Preset::Exponential,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Preset::A1 => "A1",
            Preset::A2 => "A2",
            Preset::A3 => "A3",
            Preset::B1 => "B1",
            Preset::B2 => "B2",
            Preset::B3 => "B3",
            Preset::C1 => "C1",
            Preset::C2 => "C2",
            Preset::D1 => "D1",
            Preset::D1Linear => "D1_linear",
            Preset::D3 => "D3",
            Preset::D3Hinge => "D3_hinge",
            Preset::Exponential => "exponential",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .iter()
            .copied()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

/// Optional preset parameters. `positive` selects `I_r = (0, inf)` for the
/// A family; `s` is forwarded to the bounded-rational output recommendation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PresetParams {
    pub alpha: Option<f64>,
    pub c: Option<f64>,
    pub s: Option<f64>,
    pub positive: bool,
}

impl PresetParams {
    pub fn alpha(alpha: f64) -> Self {
        PresetParams { alpha: Some(alpha), ..Default::default() }
    }

    pub fn c(c: f64) -> Self {
        PresetParams { c: Some(c), ..Default::default() }
    }

    pub fn positive(mut self) -> Self {
        self.positive = true;
        self
    }
}

/// A cataloged objective with its transform, generator and recommended output
/// nonlinearity.
#[derive(Debug, Clone)]
pub struct PresetLoss {
    pub preset: Preset,
    pub params: PresetParams,
    pub pair: LossPair,
    pub omega: OmegaTransform,
    pub rho: GeneratorRho,
    pub output: OutputNonlinearity,
}

struct Parts {
    name: String,
    rho: ScalarFn,
    rho_prime: ScalarFn,
    phi_prime: ScalarFn,
    phi: Option<ScalarFn>,
    psi: Option<ScalarFn>,
    kinks: Vec<f64>,
}

fn parts(
    name: String,
    rho: impl Fn(f64) -> f64 + Send + Sync + 'static,
    rho_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    phi_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
) -> Parts {
    Parts {
        name,
        rho: scalar_fn(rho),
        rho_prime: scalar_fn(rho_prime),
        phi_prime: scalar_fn(phi_prime),
        phi: None,
        psi: None,
        kinks: Vec::new(),
    }
}

impl Parts {
    fn closed(
        mut self,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        psi: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.phi = Some(scalar_fn(phi));
        self.psi = Some(scalar_fn(psi));
        self
    }
}

/// `A1` through the generic power formula. Undefined at `alpha = -1, -2`,
/// where [`preset`] switches to the logarithmic special forms.
pub fn a1_generic(alpha: f64) -> Result<LossPair> {
    if alpha == -1.0 || alpha == -2.0 {
        return Err(Error::Param(alloc::format!(
            "A1 generic formula is singular at alpha = {alpha}; use the special-cased preset"
        )));
    }
    let p = a1_parts(alpha)?;
    let domain = if alpha <= -1.0 { Interval::POSITIVE } else { Interval::REAL };
    Ok(assemble(p, domain))
}

fn a1_parts(alpha: f64) -> Result<Parts> {
    if !alpha.is_finite() {
        return Err(Error::Param(alloc::format!("A1 alpha must be finite, got {alpha}")));
    }
    let name = alloc::format!("A1(alpha={alpha})");
    let rho = move |z: f64| -z.abs().powf(alpha);
    let rho_prime = move |z: f64| -alpha * z.abs().powf(alpha - 1.0) * z.signum();
    let phi_prime = move |z: f64| z * z.abs().powf(alpha);
    let p = parts(name, rho, rho_prime, phi_prime);
    Ok(if alpha == -2.0 {
        p.closed(|z| z.abs().ln(), |z| 1.0 / z)
    } else if alpha == -1.0 {
        p.closed(|z| z.abs(), |z| -z.signum() * z.abs().ln())
    } else {
        p.closed(
            move |z| z.abs().powf(2.0 + alpha) / (2.0 + alpha),
            move |z| -z * z.abs().powf(alpha) / (1.0 + alpha),
        )
    })
}

fn assemble(p: Parts, z_interval: Interval) -> LossPair {
    let rho = p.rho.clone();
    LossPair::from_derivatives(p.name, z_interval, move |z| p.phi_prime.as_ref()(z), move |z| rho(z))
        .with_closed_forms(p.phi, p.psi)
        .with_psi_second(Some(p.rho_prime))
        .with_kinks(p.kinks)
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Looks up a cataloged pair. Missing parameters default to `alpha = 0` (A1),
/// `alpha = 1/2` (B1), `alpha = 1` (C2), `c = 1` (D1, D3) and `s = 2`.
pub fn preset(name: Preset, params: PresetParams) -> Result<PresetLoss> {
    let elu = OutputNonlinearity::Elu(0.01);
    let s = params.s.unwrap_or(2.0);
    let (p, omega, output): (Parts, OmegaTransform, OutputNonlinearity) = match name {
        Preset::A1 => {
            let alpha = params.alpha.unwrap_or(0.0);
            let p = a1_parts(alpha)?;
            // Below alpha = -1 psi is discontinuous at 0, so only r > 0 is admissible.
            if params.positive || alpha <= -1.0 {
                (p, OmegaTransform::identity(Interval::POSITIVE), elu)
            } else {
                (p, OmegaTransform::identity(Interval::REAL), OutputNonlinearity::Identity)
            }
        }
        Preset::A2 => {
            let rho = |z: f64| if z == 0.0 { -1.0 } else { -z.atan() / z };
            let rho_prime = |z: f64| {
                if z.abs() < 1e-4 {
                    2.0 * z / 3.0
                } else {
                    (z.atan() - z / (1.0 + z * z)) / (z * z)
                }
            };
            let mut p = parts("A2".to_string(), rho, rho_prime, |z: f64| z.atan());
            p.phi = Some(scalar_fn(|z: f64| z * z.atan() - 0.5 * (z * z).ln_1p()));
            if params.positive {
                (p, OmegaTransform::identity(Interval::POSITIVE), elu)
            } else {
                (p, OmegaTransform::identity(Interval::REAL), OutputNonlinearity::Identity)
            }
        }
        Preset::A3 => {
            let p = parts(
                "A3".to_string(),
                |z: f64| -1.0 / ((1.0 + z) * z),
                |z: f64| {
                    let d = (1.0 + z) * z;
                    (1.0 + 2.0 * z) / (d * d)
                },
                |z: f64| 1.0 / (1.0 + z),
            )
            .closed(|z: f64| z.ln_1p(), |z: f64| (1.0 / z).ln_1p());
            (p, OmegaTransform::identity(Interval::POSITIVE), elu)
        }
        Preset::B1 => {
            let alpha = params.alpha.unwrap_or(0.5);
            let p = parts(
                alloc::format!("B1(alpha={alpha})"),
                move |z: f64| -(-alpha * z).exp(),
                move |z: f64| alpha * (-alpha * z).exp(),
                move |z: f64| ((1.0 - alpha) * z).exp(),
            );
            let p = if alpha == 0.0 {
                p.closed(|z: f64| z.exp(), |z: f64| -z)
            } else if alpha == 1.0 {
                p.closed(|z: f64| z, |z: f64| (-z).exp())
            } else {
                p.closed(
                    move |z: f64| ((1.0 - alpha) * z).exp_m1() / (1.0 - alpha),
                    move |z: f64| (-alpha * z).exp_m1() / alpha,
                )
            };
            (p, OmegaTransform::log(), OutputNonlinearity::Identity)
        }
        Preset::B2 => {
            let p = parts(
                "B2".to_string(),
                |z: f64| -logistic(-z),
                |z: f64| logistic(z) * logistic(-z),
                logistic,
            )
            .closed(softplus, |z: f64| softplus(-z));
            (p, OmegaTransform::log(), OutputNonlinearity::Identity)
        }
        Preset::B3 => {
            let p = parts(
                "B3".to_string(),
                |z: f64| if z == 0.0 { -1.0 } else { (-z).exp_m1() / z },
                |z: f64| {
                    if z.abs() < 1e-3 {
                        0.5 - z / 3.0 + z * z / 8.0
                    } else {
                        (1.0 - (-z).exp() * (1.0 + z)) / (z * z)
                    }
                },
                |z: f64| if z == 0.0 { 1.0 } else { z.exp_m1() / z },
            );
            (p, OmegaTransform::log(), OutputNonlinearity::Identity)
        }
        Preset::C1 => {
            let p = parts("C1".to_string(), |z: f64| -1.0 / z, |z: f64| 1.0 / (z * z), |z: f64| 1.0 / (1.0 - z))
                .closed(|z: f64| -(-z).ln_1p(), |z: f64| -z.ln());
            (p, OmegaTransform::posterior(), OutputNonlinearity::Sigmoid)
        }
        Preset::C2 => {
            let alpha = params.alpha.unwrap_or(1.0);
            let p = parts(
                alloc::format!("C2(alpha={alpha})"),
                move |z: f64| -(1.0 - z).powf(alpha),
                move |z: f64| alpha * (1.0 - z).powf(alpha - 1.0),
                move |z: f64| z * (1.0 - z).powf(alpha - 1.0),
            );
            let p = if alpha == 0.0 {
                p.closed(|z: f64| -z - (-z).ln_1p(), |z: f64| -z)
            } else if alpha == -1.0 {
                p.closed(|z: f64| (-z).ln_1p() + 1.0 / (1.0 - z), |z: f64| (-z).ln_1p())
            } else {
                p.closed(
                    move |z: f64| -(alpha * z + 1.0) * (1.0 - z).powf(alpha) / (alpha * (1.0 + alpha)),
                    move |z: f64| (1.0 - z).powf(1.0 + alpha) / (1.0 + alpha),
                )
            };
            (p, OmegaTransform::posterior(), OutputNonlinearity::Sigmoid)
        }
        Preset::D1 => {
            let c = positive_c(params.c.unwrap_or(1.0))?;
            let e = 1.0 / c;
            let p = parts(
                alloc::format!("D1(c={c})"),
                move |z: f64| -(1.0 - z).powf(e),
                move |z: f64| e * (1.0 - z).powf(e - 1.0),
                move |z: f64| (1.0 + z).powf(e),
            )
            .closed(
                move |z: f64| c / (1.0 + c) * (1.0 + z).powf(e + 1.0),
                move |z: f64| c / (1.0 + c) * (1.0 - z).powf(e + 1.0),
            );
            (p, OmegaTransform::tanh_sign(c), OutputNonlinearity::BoundedRational(s))
        }
        Preset::D1Linear => {
            let p = parts("D1_linear".to_string(), |_| -1.0, |_| 0.0, |_| 1.0).closed(|z| z, |z| -z);
            (p, OmegaTransform::sign_limit(Interval::SYMMETRIC_UNIT), OutputNonlinearity::BoundedRational(s))
        }
        Preset::D3 => {
            let c = positive_c(params.c.unwrap_or(1.0))?;
            let e = 1.0 / c;
            let p = parts(
                alloc::format!("D3(c={c})"),
                move |z: f64| -((-z.abs().powf(e)).exp() + indicator(z < -1.0)),
                move |z: f64| {
                    let q = z.abs().powf(e);
                    (-q).exp() * e * z.abs().powf(e - 1.0) * z.signum()
                },
                move |z: f64| {
                    let q = z.abs().powf(e);
                    if z >= 0.0 {
                        1.0
                    } else {
                        (-q).exp() * ((-q).exp() + indicator(z < -1.0))
                    }
                },
            );
            let mut p = p;
            p.kinks = vec![-1.0];
            (p, OmegaTransform::power_sign(c), OutputNonlinearity::Identity)
        }
        Preset::D3Hinge => {
            let mut p = parts(
                "D3_hinge".to_string(),
                |z: f64| -indicator(z < 1.0),
                |_| 0.0,
                |z: f64| indicator(z > -1.0),
            )
            .closed(|z: f64| (1.0 + z).max(0.0), |z: f64| (1.0 - z).max(0.0));
            p.kinks = vec![-1.0, 1.0];
            (p, OmegaTransform::sign_limit(Interval::REAL), OutputNonlinearity::Identity)
        }
        Preset::Exponential => {
            let p = parts(
                "exponential".to_string(),
                |z: f64| -0.5 * (-0.5 * z).exp(),
                |z: f64| 0.25 * (-0.5 * z).exp(),
                |z: f64| 0.5 * (0.5 * z).exp(),
            )
            .closed(|z: f64| (0.5 * z).exp(), |z: f64| (-0.5 * z).exp());
            (p, OmegaTransform::log(), OutputNonlinearity::Identity)
        }
    };
    let rho = GeneratorRho::from_parts(p.rho.clone(), Some(p.rho_prime.clone()));
    let pair = assemble(p, omega.range);
    let mut out = PresetLoss { preset: name, params, pair, omega, rho, output };
    if out.omega.domain == Interval::POSITIVE && !out.omega.is_limit() {
        out.pair.convex_certified = super::check_convexity(&out.rho, &out.omega, 1000).unwrap_or(false);
    }
    Ok(out)
}

fn positive_c(c: f64) -> Result<f64> {
    if c > 0.0 && c.is_finite() {
        Ok(c)
    } else {
        Err(Error::Param(alloc::format!("c must be positive, got {c}")))
    }
}

/// Looks up a preset by its configuration identifier.
pub fn preset_by_name(name: &str, params: PresetParams) -> Result<PresetLoss> {
    preset(name.parse()?, params)
}
