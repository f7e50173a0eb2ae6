//! Loss pairs `(phi, psi)` whose objective `phi(z) + r psi(z)` has its unique
//! minimizer at `z = omega(r)`.
//!
//! A pair is built from an increasing transform `omega` and a strictly negative
//! generator `rho` by setting `psi' = rho` and `phi' = -omega^{-1}(z) rho(z)`.
//! Then `phi'(z) + r psi'(z) = (r - omega^{-1}(z)) rho(z)`, which is negative
//! below `omega(r)` and positive above it.
//!
//! Only the derivatives are needed for training. Closed-form `phi`/`psi` are
//! attached to the cataloged presets where they exist; otherwise values are
//! obtained by Simpson integration of the derivatives.

mod omega;
mod preset;
mod verify;

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub use omega::OmegaTransform;
pub use preset::{a1_generic, preset, preset_by_name, Preset, PresetLoss, PresetParams};
pub use verify::{
    catalog, check_closed_forms, check_convexity, check_identity, check_unique_minimum,
    verify_catalog, verify_preset, MinimumVerdict, PresetReport, CLOSED_FORM_TOLERANCE,
    IDENTITY_TOLERANCE, MINIMIZER_STEPS,
};

/// A shareable scalar map.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub(crate) fn scalar_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> ScalarFn {
    Arc::new(f)
}

/// Infinite endpoints are truncated to this magnitude for grid verification.
pub const TRUNCATION: f64 = 50.0;
/// Relative inward shrink of verification grids, keeps singular endpoints out.
pub const EDGE_SHRINK: f64 = 1e-6;

/// An open interval `(lo, hi)`; either endpoint may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };
    pub const POSITIVE: Interval = Interval { lo: 0.0, hi: f64::INFINITY };
    pub const UNIT: Interval = Interval { lo: 0.0, hi: 1.0 };
    pub const SYMMETRIC_UNIT: Interval = Interval { lo: -1.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn is_real_line(&self) -> bool {
        self.lo == f64::NEG_INFINITY && self.hi == f64::INFINITY
    }

    /// Endpoints clipped to `[-TRUNCATION, TRUNCATION]`.
    pub fn truncated(&self) -> (f64, f64) {
        (self.lo.max(-TRUNCATION), self.hi.min(TRUNCATION))
    }

    /// Truncated interval shrunk inward by `EDGE_SHRINK` of its width.
    pub fn verification_bounds(&self) -> (f64, f64) {
        let (lo, hi) = self.truncated();
        let pad = EDGE_SHRINK * (hi - lo);
        (lo + pad, hi - pad)
    }

    /// `n` equally spaced points over the verification bounds, endpoints included.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = self.verification_bounds();
        if n == 1 {
            return alloc::vec![0.5 * (lo + hi)];
        }
        let step = (hi - lo) / (n - 1) as f64;
        (0..n).map(|i| lo + step * i as f64).collect()
    }

    pub fn grid_step(&self, n: usize) -> f64 {
        let (lo, hi) = self.verification_bounds();
        (hi - lo) / (n.max(2) - 1) as f64
    }

    /// Distance from `x` to the nearest finite endpoint.
    pub(crate) fn edge_distance(&self, x: f64) -> f64 {
        (x - self.lo).min(self.hi - x)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// A generator `rho(z)` with optional analytic derivative.
#[derive(Clone)]
pub struct GeneratorRho {
    rho: ScalarFn,
    rho_prime: Option<ScalarFn>,
}

impl GeneratorRho {
    pub fn new(rho: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        GeneratorRho { rho: scalar_fn(rho), rho_prime: None }
    }

    pub fn with_derivative(
        rho: impl Fn(f64) -> f64 + Send + Sync + 'static,
        rho_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        GeneratorRho { rho: scalar_fn(rho), rho_prime: Some(scalar_fn(rho_prime)) }
    }

    pub(crate) fn from_parts(rho: ScalarFn, rho_prime: Option<ScalarFn>) -> Self {
        GeneratorRho { rho, rho_prime }
    }

    /// `c * rho`, same derivative scaling.
    pub fn scaled(&self, c: f64) -> Self {
        let rho = self.rho.clone();
        let rho_prime = self.rho_prime.clone();
        GeneratorRho {
            rho: scalar_fn(move |z| c * rho(z)),
            rho_prime: rho_prime.map(|d| scalar_fn(move |z| c * d(z))),
        }
    }

    #[inline]
    pub fn eval(&self, z: f64) -> f64 {
        (self.rho)(z)
    }

    pub fn has_derivative(&self) -> bool {
        self.rho_prime.is_some()
    }

    /// `rho'(z)`, by central differences when no analytic form was supplied.
    pub fn derivative(&self, z: f64) -> f64 {
        match &self.rho_prime {
            Some(d) => d(z),
            None => central_difference(&*self.rho, z, fd_step(z)),
        }
    }

    pub(crate) fn rho_fn(&self) -> ScalarFn {
        self.rho.clone()
    }

    pub(crate) fn rho_prime_fn(&self) -> Option<ScalarFn> {
        self.rho_prime.clone()
    }

    /// Grid check: `rho <= 0` everywhere and `rho < 0` on at least 99% of the
    /// points of a `grid_size` grid over `interval`.
    pub fn check_negativity(&self, interval: &Interval, grid_size: usize) -> Result<()> {
        let grid = interval.grid(grid_size);
        let mut positive = 0usize;
        let mut zero = 0usize;
        for &z in &grid {
            let v = self.eval(z);
            if v.is_nan() || v > 0.0 {
                positive += 1;
            } else if v == 0.0 {
                zero += 1;
            }
        }
        if positive > 0 || (zero as f64) > 0.01 * grid.len() as f64 {
            return Err(Error::Negativity { failed: positive + zero, total: grid.len() });
        }
        Ok(())
    }
}

impl fmt::Debug for GeneratorRho {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratorRho").field("analytic_derivative", &self.rho_prime.is_some()).finish()
    }
}

/// The designed objective: derivatives `phi'`, `psi'` on `z_interval`, with
/// optional closed forms.
#[derive(Clone)]
pub struct LossPair {
    pub name: String,
    phi_prime: ScalarFn,
    psi_prime: ScalarFn,
    psi_second: Option<ScalarFn>,
    phi: Option<ScalarFn>,
    psi: Option<ScalarFn>,
    pub z_interval: Interval,
    pub convex_certified: bool,
    /// Points where `phi'`/`psi'` jump; finite-difference checks avoid them.
    pub kinks: Vec<f64>,
}

impl fmt::Debug for LossPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LossPair")
            .field("name", &self.name)
            .field("z_interval", &self.z_interval)
            .field("closed_phi", &self.phi.is_some())
            .field("closed_psi", &self.psi.is_some())
            .field("convex_certified", &self.convex_certified)
            .finish()
    }
}

impl LossPair {
    /// A pair given directly by its derivatives.
    pub fn from_derivatives(
        name: impl Into<String>,
        z_interval: Interval,
        phi_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        psi_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        LossPair {
            name: name.into(),
            phi_prime: scalar_fn(phi_prime),
            psi_prime: scalar_fn(psi_prime),
            psi_second: None,
            phi: None,
            psi: None,
            z_interval,
            convex_certified: false,
            kinks: Vec::new(),
        }
    }

    pub fn with_closed_forms(
        mut self,
        phi: Option<ScalarFn>,
        psi: Option<ScalarFn>,
    ) -> Self {
        self.phi = phi;
        self.psi = psi;
        self
    }

    pub fn with_psi_second(mut self, psi_second: Option<ScalarFn>) -> Self {
        self.psi_second = psi_second;
        self
    }

    pub fn with_kinks(mut self, kinks: Vec<f64>) -> Self {
        self.kinks = kinks;
        self
    }

    #[inline]
    pub fn phi_prime(&self, z: f64) -> f64 {
        (self.phi_prime)(z)
    }

    #[inline]
    pub fn psi_prime(&self, z: f64) -> f64 {
        (self.psi_prime)(z)
    }

    /// `psi''(z) = rho'(z)`; central differences of `psi'` when not analytic.
    pub fn psi_second(&self, z: f64) -> f64 {
        match &self.psi_second {
            Some(d) => d(z),
            None => central_difference(&*self.psi_prime, z, fd_step(z)),
        }
    }

    pub fn has_closed_phi(&self) -> bool {
        self.phi.is_some()
    }

    pub fn has_closed_psi(&self) -> bool {
        self.psi.is_some()
    }

    pub fn has_closed_forms(&self) -> bool {
        self.phi.is_some() && self.psi.is_some()
    }

    pub fn closed_phi(&self) -> Option<&ScalarFn> {
        self.phi.as_ref()
    }

    pub fn closed_psi(&self) -> Option<&ScalarFn> {
        self.psi.as_ref()
    }

    /// `phi(z)`: closed form, or Simpson integral of `phi'` from the interval anchor.
    pub fn phi_value(&self, z: f64) -> f64 {
        match &self.phi {
            Some(f) => f(z),
            None => simpson(&*self.phi_prime, self.anchor(), z),
        }
    }

    /// `psi(z)`: closed form, or Simpson integral of `psi'` from the interval anchor.
    pub fn psi_value(&self, z: f64) -> f64 {
        match &self.psi {
            Some(f) => f(z),
            None => simpson(&*self.psi_prime, self.anchor(), z),
        }
    }

    /// Midpoint of the truncated interval; integration constant reference.
    pub fn anchor(&self) -> f64 {
        let (lo, hi) = self.z_interval.truncated();
        0.5 * (lo + hi)
    }
}

/// Builds `psi' = rho`, `phi' = -omega^{-1}(z) rho(z)` after checking the
/// negativity of `rho` on `omega`'s range.
pub fn make_loss(rho: &GeneratorRho, omega: &OmegaTransform) -> Result<LossPair> {
    if omega.is_limit() {
        return Err(Error::Param(alloc::format!(
            "{} is a limit transform without an inverse; use the cataloged limit presets",
            omega.name
        )));
    }
    rho.check_negativity(&omega.range, 1000)?;
    let r = rho.rho_fn();
    let inv = omega.inverse_fn();
    let phi_prime = move |z: f64| -inv(z) * r(z);
    let r2 = rho.rho_fn();
    let mut pair = LossPair::from_derivatives(
        alloc::format!("custom[{}]", omega.name),
        omega.range,
        phi_prime,
        move |z| r2(z),
    );
    pair.psi_second = rho.rho_prime_fn();
    Ok(pair)
}

pub(crate) fn fd_step(z: f64) -> f64 {
    1e-6 * z.abs().max(1.0)
}

pub(crate) fn central_difference(f: &dyn Fn(f64) -> f64, z: f64, h: f64) -> f64 {
    (f(z + h) - f(z - h)) / (2.0 * h)
}

/// Composite Simpson rule for `int_a^b f`.
pub(crate) fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let span = (b - a).abs();
    let mut panels = ((span * 64.0).ceil() as usize).clamp(16, 8192);
    if panels % 2 == 1 {
        panels += 1;
    }
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64);
    }
    acc * h / 3.0
}
