use alloc::string::String;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use super::{central_difference, fd_step, scalar_fn, Interval, ScalarFn};
use crate::error::{Error, Result};

/// A strictly increasing map `omega: I_r -> omega(I_r)` with its inverse.
///
/// The sign limits (`sign(log r)`, reached by the monotone and hinge families)
/// are represented with `limit = true`: their inverse is the pointwise limit
/// of the inverses along the family, which is `1` inside `(-1, 1)`, `0` below
/// and `+inf` above. They are not invertible and skip the monotonicity checks.
#[derive(Clone)]
pub struct OmegaTransform {
    pub name: String,
    forward: ScalarFn,
    inverse: ScalarFn,
    inverse_prime: Option<ScalarFn>,
    pub domain: Interval,
    pub range: Interval,
    limit: bool,
}

impl fmt::Debug for OmegaTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OmegaTransform")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("range", &self.range)
            .field("limit", &self.limit)
            .finish()
    }
}

impl OmegaTransform {
    pub fn new(
        name: impl Into<String>,
        domain: Interval,
        range: Interval,
        forward: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inverse: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        OmegaTransform {
            name: name.into(),
            forward: scalar_fn(forward),
            inverse: scalar_fn(inverse),
            inverse_prime: None,
            domain,
            range,
            limit: false,
        }
    }

    pub fn with_inverse_prime(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.inverse_prime = Some(scalar_fn(d));
        self
    }

    /// `omega(r) = r` on `domain` (the real line or the positive half-line).
    pub fn identity(domain: Interval) -> Self {
        OmegaTransform::new("identity", domain, domain, |r| r, |z| z).with_inverse_prime(|_| 1.0)
    }

    /// `omega(r) = log r`.
    pub fn log() -> Self {
        OmegaTransform::new("log", Interval::POSITIVE, Interval::REAL, |r| r.ln(), |z| z.exp())
            .with_inverse_prime(|z| z.exp())
    }

    /// `omega(r) = r / (r + 1)`, the posterior probability under equal priors.
    pub fn posterior() -> Self {
        OmegaTransform::new("posterior", Interval::POSITIVE, Interval::UNIT, |r| r / (r + 1.0), |z| z / (1.0 - z))
            .with_inverse_prime(|z| 1.0 / ((1.0 - z) * (1.0 - z)))
    }

    /// `omega(r) = tanh(c/2 log r) = (r^c - 1)/(r^c + 1)`.
    pub fn tanh_sign(c: f64) -> Self {
        OmegaTransform::new(
            alloc::format!("tanh_sign({c})"),
            Interval::POSITIVE,
            Interval::SYMMETRIC_UNIT,
            move |r| (0.5 * c * r.ln()).tanh(),
            move |z| ((1.0 + z) / (1.0 - z)).powf(1.0 / c),
        )
        .with_inverse_prime(move |z| {
            let q = (1.0 + z) / (1.0 - z);
            q.powf(1.0 / c) * 2.0 / (c * (1.0 + z) * (1.0 - z))
        })
    }

    /// `omega(r) = sign(log r) |log r|^c`.
    pub fn power_sign(c: f64) -> Self {
        OmegaTransform::new(
            alloc::format!("power_sign({c})"),
            Interval::POSITIVE,
            Interval::REAL,
            move |r| {
                let l = r.ln();
                l.signum() * l.abs().powf(c)
            },
            move |z| (z.signum() * z.abs().powf(1.0 / c)).exp(),
        )
    }

    /// `sign(log r)` reached as a limit, with values taken in `range`.
    pub fn sign_limit(range: Interval) -> Self {
        let forward = |r: f64| {
            if r > 1.0 {
                1.0
            } else if r < 1.0 {
                -1.0
            } else {
                0.0
            }
        };
        let inverse = |z: f64| {
            if z <= -1.0 {
                0.0
            } else if z >= 1.0 {
                f64::INFINITY
            } else {
                1.0
            }
        };
        let mut omega = OmegaTransform::new("sign_limit", Interval::POSITIVE, range, forward, inverse)
            .with_inverse_prime(|_| 0.0);
        omega.limit = true;
        omega
    }

    pub fn is_limit(&self) -> bool {
        self.limit
    }

    #[inline]
    pub fn forward(&self, r: f64) -> f64 {
        (self.forward)(r)
    }

    #[inline]
    pub fn inverse(&self, z: f64) -> f64 {
        (self.inverse)(z)
    }

    /// `(omega^{-1})'(z)`, by central differences when not analytic.
    pub fn inverse_prime(&self, z: f64) -> f64 {
        match &self.inverse_prime {
            Some(d) => d(z),
            None => {
                let h = fd_step(z).min(0.5 * self.range.edge_distance(z));
                central_difference(&*self.inverse, z, h)
            }
        }
    }

    pub(crate) fn inverse_fn(&self) -> ScalarFn {
        self.inverse.clone()
    }

    /// Domain sample used by [`check_invariants`](Self::check_invariants):
    /// log-spaced on `[e^-12, e^12]` for the positive half-line, the usual
    /// truncated grid otherwise.
    pub fn domain_grid(&self, n: usize) -> alloc::vec::Vec<f64> {
        if self.domain == Interval::POSITIVE {
            let step = 24.0 / (n.max(2) - 1) as f64;
            (0..n).map(|i| (-12.0 + step * i as f64).exp()).collect()
        } else {
            self.domain.grid(n)
        }
    }

    /// Grid checks: strictly increasing, `inverse(forward(r)) = r` to relative
    /// 1e-9, images inside `range` and approaching its finite endpoints.
    pub fn check_invariants(&self, n: usize) -> Result<()> {
        if self.limit {
            return Ok(());
        }
        let grid = self.domain_grid(n);
        let mut prev = f64::NEG_INFINITY;
        for &r in &grid {
            let z = self.forward(r);
            // ties are tolerated only where z has saturated at a finite endpoint
            let saturated = (z - self.range.lo).abs() <= 4.0 * f64::EPSILON * self.range.lo.abs()
                || (self.range.hi - z).abs() <= 4.0 * f64::EPSILON * self.range.hi.abs();
            if !(z > prev || (z == prev && saturated)) {
                return Err(Error::Param(alloc::format!("{} is not strictly increasing at r = {r}", self.name)));
            }
            prev = z;
            if !(z >= self.range.lo && z <= self.range.hi) {
                return Err(Error::Domain { value: z, interval: alloc::format!("{}", self.range) });
            }
            let back = self.inverse(z);
            // one rounding of z is amplified by the slope of the inverse
            let conditioning = 4.0 * f64::EPSILON * z.abs().max(f64::MIN_POSITIVE) * self.inverse_prime(z).abs();
            if (back - r).abs() > 1e-9 * r.abs().max(1.0) + conditioning {
                return Err(Error::Param(alloc::format!("{}: inverse(forward({r})) = {back}", self.name)));
            }
        }
        let width = if self.range.lo.is_finite() && self.range.hi.is_finite() {
            self.range.hi - self.range.lo
        } else {
            1.0
        };
        let first = self.forward(grid[0]);
        let last = self.forward(grid[grid.len() - 1]);
        if self.range.lo.is_finite() && (first - self.range.lo).abs() > 1e-2 * width {
            return Err(Error::Param(alloc::format!("{}: image does not reach {}", self.name, self.range.lo)));
        }
        if self.range.hi.is_finite() && (self.range.hi - last).abs() > 1e-2 * width {
            return Err(Error::Param(alloc::format!("{}: image does not reach {}", self.name, self.range.hi)));
        }
        Ok(())
    }
}
