//! Grid-based verification of loss pairs.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::preset::{preset, Preset, PresetLoss, PresetParams};
use super::{central_difference, fd_step, make_loss, GeneratorRho, Interval, LossPair, OmegaTransform};
use crate::error::{Error, Result};
use crate::rng;

/// Outcome of [`check_unique_minimum`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimumVerdict {
    pub minimizer: f64,
    /// `omega(r)`.
    pub target: f64,
    pub grid_step: f64,
    pub sign_changes: usize,
    pub is_unique: bool,
}

impl MinimumVerdict {
    /// `|minimizer - omega(r)|` in grid steps.
    pub fn offset_steps(&self) -> f64 {
        (self.minimizer - self.target).abs() / self.grid_step
    }
}

/// Minimizes `phi(z) + r psi(z)` over a `grid_size` grid of the pair's interval.
///
/// With closed forms the grid argmin is returned; otherwise the sign change of
/// `phi'(z) + r psi'(z)` is located by linear interpolation. No sign change
/// means the objective is monotone and the minimum sits at an end of the grid.
pub fn check_unique_minimum(
    pair: &LossPair,
    omega: &OmegaTransform,
    r: f64,
    grid_size: usize,
) -> Result<MinimumVerdict> {
    if !omega.domain.contains(r) {
        return Err(Error::Domain { value: r, interval: alloc::format!("{}", omega.domain) });
    }
    if grid_size < 1000 {
        return Err(Error::Param(alloc::format!("grid_size must be at least 1000, got {grid_size}")));
    }
    let grid = pair.z_interval.grid(grid_size);
    let step = pair.z_interval.grid_step(grid_size);

    let mut changes = 0usize;
    let mut last_sign = 0i8;
    let mut root = None;
    let mut prev = (f64::NAN, f64::NAN);
    let mut any_zero_run = false;
    for &z in &grid {
        let d = pair.phi_prime(z) + r * pair.psi_prime(z);
        if d.is_nan() {
            return Err(Error::Domain { value: z, interval: alloc::format!("{}", pair.z_interval) });
        }
        let sign = if d > 0.0 {
            1
        } else if d < 0.0 {
            -1
        } else {
            any_zero_run = true;
            0
        };
        if sign != 0 {
            if last_sign != 0 && sign != last_sign {
                changes += 1;
                if changes == 1 {
                    let (z0, d0) = prev;
                    root = Some(if d0.is_finite() && d.is_finite() && d0 != d {
                        z0 - d0 * (z - z0) / (d - d0)
                    } else {
                        0.5 * (z0 + z)
                    });
                }
            }
            last_sign = sign;
            prev = (z, d);
        }
    }
    if changes > 1 {
        return Err(Error::NonUnique { changes });
    }

    let minimizer = if pair.has_closed_forms() {
        let mut best = (f64::INFINITY, grid[0]);
        for &z in &grid {
            let v = pair.phi_value(z) + r * pair.psi_value(z);
            if v < best.0 {
                best = (v, z);
            }
        }
        best.1
    } else {
        match root {
            Some(z) => z,
            None if last_sign > 0 => grid[0],
            None => grid[grid.len() - 1],
        }
    };

    Ok(MinimumVerdict {
        minimizer,
        target: omega.forward(r),
        grid_step: step,
        sign_changes: changes,
        is_unique: last_sign != 0 && (changes == 1 || !any_zero_run),
    })
}

/// Certifies strict convexity of `phi(z) + r psi(z)` for every `r > 0`:
/// `psi'' = rho' >= 0` and `phi'' = -(omega^{-1} rho)' >= 0` on the grid, with
/// at least one of them strictly positive at each point.
///
/// The inequalities are non-strict so that the closed boundary cases (for
/// instance `A1` at `alpha = -1` and `alpha = 0`) certify, as they should:
/// there one of `phi`, `psi` is affine and the other strictly convex.
pub fn check_convexity(rho: &GeneratorRho, omega: &OmegaTransform, grid_size: usize) -> Result<bool> {
    if omega.domain != Interval::POSITIVE || omega.is_limit() {
        return Err(Error::Param(alloc::format!(
            "convexity certification needs an invertible omega on (0, inf), got {} on {}",
            omega.name,
            omega.domain
        )));
    }
    for z in omega.range.grid(grid_size) {
        let rz = rho.eval(z);
        let rp = rho.derivative(z);
        let inv = omega.inverse(z);
        let inv_p = omega.inverse_prime(z);
        let psi2 = rp;
        let t1 = inv * rp;
        let t2 = inv_p * rz;
        let phi2 = -(t1 + t2);
        if !(psi2.is_finite() && phi2.is_finite()) {
            return Err(Error::Domain { value: z, interval: alloc::format!("{}", omega.range) });
        }
        let tol_psi = 1e-9 * (rp.abs() + rz.abs() / z.abs().max(1.0));
        let tol_phi = 1e-9 * (t1.abs() + t2.abs());
        if psi2 < -tol_psi || phi2 < -tol_phi {
            return Ok(false);
        }
        if psi2 <= tol_psi && phi2 <= tol_phi {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest residual of `phi'(z) + omega^{-1}(z) psi'(z)` over a grid, scaled
/// by `max(1, |phi'|, |omega^{-1} psi'|)`.
pub fn check_identity(pair: &LossPair, omega: &OmegaTransform, grid_size: usize) -> Result<f64> {
    if omega.is_limit() {
        return Err(Error::Param(alloc::format!("{} has no inverse", omega.name)));
    }
    let mut worst = 0.0f64;
    for z in pair.z_interval.grid(grid_size) {
        let a = pair.phi_prime(z);
        let b = omega.inverse(z) * pair.psi_prime(z);
        let res = (a + b).abs() / a.abs().max(b.abs()).max(1.0);
        if res.is_nan() {
            return Err(Error::Domain { value: z, interval: alloc::format!("{}", pair.z_interval) });
        }
        worst = worst.max(res);
    }
    Ok(worst)
}

/// Largest relative mismatch between the closed forms and their derivatives,
/// by central differences. `None` when the pair has no closed forms.
pub fn check_closed_forms(pair: &LossPair, grid_size: usize) -> Option<f64> {
    if !pair.has_closed_phi() && !pair.has_closed_psi() {
        return None;
    }
    let mut worst = 0.0f64;
    for z in pair.z_interval.grid(grid_size) {
        let h = fd_step(z).min(1e-3 * pair.z_interval.edge_distance(z));
        if pair.kinks.iter().any(|&k| (z - k).abs() <= 2.0 * h) {
            continue;
        }
        if let Some(phi) = pair.closed_phi() {
            let fd = central_difference(&**phi, z, h);
            let d = pair.phi_prime(z);
            worst = worst.max((fd - d).abs() / d.abs().max(1.0));
        }
        if let Some(psi) = pair.closed_psi() {
            let fd = central_difference(&**psi, z, h);
            let d = pair.psi_prime(z);
            worst = worst.max((fd - d).abs() / d.abs().max(1.0));
        }
    }
    Some(worst)
}

/// Results of the property suite for one preset.
#[derive(Debug, Clone)]
pub struct PresetReport {
    pub name: String,
    pub negativity: Option<Error>,
    /// Identity residual; for limit presets, the worst over the parent family.
    pub identity_residual: f64,
    pub closed_form_error: Option<f64>,
    /// Worst minimizer offset over the random `r` draws, in grid steps.
    pub minimizer_offset_steps: f64,
    pub non_unique: Option<Error>,
    pub convex: Option<bool>,
    /// Second-difference confirmation of a positive convexity certificate.
    pub convexity_confirmed: Option<bool>,
    pub scaling_invariant: bool,
}

pub const IDENTITY_TOLERANCE: f64 = 1e-9;
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-5;
pub const MINIMIZER_STEPS: f64 = 2.0;

impl PresetReport {
    pub fn passed(&self) -> bool {
        self.negativity.is_none()
            && self.identity_residual < IDENTITY_TOLERANCE
            && self.closed_form_error.is_none_or(|e| e < CLOSED_FORM_TOLERANCE)
            && self.minimizer_offset_steps <= MINIMIZER_STEPS
            && self.non_unique.is_none()
            && self.convexity_confirmed != Some(false)
            && self.scaling_invariant
    }
}

fn draw_r(rng: &mut rng::StreamRng, domain: &Interval) -> f64 {
    if domain.is_real_line() {
        rng::uniform(rng, -20.0, 20.0)
    } else {
        rng::uniform(rng, -3.0, 3.0).exp()
    }
}

fn parents(p: &PresetLoss) -> Vec<PresetLoss> {
    let make = |name, c| preset(name, PresetParams { c: Some(c), ..p.params }).expect("parent preset");
    match p.preset {
        Preset::D1Linear => alloc::vec![make(Preset::D1, 1.0), make(Preset::D1, 8.0)],
        Preset::D3Hinge => alloc::vec![make(Preset::D3, 1.0), make(Preset::D3, 2.0)],
        _ => Vec::new(),
    }
}

/// Runs the full property suite on one preset.
///
/// `r` is drawn uniformly on `[-20, 20]` when `I_r` is the real line and
/// log-uniformly on `[e^-3, e^3]` otherwise.
pub fn verify_preset(p: &PresetLoss, samples: usize, seed: u64) -> PresetReport {
    let pair = &p.pair;
    let limit = p.omega.is_limit();
    let negativity = if limit {
        pair.z_interval
            .grid(1000)
            .into_iter()
            .find(|&z| p.rho.eval(z) > 0.0)
            .map(|_| Error::Negativity { failed: 1, total: 1000 })
    } else {
        p.rho.check_negativity(&pair.z_interval, 1000).err()
    };

    let identity_residual = if limit {
        parents(p)
            .iter()
            .map(|q| check_identity(&q.pair, &q.omega, 1000).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    } else {
        check_identity(pair, &p.omega, 1000).unwrap_or(f64::INFINITY)
    };

    let closed_form_error = check_closed_forms(pair, 1000);

    let mut rng = rng::seeded(seed);
    let mut worst = 0.0f64;
    let mut non_unique = None;
    let rs: Vec<f64> = (0..samples).map(|_| draw_r(&mut rng, &p.omega.domain)).collect();
    for &r in &rs {
        match check_unique_minimum(pair, &p.omega, r, 10_000) {
            Ok(v) => {
                worst = worst.max(v.offset_steps());
                if !v.is_unique && non_unique.is_none() {
                    non_unique = Some(Error::NonUnique { changes: v.sign_changes });
                }
            }
            Err(e) => {
                worst = f64::INFINITY;
                non_unique.get_or_insert(e);
            }
        }
    }

    let (convex, convexity_confirmed) = if p.omega.domain == Interval::POSITIVE && !limit {
        let c = check_convexity(&p.rho, &p.omega, 1000).ok();
        let confirmed = if c == Some(true) {
            Some(confirm_convexity(pair, &rs[..rs.len().min(10)]))
        } else {
            None
        };
        (c, confirmed)
    } else {
        (None, None)
    };

    let scaling_invariant = {
        let targets: Vec<PresetLoss> = if limit { parents(p) } else { alloc::vec![p.clone()] };
        targets.iter().all(|q| scaling_invariance(q, &rs[..rs.len().min(10)], 3.7))
    };

    PresetReport {
        name: pair.name.clone(),
        negativity,
        identity_residual,
        closed_form_error,
        minimizer_offset_steps: worst,
        non_unique,
        convex,
        convexity_confirmed,
        scaling_invariant,
    }
}

/// `phi''(z) + r psi''(z) > 0` by central differences of the derivatives.
fn confirm_convexity(pair: &LossPair, rs: &[f64]) -> bool {
    let grid = pair.z_interval.grid(1000);
    rs.iter().all(|&r| {
        grid.iter().all(|&z| {
            let h = fd_step(z).min(1e-3 * pair.z_interval.edge_distance(z));
            let phi2 = central_difference(&|t| pair.phi_prime(t), z, h);
            let psi2 = central_difference(&|t| pair.psi_prime(t), z, h);
            phi2 + r * psi2 > 0.0
        })
    })
}

/// Replacing `rho` by `c rho` leaves the minimizer unchanged.
fn scaling_invariance(p: &PresetLoss, rs: &[f64], c: f64) -> bool {
    let Ok(base) = make_loss(&p.rho, &p.omega) else { return false };
    let Ok(scaled) = make_loss(&p.rho.scaled(c), &p.omega) else { return false };
    rs.iter().all(|&r| {
        match (check_unique_minimum(&base, &p.omega, r, 1000), check_unique_minimum(&scaled, &p.omega, r, 1000)) {
            (Ok(a), Ok(b)) => (a.minimizer - b.minimizer).abs() <= a.grid_step,
            _ => false,
        }
    })
}

/// The stock catalog swept by `verify-losses`.
pub fn catalog() -> Vec<PresetLoss> {
    let mut out = Vec::new();
    let mut push = |name, params| out.push(preset(name, params).expect("catalog preset"));
    for alpha in [-0.5, 0.0, 0.5, 1.0] {
        push(Preset::A1, PresetParams::alpha(alpha));
    }
    for alpha in [-2.0, -1.5, -1.0, -0.5, 0.0, 1.0] {
        push(Preset::A1, PresetParams::alpha(alpha).positive());
    }
    push(Preset::A2, PresetParams::default());
    push(Preset::A2, PresetParams::default().positive());
    push(Preset::A3, PresetParams::default());
    for alpha in [0.0, 0.25, 0.5, 1.0, 1.5] {
        push(Preset::B1, PresetParams::alpha(alpha));
    }
    push(Preset::B2, PresetParams::default());
    push(Preset::B3, PresetParams::default());
    push(Preset::C1, PresetParams::default());
    for alpha in [-1.0, -0.5, 0.0, 1.0, 2.0] {
        push(Preset::C2, PresetParams::alpha(alpha));
    }
    for c in [0.5, 1.0, 4.0] {
        push(Preset::D1, PresetParams::c(c));
    }
    push(Preset::D1Linear, PresetParams::default());
    for c in [1.0, 2.0] {
        push(Preset::D3, PresetParams::c(c));
    }
    push(Preset::D3Hinge, PresetParams::default());
    push(Preset::Exponential, PresetParams::default());
    out
}

/// Verifies every preset in `presets` with `samples` random `r` each.
pub fn verify_catalog(presets: &[PresetLoss], samples: usize, seed: u64) -> Vec<PresetReport> {
    presets
        .iter()
        .enumerate()
        .map(|(i, p)| verify_preset(p, samples, seed.wrapping_add(i as u64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn get(name: Preset, params: PresetParams) -> PresetLoss {
        preset(name, params).unwrap()
    }

    #[test]
    fn cross_entropy_minimum_at_half() {
        let p = get(Preset::C1, PresetParams::default());
        let v = check_unique_minimum(&p.pair, &p.omega, 1.0, 1000).unwrap();
        assert!(v.is_unique);
        assert!((v.minimizer - 0.5).abs() <= v.grid_step);
    }

    #[test]
    fn mean_square_minimum_at_r() {
        let p = get(Preset::A1, PresetParams::alpha(0.0).positive());
        let v = check_unique_minimum(&p.pair, &p.omega, 3.0, 10_000).unwrap();
        assert!(v.is_unique);
        assert!((v.minimizer - 3.0).abs() <= v.grid_step);
    }

    #[test]
    fn exponential_minimum_at_log_r() {
        let p = get(Preset::B1, PresetParams::alpha(0.5));
        let v = check_unique_minimum(&p.pair, &p.omega, 4.0, 10_000).unwrap();
        assert!(v.is_unique);
        assert!((v.minimizer - 4f64.ln()).abs() <= v.grid_step);
        assert!((v.target - 1.3862943611198906).abs() < 1e-15);
    }

    #[test]
    fn derivative_only_root_is_interpolated() {
        let p = get(Preset::B3, PresetParams::default());
        let v = check_unique_minimum(&p.pair, &p.omega, 2.0, 1000).unwrap();
        assert!((v.minimizer - 2f64.ln()).abs() < 0.1 * v.grid_step);
    }

    #[test]
    fn two_sign_changes_are_rejected() {
        let pair = LossPair::from_derivatives("bad", Interval::REAL, |z| z * z - 1.0, |_| 0.0);
        let omega = OmegaTransform::identity(Interval::REAL);
        assert!(matches!(check_unique_minimum(&pair, &omega, 0.0, 1000), Err(Error::NonUnique { changes: 2 })));
    }

    #[test]
    fn grid_and_domain_preconditions() {
        let p = get(Preset::C1, PresetParams::default());
        assert!(matches!(check_unique_minimum(&p.pair, &p.omega, -1.0, 1000), Err(Error::Domain { .. })));
        assert!(matches!(check_unique_minimum(&p.pair, &p.omega, 1.0, 10), Err(Error::Param(_))));
    }

    #[test]
    fn a1_convexity_boundaries() {
        let flags: Vec<bool> = [-1.5, -1.0, -0.5, 0.0, 1.0]
            .iter()
            .map(|&a| {
                let p = get(Preset::A1, PresetParams::alpha(a).positive());
                check_convexity(&p.rho, &p.omega, 1000).unwrap()
            })
            .collect();
        assert_eq!(flags, [false, true, true, true, false]);
    }

    #[test]
    fn b1_convexity_window() {
        for (alpha, expected) in [(-0.25, false), (0.0, true), (0.5, true), (1.0, true), (1.5, false)] {
            let p = get(Preset::B1, PresetParams::alpha(alpha));
            assert_eq!(check_convexity(&p.rho, &p.omega, 1000).unwrap(), expected, "alpha={alpha}");
        }
    }

    #[test]
    fn convexity_finite_difference_fallback_agrees() {
        let analytic = get(Preset::A1, PresetParams::alpha(-0.5).positive());
        let fd_rho = {
            let r = analytic.rho.clone();
            GeneratorRho::new(move |z| r.eval(z))
        };
        assert!(!fd_rho.has_derivative());
        assert!(check_convexity(&fd_rho, &analytic.omega, 1000).unwrap());
    }

    #[test]
    fn convexity_requires_positive_domain() {
        let p = get(Preset::A1, PresetParams::alpha(0.0));
        assert!(check_convexity(&p.rho, &p.omega, 100).is_err());
    }

    #[test]
    fn injected_positive_generator_fails_negativity() {
        let rho = GeneratorRho::with_derivative(|_| 1.0, |_| 0.0);
        let omega = OmegaTransform::identity(Interval::POSITIVE);
        let bad = PresetLoss {
            preset: Preset::A1,
            params: PresetParams::default(),
            pair: LossPair::from_derivatives("bad", Interval::POSITIVE, |z| -z, |_| 1.0),
            omega,
            rho,
            output: crate::network::OutputNonlinearity::Identity,
        };
        let report = verify_preset(&bad, 5, 1);
        assert!(matches!(report.negativity, Some(Error::Negativity { .. })));
        assert!(!report.passed());
    }
}
