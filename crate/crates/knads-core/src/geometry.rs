//! Kerr-Newman-AdS background: structure functions, horizons, extremality, Komar charges and
//! the rotation weight α.
//!
//! Horizons are the roots of Δ_r. Since Δ_r'' = 12r²/l² + 2(1 + a²/l²) > 0, Δ_r is convex and
//! has at most two real roots, both non-negative when m > 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::bisect;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlackHoleParams {
    pub m: f64,
    pub a: f64,
    pub q_e: f64,
    pub q_m: f64,
    pub l: f64,
}

impl BlackHoleParams {
    pub fn new(m: f64, a: f64, q_e: f64, q_m: f64, l: f64) -> Result<Self> {
        let p = BlackHoleParams { m, a, q_e, q_m, l };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.m, self.a, self.q_e, self.q_m, self.l];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if self.l <= 0.0 {
            return Err(Error::InvalidParams(format!("l = {} must be positive", self.l)));
        }
        if self.a * self.a >= self.l * self.l {
            return Err(Error::InvalidParams(format!("a² < l² violated (a = {}, l = {})", self.a, self.l)));
        }
        if self.m <= 0.0 {
            return Err(Error::InvalidParams(format!("m = {} must be positive", self.m)));
        }
        Ok(())
    }

    pub fn xi(&self) -> f64 {
        1.0 - self.a * self.a / (self.l * self.l)
    }

    pub fn z2(&self) -> f64 {
        self.q_e * self.q_e + self.q_m * self.q_m
    }

    /// Cosmological constant −3/l².
    pub fn cosmological_constant(&self) -> f64 {
        -3.0 / (self.l * self.l)
    }

    pub fn extremal_mass(&self) -> f64 {
        extremal_mass(self.a, self.z2(), self.l)
    }

    /// Coefficients (c0, c1, c2, c3, c4) of Δ_r in powers of r.
    pub fn delta_r_coefficients(&self) -> [f64; 5] {
        let a2 = self.a * self.a;
        let l2 = self.l * self.l;
        [a2 + self.z2(), -2.0 * self.m, 1.0 + a2 / l2, 0.0, 1.0 / l2]
    }
}

pub fn delta_r(p: &BlackHoleParams, r: f64) -> f64 {
    let a2 = p.a * p.a;
    (r * r + a2) * (1.0 + r * r / (p.l * p.l)) - 2.0 * p.m * r + p.z2()
}

pub fn delta_r_prime(p: &BlackHoleParams, r: f64) -> f64 {
    let l2 = p.l * p.l;
    4.0 * r * r * r / l2 + 2.0 * r * (1.0 + p.a * p.a / l2) - 2.0 * p.m
}

pub fn delta_theta(p: &BlackHoleParams, theta: f64) -> f64 {
    let c = theta.cos();
    1.0 - p.a * p.a / (p.l * p.l) * c * c
}

/// Closed-form extremal mass: the m at which the two horizons merge.
pub fn extremal_mass(a: f64, z2: f64, l: f64) -> f64 {
    let al = a * a / (l * l);
    let s = ((1.0 + al).powi(2) + 12.0 / (l * l) * (a * a + z2)).sqrt();
    l / (3.0 * 6f64.sqrt()) * (s + 2.0 * al + 2.0) * (s - al - 1.0).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Komar {
    pub mass: f64,
    pub angular_momentum: f64,
    pub electric_charge: f64,
    pub magnetic_charge: f64,
}

pub fn komar(p: &BlackHoleParams) -> Komar {
    let xi = p.xi();
    Komar {
        mass: p.m / (xi * xi),
        angular_momentum: p.a * p.m / (xi * xi),
        electric_charge: p.q_e / xi,
        magnetic_charge: p.q_m / xi,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonData {
    pub r_plus: f64,
    /// Inner root; absent when the inner root sits at r = 0.
    pub r_minus: Option<f64>,
    pub all_real_roots: Vec<f64>,
    pub extremal: bool,
}

impl HorizonData {
    /// Inner root for factorizing Δ_r; 0 when absent, r₊ when extremal.
    pub fn inner(&self) -> f64 {
        self.r_minus.unwrap_or(0.0)
    }
}

const EXTREMAL_REL: f64 = 1e-8;

pub fn find_horizons(p: &BlackHoleParams) -> Result<HorizonData> {
    p.validate()?;
    let coeffs = p.delta_r_coefficients();
    let scale = coeffs.iter().fold(1.0f64, |s, c| s.max(c.abs()));
    let tol = 1e-12 * scale;

    let mut r_max = p.l * (1.0 + 2.0 * (p.m * p.l).sqrt());
    while delta_r_prime(p, r_max) <= 0.0 || delta_r(p, r_max) <= 0.0 {
        r_max *= 2.0;
    }
    // Δ_r' is increasing and Δ_r'(0) = −2m < 0, so the minimizer is bracketed by [0, r_max].
    let r_star = bisect(|r| delta_r_prime(p, r), 0.0, r_max, 1e-15 * r_max)?;
    let d_min = delta_r(p, r_star);

    if d_min > tol {
        return Err(Error::NoHorizon { m: p.m, m_ext: p.extremal_mass() });
    }
    if d_min >= -tol {
        return Ok(HorizonData { r_plus: r_star, r_minus: Some(r_star), all_real_roots: vec![r_star, r_star], extremal: true });
    }

    let polish = |lo: f64, hi: f64| -> Result<f64> {
        let r = bisect(|r| delta_r(p, r), lo, hi, 1e-14 * hi.max(1e-300))?;
        let nr = r - delta_r(p, r) / delta_r_prime(p, r);
        if nr > lo && nr < hi && delta_r(p, nr).abs() <= delta_r(p, r).abs() {
            Ok(nr)
        } else {
            Ok(r)
        }
    };
    let r_plus = polish(r_star, r_max)?;
    let (r_minus, inner) = if coeffs[0] == 0.0 {
        (None, 0.0)
    } else {
        let rm = polish(0.0, r_star)?;
        (Some(rm), rm)
    };
    let extremal = r_plus - inner <= EXTREMAL_REL * r_plus;
    Ok(HorizonData { r_plus, r_minus, all_real_roots: vec![inner, r_plus], extremal })
}

/// Metric parameters (m, z²) from the horizon radii. Inverse of [`find_horizons`] on the
/// non-extremal branch.
pub fn reparameterize(r_plus: f64, r_minus: f64, a: f64, l: f64) -> Result<(f64, f64)> {
    if !(l > 0.0) || a * a >= l * l {
        return Err(Error::InvalidRoots(format!("need l > 0 and a² < l² (a = {a}, l = {l})")));
    }
    if !(r_plus >= r_minus && r_minus >= 0.0) {
        return Err(Error::InvalidRoots(format!("need r+ ≥ r- ≥ 0, got ({r_plus}, {r_minus})")));
    }
    let (rp, rm) = (r_plus, r_minus);
    let l2 = l * l;
    let a2 = a * a;
    let m = (rp + rm) * (rp * rp + rm * rm + a2 + l2) / (2.0 * l2);
    // constant term of the factorized Δ_r equals a² + z²
    let z2 = rp * rm * (rp * rp + rm * rm + rp * rm + a2 + l2) / l2 - a2;
    if z2 < 0.0 {
        return Err(Error::InvalidRoots(format!("z² = {z2} < 0")));
    }
    Ok((m, z2))
}

/// Jacobian of (r₊, r₋) ↦ (m, z²).
pub fn reparameterization_jacobian(r_plus: f64, r_minus: f64, a: f64, l: f64) -> f64 {
    let (rp, rm) = (r_plus, r_minus);
    let c = a * a + l * l;
    (3.0 * rp * rp + rm * rm + 2.0 * rp * rm + c) * (rp * rp + 3.0 * rm * rm + 2.0 * rp * rm + c) * (rp - rm)
        / (2.0 * l.powi(4))
}

/// Background with its horizon data resolved once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Background {
    pub params: BlackHoleParams,
    pub horizons: HorizonData,
}

impl Background {
    pub fn new(params: BlackHoleParams) -> Result<Self> {
        let horizons = find_horizons(&params)?;
        Ok(Background { params, horizons })
    }

    pub fn r_plus(&self) -> f64 {
        self.horizons.r_plus
    }

    /// Δ_r/(r − r₊), evaluated from the factorized quartic (no cancellation near r₊).
    pub fn delta_over_gap(&self, r: f64) -> f64 {
        let p = &self.params;
        let rm = self.horizons.inner();
        (r - rm) * self.factor_quadratic(r) / (p.l * p.l)
    }

    /// Δ_r/(r − r₊) at r = r₊ + gap, keeping r − r₋ = gap + (r₊ − r₋) free of cancellation.
    pub fn delta_over_gap_at(&self, gap: f64) -> f64 {
        let p = &self.params;
        let rp = self.horizons.r_plus;
        let rm = self.horizons.inner();
        (gap + (rp - rm)) * self.factor_quadratic(rp + gap) / (p.l * p.l)
    }

    /// Remaining quadratic factor r² + (r₊ + r₋)r + r₊² + r₋² + r₊r₋ + a² + l².
    pub fn factor_quadratic(&self, r: f64) -> f64 {
        let p = &self.params;
        let rp = self.horizons.r_plus;
        let rm = self.horizons.inner();
        r * r + (rp + rm) * r + rp * rp + rm * rm + rp * rm + p.a * p.a + p.l * p.l
    }
}

/// h(r) = (a²/l²)(r² + l²)/(r² + a²).
pub fn h_bound(p: &BlackHoleParams, r: f64) -> f64 {
    let a2 = p.a * p.a;
    a2 / (p.l * p.l) * (r * r + p.l * p.l) / (r * r + a2)
}

/// √h(r₊), the uniform bound on α over the exterior.
pub fn sqrt_h_rplus(bg: &Background) -> f64 {
    h_bound(&bg.params, bg.r_plus()).sqrt()
}

/// α(r, θ) = (√Δ_r/√Δ_θ)·|a| sinθ/(r² + a²).
pub fn alpha_weight(bg: &Background, r: f64, theta: f64) -> Result<f64> {
    let p = &bg.params;
    if r < bg.r_plus() {
        return Err(Error::OutsideExterior { r, r_plus: bg.r_plus() });
    }
    let dr = delta_r(p, r).max(0.0);
    Ok(dr.sqrt() / delta_theta(p, theta).sqrt() * p.a.abs() * theta.sin() / (r * r + p.a * p.a))
}
