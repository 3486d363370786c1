//! Coefficients of the separated angular operator and the radial Hamiltonian, plus the
//! tortoise-coordinate machinery.
//!
//! Angular picture: the Liouville-transformed system √Δθ·J∂θ + M(θ) with J = [[0, 1], [−1, 0]],
//! self-adjoint on L²(dθ/√Δθ). Radial picture: J∂x + V in the coordinate x with
//! dx/dr = (r² + a²)/Δ_r, x → 0⁻ at infinity; y = −x grows without bound at the horizon.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{delta_r, delta_theta, Background, BlackHoleParams};
use crate::numerics::newton_bracketed;
use crate::numerics::quad::Quad;

pub type Mat2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeContext {
    pub mu: f64,
    pub e: f64,
    /// Half-integer wave number k = n + 1/2.
    pub k: f64,
    pub omega: f64,
    #[serde(default)]
    pub gauge_b: f64,
}

impl ModeContext {
    pub fn new(mu: f64, e: f64, k: f64, omega: f64) -> Result<Self> {
        let c = ModeContext { mu, e, k, omega, gauge_b: 0.0 };
        c.validate()?;
        Ok(c)
    }

    pub fn with_gauge(mut self, b: f64) -> Self {
        self.gauge_b = b;
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if [self.mu, self.e, self.k, self.omega, self.gauge_b].iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite mode parameter".into()));
        }
        let twok = 2.0 * self.k;
        if (twok - twok.round()).abs() > 1e-12 || (twok.round() as i64).rem_euclid(2) != 1 {
            return Err(Error::InvalidParams(format!("k = {} is not a half-odd integer", self.k)));
        }
        if self.mu < 0.0 {
            return Err(Error::InvalidParams(format!("mu = {} must be non-negative", self.mu)));
        }
        Ok(())
    }

    /// n with k = n + 1/2.
    pub fn n(&self) -> i64 {
        (self.k - 0.5).round() as i64
    }

    /// d = q_m·e/Ξ.
    pub fn d(&self, p: &BlackHoleParams) -> f64 {
        p.q_m * self.e / p.xi()
    }
}

/// Frobenius exponents (ν at θ = 0, ρ₀ at θ = π) including the gauge shift.
pub fn indicial_exponents(p: &BlackHoleParams, ctx: &ModeContext) -> (f64, f64) {
    indicial_exponents_kd(ctx.k, ctx.d(p), ctx.gauge_b)
}

pub fn indicial_exponents_kd(k: f64, d: f64, b: f64) -> (f64, f64) {
    (k - d * (1.0 - b), k + d * (1.0 + b))
}

/// σ(θ) = d(cosθ − b) − k.
pub fn sigma(p: &BlackHoleParams, ctx: &ModeContext, theta: f64) -> f64 {
    ctx.d(p) * (theta.cos() - ctx.gauge_b) - ctx.k
}

/// Diagonal coefficient S(θ) = Ξσ/(√Δθ sinθ) + aω sinθ/√Δθ; M = S·σ₃ − μa cosθ·σ₁.
pub fn angular_diagonal(p: &BlackHoleParams, ctx: &ModeContext, theta: f64) -> f64 {
    let s = theta.sin();
    let sq = delta_theta(p, theta).sqrt();
    p.xi() * sigma(p, ctx, theta) / (sq * s) + p.a * ctx.omega * s / sq
}

pub fn angular_matrix(p: &BlackHoleParams, ctx: &ModeContext, theta: f64) -> Result<Mat2> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::DomainError(format!("theta = {theta}")));
    }
    let s = angular_diagonal(p, ctx, theta);
    let off = -ctx.mu * p.a * theta.cos();
    Ok([[s, off], [off, -s]])
}

/// Measure weight 1/√Δθ.
pub fn angular_weight(p: &BlackHoleParams, theta: f64) -> f64 {
    1.0 / delta_theta(p, theta).sqrt()
}

/// G(θ) = ∫ Ξ/(Δθ sinθ) dθ = (a/l)·artanh(a cosθ/l) + ln tan(θ/2).
pub fn g_primitive(p: &BlackHoleParams, theta: f64) -> f64 {
    (p.a / p.l) * (p.a * theta.cos() / p.l).atanh() + (0.5 * theta).tan().ln()
}

/// Primitive of Ξσ(θ)/(Δθ sinθ):  d·ln(sinθ/√Δθ) − (d·b + k)·G(θ).
pub fn sigma_primitive(p: &BlackHoleParams, ctx: &ModeContext, theta: f64) -> f64 {
    let d = ctx.d(p);
    d * (theta.sin() / delta_theta(p, theta).sqrt()).ln() - (d * ctx.gauge_b + ctx.k) * g_primitive(p, theta)
}

/// P(r) = aΞk + e(q_e r + b q_m a), returned as the pair (aΞk + e b q_m a, e q_e).
pub fn p_coefficients(p: &BlackHoleParams, ctx: &ModeContext) -> (f64, f64) {
    (p.a * p.xi() * ctx.k + ctx.e * ctx.gauge_b * p.q_m * p.a, ctx.e * p.q_e)
}

pub fn p_of_r(p: &BlackHoleParams, ctx: &ModeContext, r: f64) -> f64 {
    let (c0, c1) = p_coefficients(p, ctx);
    c0 + c1 * r
}

/// Potential of the tortoise form: diagonal (P ± μr√Δr)/(r² + a²), off-diagonal λ√Δr/(r² + a²).
pub fn radial_potential(bg: &Background, ctx: &ModeContext, lambda: f64, r: f64) -> Result<Mat2> {
    if r <= bg.r_plus() {
        return Err(Error::OutsideExterior { r, r_plus: bg.r_plus() });
    }
    let p = &bg.params;
    let sd = delta_r(p, r).max(0.0).sqrt();
    let den = r * r + p.a * p.a;
    let pr = p_of_r(p, ctx, r);
    let mm = ctx.mu * r * sd;
    let q = lambda * sd / den;
    Ok([[(pr + mm) / den, q], [q, (pr - mm) / den]])
}

/// Horizon level φ₊ = P(r₊)/(r₊² + a²).
pub fn phi_plus(bg: &Background, ctx: &ModeContext) -> f64 {
    let p = &bg.params;
    let rp = bg.r_plus();
    p_of_r(p, ctx, rp) / (rp * rp + p.a * p.a)
}

/// Q(r) = μr/√Δr.
pub fn appendix_c_q(bg: &Background, ctx: &ModeContext, r: f64) -> Result<f64> {
    if r <= bg.r_plus() {
        return Err(Error::OutsideExterior { r, r_plus: bg.r_plus() });
    }
    Ok(ctx.mu * r / delta_r(&bg.params, r).sqrt())
}

/// ∫_{r0}^{R} Q dr for each R in `radii`.
pub fn appendix_c_integrals(bg: &Background, ctx: &ModeContext, r0: f64, radii: &[f64]) -> Result<Vec<f64>> {
    let quad = Quad { abs_tol: 1e-12, rel_tol: 1e-12, max_panels: 20000 };
    let mut out = Vec::with_capacity(radii.len());
    for &big in radii {
        // integrate in s = ln r: Q·r ds
        let v = quad.integrate(
            |s| {
                let r = s.exp();
                ctx.mu * r * r / delta_r(&bg.params, r).sqrt()
            },
            r0.ln(),
            big.ln(),
        )?;
        out.push(v);
    }
    Ok(out)
}

/// Coefficients in u = 1/r, regular up to u = 0 (r = ∞).
#[derive(Debug, Clone, Copy)]
pub struct InfinityChart {
    a2: f64,
    l2: f64,
    m: f64,
    c0: f64,
    p0: f64,
    p1: f64,
    mu: f64,
    lambda: f64,
}

impl InfinityChart {
    pub fn new(p: &BlackHoleParams, ctx: &ModeContext, lambda: f64) -> Self {
        let (p0, p1) = p_coefficients(p, ctx);
        InfinityChart {
            a2: p.a * p.a,
            l2: p.l * p.l,
            m: p.m,
            c0: p.a * p.a + p.z2(),
            p0,
            p1,
            mu: ctx.mu,
            lambda,
        }
    }

    /// D(u) = u⁴Δr(1/u).
    pub fn d_of_u(&self, u: f64) -> f64 {
        let u2 = u * u;
        1.0 / self.l2 + (1.0 + self.a2 / self.l2) * u2 - 2.0 * self.m * u2 * u + self.c0 * u2 * u2
    }

    pub fn du_dx(&self, u: f64) -> f64 {
        -self.d_of_u(u) / (1.0 + self.a2 * u * u)
    }

    /// (P/(r²+a²), λ√Δ/(r²+a²), μr√Δ/(r²+a²)) at r = 1/u.
    pub fn parts(&self, u: f64) -> (f64, f64, f64) {
        let den = 1.0 + self.a2 * u * u;
        let sd = self.d_of_u(u).max(0.0).sqrt();
        ((self.p0 * u * u + self.p1 * u) / den, self.lambda * sd / den, self.mu * sd / (u * den))
    }

    pub fn potential(&self, u: f64) -> Mat2 {
        let (pt, q, m) = self.parts(u);
        [[pt + m, q], [q, pt - m]]
    }
}

/// Coefficients in w = ln(r − r₊), regular up to w = −∞ (the horizon).
#[derive(Debug, Clone)]
pub struct HorizonChart {
    bg: Background,
    p0: f64,
    p1: f64,
    mu: f64,
    lambda: f64,
    pub phi_plus: f64,
}

impl HorizonChart {
    pub fn new(bg: &Background, ctx: &ModeContext, lambda: f64) -> Self {
        let (p0, p1) = p_coefficients(&bg.params, ctx);
        HorizonChart { bg: bg.clone(), p0, p1, mu: ctx.mu, lambda, phi_plus: phi_plus(bg, ctx) }
    }

    pub fn r(&self, w: f64) -> f64 {
        self.bg.r_plus() + w.exp()
    }

    pub fn dw_dy(&self, w: f64) -> f64 {
        let r = self.r(w);
        let a2 = self.bg.params.a * self.bg.params.a;
        -self.bg.delta_over_gap_at(w.exp()) / (r * r + a2)
    }

    fn sqrt_delta(&self, w: f64) -> f64 {
        let g = w.exp();
        (g * self.bg.delta_over_gap_at(g)).max(0.0).sqrt()
    }

    /// V(r(w)) − φ₊·I, computed without cancellation.
    pub fn v_minus_phi(&self, w: f64) -> Mat2 {
        let r = self.r(w);
        let rp = self.bg.r_plus();
        let a2 = self.bg.params.a * self.bg.params.a;
        let den = r * r + a2;
        let dp = w.exp() * (-self.p0 * (r + rp) + self.p1 * (a2 - r * rp)) / (den * (rp * rp + a2));
        let sd = self.sqrt_delta(w);
        let m = self.mu * r * sd / den;
        let q = self.lambda * sd / den;
        [[dp + m, q], [q, dp - m]]
    }
}

pub fn frobenius_norm(m: &Mat2) -> f64 {
    (m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1]).sqrt()
}

/// The tortoise coordinate y(r) = ∫_r^∞ (t² + a²)/Δ_t dt and x = −y.
///
/// Far piece: t = 1/u turns the integrand into (1 + a²u²)/D(u) on [0, 1/r], smooth at u = 0.
/// Near piece: t = r₊ + e^v turns it into (t² + a²)/(Δ_t/(t − r₊)) in v.
#[derive(Debug, Clone)]
pub struct TortoiseMap {
    bg: Background,
    chart: InfinityChart,
    r_mid: f64,
    y_mid: f64,
    quad: Quad,
}

impl TortoiseMap {
    pub fn new(bg: &Background) -> Result<Self> {
        let p = &bg.params;
        let dummy = ModeContext { mu: 0.0, e: 0.0, k: 0.5, omega: 0.0, gauge_b: 0.0 };
        let chart = InfinityChart::new(p, &dummy, 0.0);
        let r_mid = bg.r_plus() + 0.5 * bg.r_plus().max(p.l);
        let quad = Quad { abs_tol: 1e-15, rel_tol: 1e-14, max_panels: 20000 };
        let mut map = TortoiseMap { bg: bg.clone(), chart, r_mid, y_mid: 0.0, quad };
        map.y_mid = map.far(1.0 / r_mid)?;
        Ok(map)
    }

    fn far_integrand(&self, u: f64) -> f64 {
        (1.0 + self.chart.a2 * u * u) / self.chart.d_of_u(u)
    }

    fn far(&self, u: f64) -> Result<f64> {
        self.quad.integrate(|s| self.far_integrand(s), 0.0, u)
    }

    fn near_integrand(&self, v: f64) -> f64 {
        let g = v.exp();
        let t = self.bg.r_plus() + g;
        (t * t + self.chart.a2) / self.bg.delta_over_gap_at(g)
    }

    fn v_mid(&self) -> f64 {
        (self.r_mid - self.bg.r_plus()).ln()
    }

    fn near(&self, v: f64) -> Result<f64> {
        Ok(self.y_mid + self.quad.integrate(|s| self.near_integrand(s), v, self.v_mid())?)
    }

    pub fn background(&self) -> &Background {
        &self.bg
    }

    pub fn y(&self, r: f64) -> Result<f64> {
        let rp = self.bg.r_plus();
        if !(r > rp) {
            return Err(Error::OutsideExterior { r, r_plus: rp });
        }
        if r >= self.r_mid {
            self.far(1.0 / r)
        } else {
            self.near((r - rp).ln())
        }
    }

    pub fn x(&self, r: f64) -> Result<f64> {
        Ok(-self.y(r)?)
    }

    /// y as a function of v = ln(r − r₊); usable beyond the range where r is representable.
    pub fn y_of_log_gap(&self, v: f64) -> Result<f64> {
        if v >= self.v_mid() {
            self.y(self.bg.r_plus() + v.exp())
        } else {
            self.near(v)
        }
    }

    /// Inverse of y, returned as v = ln(r − r₊) so that deep horizon values stay resolved.
    pub fn log_gap_of_y(&self, y: f64) -> Result<f64> {
        if !(y > 0.0) {
            return Err(Error::DomainError(format!("tortoise y = {y} must be positive")));
        }
        let rp = self.bg.r_plus();
        if y <= self.y_mid {
            let u_mid = 1.0 / self.r_mid;
            let u = newton_bracketed(|u| Ok((self.far(u)? - y, self.far_integrand(u))), 0.0, u_mid, 1e-15)?;
            return Ok((1.0 / u - rp).ln());
        }
        let v_mid = self.v_mid();
        let mut lo = v_mid - 1.0;
        let mut step = 1.0;
        while self.near(lo)? < y {
            step *= 2.0;
            lo -= step;
            if step > 1e7 {
                return Err(Error::RootSearch(format!("cannot bracket tortoise y = {y}")));
            }
        }
        newton_bracketed(|v| Ok((self.near(v)? - y, -self.near_integrand(v))), lo, v_mid, 1e-15)
    }

    pub fn r_of_y(&self, y: f64) -> Result<f64> {
        Ok(self.bg.r_plus() + self.log_gap_of_y(y)?.exp())
    }

    pub fn r_of_x(&self, x: f64) -> Result<f64> {
        self.r_of_y(-x)
    }
}

pub fn tortoise_y(bg: &Background, r: f64) -> Result<f64> {
    TortoiseMap::new(bg)?.y(r)
}

pub fn tortoise_x(bg: &Background, r: f64) -> Result<f64> {
    TortoiseMap::new(bg)?.x(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(k: f64) -> ModeContext {
        ModeContext::new(1.0, 0.0, k, 0.0).unwrap()
    }

    #[test]
    fn equator_matrix_in_sphere_limit() {
        let p = BlackHoleParams::new(1.0, 0.0, 0.0, 0.0, 1.0).unwrap();
        let m = angular_matrix(&p, &ctx(0.5), PI / 2.0).unwrap();
        assert!((m[0][0] + 0.5).abs() < 1e-15 && (m[1][1] - 0.5).abs() < 1e-15);
        assert_eq!(m[0][1], 0.0);
        assert!(angular_matrix(&p, &ctx(0.5), 0.0).is_err());
    }

    #[test]
    fn rejects_integer_k() {
        assert!(ModeContext::new(1.0, 0.0, 1.0, 0.0).is_err());
        assert!(ModeContext::new(1.0, 0.0, -1.5, 0.0).is_ok());
    }

    #[test]
    fn primitive_differentiates_back() {
        let p = BlackHoleParams::new(1.0, 0.4, 0.0, 0.3, 1.3).unwrap();
        let c = ModeContext::new(1.0, 0.7, 1.5, 0.0).unwrap().with_gauge(1.0);
        for &th in &[0.2, 1.0, 2.5] {
            let h = 1e-5;
            let num = (sigma_primitive(&p, &c, th + h) - sigma_primitive(&p, &c, th - h)) / (2.0 * h);
            let exact = p.xi() * sigma(&p, &c, th) / (delta_theta(&p, th) * th.sin());
            assert!((num - exact).abs() < 1e-8, "{num} vs {exact}");
        }
    }
}
