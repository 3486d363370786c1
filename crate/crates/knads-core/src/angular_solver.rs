//! Angular eigenvalues λ_{k;j}(ω) by Prüfer shooting on (0, π).
//!
//! With Θ = ρ(cos η, sin η) the system √Δθ·JΘ' + MΘ = λΘ becomes
//!   η' = [λ + 2μa cosθ sinη cosη + S(sin²η − cos²η)]/√Δθ,
//!   (ln ρ)' = −[μa cosθ cos2η + S sin2η]/√Δθ,
//! where S is the diagonal entry of M. The matching defect η_L(c) − η_R(c) increases strictly
//! in λ and eigenvalues sit where it crosses a multiple of π.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::classify_angular;
use crate::error::{Error, Result};
use crate::geometry::{delta_theta, BlackHoleParams};
use crate::numerics::ode::Dopri5;
use crate::numerics::{illinois, quad::Quad};
use crate::operators::{angular_diagonal, g_primitive, indicial_exponents, ModeContext};

pub const MAX_WINDOW_EIGENVALUES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootConfig {
    /// Offset from the singular endpoints.
    pub eps: f64,
    /// Matching point.
    pub c: f64,
    pub tol: f64,
    /// Boundary parameters for limit-circle endpoints.
    pub beta_left: Option<f64>,
    pub beta_right: Option<f64>,
}

impl Default for ShootConfig {
    fn default() -> Self {
        ShootConfig { eps: 1e-6 * PI, c: FRAC_PI_2, tol: 1e-12, beta_left: None, beta_right: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointInit {
    pub position: f64,
    pub eta0: f64,
    pub exponent: f64,
    pub offset: f64,
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruferTrace {
    pub theta: Vec<f64>,
    pub eta: Vec<f64>,
    pub ln_rho: Vec<f64>,
    /// Whole turns of η along the trace, ⌊(η_end − η_start)/π⌉ toward zero.
    pub winding: i64,
    pub init: EndpointInit,
    pub max_local_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootResult {
    pub lambda: f64,
    pub eta_left: f64,
    pub eta_right: f64,
    pub left: PruferTrace,
    pub right: PruferTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumWindow {
    pub lo: f64,
    pub hi: f64,
    pub eigenvalues: Vec<f64>,
    /// Signed mode labels; label j ≥ 1 for defect jπ with j ≥ 1, else j − 1, so 0 is never used.
    pub labels: Vec<i64>,
    /// |defect(λ) − jπ| at each returned eigenvalue.
    pub residuals: Vec<f64>,
    pub oracle_deltas: Option<Vec<f64>>,
    /// Defect/π at the window ends.
    pub phase_lo: f64,
    pub phase_hi: f64,
    /// Number of multiples of π crossed between the window ends.
    pub winding_count: i64,
}

pub fn label_from_raw(j_raw: i64) -> i64 {
    if j_raw >= 1 {
        j_raw
    } else {
        j_raw - 1
    }
}

pub fn raw_from_label(j: i64) -> i64 {
    if j >= 1 {
        j
    } else {
        j + 1
    }
}

/// Angular operator for one (p, ctx) with its endpoint data resolved.
#[derive(Debug, Clone)]
pub struct AngularSolver {
    pub p: BlackHoleParams,
    pub ctx: ModeContext,
    pub cfg: ShootConfig,
    nu: f64,
    rho: f64,
    left_lp: bool,
    right_lp: bool,
}

impl AngularSolver {
    pub fn new(p: &BlackHoleParams, ctx: &ModeContext) -> Result<Self> {
        Self::with_config(p, ctx, ShootConfig::default())
    }

    pub fn with_config(p: &BlackHoleParams, ctx: &ModeContext, cfg: ShootConfig) -> Result<Self> {
        p.validate()?;
        ctx.validate()?;
        let (c0, cpi) = classify_angular(p, ctx);
        if !c0.verdict.is_lp() && cfg.beta_left.is_none() {
            return Err(Error::NotLimitPoint(format!("theta = 0 (exponent {})", c0.exponent)));
        }
        if !cpi.verdict.is_lp() && cfg.beta_right.is_none() {
            return Err(Error::NotLimitPoint(format!("theta = pi (exponent {})", cpi.exponent)));
        }
        if !(cfg.eps > 0.0 && cfg.c > cfg.eps && cfg.c < PI - cfg.eps) {
            return Err(Error::InvalidParams(format!("bad eps/c = {}/{}", cfg.eps, cfg.c)));
        }
        let (nu, rho) = indicial_exponents(p, ctx);
        Ok(AngularSolver { p: *p, ctx: *ctx, cfg, nu, rho, left_lp: c0.verdict.is_lp(), right_lp: cpi.verdict.is_lp() })
    }

    pub fn exponents(&self) -> (f64, f64) {
        (self.nu, self.rho)
    }

    /// Right-hand side H(θ, η, λ) of the phase equation.
    pub fn prufer_rhs(&self, theta: f64, eta: f64, lambda: f64) -> f64 {
        prufer_rhs(&self.p, &self.ctx, theta, eta, lambda)
    }

    fn rhs(&self, theta: f64, y: &[f64; 2], lambda: f64) -> [f64; 2] {
        let sq = delta_theta(&self.p, theta).sqrt();
        let s = angular_diagonal(&self.p, &self.ctx, theta);
        let off = self.ctx.mu * self.p.a * theta.cos();
        let (s2, c2) = (2.0 * y[0]).sin_cos();
        [(lambda + off * s2 - s * c2) / sq, -(off * c2 + s * s2) / sq]
    }

    fn init_left(&self, lambda: f64) -> EndpointInit {
        let eps = self.cfg.eps;
        let sx = self.p.xi().sqrt();
        let nu = self.nu;
        let eta0 = if self.left_lp {
            let sn = nu.signum();
            sn * FRAC_PI_4 + (lambda + sn * self.ctx.mu * self.p.a) * eps / (sx * (1.0 + 2.0 * nu.abs()))
        } else {
            lc_direction(nu.signum() * FRAC_PI_4, nu, eps, self.cfg.beta_left.unwrap_or(0.0))
        };
        EndpointInit { position: eps, eta0, exponent: nu, offset: eps, beta: self.cfg.beta_left.filter(|_| !self.left_lp) }
    }

    fn init_right(&self, lambda: f64) -> EndpointInit {
        let eps = self.cfg.eps;
        let sx = self.p.xi().sqrt();
        let rho = self.rho;
        let eta0 = if self.right_lp {
            let sr = rho.signum();
            -sr * FRAC_PI_4 - (lambda + sr * self.ctx.mu * self.p.a) * eps / (sx * (1.0 + 2.0 * rho.abs()))
        } else {
            lc_direction(-rho.signum() * FRAC_PI_4, rho, eps, self.cfg.beta_right.unwrap_or(0.0))
        };
        EndpointInit {
            position: PI - eps,
            eta0,
            exponent: rho,
            offset: eps,
            beta: self.cfg.beta_right.filter(|_| !self.right_lp),
        }
    }

    fn cap(&self, lambda: f64, shrink: f64) -> impl Fn(f64) -> f64 {
        let sx = self.p.xi().sqrt();
        let global = sx / (1.0 + lambda.abs()) * shrink;
        move |t: f64| (t.min(PI - t) * 0.25 * shrink).min(global)
    }

    fn run(&self, lambda: f64, init: &EndpointInit, shrink: f64, keep: bool) -> Result<PruferTrace> {
        let ode = Dopri5::with_tol(self.cfg.tol);
        let ln_rho0 = init.exponent.abs() * init.offset.ln();
        let mut theta = Vec::new();
        let mut eta = Vec::new();
        let mut ln_rho = Vec::new();
        let (end, stats) = ode.integrate(
            |t, y| self.rhs(t, y, lambda),
            init.position,
            [init.eta0, ln_rho0],
            self.cfg.c,
            self.cap(lambda, shrink),
            |t, y| {
                if keep {
                    theta.push(t);
                    eta.push(y[0]);
                    ln_rho.push(y[1]);
                }
            },
        )?;
        if !keep {
            theta = vec![init.position, self.cfg.c];
            eta = vec![init.eta0, end[0]];
            ln_rho = vec![ln_rho0, end[1]];
        }
        let winding = ((end[0] - init.eta0) / PI).trunc() as i64;
        Ok(PruferTrace { theta, eta, ln_rho, winding, init: init.clone(), max_local_error: stats.max_err })
    }

    fn traced(&self, lambda: f64, init: &EndpointInit) -> Result<PruferTrace> {
        let mut shrink = 1.0;
        loop {
            let tr = self.run(lambda, init, shrink, true)?;
            let smooth = tr.eta.windows(2).all(|w| (w[1] - w[0]).abs() < FRAC_PI_2);
            if smooth || shrink < 1e-3 {
                return Ok(tr);
            }
            shrink *= 0.5;
        }
    }

    /// Left and right phases at the matching point with their traces.
    pub fn shoot(&self, lambda: f64) -> Result<ShootResult> {
        let left = self.traced(lambda, &self.init_left(lambda))?;
        let right = self.traced(lambda, &self.init_right(lambda))?;
        Ok(ShootResult {
            lambda,
            eta_left: *left.eta.last().unwrap(),
            eta_right: *right.eta.last().unwrap(),
            left,
            right,
        })
    }

    /// η_L(c) − η_R(c).
    pub fn mismatch(&self, lambda: f64) -> Result<f64> {
        let l = self.run(lambda, &self.init_left(lambda), 1.0, false)?;
        let r = self.run(lambda, &self.init_right(lambda), 1.0, false)?;
        Ok(l.eta[1] - r.eta[1])
    }

    fn phase(&self, lambda: f64) -> Result<f64> {
        Ok(self.mismatch(lambda)? / PI)
    }

    fn solve_raw(&self, j_raw: i64, mut lo: f64, mut hi: f64, mut plo: f64, mut phi: f64) -> Result<(f64, f64)> {
        let target = j_raw as f64;
        // narrow the bracket to width 0.5 first
        while hi - lo > 0.5 {
            let mid = 0.5 * (lo + hi);
            let pm = self.phase(mid)?;
            if pm < target {
                lo = mid;
                plo = pm;
            } else {
                hi = mid;
                phi = pm;
            }
        }
        debug_assert!(plo <= target && phi >= target);
        let lam = illinois(|x| Ok(self.phase(x)? - target), lo, hi, 1e-13)?;
        let res = (self.mismatch(lam)? - target * PI).abs();
        Ok((lam, res))
    }

    /// All eigenvalues in [lo, hi].
    pub fn eigenvalues(&self, lo: f64, hi: f64) -> Result<SpectrumWindow> {
        if !(lo < hi) {
            return Err(Error::InvalidParams(format!("empty window [{lo}, {hi}]")));
        }
        let plo = self.phase(lo)?;
        let phi = self.phase(hi)?;
        let first = plo.ceil() as i64;
        let last = phi.floor() as i64;
        let count = (last - first + 1).max(0) as usize;
        if count > MAX_WINDOW_EIGENVALUES {
            return Err(Error::WindowTooWide(count));
        }
        // coarse samples give each target its own sub-bracket
        let n_samp = (((hi - lo) / 0.5).ceil() as usize).max(1);
        let grid: Vec<f64> = (0..=n_samp).map(|i| lo + (hi - lo) * i as f64 / n_samp as f64).collect();
        let mut phases = grid[1..n_samp].par_iter().map(|&x| self.phase(x)).collect::<Result<Vec<_>>>()?;
        phases.insert(0, plo);
        phases.push(phi);

        let found: Vec<(f64, f64)> = (first..=last)
            .into_par_iter()
            .map(|j| {
                let t = j as f64;
                let i = phases.partition_point(|&v| v < t);
                if i == 0 {
                    return Ok((grid[0], 0.0));
                }
                self.solve_raw(j, grid[i - 1], grid[i], phases[i - 1], phases[i])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SpectrumWindow {
            lo,
            hi,
            eigenvalues: found.iter().map(|v| v.0).collect(),
            labels: (first..=last).map(label_from_raw).collect(),
            residuals: found.iter().map(|v| v.1).collect(),
            oracle_deltas: None,
            phase_lo: plo,
            phase_hi: phi,
            winding_count: count as i64,
        })
    }

    /// Eigenvalue carrying the signed label `j`.
    pub fn eigenvalue_by_label(&self, j: i64) -> Result<f64> {
        if j == 0 {
            return Err(Error::InvalidParams("mode label 0 is not used".into()));
        }
        let target = raw_from_label(j) as f64;
        let (mut lo, mut hi) = (j as f64 - 1.0, j as f64 + 1.0);
        let mut plo = self.phase(lo)?;
        let mut step = 1.0;
        while plo > target {
            lo -= step;
            step *= 2.0;
            plo = self.phase(lo)?;
        }
        let mut phi = self.phase(hi)?;
        step = 1.0;
        while phi < target {
            hi += step;
            step *= 2.0;
            phi = self.phase(hi)?;
        }
        Ok(self.solve_raw(raw_from_label(j), lo, hi, plo, phi)?.0)
    }
}

/// Initial phase for a limit-circle end: cos β·(recessive) + sin β·(dominant) at offset `eps`,
/// with exponents ±`e` and the recessive direction at angle `rec`. With e = 0 the phase is β.
pub(crate) fn lc_direction(rec: f64, e: f64, eps: f64, beta: f64) -> f64 {
    if e == 0.0 {
        return beta;
    }
    let dom = -rec;
    let ea = e.abs();
    let cr = beta.cos() * eps.powf(ea);
    let cd = beta.sin() * eps.powf(-ea);
    let x = cr * rec.cos() + cd * dom.cos();
    let y = cr * rec.sin() + cd * dom.sin();
    y.atan2(x)
}

/// H(θ, η, λ) for the phase equation.
pub fn prufer_rhs(p: &BlackHoleParams, ctx: &ModeContext, theta: f64, eta: f64, lambda: f64) -> f64 {
    let sq = delta_theta(p, theta).sqrt();
    let s = angular_diagonal(p, ctx, theta);
    let (sn, cs) = eta.sin_cos();
    (lambda + 2.0 * p.a * ctx.mu * theta.cos() * sn * cs + s * (sn * sn - cs * cs)) / sq
}

pub fn shoot_angular(p: &BlackHoleParams, ctx: &ModeContext, lambda: f64) -> Result<ShootResult> {
    AngularSolver::new(p, ctx)?.shoot(lambda)
}

pub fn angular_eigenvalues(p: &BlackHoleParams, ctx: &ModeContext, lo: f64, hi: f64) -> Result<SpectrumWindow> {
    AngularSolver::new(p, ctx)?.eigenvalues(lo, hi)
}

/// p(θ) = −kΞ/(Δθ sinθ), the q_m = 0 exponent density.
pub fn appendix_b_p(a: f64, l: f64, k: f64, theta: f64) -> f64 {
    let xi = 1.0 - a * a / (l * l);
    let dt = 1.0 - (a / l).powi(2) * theta.cos().powi(2);
    -k * xi / (dt * theta.sin())
}

/// E(θ) = exp ∫_c^θ p, in closed form.
pub fn appendix_b_e(a: f64, l: f64, k: f64, theta: f64, c: f64) -> f64 {
    let prim = |t: f64| {
        let ct = t.cos();
        -0.5 * k * ((a / l) * ((l + a * ct) / (l - a * ct)).ln() - ((1.0 + ct) / (1.0 - ct)).ln())
    };
    (prim(theta) - prim(c)).exp()
}

/// Same weight from the primitive G used by the oracle.
pub fn appendix_b_e_ctx(p: &BlackHoleParams, ctx: &ModeContext, theta: f64) -> f64 {
    (-ctx.k * (g_primitive(p, theta) - g_primitive(p, FRAC_PI_2))).exp()
}

/// E(θ) by adaptive quadrature of p.
pub fn appendix_b_e_quadrature(a: f64, l: f64, k: f64, theta: f64, c: f64) -> Result<f64> {
    let q = Quad { abs_tol: 1e-14, rel_tol: 1e-14, max_panels: 4000 };
    Ok(q.integrate(|t| appendix_b_p(a, l, k, t), c, theta)?.exp())
}
