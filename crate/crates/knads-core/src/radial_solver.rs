//! Radial problem: the confined operator near infinity (Prüfer shooting in x with u = 1/r as a
//! state), and horizon-side certificates in y computed through w = ln(r − r₊).

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular_solver::SpectrumWindow;
use crate::error::{Error, Result};
use crate::geometry::Background;
use crate::numerics::ode::Dopri5;
use crate::numerics::quad::Quad;
use crate::numerics::{bisect, fit_slope};
use crate::operators::{appendix_c_integrals, frobenius_norm, HorizonChart, InfinityChart, ModeContext, TortoiseMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HinfConfig {
    /// Cutoff: the infinity end is x = −delta.
    pub delta: f64,
    /// Boundary parameter at r₀: η(x(r₀)) = −beta.
    pub beta: f64,
    /// Boundary parameter at infinity, needed only when μl < 1/2.
    pub beta_inf: Option<f64>,
    pub tol: f64,
    /// Constant added to the diagonal of V.
    pub shift: f64,
}

impl Default for HinfConfig {
    fn default() -> Self {
        HinfConfig { delta: 1e-5, beta: FRAC_PI_4, beta_inf: None, tol: 1e-12, shift: 0.0 }
    }
}

/// The operator restricted to (r₀, ∞).
#[derive(Debug, Clone)]
pub struct HinfSolver {
    pub bg: Background,
    pub ctx: ModeContext,
    pub lambda: f64,
    pub r0: f64,
    pub cfg: HinfConfig,
    chart: InfinityChart,
    pub x0: f64,
    u_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfinityTrace {
    pub eta_r0: f64,
    pub ln_rho_r0: f64,
    /// Fitted d ln ρ / d ln r of the recessive solution over large r.
    pub decay_exponent: f64,
}

impl HinfSolver {
    pub fn new(bg: &Background, ctx: &ModeContext, lambda: f64, r0: f64) -> Result<Self> {
        Self::with_config(bg, ctx, lambda, r0, HinfConfig::default())
    }

    pub fn with_config(bg: &Background, ctx: &ModeContext, lambda: f64, r0: f64, cfg: HinfConfig) -> Result<Self> {
        ctx.validate()?;
        if ctx.mu == 0.0 {
            return Err(Error::NotConfining(ctx.mu));
        }
        if ctx.mu * bg.params.l < 0.5 && cfg.beta_inf.is_none() {
            return Err(Error::NotLimitPoint(format!("r = infinity (mu l = {})", ctx.mu * bg.params.l)));
        }
        if !(cfg.delta > 0.0) {
            return Err(Error::InvalidParams(format!("delta = {}", cfg.delta)));
        }
        let map = TortoiseMap::new(bg)?;
        let x0 = map.x(r0)?;
        if x0 >= -cfg.delta {
            return Err(Error::InvalidParams(format!("r0 = {r0} lies beyond the cutoff")));
        }
        let chart = InfinityChart::new(&bg.params, ctx, lambda);
        let (ud, _) = Dopri5::with_tol(1e-14).solve(|_, y: &[f64; 1]| [chart.du_dx(y[0])], 0.0, [0.0], -cfg.delta)?;
        Ok(HinfSolver { bg: bg.clone(), ctx: *ctx, lambda, r0, cfg, chart, x0, u_delta: ud[0] })
    }

    fn xc(&self) -> f64 {
        0.5 * (self.x0 - self.cfg.delta)
    }

    /// State (u, η, ln ρ) in x.
    fn rhs(&self, omega: f64, y: &[f64; 3]) -> [f64; 3] {
        let u = y[0];
        let (pt, q, m) = self.chart.parts(u);
        let (s2, c2) = (2.0 * y[1]).sin_cos();
        [self.chart.du_dx(u), omega - pt - self.cfg.shift - q * s2 - m * c2, q * c2 - m * s2]
    }

    fn cap(&self) -> impl Fn(f64) -> f64 {
        let global = 0.05 * (self.xc() - self.x0).abs().max(1e-3);
        move |x: f64| (0.25 * x.abs()).min(global)
    }

    fn right_eta(&self, omega: f64) -> f64 {
        let l = self.bg.params.l;
        let ml = self.ctx.mu * l;
        let d = self.cfg.delta;
        match self.cfg.beta_inf {
            Some(beta) if ml < 0.5 => crate::angular_solver::lc_direction(FRAC_PI_4, ml, d / (l * l), beta),
            _ => FRAC_PI_4 - (l * (omega - self.cfg.shift) - self.lambda) * d / (l * (1.0 + 2.0 * ml)),
        }
    }

    /// (η_L(x_c) − η_R(x_c))/π, increasing in ω.
    pub fn phase(&self, omega: f64) -> Result<f64> {
        let ode = Dopri5::with_tol(self.cfg.tol);
        let f = |_: f64, y: &[f64; 3]| self.rhs(omega, y);
        let (l, _) = ode.integrate(f, self.x0, [1.0 / self.r0, -self.cfg.beta, 0.0], self.xc(), self.cap(), |_, _| {})?;
        let (r, _) =
            ode.integrate(f, -self.cfg.delta, [self.u_delta, self.right_eta(omega), 0.0], self.xc(), self.cap(), |_, _| {})?;
        Ok((l[1] - r[1]) / PI)
    }

    /// All eigenvalues ω in [lo, hi].
    pub fn eigenvalues(&self, lo: f64, hi: f64) -> Result<SpectrumWindow> {
        if !(lo < hi) {
            return Err(Error::InvalidParams(format!("empty window [{lo}, {hi}]")));
        }
        let n_samp = (((hi - lo) / 0.5).ceil() as usize).max(1);
        let grid: Vec<f64> = (0..=n_samp).map(|i| lo + (hi - lo) * i as f64 / n_samp as f64).collect();
        let phases = grid.par_iter().map(|&x| self.phase(x)).collect::<Result<Vec<_>>>()?;
        let first = phases[0].ceil() as i64;
        let last = phases[n_samp].floor() as i64;
        let count = (last - first + 1).max(0) as usize;
        if count > crate::angular_solver::MAX_WINDOW_EIGENVALUES {
            return Err(Error::WindowTooWide(count));
        }
        let found = (first..=last)
            .into_par_iter()
            .map(|j| {
                let t = j as f64;
                let i = phases.partition_point(|&v| v < t);
                if i == 0 {
                    return Ok((grid[0], 0.0));
                }
                let mut failure = None;
                let w = bisect(
                    |x| match self.phase(x) {
                        Ok(v) => v - t,
                        Err(e) => {
                            failure.get_or_insert(e);
                            f64::NAN
                        }
                    },
                    grid[i - 1],
                    grid[i],
                    1e-13,
                )?;
                if let Some(e) = failure {
                    return Err(e);
                }
                Ok((w, (self.phase(w)? - t).abs() * PI))
            })
            .collect::<Result<Vec<(f64, f64)>>>()?;
        Ok(SpectrumWindow {
            lo,
            hi,
            eigenvalues: found.iter().map(|v| v.0).collect(),
            labels: (first..=last).collect(),
            residuals: found.iter().map(|v| v.1).collect(),
            oracle_deltas: None,
            phase_lo: phases[0],
            phase_hi: phases[n_samp],
            winding_count: count as i64,
        })
    }

    /// The solution recessive at infinity, carried from the cutoff to r₀.
    pub fn recessive_to_r0(&self, omega: f64) -> Result<InfinityTrace> {
        let ode = Dopri5::with_tol(self.cfg.tol);
        let l = self.bg.params.l;
        let (r_lo, r_hi) = (1e2 * l, 1e4 * l);
        let mut lr = Vec::new();
        let mut lp = Vec::new();
        let (end, _) = ode.integrate(
            |_, y: &[f64; 3]| self.rhs(omega, y),
            -self.cfg.delta,
            [self.u_delta, self.right_eta(omega), 0.0],
            self.x0,
            self.cap(),
            |_, y| {
                let r = 1.0 / y[0];
                if r >= r_lo && r <= r_hi {
                    lr.push(r.ln());
                    lp.push(y[2]);
                }
            },
        )?;
        let decay_exponent = if lr.len() >= 3 { fit_slope(&lr, &lp) } else { f64::NAN };
        Ok(InfinityTrace { eta_r0: end[1], ln_rho_r0: end[2], decay_exponent })
    }
}

pub fn hinf_eigenvalues(
    bg: &Background,
    ctx: &ModeContext,
    lambda: f64,
    r0: f64,
    lo: f64,
    hi: f64,
) -> Result<SpectrumWindow> {
    HinfSolver::new(bg, ctx, lambda, r0)?.eigenvalues(lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    HinfDiscrete,
    HorAcL1,
    ExtremalCesaro,
    LevinsonPhiPlus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialCertificate {
    pub kind: CertificateKind,
    pub evidence: BTreeMap<String, f64>,
    pub norm: String,
    pub pass: bool,
}

impl RadialCertificate {
    fn new(kind: CertificateKind) -> Self {
        RadialCertificate { kind, evidence: BTreeMap::new(), norm: "frobenius".into(), pass: false }
    }

    fn put(&mut self, k: &str, v: f64) {
        self.evidence.insert(k.to_string(), v);
    }

    pub fn get(&self, k: &str) -> Option<f64> {
        self.evidence.get(k).copied()
    }
}

/// Lower end of the horizon-side integrals.
pub const HORIZON_C: f64 = 1.0;
pub const HORIZON_YS: [f64; 3] = [1e2, 1e3, 1e4];

/// ∫ |V − φ₊I| dy over [c, 10²], [10², 10³], [10³, 10⁴].
pub fn horizon_deviation_segments(bg: &Background, ctx: &ModeContext, lambda: f64) -> Result<[f64; 3]> {
    let map = TortoiseMap::new(bg)?;
    let chart = HorizonChart::new(bg, ctx, lambda);
    let ws = [
        map.log_gap_of_y(HORIZON_C)?,
        map.log_gap_of_y(HORIZON_YS[0])?,
        map.log_gap_of_y(HORIZON_YS[1])?,
        map.log_gap_of_y(HORIZON_YS[2])?,
    ];
    let q = Quad { abs_tol: 0.0, rel_tol: 1e-10, max_panels: 50000 };
    let f = |w: f64| {
        let v = frobenius_norm(&chart.v_minus_phi(w));
        if v == 0.0 {
            0.0
        } else {
            v / chart.dw_dy(w).abs()
        }
    };
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = q.integrate(f, ws[i + 1], ws[i])?;
    }
    Ok(out)
}

fn tail_ratio(t1: f64, t2: f64) -> f64 {
    if t1 == 0.0 && t2 == 0.0 {
        0.0
    } else {
        t2 / t1
    }
}

/// L¹ certificate: the last decade tail is ≤ 1% of the integral and the decade tail ratio < 0.05.
pub fn l1_certificate(bg: &Background, ctx: &ModeContext, lambda: f64) -> Result<RadialCertificate> {
    let s = horizon_deviation_segments(bg, ctx, lambda)?;
    let total = s[0] + s[1] + s[2];
    let ratio = tail_ratio(s[1], s[2]);
    let mut c = RadialCertificate::new(CertificateKind::HorAcL1);
    c.put("integral_1e2", s[0]);
    c.put("integral_1e3", s[0] + s[1]);
    c.put("integral_1e4", total);
    c.put("tail_1e2_1e3", s[1]);
    c.put("tail_1e3_1e4", s[2]);
    c.put("tail_ratio", ratio);
    c.pass = s[2] <= 0.01 * total && ratio < 0.05;
    Ok(c)
}

/// Cesàro certificate for the extremal case: the plain integral diverges (decade tails do not
/// shrink) while (1/Y)∫ decays in Y.
pub fn cesaro_certificate(bg: &Background, ctx: &ModeContext, lambda: f64) -> Result<RadialCertificate> {
    let s = horizon_deviation_segments(bg, ctx, lambda)?;
    let ints = [s[0], s[0] + s[1], s[0] + s[1] + s[2]];
    let ratio = tail_ratio(s[1], s[2]);
    let means: Vec<f64> = ints.iter().zip(HORIZON_YS).map(|(i, y)| i / y).collect();
    let lx: Vec<f64> = HORIZON_YS.iter().map(|y| y.ln()).collect();
    let decay = if means.iter().all(|m| *m > 0.0) {
        fit_slope(&lx, &means.iter().map(|m| m.ln()).collect::<Vec<_>>())
    } else {
        f64::NEG_INFINITY
    };
    let mut c = RadialCertificate::new(CertificateKind::ExtremalCesaro);
    for (i, y) in HORIZON_YS.iter().enumerate() {
        c.put(&format!("integral_{y:e}"), ints[i]);
        c.put(&format!("cesaro_mean_{y:e}"), means[i]);
    }
    c.put("tail_ratio", ratio);
    c.put("decay_exponent", decay);
    c.pass = ratio >= 0.5 && decay <= -0.5;
    Ok(c)
}

/// L¹ certificate off the extremal set, Cesàro certificate on it.
pub fn horizon_ac_certificate(bg: &Background, ctx: &ModeContext, lambda: f64) -> Result<RadialCertificate> {
    if bg.horizons.extremal {
        cesaro_certificate(bg, ctx, lambda)
    } else {
        l1_certificate(bg, ctx, lambda)
    }
}

/// Integrate X' = R̄X in y at ω = φ₊ for the two unit vectors.
pub fn levinson_phi_plus(bg: &Background, ctx: &ModeContext, lambda: f64) -> Result<RadialCertificate> {
    if bg.horizons.extremal {
        return Err(Error::ExtremalUnsupported);
    }
    let map = TortoiseMap::new(bg)?;
    let chart = HorizonChart::new(bg, ctx, lambda);
    let segs = horizon_deviation_segments(bg, ctx, lambda)?;
    let y_end = HORIZON_YS[2];

    // start where the remaining ∫|R̄| is below 0.1
    let q = Quad { abs_tol: 1e-14, rel_tol: 1e-10, max_panels: 50000 };
    let w_end = map.log_gap_of_y(y_end)?;
    let tail_from = |y: f64| -> Result<f64> {
        let w = map.log_gap_of_y(y)?;
        q.integrate(|s| frobenius_norm(&chart.v_minus_phi(s)) / chart.dw_dy(s).abs(), w_end, w)
    };
    let mut y_start = HORIZON_C;
    let mut tail = tail_from(y_start)?;
    while tail > 0.1 {
        y_start *= 2.0;
        if y_start >= 0.5 * y_end {
            break;
        }
        tail = tail_from(y_start)?;
    }
    let w_start = map.log_gap_of_y(y_start)?;

    let ode = Dopri5::with_tol(1e-11);
    let rhs = |_: f64, s: &[f64; 3]| {
        let v = chart.v_minus_phi(s[0]);
        let (x1, x2) = (s[1], s[2]);
        [chart.dw_dy(s[0]), -v[0][1] * x1 - v[1][1] * x2, v[0][0] * x1 + v[0][1] * x2]
    };
    let mut finals = Vec::new();
    let mut min_norm = f64::INFINITY;
    let mut max_change: f64 = 0.0;
    for init in [[1.0, 0.0], [0.0, 1.0]] {
        let mut obs = |_: f64, s: &[f64; 3]| min_norm = min_norm.min(s[1].hypot(s[2]));
        let (mid, _) = ode.integrate(rhs, y_start, [w_start, init[0], init[1]], 0.5 * y_end, |_| f64::INFINITY, &mut obs)?;
        let (end, _) = ode.integrate(rhs, 0.5 * y_end, mid, y_end, |_| f64::INFINITY, &mut obs)?;
        let change = (end[1] - mid[1]).hypot(end[2] - mid[2]) / end[1].hypot(end[2]);
        max_change = max_change.max(change);
        finals.push([end[1], end[2]]);
    }
    let det = finals[0][0] * finals[1][1] - finals[0][1] * finals[1][0];
    let ratio = tail_ratio(segs[1], segs[2]);
    let mut c = RadialCertificate::new(CertificateKind::LevinsonPhiPlus);
    c.put("phi_plus", chart.phi_plus);
    c.put("y_start", y_start);
    c.put("tail_integral_from_start", tail);
    c.put("r_bar_integral", segs.iter().sum());
    c.put("r_bar_tail_ratio", ratio);
    c.put("x1_final_0", finals[0][0]);
    c.put("x1_final_1", finals[0][1]);
    c.put("x2_final_0", finals[1][0]);
    c.put("x2_final_1", finals[1][1]);
    c.put("determinant", det);
    c.put("min_norm", min_norm);
    c.put("relative_change_per_doubling", max_change);
    c.pass = tail <= 0.1 && ratio < 0.05 && min_norm > 0.5 && det.abs() > 0.5 && max_change < 1e-4;
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationReport {
    pub omega: f64,
    pub phi_plus: f64,
    /// Fitted −dη/dy over the last decade.
    pub slope: f64,
    pub relative_error: f64,
    /// max ρ / min ρ over the last decade.
    pub radius_ratio: f64,
    pub pass: bool,
}

pub struct HorizonRun {
    pub y: Vec<f64>,
    pub eta: Vec<f64>,
    pub ln_rho: Vec<f64>,
    pub end: [f64; 3],
}

/// Prüfer phase and radius in y for J∂x X + VX = ωX, starting at y0 with given (η, ln ρ).
/// Samples are kept for y ≥ keep_from.
pub fn horizon_prufer(
    bg: &Background,
    ctx: &ModeContext,
    lambda: f64,
    omega: f64,
    y0: f64,
    start: (f64, f64),
    y_end: f64,
    keep_from: f64,
) -> Result<HorizonRun> {
    let map = TortoiseMap::new(bg)?;
    let chart = HorizonChart::new(bg, ctx, lambda);
    let w0 = map.log_gap_of_y(y0)?;
    let dw = omega - chart.phi_plus;
    let rhs = |_: f64, s: &[f64; 3]| {
        let v = chart.v_minus_phi(s[0]);
        let (s2, c2) = (2.0 * s[1]).sin_cos();
        let c = s[1].cos();
        let sn = s[1].sin();
        let quad = v[0][0] * c * c + v[0][1] * s2 + v[1][1] * sn * sn;
        [chart.dw_dy(s[0]), -(dw - quad), -(v[0][1] * c2 - 0.5 * (v[0][0] - v[1][1]) * s2)]
    };
    let mut run = HorizonRun { y: Vec::new(), eta: Vec::new(), ln_rho: Vec::new(), end: [0.0; 3] };
    // step control does the work; the cap only keeps a few hundred samples in the kept range
    let cap = (0.5 / (dw.abs() + 1e-3)).max((y_end - keep_from) / 400.0);
    let (end, _) = Dopri5::with_tol(1e-11).integrate(rhs, y0, [w0, start.0, start.1], y_end, |_| cap, |y, s| {
        if y >= keep_from {
            run.y.push(y);
            run.eta.push(s[1]);
            run.ln_rho.push(s[2]);
        }
    })?;
    run.end = end;
    Ok(run)
}

pub fn horizon_oscillation(bg: &Background, ctx: &ModeContext, lambda: f64, omega: f64) -> Result<OscillationReport> {
    if bg.horizons.extremal {
        return Err(Error::ExtremalUnsupported);
    }
    let phi_plus = crate::operators::phi_plus(bg, ctx);
    let gap = omega - phi_plus;
    if gap.abs() < 1e-6 {
        return Err(Error::TooCloseToPhiPlus(gap.abs()));
    }
    let y_end = HORIZON_YS[2];
    let run = horizon_prufer(bg, ctx, lambda, omega, HORIZON_C, (0.0, 0.0), y_end, 0.1 * y_end)?;
    let neg: Vec<f64> = run.eta.iter().map(|e| -e).collect();
    let slope = fit_slope(&run.y, &neg);
    let (lo, hi) = run.ln_rho.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let radius_ratio = (hi - lo).exp();
    let relative_error = ((slope - gap) / gap).abs();
    Ok(OscillationReport {
        omega,
        phi_plus,
        slope,
        relative_error,
        radius_ratio,
        pass: relative_error < 1e-3 && radius_ratio < 10.0,
    })
}

/// ∫_{r₀}^{R} Q dr at R = 10²l, 10³l, 10⁴l; the growth per unit ln R should approach μl.
pub fn discreteness_certificate(bg: &Background, ctx: &ModeContext, r0: f64) -> Result<RadialCertificate> {
    if ctx.mu == 0.0 {
        return Err(Error::NotConfining(ctx.mu));
    }
    let l = bg.params.l;
    let radii = [1e2 * l, 1e3 * l, 1e4 * l];
    let ints = appendix_c_integrals(bg, ctx, r0, &radii)?;
    let rate = (ints[2] - ints[1]) / 10f64.ln();
    let ml = ctx.mu * l;
    let mut c = RadialCertificate::new(CertificateKind::HinfDiscrete);
    for (r, v) in radii.iter().zip(&ints) {
        c.put(&format!("q_integral_{:e}", r), *v);
    }
    c.put("growth_rate", rate);
    c.put("mu_l", ml);
    c.pass = ((rate - ml) / ml).abs() < 1e-2;
    Ok(c)
}
