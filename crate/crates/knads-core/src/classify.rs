//! Limit-point / limit-circle verdicts at the four singular endpoints.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{delta_r, Background, BlackHoleParams};
use crate::numerics::fit_slope;
use crate::numerics::ode::Dopri5;
use crate::operators::{frobenius_norm, indicial_exponents_kd, radial_potential, HorizonChart, ModeContext, TortoiseMap};

// |exponent| ≥ 1/2 with room for d = q_m e/Ξ computed in floating point
const HALF_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    ThetaZero,
    ThetaPi,
    Horizon,
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    LimitPoint,
    LimitCircle,
}

impl Verdict {
    pub fn is_lp(self) -> bool {
        self == Verdict::LimitPoint
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointClass {
    pub endpoint: Endpoint,
    pub exponent: f64,
    pub verdict: Verdict,
    pub rationale_code: String,
}

fn half_rule(e: f64) -> Verdict {
    if e.abs() >= 0.5 - HALF_TOL {
        Verdict::LimitPoint
    } else {
        Verdict::LimitCircle
    }
}

/// Both angular endpoints from (k, d, b). The exponents are k − d(1 − b) at θ = 0 and
/// k + d(1 + b) at θ = π; an endpoint is limit point iff the exponent has modulus ≥ 1/2.
pub fn classify_angular_kd(k: f64, d: f64, b: f64) -> (EndpointClass, EndpointClass) {
    let (nu, rho) = indicial_exponents_kd(k, d, b);
    let code = |plain: &str| if b == 1.0 { "condirac".to_string() } else { plain.to_string() };
    (
        EndpointClass { endpoint: Endpoint::ThetaZero, exponent: nu, verdict: half_rule(nu), rationale_code: code("condt0") },
        EndpointClass { endpoint: Endpoint::ThetaPi, exponent: rho, verdict: half_rule(rho), rationale_code: code("condtpi") },
    )
}

pub fn classify_angular(p: &BlackHoleParams, ctx: &ModeContext) -> (EndpointClass, EndpointClass) {
    classify_angular_kd(ctx.k, ctx.d(p), ctx.gauge_b)
}

/// Code naming the combined angular condition that applies for this (d, b).
pub fn angular_condition_code(d: f64, b: f64) -> &'static str {
    if b == 1.0 {
        "condirac"
    } else if d.abs() <= 0.5 {
        "condmin"
    } else {
        "condmax"
    }
}

/// Integers n in `range` whose partial wave k = n + 1/2 fails at one of the angular endpoints.
pub fn angular_failing_n(d: f64, b: f64, range: std::ops::RangeInclusive<i64>) -> Vec<i64> {
    range
        .filter(|&n| {
            let (l, r) = classify_angular_kd(n as f64 + 0.5, d, b);
            !(l.verdict.is_lp() && r.verdict.is_lp())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizationReport {
    pub d: f64,
    pub integral: bool,
    /// Failing n for non-integer d (empty otherwise).
    pub exceptional_n: Vec<i64>,
}

pub fn quantization_check_d(d: f64) -> QuantizationReport {
    let integral = (d - d.round()).abs() <= 1e-12 * d.abs().max(1.0);
    let exceptional_n = if integral {
        Vec::new()
    } else {
        let fl = d.abs().floor() as i64;
        vec![-1 - fl, fl]
    };
    QuantizationReport { d, integral, exceptional_n }
}

pub fn quantization_check(p: &BlackHoleParams, e: f64) -> QuantizationReport {
    quantization_check_d(p.q_m * e / p.xi())
}

/// r = ∞: limit point iff μl ≥ 1/2, the boundary value included.
pub fn classify_radial_infinity(mu: f64, l: f64) -> EndpointClass {
    let ml = mu * l;
    let verdict = if ml >= 0.5 { Verdict::LimitPoint } else { Verdict::LimitCircle };
    EndpointClass { endpoint: Endpoint::Infinity, exponent: ml, verdict, rationale_code: "thm3".into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonClass {
    pub class: EndpointClass,
    /// max over sampled y ∈ [1, 10³] of the Frobenius norm of V(r(y)) − φ₊·I.
    pub sup_deviation: f64,
}

/// The horizon end is always limit point; the bounded potential in y is measured alongside.
pub fn classify_radial_horizon(bg: &Background, ctx: &ModeContext, lambda: f64) -> Result<HorizonClass> {
    let map = TortoiseMap::new(bg)?;
    let chart = HorizonChart::new(bg, ctx, lambda);
    let v_lo = map.log_gap_of_y(1e3)?;
    let v_hi = map.log_gap_of_y(1.0)?;
    let n = 400;
    let mut sup: f64 = 0.0;
    for i in 0..=n {
        let w = v_lo + (v_hi - v_lo) * i as f64 / n as f64;
        sup = sup.max(frobenius_norm(&chart.v_minus_phi(w)));
    }
    Ok(HorizonClass {
        class: EndpointClass {
            endpoint: Endpoint::Horizon,
            exponent: 0.0,
            verdict: Verdict::LimitPoint,
            rationale_code: "horizon_bounded".into(),
        },
        sup_deviation: sup,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfAdjointnessReport {
    pub endpoints: Vec<EndpointClass>,
    pub quantization: QuantizationReport,
    pub angular_code: String,
    /// n near the origin whose angular operator is not essentially self-adjoint.
    pub angular_failing_n: Vec<i64>,
    pub essentially_self_adjoint: bool,
}

pub fn sa_report(p: &BlackHoleParams, ctx: &ModeContext) -> Result<SelfAdjointnessReport> {
    let bg = Background::new(*p)?;
    let (c0, cpi) = classify_angular(p, ctx);
    let inf = classify_radial_infinity(ctx.mu, p.l);
    let hor = classify_radial_horizon(&bg, ctx, 0.0)?.class;
    let d = ctx.d(p);
    let span = (2.0 * d.abs()).ceil() as i64 + 3;
    let failing = angular_failing_n(d, ctx.gauge_b, -span..=span);
    let endpoints = vec![c0, cpi, hor, inf];
    let ok = endpoints.iter().all(|c| c.verdict.is_lp());
    Ok(SelfAdjointnessReport {
        endpoints,
        quantization: quantization_check(p, ctx.e),
        angular_code: angular_condition_code(d, ctx.gauge_b).into(),
        angular_failing_n: failing,
        essentially_self_adjoint: ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfinityGrowthReport {
    pub mu_l: f64,
    /// Fitted d ln|X| / d ln r of the growing solution on [10³, 10⁵].
    pub dominant_exponent: f64,
    /// Same for the decaying solution.
    pub recessive_exponent: f64,
    /// log10 of (∫ over [10⁴, 10⁵]) / (∫ over [10³, 10⁴]) of |X_dom|²(r² + a²)/Δr.
    pub l2_decade_log_ratio: f64,
    pub verdict: Verdict,
}

/// Decade ratios below this are read as a convergent (square-integrable) tail.
pub const L2_LOG_RATIO_THRESHOLD: f64 = -0.005;

fn radial_rhs_s(bg: &Background, ctx: &ModeContext, lambda: f64, s: f64, y: &[f64; 3]) -> [f64; 3] {
    let p = &bg.params;
    let r = s.exp();
    let dl = delta_r(p, r);
    let den = r * r + p.a * p.a;
    let v = radial_potential(bg, ctx, lambda, r).expect("r outside the horizon");
    let a11 = ctx.omega - v[0][0];
    let a12 = -v[0][1];
    let a22 = ctx.omega - v[1][1];
    // X' = −J(ω − V)X in x, dx/ds = r(r² + a²)/Δ
    let f = r * den / dl;
    let x1 = y[0];
    let x2 = y[1];
    [
        -f * (a12 * x1 + a22 * x2),
        f * (a11 * x1 + a12 * x2),
        (x1 * x1 + x2 * x2) * den / dl * r,
    ]
}

/// Numerical Weyl test at r = ∞: growth exponents of the two solutions and the L² behaviour of
/// the growing one. Requires r₊ < 100.
pub fn infinity_growth_check(bg: &Background, ctx: &ModeContext, lambda: f64) -> Result<InfinityGrowthReport> {
    let ode = Dopri5::with_tol(1e-11);
    let rhs = |s: f64, y: &[f64; 3]| radial_rhs_s(bg, ctx, lambda, s, y);
    let s_of = |r: f64| f64::ln(r);
    let norm = |y: &[f64; 3]| (y[0] * y[0] + y[1] * y[1]).sqrt().ln();

    let (fit_lo, fit_hi) = (s_of(1e3), s_of(1e5));
    let mut dom = (Vec::new(), Vec::new());
    let mut marks = Vec::new();
    let mut state = [1.0, -1.0, 0.0];
    let mut s0 = s_of(1e2);
    for r_end in [1e3, 1e4, 1e5] {
        let (y, _) = ode.integrate(rhs, s0, state, s_of(r_end), |_| 0.05, |s, y| {
            if s >= fit_lo && s <= fit_hi {
                dom.0.push(s);
                dom.1.push(norm(y));
            }
        })?;
        marks.push(y[2]);
        state = y;
        s0 = s_of(r_end);
    }
    let ratio = (marks[2] - marks[1]) / (marks[1] - marks[0]);

    let mut rec = (Vec::new(), Vec::new());
    ode.integrate(rhs, s_of(1e6), [1.0, 1.0, 0.0], fit_lo, |_| 0.05, |s, y| {
        if s >= fit_lo && s <= fit_hi {
            rec.0.push(s);
            rec.1.push(norm(y));
        }
    })?;

    let log_ratio = ratio.log10();
    Ok(InfinityGrowthReport {
        mu_l: ctx.mu * bg.params.l,
        dominant_exponent: fit_slope(&dom.0, &dom.1),
        recessive_exponent: fit_slope(&rec.0, &rec.1),
        l2_decade_log_ratio: log_ratio,
        verdict: if log_ratio < L2_LOG_RATIO_THRESHOLD { Verdict::LimitCircle } else { Verdict::LimitPoint },
    })
}
