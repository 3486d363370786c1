//! Coupled (ω, λ) scan: for each frequency, the angular eigenvalues λ_j(ω) feed the radial
//! problem, and the solution that is recessive at infinity is followed to the horizon to see
//! whether it could be normalizable there.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular_solver::AngularSolver;
use crate::classify::sa_report;
use crate::error::{Error, Result};
use crate::geometry::{Background, BlackHoleParams};
use crate::numerics::fit_slope;
use crate::operators::{phi_plus, ModeContext, TortoiseMap};
use crate::radial_solver::{horizon_prufer, levinson_phi_plus, HinfSolver, HORIZON_YS};

pub const DEFAULT_AMPLITUDE_THRESHOLD: f64 = 1e-3;
pub const LEVINSON_GAP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub omega: f64,
    pub j: i64,
    pub lambda: f64,
    pub phi_plus: f64,
    pub slope: f64,
    pub amplitude_ratio: f64,
    pub decay_exponent: f64,
    /// NN: not normalizable at the horizon; BC: bound-state candidate; LV: Levinson branch at φ₊.
    pub verdict_code: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanVerdict {
    NoBoundStateFound,
    BoundStateCandidate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub params: BlackHoleParams,
    pub ctx_base: ModeContext,
    pub omega_grid: Vec<f64>,
    pub labels: Vec<i64>,
    pub r0: f64,
    pub threshold: f64,
    pub rows: Vec<ScanRow>,
    pub min_amplitude: f64,
    /// Grid steps where some |Δλ_j| exceeded a|Δω| + 1e-8.
    pub lipschitz_violations: usize,
    pub verdict: ScanVerdict,
}

pub const CSV_HEADER: &str = "omega,j,lambda,phi_plus,slope,amplitude_ratio,decay_exponent,verdict_code";

impl ScanResult {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&format!(
                "{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
                r.omega, r.j, r.lambda, r.phi_plus, r.slope, r.amplitude_ratio, r.decay_exponent, r.verdict_code
            ));
        }
        s
    }

    /// Recompute the summary fields from `rows`.
    pub fn refresh(&mut self) {
        self.min_amplitude = self.rows.iter().map(|r| r.amplitude_ratio).fold(f64::INFINITY, f64::min);
        self.verdict = if self.min_amplitude > self.threshold {
            ScanVerdict::NoBoundStateFound
        } else {
            ScanVerdict::BoundStateCandidate
        };
        let a = self.params.a.abs();
        let mut bad = 0;
        for &j in &self.labels {
            let curve: Vec<&ScanRow> = self.rows.iter().filter(|r| r.j == j).collect();
            for w in curve.windows(2) {
                if (w[1].lambda - w[0].lambda).abs() > a * (w[1].omega - w[0].omega).abs() + 1e-8 {
                    bad += 1;
                }
            }
        }
        self.lipschitz_violations = bad;
    }
}

/// Evenly spaced grid from `lo` to `hi` inclusive.
pub fn omega_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n.max(1) as f64).collect()
}

fn scan_point(
    bg: &Background,
    ctx: &ModeContext,
    lambda: f64,
    j: i64,
    r0: f64,
    y0: f64,
    threshold: f64,
) -> Result<ScanRow> {
    let omega = ctx.omega;
    let pp = phi_plus(bg, ctx);
    let inf = HinfSolver::new(bg, ctx, lambda, r0)?.recessive_to_r0(omega)?;
    let mut row = ScanRow {
        omega,
        j,
        lambda,
        phi_plus: pp,
        slope: 0.0,
        amplitude_ratio: 0.0,
        decay_exponent: inf.decay_exponent,
        verdict_code: String::new(),
    };
    if (omega - pp).abs() < LEVINSON_GAP {
        let cert = levinson_phi_plus(bg, ctx, lambda)?;
        row.amplitude_ratio = cert.get("min_norm").unwrap_or(0.0);
        row.verdict_code = if cert.pass { "LV" } else { "BC" }.into();
        return Ok(row);
    }
    let y_end = HORIZON_YS[2];
    let run = horizon_prufer(bg, ctx, lambda, omega, y0, (inf.eta_r0, 0.0), y_end, 0.1 * y_end)?;
    let neg: Vec<f64> = run.eta.iter().map(|e| -e).collect();
    row.slope = fit_slope(&run.y, &neg);
    row.amplitude_ratio = run.ln_rho.iter().fold(f64::INFINITY, |m, &v| m.min(v)).exp();
    row.verdict_code = if row.amplitude_ratio > threshold { "NN" } else { "BC" }.into();
    Ok(row)
}

/// Run the scan on `omega_grid` for the signed angular labels in `labels`. `r0` defaults to
/// r₊ + l.
pub fn coupled_scan(
    p: &BlackHoleParams,
    ctx_base: &ModeContext,
    omega_grid: &[f64],
    labels: &[i64],
    r0: Option<f64>,
) -> Result<ScanResult> {
    let bg = Background::new(*p)?;
    if bg.horizons.extremal {
        return Err(Error::ExtremalUnsupported);
    }
    let report = sa_report(p, ctx_base)?;
    if !report.essentially_self_adjoint {
        let bad: Vec<String> =
            report.endpoints.iter().filter(|e| !e.verdict.is_lp()).map(|e| format!("{:?}", e.endpoint)).collect();
        return Err(Error::NotLimitPoint(bad.join(", ")));
    }
    if labels.contains(&0) {
        return Err(Error::InvalidParams("mode label 0 is not used".into()));
    }
    let r0 = r0.unwrap_or(bg.r_plus() + p.l);
    let y0 = TortoiseMap::new(&bg)?.y(r0)?;
    if y0 >= 0.1 * HORIZON_YS[2] {
        return Err(Error::InvalidParams(format!("r0 = {r0} is too close to the horizon")));
    }
    let threshold = DEFAULT_AMPLITUDE_THRESHOLD;
    let per_omega: Vec<Vec<ScanRow>> = omega_grid
        .par_iter()
        .map(|&omega| {
            let ctx = ctx_base.with_omega(omega);
            let ang = AngularSolver::new(p, &ctx)?;
            labels
                .iter()
                .map(|&j| {
                    let lambda = ang.eigenvalue_by_label(j)?;
                    scan_point(&bg, &ctx, lambda, j, r0, y0, threshold)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = ScanResult {
        params: *p,
        ctx_base: *ctx_base,
        omega_grid: omega_grid.to_vec(),
        labels: labels.to_vec(),
        r0,
        threshold,
        rows: per_omega.into_iter().flatten().collect(),
        min_amplitude: 0.0,
        lipschitz_violations: 0,
        verdict: ScanVerdict::BoundStateCandidate,
    };
    out.refresh();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PeriodicityVerdict {
    /// Every frequency 2πn/T in the scanned range was checked and rejected.
    NoPeriodicSolution,
    PeriodicCandidate { n: i64, omega: f64, amplitude: f64 },
    Inconclusive(InconclusiveReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InconclusiveReason {
    RangeMiss,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicityReport {
    pub period: f64,
    /// (n, 2πn/T, smallest amplitude over the nearest grid rows).
    pub checked: Vec<(i64, f64, f64)>,
    pub verdict: PeriodicityVerdict,
}

/// Frequencies 2πn/T (n ∈ ℤ, static n = 0 included) inside the scanned range, each judged by the
/// grid rows nearest to it.
pub fn periodicity_verdict(scan: &ScanResult, period: f64) -> Result<PeriodicityReport> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidParams(format!("period = {period}")));
    }
    let grid = &scan.omega_grid;
    let (lo, hi) = grid.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &w| (a.min(w), b.max(w)));
    let base = 2.0 * PI / period;
    let n_lo = (lo / base).ceil() as i64;
    let n_hi = (hi / base).floor() as i64;
    let mut checked = Vec::new();
    let mut verdict = PeriodicityVerdict::NoPeriodicSolution;
    for n in n_lo..=n_hi {
        let w = base * n as f64;
        // bracketing grid points (one when w sits on the grid)
        let mut near: Vec<f64> = Vec::new();
        let below = grid.iter().copied().filter(|&g| g <= w).fold(f64::NEG_INFINITY, f64::max);
        let above = grid.iter().copied().filter(|&g| g >= w).fold(f64::INFINITY, f64::min);
        for g in [below, above] {
            if g.is_finite() && !near.contains(&g) {
                near.push(g);
            }
        }
        let amp = scan
            .rows
            .iter()
            .filter(|r| near.contains(&r.omega))
            .map(|r| r.amplitude_ratio)
            .fold(f64::INFINITY, f64::min);
        checked.push((n, w, amp));
        if !(amp > scan.threshold) && matches!(verdict, PeriodicityVerdict::NoPeriodicSolution) {
            verdict = PeriodicityVerdict::PeriodicCandidate { n, omega: w, amplitude: amp };
        }
    }
    if checked.is_empty() {
        verdict = PeriodicityVerdict::Inconclusive(InconclusiveReason::RangeMiss);
    }
    Ok(PeriodicityReport { period, checked, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        let g = omega_grid(-2.0, 2.0, 0.05);
        assert_eq!(g.len(), 81);
        assert_eq!(g[0], -2.0);
        assert_eq!(g[80], 2.0);
    }
}
