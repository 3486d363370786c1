//! Finite-difference reference spectra on staggered grids.
//!
//! The two spinor components live on interleaved points, so each row of the first-order system
//! couples only to its neighbours of the other component and the matrix is tridiagonal. Singular
//! terms of the form s(x)·Θ next to a derivative are absorbed by exponential fitting:
//! Θ' + sΘ = e^{−F}(e^{F}Θ)' with F' = s, differenced across one cell.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classify::classify_angular;
use crate::error::{Error, Result};
use crate::geometry::{delta_theta, Background, BlackHoleParams};
use crate::numerics::ode::Dopri5;
use crate::numerics::tridiag::{inverse_iteration, ql_eigenvalues};
use crate::operators::{indicial_exponents, sigma_primitive, InfinityChart, ModeContext, TortoiseMap};

pub const MIN_GRID: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedOperator {
    pub positions: Vec<f64>,
    /// 0 for the first spinor component, 1 for the second.
    pub components: Vec<u8>,
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    /// Measure weight at each unknown (already folded into `diag`/`off`).
    pub weight: Vec<f64>,
    pub h: f64,
    pub offset_left: f64,
    pub offset_right: f64,
    pub scheme: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleWindow {
    pub eigenvalues: Vec<f64>,
    /// Eigenvalues rejected by the component-balance test.
    pub spurious: Vec<f64>,
    /// ‖even unknowns‖/‖odd unknowns‖ for each accepted eigenvalue.
    pub component_ratios: Vec<f64>,
}

impl DiscretizedOperator {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn shifted(mut self, s: f64) -> Self {
        // the symmetrized pencil absorbs the weight, so a multiple of it is a plain shift
        for d in self.diag.iter_mut() {
            *d += s;
        }
        self
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        ql_eigenvalues(&self.diag, &self.off)
    }

    /// Eigenvalues in [lo, hi] that pass the doubler check (component ratio within [0.1, 10]).
    pub fn window(&self, lo: f64, hi: f64) -> Result<OracleWindow> {
        let all = self.eigenvalues()?;
        let mut out = OracleWindow { eigenvalues: Vec::new(), spurious: Vec::new(), component_ratios: Vec::new() };
        for &ev in all.iter().filter(|&&v| v >= lo && v <= hi) {
            let x = inverse_iteration(&self.diag, &self.off, ev);
            let (mut e, mut o) = (0.0, 0.0);
            for (i, v) in x.iter().enumerate() {
                if i % 2 == 0 {
                    e += v * v;
                } else {
                    o += v * v;
                }
            }
            let ratio = (e / o).sqrt();
            if (0.1..=10.0).contains(&ratio) {
                out.eigenvalues.push(ev);
                out.component_ratios.push(ratio);
            } else {
                out.spurious.push(ev);
            }
        }
        Ok(out)
    }
}

/// Off-diagonal for the pair (j, j+1): component 0 at j sees +e^{F_{j+1} − F_j}/(2h), component
/// 1 at j sees −e^{F_j − F_{j+1}}/(2h).
fn fitted_off(comp_j: u8, f_j: f64, f_next: f64, h: f64) -> f64 {
    if comp_j == 0 {
        (f_next - f_j).exp() / (2.0 * h)
    } else {
        -(f_j - f_next).exp() / (2.0 * h)
    }
}

/// Angular operator on (0, π) with `n_per_component` points per component. The outermost
/// unknowns sit `eps_frac·h` from the endpoints and are the components that vanish there.
pub fn discretize_angular(
    p: &BlackHoleParams,
    ctx: &ModeContext,
    n_per_component: usize,
    eps_frac: f64,
) -> Result<DiscretizedOperator> {
    if n_per_component < MIN_GRID {
        return Err(Error::GridTooCoarse(format!("{n_per_component} < {MIN_GRID} points")));
    }
    if !(eps_frac > 0.0 && eps_frac <= 1.0) {
        return Err(Error::InvalidParams(format!("eps_frac = {eps_frac}")));
    }
    let (c0, cpi) = classify_angular(p, ctx);
    if !c0.verdict.is_lp() {
        return Err(Error::NotLimitPoint("theta = 0".into()));
    }
    if !cpi.verdict.is_lp() {
        return Err(Error::NotLimitPoint("theta = pi".into()));
    }
    let (nu, rho) = indicial_exponents(p, ctx);
    let c_left: u8 = if nu > 0.0 { 1 } else { 0 };
    let c_right: u8 = if rho > 0.0 { 0 } else { 1 };
    let mut n = 2 * n_per_component;
    if ((c_left as usize + n - 1) % 2) as u8 != c_right {
        n += 1;
    }
    let h = PI / ((n - 1) as f64 + 2.0 * eps_frac);
    let eps = eps_frac * h;
    let positions: Vec<f64> = (0..n).map(|j| eps + h * j as f64).collect();
    let components: Vec<u8> = (0..n).map(|j| ((c_left as usize + j) % 2) as u8).collect();
    let f: Vec<f64> = positions.iter().map(|&t| sigma_primitive(p, ctx, t)).collect();
    let weight: Vec<f64> = positions.iter().map(|&t| 1.0 / delta_theta(p, t).sqrt()).collect();

    let mut diag = Vec::with_capacity(n);
    for j in 0..n {
        let t = positions[j];
        let dd = ctx.mu * p.a * t.cos() / delta_theta(p, t).sqrt();
        let v = if components[j] == 0 { dd } else { -dd };
        diag.push(v / weight[j]);
    }
    let mut off = Vec::with_capacity(n - 1);
    for j in 0..n - 1 {
        let tm = 0.5 * (positions[j] + positions[j + 1]);
        let bt = p.a * ctx.omega * tm.sin() / delta_theta(p, tm);
        let o = fitted_off(components[j], f[j], f[j + 1], h) + 0.5 * bt;
        off.push(o / (weight[j] * weight[j + 1]).sqrt());
    }
    Ok(DiscretizedOperator {
        positions,
        components,
        diag,
        off,
        weight,
        h,
        offset_left: eps,
        offset_right: eps,
        scheme: "staggered-exponential-fitted".into(),
    })
}

/// Confined radial operator on (x(r₀), −δ) in the frame rotated by π/4, where the confining mass
/// sits next to the derivative. The r₀ end carries the boundary condition with β = π/4.
pub fn discretize_radial_confined(
    bg: &Background,
    ctx: &ModeContext,
    lambda: f64,
    r0: f64,
    n_per_component: usize,
    delta: f64,
) -> Result<DiscretizedOperator> {
    if ctx.mu == 0.0 {
        return Err(Error::NotConfining(ctx.mu));
    }
    if ctx.mu * bg.params.l < 0.5 {
        return Err(Error::NotLimitPoint("r = infinity".into()));
    }
    if n_per_component < MIN_GRID {
        return Err(Error::GridTooCoarse(format!("{n_per_component} < {MIN_GRID} points")));
    }
    let map = TortoiseMap::new(bg)?;
    let x0 = map.x(r0)?;
    if x0 >= -delta {
        return Err(Error::InvalidParams(format!("r0 = {r0} lies beyond the cutoff")));
    }
    let chart = InfinityChart::new(&bg.params, ctx, lambda);
    let ode = Dopri5::with_tol(1e-14);
    let (ud, _) = ode.solve(|_, y: &[f64; 1]| [chart.du_dx(y[0])], 0.0, [0.0], -delta)?;

    let n = 2 * n_per_component;
    let h = (-delta - x0) / n as f64;
    let positions: Vec<f64> = (0..n).map(|j| x0 + h * (j + 1) as f64).collect();
    let components: Vec<u8> = (0..n).map(|j| ((1 + j) % 2) as u8).collect();

    // u and M = ∫ m dx along the grid, from the cutoff inward
    let mut u = vec![0.0; n];
    let mut mm = vec![0.0; n];
    let rhs = |_: f64, y: &[f64; 2]| [chart.du_dx(y[0]), chart.parts(y[0]).2];
    let mut state = [ud[0], 0.0];
    u[n - 1] = state[0];
    mm[n - 1] = state[1];
    for j in (0..n - 1).rev() {
        let (s, _) = ode.solve(rhs, positions[j + 1], state, positions[j])?;
        state = s;
        u[j] = s[0];
        mm[j] = s[1];
    }
    let mut diag = Vec::with_capacity(n);
    for j in 0..n {
        let (pt, q, _) = chart.parts(u[j]);
        diag.push(if components[j] == 0 { pt + q } else { pt - q });
    }
    let off: Vec<f64> = (0..n - 1).map(|j| fitted_off(components[j], -mm[j], -mm[j + 1], h)).collect();
    Ok(DiscretizedOperator {
        positions,
        components,
        diag,
        off,
        weight: vec![1.0; n],
        h,
        offset_left: h,
        offset_right: delta,
        scheme: "staggered-exponential-fitted".into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureKind {
    Angular,
    Radial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureEntry {
    pub name: String,
    pub kind: FixtureKind,
    pub params: BlackHoleParams,
    pub ctx: ModeContext,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub r0: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    pub n_per_component: usize,
    pub window: (f64, f64),
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixtures {
    pub version: u32,
    pub entries: Vec<FixtureEntry>,
}

impl Fixtures {
    pub fn get(&self, name: &str) -> Option<&FixtureEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

pub const FIXTURES_ENV: &str = "KNADS_FIXTURES";
const EMBEDDED: &str = include_str!("../fixtures/oracle.json");

pub fn embedded_fixtures() -> Result<Fixtures> {
    serde_json::from_str(EMBEDDED).map_err(|e| Error::InvalidParams(format!("embedded fixtures: {e}")))
}

pub fn load_fixtures(path: &Path) -> Result<Fixtures> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParams(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidParams(format!("{}: {e}", path.display())))
}

/// Fixtures from `KNADS_FIXTURES` when set, else the copy compiled into the crate.
pub fn fixtures() -> Result<Fixtures> {
    match std::env::var_os(FIXTURES_ENV) {
        Some(p) => load_fixtures(Path::new(&p)),
        None => embedded_fixtures(),
    }
}

/// Recompute a fixture entry from its stored inputs.
pub fn evaluate_fixture(e: &FixtureEntry) -> Result<Vec<f64>> {
    let op = match e.kind {
        FixtureKind::Angular => discretize_angular(&e.params, &e.ctx, e.n_per_component, 0.5)?,
        FixtureKind::Radial => {
            let bg = Background::new(e.params)?;
            let r0 = e.r0.unwrap_or(bg.r_plus() + e.params.l);
            discretize_radial_confined(&bg, &e.ctx, e.lambda.unwrap_or(0.0), r0, e.n_per_component, e.delta.unwrap_or(1e-4))?
        }
    };
    Ok(op.window(e.window.0, e.window.1)?.eigenvalues)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_grid_rejected() {
        let p = BlackHoleParams::new(1.0, 0.0, 0.0, 0.0, 1.0).unwrap();
        let c = ModeContext::new(1.0, 0.0, 0.5, 0.0).unwrap();
        assert!(matches!(discretize_angular(&p, &c, 100, 0.5), Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn embedded_fixtures_parse() {
        assert!(embedded_fixtures().unwrap().version >= 1);
    }
}
