use serde::Serialize;
use serde_json::{json, Value};

use knads_core::angular_solver::AngularSolver;
use knads_core::classify::{angular_condition_code, angular_failing_n, sa_report};
use knads_core::geometry::{find_horizons, komar, Background};
use knads_core::modescan::{coupled_scan, omega_grid, periodicity_verdict};
use knads_core::operators::{phi_plus, TortoiseMap};
use knads_core::oracle::{self, FixtureKind};
use knads_core::radial_solver::{
    discreteness_certificate, horizon_ac_certificate, levinson_phi_plus, HinfSolver, RadialCertificate,
};
use knads_core::{Error, Result};

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// What a command produced: the main document plus short diagnostic lines.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub body: String,
    pub verdict: Option<String>,
    pub notes: Vec<String>,
}

pub fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f).unwrap_or_default()
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

pub fn cmd_horizons(cfg: &RunConfig, fmt: Format) -> Result<Output> {
    let p = cfg.params()?;
    let h = find_horizons(&p)?;
    let k = komar(&p);
    let m_ext = p.extremal_mass();
    let body = match fmt {
        Format::Json => to_json(&json!({
            "horizons": h,
            "extremal_mass": m_ext,
            "z2": p.z2(),
            "xi": p.xi(),
            "komar": k,
        })),
        Format::Csv => {
            let mut rows = vec![
                format!("r_plus,{}", fmt_f(h.r_plus)),
                format!("r_minus,{}", fmt_opt(h.r_minus)),
                format!("extremal,{}", h.extremal),
                format!("extremal_mass,{}", fmt_f(m_ext)),
                format!("z2,{}", fmt_f(p.z2())),
                format!("xi,{}", fmt_f(p.xi())),
                format!("komar_mass,{}", fmt_f(k.mass)),
                format!("komar_angular_momentum,{}", fmt_f(k.angular_momentum)),
                format!("komar_electric_charge,{}", fmt_f(k.electric_charge)),
                format!("komar_magnetic_charge,{}", fmt_f(k.magnetic_charge)),
            ];
            rows.extend(h.all_real_roots.iter().map(|r| format!("real_root,{}", fmt_f(*r))));
            csv("key,value", rows)
        }
    };
    Ok(Output { body, ..Default::default() })
}

pub fn cmd_extremal(cfg: &RunConfig, fmt: Format) -> Result<Output> {
    let p = cfg.params()?;
    let m_ext = p.extremal_mass();
    let status = match find_horizons(&p) {
        Ok(h) if h.extremal => "extremal",
        Ok(_) => "non_extremal",
        Err(Error::NoHorizon { .. }) => "no_horizon",
        Err(e) => return Err(e),
    };
    let offset = (p.m - m_ext) / m_ext;
    let body = match fmt {
        Format::Json => to_json(&json!({ "m": p.m, "extremal_mass": m_ext, "relative_offset": offset, "status": status })),
        Format::Csv => csv(
            "m,extremal_mass,relative_offset,status",
            [format!("{},{},{},{status}", fmt_f(p.m), fmt_f(m_ext), fmt_f(offset))],
        ),
    };
    Ok(Output { body, verdict: Some(status.into()), notes: Vec::new() })
}

pub fn cmd_classify(cfg: &RunConfig, fmt: Format) -> Result<Output> {
    let p = cfg.params()?;
    let ctx = cfg.ctx()?;
    let rep = sa_report(&p, &ctx)?;
    let d = ctx.d(&p);
    let span = rep.angular_failing_n.iter().map(|n| n.abs()).max().unwrap_or(0).max(6);
    let variants: Vec<Value> = [-1.0, 0.0, 1.0]
        .iter()
        .map(|&b| {
            json!({
                "gauge_b": b,
                "angular_code": angular_condition_code(d, b),
                "failing_n": angular_failing_n(d, b, -span..=span),
            })
        })
        .collect();
    let verdict = if rep.essentially_self_adjoint { "essentially_self_adjoint" } else { "not_essentially_self_adjoint" };
    let mut notes = vec![
        format!("angular condition: {}", rep.angular_code),
        format!("failing n: {:?}", rep.angular_failing_n),
    ];
    if !rep.quantization.integral {
        notes.push(format!("d = {d} is not an integer; exceptional n: {:?}", rep.quantization.exceptional_n));
    }
    let body = match fmt {
        Format::Json => to_json(&json!({ "report": rep, "gauge_variants": variants })),
        Format::Csv => csv(
            "endpoint,exponent,verdict,rationale_code",
            rep.endpoints.iter().map(|c| {
                let ep = serde_json::to_value(c.endpoint).unwrap();
                format!("{},{},{:?},{}", ep.as_str().unwrap(), fmt_f(c.exponent), c.verdict, c.rationale_code)
            }),
        ),
    };
    Ok(Output { body, verdict: Some(verdict.into()), notes })
}

/// Frozen oracle eigenvalues for this exact problem if the fixture set has them.
fn frozen(kind: FixtureKind, cfg: &RunConfig, n: usize, window: (f64, f64)) -> Option<Vec<f64>> {
    let fx = oracle::fixtures().ok()?;
    let p = cfg.params().ok()?;
    let ctx = cfg.ctx().ok()?;
    fx.entries
        .iter()
        .find(|e| {
            e.kind == kind
                && e.params == p
                && e.ctx.mu == ctx.mu
                && e.ctx.e == ctx.e
                && e.ctx.k == ctx.k
                && e.ctx.gauge_b == ctx.gauge_b
                && (kind == FixtureKind::Radial || e.ctx.omega == ctx.omega)
                && (kind == FixtureKind::Angular || e.lambda == cfg.lambda)
                && e.n_per_component == n
                && e.window == window
        })
        .map(|e| e.eigenvalues.clone())
}

fn pair_oracle(values: &[f64], oracle: Option<Vec<f64>>, notes: &mut Vec<String>) -> Vec<Option<f64>> {
    match oracle {
        Some(o) if o.len() == values.len() => o.into_iter().map(Some).collect(),
        Some(o) => {
            notes.push(format!("oracle found {} eigenvalues, shooting found {}", o.len(), values.len()));
            vec![None; values.len()]
        }
        None => vec![None; values.len()],
    }
}

pub fn cmd_angular(cfg: &RunConfig, fmt: Format, with_oracle: bool) -> Result<Output> {
    let p = cfg.params()?;
    let ctx = cfg.ctx()?;
    let (lo, hi) = cfg.window()?;
    let w = AngularSolver::new(&p, &ctx)?.eigenvalues(lo, hi)?;
    let mut notes = vec![format!("winding count {} ({} eigenvalues)", w.winding_count, w.eigenvalues.len())];
    let oracle_vals = if with_oracle {
        let n = cfg.oracle_n.unwrap_or(4000);
        let vals = match frozen(FixtureKind::Angular, cfg, n, (lo, hi)) {
            Some(v) => v,
            None => oracle::discretize_angular(&p, &ctx, n, 0.5)?.window(lo, hi)?.eigenvalues,
        };
        pair_oracle(&w.eigenvalues, Some(vals), &mut notes)
    } else {
        vec![None; w.eigenvalues.len()]
    };
    let body = match fmt {
        Format::Json => to_json(&json!({ "window": w, "oracle": if with_oracle { Some(&oracle_vals) } else { None } })),
        Format::Csv => csv(
            "j,lambda,residual,oracle_lambda,oracle_delta",
            (0..w.eigenvalues.len()).map(|i| {
                let v = w.eigenvalues[i];
                format!(
                    "{},{},{},{},{}",
                    w.labels[i],
                    fmt_f(v),
                    fmt_f(w.residuals[i]),
                    fmt_opt(oracle_vals[i]),
                    fmt_opt(oracle_vals[i].map(|o| o - v))
                )
            }),
        ),
    };
    Ok(Output { body, verdict: None, notes })
}

pub fn cmd_radial(cfg: &RunConfig, fmt: Format, with_oracle: bool) -> Result<Output> {
    let p = cfg.params()?;
    let ctx = cfg.ctx()?;
    let (lo, hi) = cfg.window()?;
    let lambda = cfg.lambda.ok_or_else(|| Error::InvalidParams("lambda is required".into()))?;
    let bg = Background::new(p)?;
    let r0 = cfg.r0.unwrap_or(bg.r_plus() + p.l);
    let w = HinfSolver::new(&bg, &ctx, lambda, r0)?.eigenvalues(lo, hi)?;
    let mut notes = vec![format!("phi_plus {}", fmt_f(phi_plus(&bg, &ctx)))];
    let mut certs: Vec<RadialCertificate> = vec![horizon_ac_certificate(&bg, &ctx, lambda)?];
    match levinson_phi_plus(&bg, &ctx, lambda) {
        Ok(c) => certs.push(c),
        Err(Error::ExtremalUnsupported) => notes.push("levinson check skipped: extremal background".into()),
        Err(e) => return Err(e),
    }
    certs.push(discreteness_certificate(&bg, &ctx, r0)?);
    for c in &certs {
        notes.push(format!("certificate {:?}: pass = {}", c.kind, c.pass));
    }
    let oracle_vals = if with_oracle {
        let n = cfg.oracle_n.unwrap_or(4000);
        let vals = match (cfg.r0, frozen(FixtureKind::Radial, cfg, n, (lo, hi))) {
            (None, Some(v)) => v,
            _ => oracle::discretize_radial_confined(&bg, &ctx, lambda, r0, n, 1e-4)?.window(lo, hi)?.eigenvalues,
        };
        pair_oracle(&w.eigenvalues, Some(vals), &mut notes)
    } else {
        vec![None; w.eigenvalues.len()]
    };
    let all_pass = certs.iter().all(|c| c.pass);
    let body = match fmt {
        Format::Json => to_json(&json!({
            "r0": r0,
            "window": w,
            "certificates": certs,
            "oracle": if with_oracle { Some(&oracle_vals) } else { None },
        })),
        Format::Csv => csv(
            "j,omega,residual,oracle_omega,oracle_delta",
            (0..w.eigenvalues.len()).map(|i| {
                let v = w.eigenvalues[i];
                format!(
                    "{},{},{},{},{}",
                    w.labels[i],
                    fmt_f(v),
                    fmt_f(w.residuals[i]),
                    fmt_opt(oracle_vals[i]),
                    fmt_opt(oracle_vals[i].map(|o| o - v))
                )
            }),
        ),
    };
    let verdict = if all_pass { "certificates_pass" } else { "certificate_failed" };
    Ok(Output { body, verdict: Some(verdict.into()), notes })
}

pub fn cmd_scan(cfg: &RunConfig, fmt: Format) -> Result<Output> {
    let p = cfg.params()?;
    let ctx = cfg.ctx()?;
    let g = cfg.omega_grid.unwrap_or(crate::config::GridSpec { lo: -2.0, hi: 2.0, step: 0.05 });
    if !(g.step > 0.0 && g.lo < g.hi) {
        return Err(Error::InvalidParams(format!("bad omega grid {g:?}")));
    }
    let j_max = cfg.j_max.unwrap_or(3) as i64;
    if j_max == 0 {
        return Err(Error::InvalidParams("j_max must be at least 1".into()));
    }
    let labels: Vec<i64> = (-j_max..=j_max).filter(|&j| j != 0).collect();
    let scan = coupled_scan(&p, &ctx, &omega_grid(g.lo, g.hi, g.step), &labels, cfg.r0)?;
    let mut verdict = format!("{:?}", scan.verdict);
    let mut notes = vec![
        format!("min amplitude ratio {}", fmt_f(scan.min_amplitude)),
        format!("lipschitz violations {}", scan.lipschitz_violations),
    ];
    let period = match cfg.period {
        Some(t) => {
            let rep = periodicity_verdict(&scan, t)?;
            verdict.push_str(&format!(" periodicity={:?}", rep.verdict));
            notes.push(format!("periodic frequencies checked: {}", rep.checked.len()));
            Some(rep)
        }
        None => None,
    };
    let body = match fmt {
        Format::Json => to_json(&json!({ "scan": scan, "periodicity": period })),
        Format::Csv => scan.to_csv(),
    };
    Ok(Output { body, verdict: Some(verdict), notes })
}

pub fn cmd_tortoise(cfg: &RunConfig, fmt: Format) -> Result<Output> {
    let p = cfg.params()?;
    let radii = cfg.radii.as_ref().ok_or_else(|| Error::InvalidParams("radii are required".into()))?;
    let bg = Background::new(p)?;
    let map = TortoiseMap::new(&bg)?;
    let rows = radii.iter().map(|&r| Ok((r, map.y(r)?, map.x(r)?))).collect::<Result<Vec<_>>>()?;
    let body = match fmt {
        Format::Json => to_json(&json!({
            "r_plus": bg.r_plus(),
            "points": rows.iter().map(|(r, y, x)| json!({ "r": r, "y": y, "x": x })).collect::<Vec<_>>(),
        })),
        Format::Csv => csv("r,y,x", rows.iter().map(|(r, y, x)| format!("{},{},{}", fmt_f(*r), fmt_f(*y), fmt_f(*x)))),
    };
    Ok(Output { body, ..Default::default() })
}
