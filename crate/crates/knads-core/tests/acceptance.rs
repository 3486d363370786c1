//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};

use knads_core::angular_solver::{angular_eigenvalues, appendix_b_e, appendix_b_e_quadrature, AngularSolver};
use knads_core::classify::{
    angular_condition_code, classify_angular_kd, infinity_growth_check, quantization_check_d,
};
use knads_core::geometry::{extremal_mass, find_horizons, reparameterize, Background, BlackHoleParams};
use knads_core::modescan::{coupled_scan, omega_grid, periodicity_verdict, PeriodicityVerdict, ScanVerdict};
use knads_core::operators::ModeContext;
use knads_core::oracle::{discretize_angular, discretize_radial_confined, embedded_fixtures, FixtureKind};
use knads_core::radial_solver::{
    horizon_ac_certificate, l1_certificate, levinson_phi_plus, CertificateKind, HinfConfig, HinfSolver,
};
use knads_core::Error;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn within(t: Instant, limit: Duration) -> Result<Duration, String> {
    let e = t.elapsed();
    if e <= limit {
        Ok(e)
    } else {
        Err(format!("took {e:?}, limit {limit:?}"))
    }
}

fn rng(seed: u64) -> rand::rngs::StdRng {
    rand::rngs::StdRng::seed_from_u64(seed)
}

fn geometry_round_trip() -> Outcome {
    let t = Instant::now();
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let l = r.gen_range(0.3..5.0);
        let a = l * r.gen_range(-0.95..0.95);
        let z2: f64 = r.gen_range(0.01..2.0);
        let m = extremal_mass(a, z2, l) * r.gen_range(1.001..4.0);
        let p = BlackHoleParams::new(m, a, z2.sqrt(), 0.0, l).map_err(|e| e.to_string())?;
        let h = find_horizons(&p).map_err(|e| e.to_string())?;
        let (m2, z22) = reparameterize(h.r_plus, h.r_minus.unwrap_or(0.0), a, l).map_err(|e| e.to_string())?;
        worst = worst.max(((m2 - m) / m).abs()).max(((z22 - z2) / z2).abs());
    }
    let mut flips = 0;
    for _ in 0..20 {
        let l = r.gen_range(0.5..3.0);
        let a = l * r.gen_range(0.0..0.9);
        let z2: f64 = r.gen_range(0.01..1.0);
        let me = extremal_mass(a, z2, l);
        let above = BlackHoleParams::new(me * (1.0 + 1e-4), a, z2.sqrt(), 0.0, l).unwrap();
        let below = BlackHoleParams::new(me * (1.0 - 1e-4), a, z2.sqrt(), 0.0, l).unwrap();
        let up = find_horizons(&above).map(|h| !h.extremal).unwrap_or(false);
        let down = matches!(find_horizons(&below), Err(Error::NoHorizon { .. }));
        if up && down {
            flips += 1;
        }
    }
    let el = within(t, Duration::from_secs(1))?;
    check(worst <= 1e-10 && flips == 20, format!("max rel err {worst:.2e}, flips {flips}/20, {el:.2?}"))
}

// Interval conditions written out as sets of n.
fn lp_theta0(n: f64, d: f64) -> bool {
    n <= d - 1.0 || n >= d
}
fn lp_thetapi(n: f64, d: f64) -> bool {
    n >= -d || n <= -d - 1.0
}
fn cond_min(n: f64, d: f64) -> bool {
    n <= -1.0 - d.abs() || n >= d.abs()
}
fn cond_max(n: f64, d: f64) -> bool {
    n <= -1.0 - d.abs() || (n >= -d.abs() && n <= -1.0 + d.abs()) || n >= d.abs()
}
fn cond_dirac(n: f64, d: f64) -> bool {
    n <= -1.0 - 2.0 * d || n >= -2.0 * d
}

fn classification_tables() -> Outcome {
    let t = Instant::now();
    let mut mismatches = Vec::new();
    let mut cells = 0;
    for i in 0..=12 {
        let d = -3.0 + 0.5 * i as f64;
        for n in -6..=6 {
            let nf = n as f64;
            let k = nf + 0.5;
            cells += 1;
            let (l, r) = classify_angular_kd(k, d, 0.0);
            if l.verdict.is_lp() != lp_theta0(nf, d) || r.verdict.is_lp() != lp_thetapi(nf, d) {
                mismatches.push(format!("t0/tpi d={d} n={n}"));
            }
            let both = l.verdict.is_lp() && r.verdict.is_lp();
            let (code, want) =
                if d.abs() <= 0.5 { ("condmin", cond_min(nf, d)) } else { ("condmax", cond_max(nf, d)) };
            if both != want || angular_condition_code(d, 0.0) != code {
                mismatches.push(format!("{code} d={d} n={n}"));
            }
            let (l1, r1) = classify_angular_kd(k, d, 1.0);
            if (l1.verdict.is_lp() && r1.verdict.is_lp()) != cond_dirac(nf, d) || l1.rationale_code != "condirac" {
                mismatches.push(format!("condirac d={d} n={n}"));
            }
        }
        let q = quantization_check_d(d);
        let fl = d.abs().floor() as i64;
        let want: Vec<i64> = if d.fract() == 0.0 { vec![] } else { vec![-1 - fl, fl] };
        let failing: Vec<i64> = (-6..=6)
            .filter(|&n| {
                let (l, r) = classify_angular_kd(n as f64 + 0.5, d, 0.0);
                !(l.verdict.is_lp() && r.verdict.is_lp())
            })
            .collect();
        if q.exceptional_n != want || failing != want || q.integral != (d.fract() == 0.0) {
            mismatches.push(format!("exceptional set d={d}: {:?} / {failing:?}", q.exceptional_n));
        }
    }
    let el = within(t, Duration::from_secs(1))?;
    check(mismatches.is_empty(), format!("{cells} cells, {} mismatches {:?}, {el:.2?}", mismatches.len(), mismatches))
}

fn infinity_threshold() -> Outcome {
    let t = Instant::now();
    let bg = Background::new(BlackHoleParams::new(1.0, 0.0, 0.0, 0.0, 1.0).unwrap()).unwrap();
    let mut notes = Vec::new();
    let mut ok = true;
    for (ml, lp) in [(0.1, false), (0.3, false), (0.49, false), (0.5, true), (1.0, true)] {
        let ctx = ModeContext::new(ml, 0.0, 0.5, 0.0).unwrap();
        let g = infinity_growth_check(&bg, &ctx, 1.0).map_err(|e| e.to_string())?;
        let exp_ok = (g.dominant_exponent - ml).abs() < 1e-2 && (g.recessive_exponent + ml).abs() < 1e-2;
        ok &= g.verdict.is_lp() == lp && exp_ok;
        notes.push(format!("{ml}:{}", if g.verdict.is_lp() { "LP" } else { "LC" }));
    }
    let el = within(t, Duration::from_secs(30))?;
    check(ok, format!("{}, {el:.2?}", notes.join(" ")))
}

fn angular_spectrum() -> Outcome {
    let t = Instant::now();
    let fx = embedded_fixtures().map_err(|e| e.to_string())?;
    let sphere = fx.get("sphere").ok_or("sphere fixture missing")?;
    let shoot = angular_eigenvalues(&sphere.params, &sphere.ctx, -4.5, 4.5).map_err(|e| e.to_string())?;
    let want = [-4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0];
    if shoot.eigenvalues.len() != 8 {
        return Err(format!("sphere: {} eigenvalues", shoot.eigenvalues.len()));
    }
    let shoot_err = shoot.eigenvalues.iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
    let oracle = discretize_angular(&sphere.params, &sphere.ctx, 4000, 0.5)
        .and_then(|op| op.window(-4.5, 4.5))
        .map_err(|e| e.to_string())?;
    if oracle.eigenvalues.len() != 8 {
        return Err(format!("sphere oracle: {} eigenvalues", oracle.eigenvalues.len()));
    }
    let oracle_err = oracle.eigenvalues.iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
    let mut agree: f64 = 0.0;
    let mut counts_ok = shoot.winding_count == 8;
    let mut draws = 0;
    for e in fx.entries.iter().filter(|e| e.kind == FixtureKind::Angular && e.name != "sphere") {
        draws += 1;
        let s = angular_eigenvalues(&e.params, &e.ctx, e.window.0, e.window.1).map_err(|er| er.to_string())?;
        let o = discretize_angular(&e.params, &e.ctx, 4000, 0.5)
            .and_then(|op| op.window(e.window.0, e.window.1))
            .map_err(|er| er.to_string())?;
        counts_ok &= s.winding_count as usize == s.eigenvalues.len() && o.eigenvalues.len() == s.eigenvalues.len();
        counts_ok &= o.eigenvalues == e.eigenvalues;
        if o.eigenvalues.len() == s.eigenvalues.len() {
            agree = agree.max(s.eigenvalues.iter().zip(&o.eigenvalues).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        }
    }
    let el = within(t, Duration::from_secs(300))?;
    check(
        shoot_err <= 1e-8 && oracle_err <= 1e-5 && agree <= 1e-5 && counts_ok && draws == 5,
        format!(
            "sphere shoot {shoot_err:.1e}, oracle {oracle_err:.1e}; {draws} draws agree {agree:.1e}, counts {}, {el:.2?}",
            if counts_ok { "match" } else { "MISMATCH" }
        ),
    )
}

fn omega_lipschitz() -> Outcome {
    let t = Instant::now();
    let mut r = rng(4);
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..20 {
        let l = r.gen_range(0.5..3.0);
        let a: f64 = l * r.gen_range(0.0..0.95);
        let xi = 1.0 - a * a / (l * l);
        let d = r.gen_range(-2..=2) as f64;
        let k = r.gen_range(-3..3) as f64 + 0.5;
        let mu = r.gen_range(0.0..2.0);
        let w1: f64 = r.gen_range(-3.0..3.0);
        let w2: f64 = w1 + r.gen_range(-1.0..1.0);
        let p = BlackHoleParams::new(1.0, a, 0.0, d * xi, l).unwrap();
        let s1 = AngularSolver::new(&p, &ModeContext::new(mu, 1.0, k, w1).unwrap()).map_err(|e| e.to_string())?;
        let s2 = AngularSolver::new(&p, &ModeContext::new(mu, 1.0, k, w2).unwrap()).map_err(|e| e.to_string())?;
        for j in [-3, -2, -1, 1, 2, 3] {
            let l1 = s1.eigenvalue_by_label(j).map_err(|e| e.to_string())?;
            let l2 = s2.eigenvalue_by_label(j).map_err(|e| e.to_string())?;
            worst = worst.max((l1 - l2).abs() - a * (w1 - w2).abs());
        }
    }
    let el = within(t, Duration::from_secs(120))?;
    check(worst <= 1e-8, format!("max |dλ| - a|dω| = {worst:.2e}, {el:.2?}"))
}

fn radial_certificates() -> Outcome {
    let t = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for (p, mu, e, k, lam) in [((1.0, 0.2, 0.1, 0.0, 1.0), 1.0, 0.1, 0.5, 1.3), ((0.8, 0.3, 0.2, 0.1, 1.2), 0.7, 0.5, -1.5, -2.0)] {
        let bg = Background::new(BlackHoleParams::new(p.0, p.1, p.2, p.3, p.4).unwrap()).unwrap();
        let ctx = ModeContext::new(mu, e, k, 0.0).unwrap();
        let c = l1_certificate(&bg, &ctx, lam).map_err(|e| e.to_string())?;
        let ratio = c.get("tail_ratio").unwrap_or(f64::NAN);
        ok &= c.pass && ratio < 0.05;
        let lv = levinson_phi_plus(&bg, &ctx, lam).map_err(|e| e.to_string())?;
        ok &= lv.pass;
        notes.push(format!("L1 ratio {ratio:.1e}, Levinson min|X| {:.2}", lv.get("min_norm").unwrap_or(f64::NAN)));
    }
    let m = extremal_mass(0.3, 0.04, 1.0);
    let bg = Background::new(BlackHoleParams::new(m, 0.3, 0.2, 0.0, 1.0).unwrap()).unwrap();
    let ctx = ModeContext::new(1.0, 0.5, 0.5, 0.0).unwrap();
    let ces = horizon_ac_certificate(&bg, &ctx, 1.0).map_err(|e| e.to_string())?;
    let l1 = l1_certificate(&bg, &ctx, 1.0).map_err(|e| e.to_string())?;
    ok &= bg.horizons.extremal && ces.kind == CertificateKind::ExtremalCesaro && ces.pass && !l1.pass;
    notes.push(format!(
        "extremal Cesaro decay {:.2}, L1 tail ratio {:.2}",
        ces.get("decay_exponent").unwrap_or(f64::NAN),
        l1.get("tail_ratio").unwrap_or(f64::NAN)
    ));
    let el = within(t, Duration::from_secs(120))?;
    check(ok, format!("{}; {el:.2?}", notes.join("; ")))
}

fn hinf_discreteness() -> Outcome {
    let t = Instant::now();
    let fx = embedded_fixtures().map_err(|e| e.to_string())?;
    let mut stab: f64 = 0.0;
    let mut agree: f64 = 0.0;
    let mut counts = Vec::new();
    let mut ok = true;
    for e in fx.entries.iter().filter(|e| e.kind == FixtureKind::Radial) {
        let bg = Background::new(e.params).map_err(|er| er.to_string())?;
        let lam = e.lambda.unwrap_or(0.0);
        let r0 = bg.r_plus() + e.params.l;
        let (lo, hi) = (-5.0, 5.0);
        let run = |delta: f64| {
            let cfg = HinfConfig { delta, ..Default::default() };
            HinfSolver::with_config(&bg, &e.ctx, lam, r0, cfg).and_then(|s| s.eigenvalues(lo, hi))
        };
        let coarse = run(1e-4).map_err(|er| er.to_string())?;
        let fine = run(1e-5).map_err(|er| er.to_string())?;
        let oracle = discretize_radial_confined(&bg, &e.ctx, lam, r0, 4000, 1e-4)
            .and_then(|op| op.window(lo, hi))
            .map_err(|er| er.to_string())?;
        ok &= coarse.eigenvalues.iter().all(|v| v.is_finite()) && coarse.eigenvalues.len() <= 1000;
        ok &= coarse.eigenvalues.len() == fine.eigenvalues.len() && oracle.eigenvalues.len() == fine.eigenvalues.len();
        if !ok {
            return Err(format!("{}: counts {} / {} / {}", e.name, coarse.eigenvalues.len(), fine.eigenvalues.len(), oracle.eigenvalues.len()));
        }
        for i in 0..fine.eigenvalues.len() {
            stab = stab.max((coarse.eigenvalues[i] - fine.eigenvalues[i]).abs());
            agree = agree.max((fine.eigenvalues[i] - oracle.eigenvalues[i]).abs());
        }
        counts.push(fine.eigenvalues.len());
    }
    let bg = Background::new(BlackHoleParams::new(1.0, 0.0, 0.0, 0.0, 1.0).unwrap()).unwrap();
    let massless = ModeContext::new(0.0, 0.0, 0.5, 0.0).unwrap();
    let control = matches!(HinfSolver::new(&bg, &massless, 1.0, 2.0), Err(Error::NotConfining(_)));
    let el = within(t, Duration::from_secs(180))?;
    check(
        ok && stab <= 1e-6 && agree <= 1e-4 && control && counts.len() == 3,
        format!("counts {counts:?}, cutoff shift {stab:.1e}, oracle {agree:.1e}, mu=0 NotConfining {control}, {el:.2?}"),
    )
}

fn empty_point_spectrum() -> Outcome {
    let t = Instant::now();
    let p = BlackHoleParams::new(1.0, 0.2, 0.1, 0.0, 1.0).unwrap();
    let ctx = ModeContext::new(1.0, 0.1, 0.5, 0.0).unwrap();
    let labels = [-3, -2, -1, 1, 2, 3];
    let scan = coupled_scan(&p, &ctx, &omega_grid(-2.0, 2.0, 0.05), &labels, None).map_err(|e| e.to_string())?;
    let fine = coupled_scan(&p, &ctx, &omega_grid(-2.0, 2.0, 0.025), &labels, None).map_err(|e| e.to_string())?;
    let mut fake = scan.clone();
    let target = 1.0;
    let period = 2.0 * PI / target;
    for r in fake.rows.iter_mut().filter(|r| (r.omega - target).abs() < 1e-12) {
        r.amplitude_ratio = 1e-6;
        r.verdict_code = "BC".into();
    }
    fake.refresh();
    let plumbing = matches!(
        periodicity_verdict(&fake, period).map_err(|e| e.to_string())?.verdict,
        PeriodicityVerdict::PeriodicCandidate { n: 1, .. }
    );
    let clean = periodicity_verdict(&scan, period).map_err(|e| e.to_string())?.verdict;
    let el = within(t, Duration::from_secs(600))?;
    check(
        scan.verdict == ScanVerdict::NoBoundStateFound
            && fine.verdict == ScanVerdict::NoBoundStateFound
            && clean == PeriodicityVerdict::NoPeriodicSolution
            && plumbing,
        format!(
            "{:?} (min amplitude {:.3}), halved step {:?} ({:.3}), injected mode flagged {plumbing}, {el:.2?}",
            scan.verdict, scan.min_amplitude, fine.verdict, fine.min_amplitude
        ),
    )
}

fn closed_form_weight() -> Outcome {
    let t = Instant::now();
    let mut r = rng(9);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let l = r.gen_range(0.3..4.0);
        let a = l * r.gen_range(-0.95..0.95);
        let k = r.gen_range(-5..5) as f64 + 0.5;
        let th = r.gen_range(0.05..PI - 0.05);
        let c = r.gen_range(0.05..PI - 0.05);
        let exact = appendix_b_e(a, l, k, th, c);
        let quad = appendix_b_e_quadrature(a, l, k, th, c).map_err(|e| e.to_string())?;
        worst = worst.max(((exact - quad) / exact).abs());
    }
    let el = within(t, Duration::from_secs(5))?;
    check(worst <= 1e-8, format!("max rel err {worst:.2e} over 1000 samples, {el:.2?}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("geometry round-trip", geometry_round_trip),
        ("classification tables", classification_tables),
        ("infinity LP/LC threshold", infinity_threshold),
        ("angular spectrum", angular_spectrum),
        ("omega-Lipschitz bound", omega_lipschitz),
        ("radial certificates", radial_certificates),
        ("h_inf discreteness", hinf_discreteness),
        ("empty point spectrum", empty_point_spectrum),
        ("closed-form angular weight", closed_form_weight),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("criterion {} [{name}]: PASS: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
