//! Regenerates fixtures/oracle.json from the finite-difference oracle.
//!
//!     cargo run --release -p knads-core --example gen_fixtures [OUT]

use knads_core::angular_solver::angular_eigenvalues;
use knads_core::geometry::{Background, BlackHoleParams};
use knads_core::operators::ModeContext;
use knads_core::oracle::{evaluate_fixture, FixtureEntry, FixtureKind, Fixtures};
use knads_core::radial_solver::hinf_eigenvalues;

const N: usize = 4000;

fn angular(name: &str, a: f64, l: f64, k: f64, d: f64, b: f64, mu: f64, omega: f64, window: (f64, f64)) -> FixtureEntry {
    // e = 1 so that d = q_m / Ξ
    let xi = 1.0 - a * a / (l * l);
    FixtureEntry {
        name: name.into(),
        kind: FixtureKind::Angular,
        params: BlackHoleParams::new(1.0, a, 0.0, d * xi, l).unwrap(),
        ctx: ModeContext::new(mu, 1.0, k, omega).unwrap().with_gauge(b),
        lambda: None,
        r0: None,
        delta: None,
        n_per_component: N,
        window,
        eigenvalues: Vec::new(),
    }
}

fn radial(name: &str, p: (f64, f64, f64, f64, f64), mu: f64, e: f64, k: f64, lambda: f64) -> FixtureEntry {
    FixtureEntry {
        name: name.into(),
        kind: FixtureKind::Radial,
        params: BlackHoleParams::new(p.0, p.1, p.2, p.3, p.4).unwrap(),
        ctx: ModeContext::new(mu, e, k, 0.0).unwrap(),
        lambda: Some(lambda),
        r0: None,
        delta: Some(1e-4),
        n_per_component: N,
        window: (-15.0, 15.0),
        eigenvalues: Vec::new(),
    }
}

fn main() {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/oracle.json").to_string());
    let mut entries = vec![
        angular("sphere", 0.0, 1.0, 0.5, 0.0, 0.0, 1.0, 0.0, (-4.5, 4.5)),
        angular("rotating_1", 0.4, 1.0, 1.5, 1.0, 0.0, 0.7, 0.8, (-6.0, 6.0)),
        angular("rotating_2", 0.6, 1.3, -0.5, -2.0, 0.0, 1.1, -0.6, (-6.0, 6.0)),
        angular("rotating_3", 0.25, 0.9, 0.5, 0.0, 0.0, 0.5, 0.3, (-6.0, 6.0)),
        angular("rotating_4", 0.7, 1.5, 2.5, 1.0, 0.5, 0.9, 1.2, (-6.0, 6.0)),
        angular("rotating_5", 0.3, 2.0, -1.5, 0.0, 0.3, 0.4, -1.1, (-6.0, 6.0)),
        radial("radial_1", (0.8, 0.3, 0.2, 0.1, 1.2), 0.7, 0.5, -1.5, -2.0),
        radial("radial_2", (1.0, 0.2, 0.1, 0.0, 1.0), 1.0, 0.1, 0.5, 1.07),
        radial("radial_3", (0.5, 0.1, 0.0, 0.0, 0.8), 2.0, 0.0, 1.5, 2.5),
    ];
    for e in &mut entries {
        e.eigenvalues = evaluate_fixture(e).expect("oracle");
        let shoot = match e.kind {
            FixtureKind::Angular => angular_eigenvalues(&e.params, &e.ctx, e.window.0, e.window.1).unwrap().eigenvalues,
            FixtureKind::Radial => {
                let bg = Background::new(e.params).unwrap();
                let r0 = bg.r_plus() + e.params.l;
                hinf_eigenvalues(&bg, &e.ctx, e.lambda.unwrap(), r0, e.window.0, e.window.1).unwrap().eigenvalues
            }
        };
        let gap = if shoot.len() == e.eigenvalues.len() {
            shoot.iter().zip(&e.eigenvalues).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        } else {
            f64::NAN
        };
        eprintln!("{}: {} eigenvalues, max |shoot - oracle| = {gap:.3e}", e.name, e.eigenvalues.len());
    }
    let f = Fixtures { version: 1, entries };
    std::fs::write(&out, serde_json::to_string_pretty(&f).unwrap() + "\n").unwrap();
    eprintln!("wrote {out}");
}
