use knads_core::angular_solver::*;
use knads_core::geometry::BlackHoleParams;
use knads_core::operators::ModeContext;
use knads_core::Error;
use rand::{Rng, SeedableRng};

fn draw(a: f64, l: f64, k: f64, d: f64, b: f64, mu: f64, omega: f64) -> (BlackHoleParams, ModeContext) {
    let xi = 1.0 - a * a / (l * l);
    (
        BlackHoleParams::new(1.0, a, 0.0, d * xi, l).unwrap(),
        ModeContext::new(mu, 1.0, k, omega).unwrap().with_gauge(b),
    )
}

#[test]
fn round_sphere_spectrum() {
    // Dirac operator on S²: ±(|k| + 1/2 + n), n ≥ 0
    for k in [0.5, -1.5, 2.5] {
        let (p, c) = draw(0.0, 1.0, k, 0.0, 0.0, 1.3, 0.7);
        let w = angular_eigenvalues(&p, &c, -6.2, 6.2).unwrap();
        let base = k.abs() + 0.5;
        let mut expect: Vec<f64> = (0..10).map(|n| base + n as f64).filter(|v| *v < 6.2).collect();
        let neg: Vec<f64> = expect.iter().rev().map(|v| -v).collect();
        expect = neg.into_iter().chain(expect).collect();
        assert_eq!(w.eigenvalues.len(), expect.len(), "k = {k}");
        for (got, want) in w.eigenvalues.iter().zip(&expect) {
            assert!((got - want).abs() < 1e-9, "k = {k}: {got} vs {want}");
        }
        assert_eq!(w.winding_count as usize, w.eigenvalues.len());
    }
}

// Richardson-extrapolated staggered finite differences (N = 2000, 4000, 8000) in numpy.
#[test]
fn rotating_draws_against_extrapolated_differences() {
    let cases: &[((f64, f64, f64, f64, f64, f64, f64), &[f64])] = &[
        (
            (0.4, 1.0, 1.5, 1.0, 0.0, 0.7, 0.8),
            &[
                -5.554382953744304, -4.560363861995332, -3.5499854815376843, -2.5094710733222505, -1.406776725138722,
                1.268222593114236, 2.4663375353460046, 3.5274249673348095, 4.546324456452567, 5.544766877549894,
            ],
        ),
        (
            (0.7, 1.5, 2.5, 1.0, 0.5, 0.9, 1.2),
            &[
                -5.522318887761988, -4.477715779192901, -3.388217577657391, -2.2118080309495176, 1.9772561118685796,
                3.291491604114223, 4.42127260225728, 5.484585270421424,
            ],
        ),
    ];
    for &((a, l, k, d, b, mu, om), want) in cases {
        let (p, c) = draw(a, l, k, d, b, mu, om);
        let w = angular_eigenvalues(&p, &c, -6.0, 6.0).unwrap();
        assert_eq!(w.eigenvalues.len(), want.len());
        for (g, e) in w.eigenvalues.iter().zip(want) {
            assert!((g - e).abs() < 1e-9, "{g} vs {e}");
        }
        assert!(w.residuals.iter().all(|r| *r < 1e-9));
    }
}

#[test]
fn labels_skip_zero_and_agree_with_windows() {
    let (p, c) = draw(0.4, 1.0, 1.5, 1.0, 0.0, 0.7, 0.8);
    let s = AngularSolver::new(&p, &c).unwrap();
    let w = s.eigenvalues(-6.0, 6.0).unwrap();
    assert!(!w.labels.contains(&0));
    for (j, v) in w.labels.iter().zip(&w.eigenvalues) {
        assert!((s.eigenvalue_by_label(*j).unwrap() - v).abs() < 1e-10);
    }
    assert!(matches!(s.eigenvalue_by_label(0), Err(Error::InvalidParams(_))));
    for j in [-7, -1, 1, 9] {
        assert_eq!(label_from_raw(raw_from_label(j)), j);
    }
}

#[test]
fn mismatch_increasing_in_lambda() {
    let (p, c) = draw(0.6, 1.3, -0.5, -2.0, 0.0, 1.1, -0.6);
    let s = AngularSolver::new(&p, &c).unwrap();
    let mut prev = f64::NEG_INFINITY;
    for i in 0..40 {
        let m = s.mismatch(-8.0 + 0.4 * i as f64).unwrap();
        assert!(m > prev);
        prev = m;
    }
}

#[test]
fn shoot_traces_reach_matching_point() {
    let (p, c) = draw(0.4, 1.0, 1.5, 1.0, 0.0, 0.7, 0.8);
    let lam = AngularSolver::new(&p, &c).unwrap().eigenvalue_by_label(1).unwrap();
    let r = shoot_angular(&p, &c, lam).unwrap();
    let cpt = std::f64::consts::FRAC_PI_2;
    assert!((r.left.theta.last().unwrap() - cpt).abs() < 1e-14);
    assert!((r.right.theta.last().unwrap() - cpt).abs() < 1e-14);
    let d = (r.eta_left - r.eta_right) / std::f64::consts::PI;
    assert!((d - d.round()).abs() < 1e-9);
}

#[test]
fn limit_circle_needs_boundary_parameter() {
    // d = 1/2, n = 0: one end is limit circle
    let (p, c) = draw(0.0, 1.0, 0.5, 0.5, 0.0, 1.0, 0.0);
    assert!(matches!(AngularSolver::new(&p, &c), Err(Error::NotLimitPoint(_))));
    let cfg = ShootConfig { beta_left: Some(0.3), beta_right: Some(0.3), ..Default::default() };
    let s = AngularSolver::with_config(&p, &c, cfg).unwrap();
    let w = s.eigenvalues(-4.0, 4.0).unwrap();
    assert_eq!(w.eigenvalues.len() as i64, w.winding_count);
    assert!(w.eigenvalues.windows(2).all(|v| v[1] > v[0]));
}

#[test]
fn window_limits() {
    let (p, c) = draw(0.0, 1.0, 0.5, 0.0, 0.0, 1.0, 0.0);
    let s = AngularSolver::new(&p, &c).unwrap();
    assert!(matches!(s.eigenvalues(-2000.0, 2000.0), Err(Error::WindowTooWide(_))));
    assert!(s.eigenvalues(1.0, 1.0).is_err());
    assert!(s.eigenvalues(-0.5, 0.5).unwrap().eigenvalues.is_empty());
}

// exp(∫_c^θ p) with mpmath.quad, p = −kΞ/(Δθ sinθ).
#[test]
fn closed_form_weight_values() {
    for &(a, l, k, th, c, want) in &[
        (0.3, 1.0, 0.5, 0.4, 1.2, 1.7896279011890831),
        (0.7, 1.5, -2.5, 2.9, 0.3, 7089.9792892652834),
        (0.0, 1.0, 1.5, 1.0, 2.0, 4.8134195423069911),
    ] {
        let got = appendix_b_e(a, l, k, th, c);
        assert!(((got - want) / want).abs() < 1e-12, "{got} vs {want}");
    }
}

#[test]
fn closed_form_derivative_is_p() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(5);
    for _ in 0..100 {
        let l = rng.gen_range(0.5..3.0);
        let a = l * rng.gen_range(0.0..0.9);
        let k = rng.gen_range(-4..4) as f64 + 0.5;
        let th = rng.gen_range(0.2..2.9);
        let h = 1e-5;
        let e = |t: f64| appendix_b_e(a, l, k, t, 1.0).ln();
        let fd = (e(th + h) - e(th - h)) / (2.0 * h);
        assert!((fd - appendix_b_p(a, l, k, th)).abs() < 1e-6 * (1.0 + fd.abs()));
    }
}
