use knads_core::geometry::BlackHoleParams;
use knads_core::operators::ModeContext;
use knads_core::oracle::*;
use knads_core::Error;

#[test]
fn embedded_fixture_set_is_complete() {
    let fx = embedded_fixtures().unwrap();
    assert_eq!(fx.version, 1);
    let angular = fx.entries.iter().filter(|e| e.kind == FixtureKind::Angular).count();
    let radial = fx.entries.iter().filter(|e| e.kind == FixtureKind::Radial).count();
    assert_eq!((angular, radial), (6, 3));
    for e in &fx.entries {
        assert_eq!(e.n_per_component, 4000);
        assert!(!e.eigenvalues.is_empty(), "{}", e.name);
        assert!(e.eigenvalues.windows(2).all(|w| w[1] > w[0]));
    }
    let s = fx.get("sphere").unwrap();
    let want = [-4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0];
    assert!(s.eigenvalues.iter().zip(want).all(|(g, w)| (g - w).abs() < 1e-5));
}

#[test]
fn fixture_recomputation_is_exact() {
    let fx = embedded_fixtures().unwrap();
    let e = fx.get("rotating_4").unwrap();
    assert_eq!(evaluate_fixture(e).unwrap(), e.eigenvalues);
}

#[test]
fn env_var_overrides_fixture_path() {
    let mut fx = embedded_fixtures().unwrap();
    fx.entries.truncate(1);
    fx.version = 7;
    let path = std::env::temp_dir().join(format!("knads-fixtures-{}.json", std::process::id()));
    std::fs::write(&path, serde_json::to_string(&fx).unwrap()).unwrap();
    std::env::set_var(FIXTURES_ENV, &path);
    let got = fixtures().unwrap();
    std::env::remove_var(FIXTURES_ENV);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(got.version, 7);
    assert_eq!(got.entries.len(), 1);
    assert!(load_fixtures(&path).is_err());
}

#[test]
fn convergence_is_second_order() {
    let p = BlackHoleParams::new(1.0, 0.0, 0.0, 0.0, 1.0).unwrap();
    let c = ModeContext::new(1.0, 0.0, 0.5, 0.0).unwrap();
    let err = |n: usize| {
        let w = discretize_angular(&p, &c, n, 0.5).unwrap().window(-3.5, 3.5).unwrap();
        assert!(w.spurious.is_empty());
        w.eigenvalues.iter().map(|v| (v - v.round()).abs()).fold(0.0, f64::max)
    };
    let (e1, e2) = (err(400), err(800));
    let order = (e1 / e2).log2();
    assert!((order - 2.0).abs() < 0.2, "order {order}");
}

#[test]
fn matrix_shape_and_shift() {
    let p = BlackHoleParams::new(1.0, 0.4, 0.0, 0.84, 1.0).unwrap();
    let c = ModeContext::new(0.7, 1.0, 1.5, 0.8).unwrap();
    let op = discretize_angular(&p, &c, 300, 0.5).unwrap();
    assert_eq!(op.off.len(), op.n() - 1);
    assert_eq!(op.positions.len(), op.components.len());
    let base = op.window(-3.0, 3.0).unwrap().eigenvalues;
    let moved = op.clone().shifted(0.25).window(-2.75, 3.25).unwrap().eigenvalues;
    assert!(base.iter().zip(&moved).all(|(a, b)| (a + 0.25 - b).abs() < 1e-10));
}

#[test]
fn rejected_inputs() {
    let p = BlackHoleParams::new(1.0, 0.0, 0.0, 0.5, 1.0).unwrap();
    let c = ModeContext::new(1.0, 1.0, 0.5, 0.0).unwrap();
    assert!(matches!(discretize_angular(&p, &c, 1000, 0.5), Err(Error::NotLimitPoint(_))));
    let bg = knads_core::geometry::Background::new(BlackHoleParams::new(1.0, 0.0, 0.0, 0.0, 1.0).unwrap()).unwrap();
    let massless = ModeContext::new(0.0, 0.0, 0.5, 0.0).unwrap();
    assert!(matches!(discretize_radial_confined(&bg, &massless, 1.0, 2.0, 1000, 1e-4), Err(Error::NotConfining(_))));
}
