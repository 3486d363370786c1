use knads_core::classify::*;
use knads_core::geometry::{Background, BlackHoleParams};
use knads_core::operators::ModeContext;

#[test]
fn codes_follow_gauge_and_size_of_d() {
    assert_eq!(angular_condition_code(0.5, 0.0), "condmin");
    assert_eq!(angular_condition_code(-0.3, 0.0), "condmin");
    assert_eq!(angular_condition_code(0.75, 0.0), "condmax");
    assert_eq!(angular_condition_code(2.0, 1.0), "condirac");
    let (l, r) = classify_angular_kd(0.5, 0.0, 0.0);
    assert_eq!((l.rationale_code.as_str(), r.rationale_code.as_str()), ("condt0", "condtpi"));
}

#[test]
fn static_case_all_limit_point() {
    let (l, r) = classify_angular_kd(0.5, 0.0, 0.0);
    assert!(l.verdict.is_lp() && r.verdict.is_lp());
}

#[test]
fn half_integer_d_leaves_one_lc_end() {
    let (l, r) = classify_angular_kd(0.5, 0.5, 0.0);
    assert!(l.verdict.is_lp() != r.verdict.is_lp());
}

#[test]
fn large_d_middle_interval() {
    // d = 3, n = −2 sits in [−|d|, −1 + |d|]
    let (l, r) = classify_angular_kd(-1.5, 3.0, 0.0);
    assert!(l.verdict.is_lp() && r.verdict.is_lp());
}

#[test]
fn dirac_gauge_accepts_half_integer_d() {
    for n in -6..=6 {
        let (l, r) = classify_angular_kd(n as f64 + 0.5, 0.5, 1.0);
        assert!(l.verdict.is_lp() && r.verdict.is_lp());
    }
}

#[test]
fn quantization_from_parameters() {
    // Ξ = 0.75, q_m e = 0.75 gives d = 1
    let p = BlackHoleParams::new(1.0, 0.5, 0.0, 0.75, 1.0).unwrap();
    let q = quantization_check(&p, 1.0);
    assert!(q.integral);
    assert!((q.d - 1.0).abs() < 1e-15);
    let q = quantization_check(&p, 1.7);
    assert!(!q.integral);
    assert_eq!(q.exceptional_n, vec![-2, 1]);
}

#[test]
fn report_flags_failing_waves() {
    let p = BlackHoleParams::new(1.0, 0.0, 0.0, 0.5, 1.0).unwrap();
    let ctx = ModeContext::new(1.0, 1.0, 0.5, 0.0).unwrap();
    let rep = sa_report(&p, &ctx).unwrap();
    assert_eq!(rep.angular_failing_n, vec![-1, 0]);
    assert!(!rep.essentially_self_adjoint);
    assert_eq!(rep.angular_code, "condmin");
    let ctx = ModeContext::new(1.0, 1.0, 1.5, 0.0).unwrap();
    assert!(sa_report(&p, &ctx).unwrap().essentially_self_adjoint);
    let ctx = ModeContext::new(0.3, 1.0, 1.5, 0.0).unwrap();
    let rep = sa_report(&p, &ctx).unwrap();
    assert!(!rep.essentially_self_adjoint);
    assert_eq!(rep.endpoints[3].rationale_code, "thm3");
}

#[test]
fn horizon_always_limit_point() {
    let bg = Background::new(BlackHoleParams::new(1.0, 0.2, 0.1, 0.0, 1.0).unwrap()).unwrap();
    let ctx = ModeContext::new(1.0, 0.1, 0.5, 0.0).unwrap();
    let h = classify_radial_horizon(&bg, &ctx, 1.0).unwrap();
    assert!(h.class.verdict.is_lp());
    assert!(h.sup_deviation.is_finite());
}

#[test]
fn growth_exponents_near_threshold() {
    let bg = Background::new(BlackHoleParams::new(1.0, 0.0, 0.0, 0.0, 1.0).unwrap()).unwrap();
    for (mu, lp) in [(0.3, false), (1.0, true)] {
        let ctx = ModeContext::new(mu, 0.0, 0.5, 0.0).unwrap();
        let g = infinity_growth_check(&bg, &ctx, 1.0).unwrap();
        assert_eq!(g.verdict.is_lp(), lp, "mu = {mu}");
        assert!((g.dominant_exponent - mu).abs() < 1e-2);
        assert!((g.recessive_exponent + mu).abs() < 1e-2);
    }
}
