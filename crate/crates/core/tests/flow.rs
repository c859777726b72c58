use std::f64::consts::{PI, TAU};

use jtorus::integrator::*;
use jtorus::poincare::*;
use jtorus::{IntegratorConfig64, Params64};
use proptest::prelude::*;

fn cfg() -> IntegratorConfig64 {
    IntegratorConfig::default()
}

/// Multiplier `dP/dx0` of the time-2π map, from `exp(-∫ sin x / mu dt)`.
fn multiplier(p: &Params64, x0: f64) -> f64 {
    let tr = integrate(p, x0, 0.0, TAU, &cfg()).unwrap();
    let n = 4000;
    let h = TAU / n as f64;
    let s: f64 = (0..n)
        .map(|i| tr.x_at(h * (i as f64 + 0.5)).unwrap().sin())
        .sum();
    (-s * h / p.mu).exp()
}

fn params() -> impl Strategy<Value = Params64> {
    (-3.0f64..3.0, 0.0f64..5.0, 0.1f64..2.0).prop_map(|(a, b, mu)| Params64 { a, b, mu })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn orbit_through_origin_is_odd(p in params()) {
        let fwd = flow_endpoint(&p, 0.0, 0.0, PI, &cfg()).unwrap();
        let back = flow_endpoint(&p, 0.0, 0.0, -PI, &cfg()).unwrap();
        prop_assert!((fwd + back).abs() < 1e-8, "{} {}", fwd, back);
    }

    #[test]
    fn variations_match_finite_differences(p in params(), x0 in -PI..PI) {
        let tight = cfg().with_tolerances(1e-12, 1e-12);
        let (_, ua, ub) = variational_endpoint(&p, x0, 0.0, TAU, &tight).unwrap();
        let h = 1e-5;
        let at = |a: f64, b: f64| flow_endpoint(&Params64 { a, b, mu: p.mu }, x0, 0.0, TAU, &tight).unwrap();
        let fd_a = (at(p.a + h, p.b) - at(p.a - h, p.b)) / (2.0 * h);
        let fd_b = (at(p.a, p.b + h) - at(p.a, p.b - h)) / (2.0 * h);
        let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(1e-3);
        prop_assert!(rel(ua, fd_a) < 1e-4, "ua {} fd {}", ua, fd_a);
        prop_assert!(rel(ub, fd_b) < 1e-4, "ub {} fd {}", ub, fd_b);
    }

    #[test]
    fn forward_then_backward_returns(p in params(), x0 in -PI..PI) {
        let y = flow_endpoint(&p, x0, 0.0, TAU, &cfg()).unwrap();
        let back = flow_endpoint(&p, y, TAU, 0.0, &cfg()).unwrap();
        // the forward error in y is pulled back by the inverse multiplier
        let m = multiplier(&p, x0);
        prop_assert!((back - x0).abs() < 1e-7 * (1.0 + y.abs()) / m, "{} {} {}", back, x0, m);
    }

    #[test]
    fn lift_commutes_with_deck_shift(p in params(), x0 in -PI..PI) {
        let tight = cfg().with_tolerances(1e-12, 1e-12);
        let y = poincare_lift(&p, x0, &tight).unwrap();
        let y2 = poincare_lift(&p, x0 + TAU, &tight).unwrap();
        prop_assert!((y2 - y - TAU).abs() < 1e-8);
    }

    #[test]
    fn rotation_number_nondecreasing_in_a(p in params(), da in 0.01f64..0.5) {
        let r1 = rotation_number(&p, RotationMethod::Mobius, &cfg()).unwrap().rho;
        let r2 = rotation_number(&p.with_a(p.a + da), RotationMethod::Mobius, &cfg()).unwrap().rho;
        prop_assert!(r2 >= r1 - 1e-9, "{} {}", r1, r2);
    }

    #[test]
    fn locked_cells_agree_with_direct_iteration(p in params()) {
        let r = rotation_number(&p, RotationMethod::Mobius, &cfg()).unwrap();
        if r.class.map(MapClass::is_locked).unwrap_or(false) {
            prop_assert!((r.rho - r.rho.round()).abs() < 1e-9);
            let d = rotation_number(&p, RotationMethod::Direct { periods: 200 }, &cfg()).unwrap();
            prop_assert!((d.rho - r.rho).abs() <= d.error_bound + 1e-9, "{:?} {:?}", r, d);
        }
    }
}

#[test]
fn small_mu_roundtrip_in_region_a() {
    let p = Params64 {
        a: 3.0,
        b: 1.0,
        mu: 0.01,
    };
    let y = flow_endpoint(&p, 0.3, 0.0, TAU, &cfg()).unwrap();
    let back = flow_endpoint(&p, y, TAU, 0.0, &cfg()).unwrap();
    assert!((back - 0.3).abs() < 1e-6);
}

#[test]
fn tightening_tolerance_converges() {
    let p = Params64 {
        a: 0.7,
        b: 2.0,
        mu: 0.5,
    };
    let reference = flow_endpoint(&p, 0.4, 0.0, TAU, &cfg().with_tolerances(1e-13, 1e-13)).unwrap();
    let err = |tol: f64| {
        (flow_endpoint(&p, 0.4, 0.0, TAU, &cfg().with_tolerances(tol, tol)).unwrap() - reference)
            .abs()
    };
    let (e6, e9) = (err(1e-6), err(1e-9));
    assert!(e9 < e6, "{e6} {e9}");
    assert!(e9 < 1e-7);
}

#[test]
fn dense_output_is_odd_along_the_orbit() {
    let p = Params64 {
        a: 0.3,
        b: 1.5,
        mu: 0.7,
    };
    let fwd = integrate(&p, 0.0, 0.0, PI, &cfg()).unwrap();
    let back = integrate(
        &p,
        0.0,
        0.0,
        -PI,
        &cfg().with_direction(Direction::Backward),
    )
    .unwrap();
    for i in 1..20 {
        let t = PI * i as f64 / 20.0;
        assert!((fwd.x_at(t).unwrap() + back.x_at(-t).unwrap()).abs() < 1e-8);
    }
}
