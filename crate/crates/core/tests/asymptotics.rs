use jtorus::asymptotics::*;
use jtorus::tongues::Side;
use jtorus::TraceConfig64;
use proptest::prelude::*;

/// Power series `Σ (-1)^m (z/2)^{2m+k} / (m! (m+k)!)`.
fn series_j(k: u32, z: f64) -> f64 {
    let half = z / 2.0;
    let mut term = half.powi(k as i32) / (1..=k).map(f64::from).product::<f64>();
    let mut sum = term;
    for m in 1..200 {
        term *= -half * half / (m as f64 * (m + k) as f64);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

#[test]
fn matches_power_series() {
    for k in 0..=5u32 {
        for &z in &[0.1, 0.5, 1.0, 2.5, 5.0] {
            let j = bessel_j(k as i64, z);
            assert!((j.value - series_j(k, z)).abs() < 1e-12, "k={k} z={z}");
            assert!(j.quadrature_error <= 1e-12);
        }
    }
}

#[test]
fn tabulated_values() {
    assert!((bessel_j(0, 1.0f64).value - 0.765_197_686_557_966_6).abs() < 1e-13);
    assert!((bessel_j(1, 10.0f64).value - 0.043_472_746_168_861_44).abs() < 1e-13);
}

#[test]
fn parity() {
    for k in 0..=5i64 {
        for &z in &[0.5f64, 3.0, 10.0] {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((bessel_j(k, -z).value - sign * bessel_j(k, z).value).abs() < 1e-12);
        }
    }
}

#[test]
fn asymptote_vanishes_at_bessel_zero() {
    let z0: f64 = 2.404_825_557_695_773;
    assert!(boundary_asymptote(0, 1.0, z0, Side::Zero).abs() < 1e-12);
    assert!(boundary_asymptote(0, 0.5, 0.5 * z0, Side::Pi).abs() < 1e-12);
}

#[test]
fn asymptote_example() {
    let expect = 1.0 + bessel_j(1, 10.0f64).value;
    assert!((boundary_asymptote(1, 1.0f64, 10.0, Side::Zero) - expect).abs() < 1e-14);
}

proptest! {
    #[test]
    fn recurrence_holds(k in 1i64..=5, z in 0.1f64..50.0) {
        prop_assert!(recurrence_residual(k, z) < 1e-10);
    }

    #[test]
    fn bounded_by_one(k in -8i64..=8, z in -100.0f64..100.0) {
        prop_assert!(bessel_j(k, z).value.abs() <= 1.0 + 1e-12);
    }
}

#[test]
fn residuals_decay_faster_than_inverse_sqrt() {
    let cfg = TraceConfig64::default();
    let range = default_scan_range(1.0);
    for k in 0..=2 {
        let scan = residual_scan(k, 1.0, range, 41, &cfg).unwrap();
        let first = scan.points.first().unwrap();
        let last = scan.points.last().unwrap();
        assert!(last.residual_zero < first.residual_zero, "k={k}");
        assert!(last.residual_pi < first.residual_pi, "k={k}");
        assert!(
            scan.exponent_zero < -0.5 && scan.exponent_pi < -0.5,
            "k={k}: {scan:?}"
        );
        for p in &scan.points {
            let ratio = p.residual_zero / p.residual_pi;
            assert!(ratio > 0.1 && ratio < 10.0, "k={k} b={}", p.b);
        }
    }
}

#[test]
fn boundaries_stay_inside_bessel_envelope() {
    let cfg = TraceConfig64::default();
    let scan = residual_scan(1, 1.0, (20.0, 60.0), 21, &cfg).unwrap();
    let excess =
        |p: &ScanPoint<f64>, a: f64| ((a - 1.0).abs() - bessel_j(1, -p.b).value.abs()) * p.b.sqrt();
    let (head, tail) = scan.points.split_at(10);
    let c = head
        .iter()
        .map(|p| excess(p, p.a_zero).max(excess(p, p.a_pi)))
        .fold(0.0, f64::max);
    for p in tail {
        assert!(
            excess(p, p.a_zero) <= c && excess(p, p.a_pi) <= c,
            "b={}",
            p.b
        );
    }
}

#[test]
fn scan_rejects_bad_ranges() {
    let cfg = TraceConfig64::default();
    assert!(residual_scan(0, 1.0, (30.0, 20.0), 5, &cfg).is_err());
    assert!(residual_scan(0, 0.0, (20.0, 30.0), 5, &cfg).is_err());
}
