//! Bessel functions from their integral representation and the large-`b`
//! asymptote of the tongue boundaries,
//! `a_{0,k} ≈ kμ - J_k(-b/μ)` and `a_{π,k} ≈ kμ + J_k(-b/μ)`.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::tongues::{solve_boundary, Side, TongueError, TraceConfig};

/// Node-count ceiling for the quadrature.
const MAX_NODES: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselEval<T> {
    pub k: i64,
    pub z: T,
    pub value: T,
    /// Difference between the last two refinements.
    pub quadrature_error: T,
    pub nodes: usize,
}

fn trapezoid<T: Scalar>(k: i64, z: T, n: usize) -> T {
    let kf = T::from_int(k);
    let step = T::TAU() / T::from_int(n as i64);
    let mut sum = T::zero();
    for j in 0..n {
        let t = step * T::from_int(j as i64);
        sum = sum + (kf * t - z * t.sin()).cos();
    }
    sum / T::from_int(n as i64)
}

/// `J_k(z) = (1/2π) ∫₀^{2π} cos(kt - z sin t) dt` by the trapezoid rule,
/// which converges geometrically on this periodic integrand once the node
/// count exceeds `|k| + |z|`. Nodes double until two refinements agree to
/// `1e-12` (or the precision floor of `T`).
pub fn bessel_j<T: Scalar>(k: i64, z: T) -> BesselEval<T> {
    let tol = T::tol_floor(1e-12);
    let band = (k.unsigned_abs() as f64 + z.abs().to_f64().unwrap_or(0.0)).ceil() as usize;
    let mut n = (2 * band + 32).next_power_of_two();
    let mut prev = trapezoid(k, z, n);
    loop {
        n *= 2;
        let cur = trapezoid(k, z, n);
        let err = (cur - prev).abs();
        if err <= tol || n >= MAX_NODES {
            return BesselEval {
                k,
                z,
                value: cur,
                quadrature_error: err,
                nodes: n,
            };
        }
        prev = cur;
    }
}

/// `|J_{k-1}(z) + J_{k+1}(z) - (2k/z) J_k(z)|`.
pub fn recurrence_residual<T: Scalar>(k: i64, z: T) -> T {
    let jm = bessel_j(k - 1, z).value;
    let j0 = bessel_j(k, z).value;
    let jp = bessel_j(k + 1, z).value;
    (jm + jp - T::from_int(2 * k) / z * j0).abs()
}

/// Leading-order boundary `kμ ∓ J_k(-b/μ)` (minus for side 0).
pub fn boundary_asymptote<T: Scalar>(k: i64, mu: T, b: T, side: Side) -> T {
    let j = bessel_j(k, -b / mu).value;
    let base = T::from_int(k) * mu;
    match side {
        Side::Zero => base - j,
        Side::Pi => base + j,
    }
}

/// Default scan window `[b0, 3 b0]` with `b0 = max(20, 5/μ)`.
pub fn default_scan_range<T: Scalar>(mu: T) -> (T, T) {
    let b0 = T::lit(20.0).max(T::lit(5.0) / mu);
    (b0, T::lit(3.0) * b0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint<T> {
    pub b: T,
    pub a_zero: T,
    pub a_pi: T,
    pub asymptote_zero: T,
    pub asymptote_pi: T,
    pub residual_zero: T,
    pub residual_pi: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualScan<T> {
    pub k: i64,
    pub mu: T,
    pub points: Vec<ScanPoint<T>>,
    /// Least-squares slopes of `log residual` against `log b`.
    pub exponent_zero: T,
    pub exponent_pi: T,
}

/// Solve both boundaries of tongue `k` at one `b`, seeded by the asymptote.
/// Each boundary is the unique root of a monotone function of `a`, so no
/// continuation from `b = 0` is needed.
pub fn scan_point<T: Scalar>(
    k: i64,
    mu: T,
    b: T,
    cfg: &TraceConfig<T>,
) -> Result<ScanPoint<T>, TongueError<T>> {
    let asym_zero = boundary_asymptote(k, mu, b, Side::Zero);
    let asym_pi = boundary_asymptote(k, mu, b, Side::Pi);
    let width = cfg.bisection_bracket.max(T::lit(0.01) * mu);
    let s0 = solve_boundary(k, Side::Zero, mu, b, asym_zero, width, cfg)?;
    let sp = solve_boundary(k, Side::Pi, mu, b, asym_pi, width, cfg)?;
    Ok(ScanPoint {
        b,
        a_zero: s0.a,
        a_pi: sp.a,
        asymptote_zero: asym_zero,
        asymptote_pi: asym_pi,
        residual_zero: (s0.a - asym_zero).abs(),
        residual_pi: (sp.a - asym_pi).abs(),
    })
}

/// Slope of the least-squares line through `(ln x, ln y)`; points with
/// `y <= 0` are skipped.
pub fn loglog_slope<T: Scalar>(xs: &[T], ys: &[T]) -> T {
    let pts: Vec<(T, T)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > T::zero() && **y > T::zero())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return T::nan();
    }
    let n = T::from_int(pts.len() as i64);
    let mx = pts.iter().fold(T::zero(), |s, p| s + p.0) / n;
    let my = pts.iter().fold(T::zero(), |s, p| s + p.1) / n;
    let sxy = pts
        .iter()
        .fold(T::zero(), |s, p| s + (p.0 - mx) * (p.1 - my));
    let sxx = pts
        .iter()
        .fold(T::zero(), |s, p| s + (p.0 - mx) * (p.0 - mx));
    sxy / sxx
}

/// Evenly spaced `b`-grid over a closed range.
pub fn scan_grid<T: Scalar>(b_range: (T, T), n_points: usize) -> Vec<T> {
    let n = n_points.max(2);
    let (lo, hi) = b_range;
    (0..n)
        .map(|i| lo + (hi - lo) * T::from_int(i as i64) / T::from_int((n - 1) as i64))
        .collect()
}

/// Assemble a scan from already computed points.
pub fn summarize_scan<T: Scalar>(k: i64, mu: T, points: Vec<ScanPoint<T>>) -> ResidualScan<T> {
    let bs: Vec<T> = points.iter().map(|p| p.b).collect();
    let r0: Vec<T> = points.iter().map(|p| p.residual_zero).collect();
    let rp: Vec<T> = points.iter().map(|p| p.residual_pi).collect();
    ResidualScan {
        k,
        mu,
        exponent_zero: loglog_slope(&bs, &r0),
        exponent_pi: loglog_slope(&bs, &rp),
        points,
    }
}

/// Residuals of both boundaries against the asymptote over `b_range`.
pub fn residual_scan<T: Scalar>(
    k: i64,
    mu: T,
    b_range: (T, T),
    n_points: usize,
    cfg: &TraceConfig<T>,
) -> Result<ResidualScan<T>, TongueError<T>> {
    cfg.validate()?;
    if !(mu > T::zero() && b_range.0 > T::zero() && b_range.1 > b_range.0) {
        return Err(TongueError::InvalidConfig(
            "scan needs mu > 0 and 0 < b_lo < b_hi",
        ));
    }
    let points = scan_grid(b_range, n_points)
        .into_iter()
        .map(|b| scan_point(k, mu, b, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(summarize_scan(k, mu, points))
}
