//! Slow-curve geometry of the equation viewed as a slow-fast system with the
//! forcing phase `t` slow and `x` fast.
//!
//! The slow curve is `M = {cos x + a + b cos t = 0}`; its branch with
//! `x ∈ (0, π)` attracts (`-sin x < 0`) and the branch with `x ∈ (π, 2π)`
//! repels. Folds are the points of `M` with `sin x = 0`.

use serde::{Deserialize, Serialize};

use crate::scalar::{wrap_centered, Scalar};

/// Tolerance for placing `(a, b)` on a dividing line.
pub const REGION_BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// `b < |a| - 1`: no slow curve.
    A,
    /// `|a| - 1 < b < |a| + 1`, `|a| + b > 1`: one contractible oval.
    B,
    /// `b > |a| + 1`: two curves, each winding once around `x`.
    C,
    /// `|a| + b < 1`: two curves, each winding once around `t`.
    CPrime,
    /// Within tolerance of a dividing line.
    Boundary,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::A => "A",
            Region::B => "B",
            Region::C => "C",
            Region::CPrime => "C'",
            Region::Boundary => "boundary",
        }
    }
}

/// Classify `(a, b)`; other quadrants reduce to `a, b >= 0` through
/// `(a, x) -> (-a, x + π)` and `(b, t) -> (-b, t + π)`.
pub fn classify_region<T: Scalar>(a: T, b: T) -> Region {
    let (a, b) = (a.abs(), b.abs());
    let one = T::one();
    let tol = T::tol_floor(REGION_BOUNDARY_TOL);
    let lines = [b - (a - one), b - (a + one), a + b - one];
    if lines.iter().any(|d| d.abs() < tol) {
        return Region::Boundary;
    }
    if b < a - one {
        Region::A
    } else if b > a + one {
        Region::C
    } else if a + b > one {
        Region::B
    } else {
        Region::CPrime
    }
}

/// A point `(t, x)` on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint<T> {
    pub t: T,
    pub x: T,
}

/// One closed component of the slow curve, sampled as a polygon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component<T> {
    /// Points with `t, x ∈ [0, 2π)`; the polygon closes back to the first.
    pub points: Vec<TorusPoint<T>>,
    /// Net turns around the `x` and `t` directions.
    pub x_winding: i64,
    pub t_winding: i64,
    pub contractible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlowCurve<T> {
    pub region: Region,
    pub components: Vec<Component<T>>,
    pub folds: Vec<TorusPoint<T>>,
}

#[inline]
fn forcing<T: Scalar>(a: T, b: T, t: T) -> T {
    a + b * t.cos()
}

/// `|cos x + a + b cos t|` at a point.
pub fn curve_residual<T: Scalar>(a: T, b: T, pt: &TorusPoint<T>) -> T {
    (pt.x.cos() + forcing(a, b, pt.t)).abs()
}

fn reduce_angle<T: Scalar>(v: T) -> T {
    let tau = T::TAU();
    let r = v - (v / tau).floor() * tau;
    if r >= tau {
        r - tau
    } else {
        r
    }
}

/// Solutions `t ∈ [0, 2π)` of `a + b cos t = level`.
fn level_crossings<T: Scalar>(a: T, b: T, level: T) -> Vec<T> {
    if b == T::zero() {
        return Vec::new();
    }
    let v = (level - a) / b;
    if v.abs() > T::one() {
        return Vec::new();
    }
    let t0 = v.acos();
    let t1 = T::TAU() - t0;
    if (t1 - t0).abs() <= T::epsilon() || t0 == T::zero() {
        vec![reduce_angle(t0)]
    } else {
        vec![t0, t1]
    }
}

/// Folds of the slow curve: `x = 0` where `a + b cos t = -1` and `x = π`
/// where `a + b cos t = 1`, sorted by `t`.
pub fn fold_points<T: Scalar>(a: T, b: T) -> Vec<TorusPoint<T>> {
    let mut folds: Vec<TorusPoint<T>> = level_crossings(a, b, -T::one())
        .into_iter()
        .map(|t| TorusPoint { t, x: T::zero() })
        .chain(
            level_crossings(a, b, T::one())
                .into_iter()
                .map(|t| TorusPoint { t, x: T::PI() }),
        )
        .collect();
    folds.sort_by(|p, q| p.t.partial_cmp(&q.t).expect("finite fold times"));
    folds
}

fn winding<T: Scalar>(values: impl Iterator<Item = T> + Clone) -> i64 {
    let tau = T::TAU();
    let pts: Vec<T> = values.collect();
    if pts.len() < 2 {
        return 0;
    }
    let mut total = T::zero();
    for i in 0..pts.len() {
        let next = pts[(i + 1) % pts.len()];
        total = total + wrap_centered(next - pts[i], tau);
    }
    (total / tau).round().to_i64().unwrap_or(0)
}

fn make_component<T: Scalar>(points: Vec<TorusPoint<T>>) -> Component<T> {
    let x_winding = winding(points.iter().map(|p| p.x));
    let t_winding = winding(points.iter().map(|p| p.t));
    Component {
        contractible: x_winding == 0 && t_winding == 0,
        x_winding,
        t_winding,
        points,
    }
}

/// Sample the slow curve with `n_samples` points per branch of each arc.
pub fn slow_curve<T: Scalar>(a: T, b: T, n_samples: usize) -> SlowCurve<T> {
    let n = n_samples.max(2);
    let region = classify_region(a, b);
    let folds = fold_points(a, b);
    let tau = T::TAU();
    let one = T::one();
    let on_curve = |t: T| forcing(a, b, t).abs() <= one;
    // attracting branch in [0, π]; the repelling one is its reflection 2π - x
    let branch = |t: T| (-forcing(a, b, t)).max(-one).min(one).acos();

    let mut components = Vec::new();
    if folds.is_empty() {
        if on_curve(T::zero()) && on_curve(T::PI()) {
            for upper in [false, true] {
                let pts = (0..n)
                    .map(|i| {
                        let t = tau * T::from_int(i as i64) / T::from_int(n as i64);
                        let x = branch(t);
                        TorusPoint {
                            t,
                            x: if upper { reduce_angle(tau - x) } else { x },
                        }
                    })
                    .collect();
                components.push(make_component(pts));
            }
        }
        return SlowCurve {
            region,
            components,
            folds,
        };
    }

    let ends: Vec<T> = folds.iter().map(|f| f.t).collect();
    for i in 0..ends.len() {
        let start = ends[i];
        let mut stop = ends[(i + 1) % ends.len()];
        if stop <= start {
            stop = stop + tau;
        }
        let mid = (start + stop) * T::lit(0.5);
        if !on_curve(mid) {
            continue;
        }
        let len = stop - start;
        let ts: Vec<T> = (0..n)
            .map(|j| start + len * T::from_int(j as i64) / T::from_int((n - 1) as i64))
            .collect();
        let mut pts: Vec<TorusPoint<T>> = ts
            .iter()
            .map(|&t| TorusPoint {
                t: reduce_angle(t),
                x: branch(t),
            })
            .collect();
        // return along the repelling branch, skipping the shared fold ends
        for &t in ts.iter().rev().skip(1).take(n - 2) {
            pts.push(TorusPoint {
                t: reduce_angle(t),
                x: reduce_angle(tau - branch(t)),
            });
        }
        components.push(make_component(pts));
    }
    SlowCurve {
        region,
        components,
        folds,
    }
}
