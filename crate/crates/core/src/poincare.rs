//! Period map of the phase equation, its fractional-linear representation in
//! `u = tan(x/2)`, and the rotation number.
//!
//! Points of the circle are carried as homogeneous vectors
//! `v(x) = (sin(x/2), cos(x/2))`, so `x = π` is the projective point at
//! infinity with no special casing. Along a lifted orbit `v` picks up a sign
//! every `2π`, which pins down the sign of the fitted matrix: the fit lives on
//! the double cover, and `trace = 2 cos(π ρ)` there.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrator::{flow_endpoint, IntegratorConfig, IntegratorError};
use crate::model::Params;
use crate::scalar::{wrap_centered, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PoincareError {
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error("degenerate Möbius fit: base-point images coincide (separation {separation:e})")]
    DegenerateFit { separation: f64 },
    #[error("Möbius fit is not orientation preserving (det = {det:e})")]
    Orientation { det: f64 },
}

/// Trace band around `±2` labelled parabolic.
pub const PARABOLIC_TOL: f64 = 1e-7;
/// Default number of periods for the direct method.
pub const DIRECT_PERIODS: u32 = 1000;

const DEGENERATE_SEPARATION: f64 = 1e-9;

/// Period map as a unit-determinant 2×2 matrix acting on `(sin(x/2), cos(x/2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap<T> {
    pub m: [[T; 2]; 2],
    /// The lift sends 0 into `[2π winding, 2π (winding + 1))`.
    pub winding: i64,
    /// Mismatch at the validation point, in radians of `x`: the smaller of
    /// the forward error `|M(x) - P(x)|` and the backward error
    /// `|x - M⁻¹(P(x))|`, both on the double cover.
    pub fit_residual: T,
    /// Mean lifted displacement `(P(x) - x) / 2π` over the sampled points.
    pub mean_shift: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapClass {
    Elliptic,
    Parabolic,
    Hyperbolic,
    Identity,
}

impl MapClass {
    pub fn as_str(self) -> &'static str {
        match self {
            MapClass::Elliptic => "elliptic",
            MapClass::Parabolic => "parabolic",
            MapClass::Hyperbolic => "hyperbolic",
            MapClass::Identity => "identity",
        }
    }

    pub fn is_locked(self) -> bool {
        !matches!(self, MapClass::Elliptic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RotationMethod {
    Mobius,
    Direct { periods: u32 },
}

impl RotationMethod {
    pub fn direct() -> Self {
        RotationMethod::Direct {
            periods: DIRECT_PERIODS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationResult<T> {
    /// Revolutions of `x` per forcing period `2π`.
    pub rho: T,
    pub method: RotationMethod,
    pub error_bound: T,
    /// Map class, when the Möbius route was used.
    pub class: Option<MapClass>,
    pub fit_residual: Option<T>,
}

impl<T: Scalar> MobiusMap<T> {
    pub fn trace(&self) -> T {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> T {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Image of a lifted angle under the matrix, determined modulo `4π`.
    pub fn apply_mod4pi(&self, x: T) -> T {
        let [s, c] = homogeneous(x);
        let w0 = self.m[0][0] * s + self.m[0][1] * c;
        let w1 = self.m[1][0] * s + self.m[1][1] * c;
        T::lit(2.0) * w0.atan2(w1)
    }

    /// Preimage of a lifted angle under the matrix, modulo `4π`.
    pub fn invert_mod4pi(&self, y: T) -> T {
        let [s, c] = homogeneous(y);
        let m = &self.m;
        let w0 = m[1][1] * s - m[0][1] * c;
        let w1 = -m[1][0] * s + m[0][0] * c;
        T::lit(2.0) * w0.atan2(w1)
    }
}

#[inline]
fn homogeneous<T: Scalar>(x: T) -> [T; 2] {
    let (s, c) = (x * T::lit(0.5)).sin_cos();
    [s, c]
}

/// Lifted image of `x0` under the period map `t: 0 -> 2π`.
pub fn poincare_lift<T: Scalar>(
    p: &Params<T>,
    x0: T,
    cfg: &IntegratorConfig<T>,
) -> Result<T, IntegratorError> {
    flow_endpoint(p, x0, T::zero(), T::TAU(), cfg)
}

/// Fit using base points `{0, π/2, π}` and validation point `3π/2`.
pub fn fit_mobius<T: Scalar>(
    p: &Params<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<MobiusMap<T>, PoincareError> {
    let pi = T::PI();
    let half = T::lit(0.5);
    fit_mobius_with(p, [T::zero(), pi * half, pi], pi * T::lit(1.5), cfg)
}

/// Fit the fractional-linear map through three base points and check it at
/// a fourth.
pub fn fit_mobius_with<T: Scalar>(
    p: &Params<T>,
    base: [T; 3],
    check: T,
    cfg: &IntegratorConfig<T>,
) -> Result<MobiusMap<T>, PoincareError> {
    let mut images = [T::zero(); 3];
    for (img, &x) in images.iter_mut().zip(base.iter()) {
        *img = poincare_lift(p, x, cfg)?;
    }
    let check_image = poincare_lift(p, check, cfg)?;
    let lift_zero = if base[0] == T::zero() {
        images[0]
    } else {
        poincare_lift(p, T::zero(), cfg)?
    };

    let v = base.map(homogeneous);
    let w = images.map(homogeneous);

    // Separation of images on the circle: |sin((y_i - y_j)/2)|.
    let mut separation = T::infinity();
    for i in 0..3 {
        for j in (i + 1)..3 {
            let d = (w[i][0] * w[j][1] - w[i][1] * w[j][0]).abs();
            separation = separation.min(d);
        }
    }
    if separation < T::lit(DEGENERATE_SEPARATION) {
        return Err(PoincareError::DegenerateFit {
            separation: separation.to_f64().unwrap_or(0.0),
        });
    }

    let a = frame(&v);
    let b = frame(&w);
    let m = mat_mul(&b, &inverse(&a));
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if !(det > T::zero()) {
        return Err(PoincareError::Orientation {
            det: det.to_f64().unwrap_or(f64::NAN),
        });
    }
    let scale = det.sqrt();
    let m = [
        [m[0][0] / scale, m[0][1] / scale],
        [m[1][0] / scale, m[1][1] / scale],
    ];

    let tau = T::TAU();
    let mut map = MobiusMap {
        m,
        winding: (lift_zero / tau).floor().to_i64().unwrap_or(0),
        fit_residual: T::zero(),
        mean_shift: T::zero(),
    };
    let four_pi = tau + tau;
    let forward = wrap_centered(map.apply_mod4pi(check) - check_image, four_pi).abs();
    let backward = wrap_centered(map.invert_mod4pi(check_image) - check, four_pi).abs();
    map.fit_residual = forward.min(backward);
    let mut shift = (check_image - check) / tau;
    for (x, y) in base.iter().zip(images.iter()) {
        shift = shift + (*y - *x) / tau;
    }
    map.mean_shift = shift / T::lit(4.0);
    Ok(map)
}

/// Columns `α v1, β v2` with `α v1 + β v2 = v3`.
fn frame<T: Scalar>(v: &[[T; 2]; 3]) -> [[T; 2]; 2] {
    let det = v[0][0] * v[1][1] - v[1][0] * v[0][1];
    let alpha = (v[2][0] * v[1][1] - v[1][0] * v[2][1]) / det;
    let beta = (v[0][0] * v[2][1] - v[2][0] * v[0][1]) / det;
    [
        [alpha * v[0][0], beta * v[1][0]],
        [alpha * v[0][1], beta * v[1][1]],
    ]
}

fn inverse<T: Scalar>(m: &[[T; 2]; 2]) -> [[T; 2]; 2] {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ]
}

fn mat_mul<T: Scalar>(a: &[[T; 2]; 2], b: &[[T; 2]; 2]) -> [[T; 2]; 2] {
    let mut out = [[T::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Identity (±I) first, then the `|trace|` rule with a parabolic band.
pub fn classify<T: Scalar>(m: &MobiusMap<T>, tol: T) -> MapClass {
    let mm = &m.m;
    let off = mm[0][1].abs().max(mm[1][0].abs());
    let near = |s: T| off < tol && (mm[0][0] - s).abs() < tol && (mm[1][1] - s).abs() < tol;
    if near(T::one()) || near(-T::one()) {
        return MapClass::Identity;
    }
    let gap = m.trace().abs() - T::lit(2.0);
    if gap.abs() < tol {
        MapClass::Parabolic
    } else if gap > T::zero() {
        MapClass::Hyperbolic
    } else {
        MapClass::Elliptic
    }
}

/// Rotation number read off a fitted map.
///
/// The double-cover matrix determines `ρ` modulo 2: through the trace for
/// locked classes (`sign(trace) = (-1)^ρ`), and through the trace plus the
/// sign of `m12 - m21` for elliptic ones. The lifted displacement, which is
/// within one of `ρ`, selects the representative.
pub fn rotation_from_map<T: Scalar>(map: &MobiusMap<T>, class: MapClass) -> (T, T) {
    let two = T::lit(2.0);
    let pi = T::PI();
    let (residue, error_bound) = match class {
        MapClass::Elliptic => {
            let tau = (map.trace() / two).max(-T::one()).min(T::one());
            let s = if map.m[0][1] - map.m[1][0] >= T::zero() {
                T::one()
            } else {
                -T::one()
            };
            let sin_abs = (T::one() - tau * tau).max(T::zero()).sqrt();
            let theta = (s * sin_abs).atan2(tau);
            let bound = map.fit_residual / (pi * sin_abs.max(T::lit(1e-8)));
            (theta / pi, bound.max(T::epsilon()))
        }
        _ => {
            let r = if map.trace() >= T::zero() {
                T::zero()
            } else {
                T::one()
            };
            (r, map.fit_residual.max(T::epsilon()))
        }
    };
    let j = ((map.mean_shift - residue) / two).round();
    (residue + two * j, error_bound)
}

pub fn rotation_number<T: Scalar>(
    p: &Params<T>,
    method: RotationMethod,
    cfg: &IntegratorConfig<T>,
) -> Result<RotationResult<T>, PoincareError> {
    match method {
        RotationMethod::Mobius => match fit_mobius(p, cfg) {
            Ok(map) => {
                let class = classify(&map, T::lit(PARABOLIC_TOL));
                let (rho, error_bound) = rotation_from_map(&map, class);
                Ok(RotationResult {
                    rho,
                    method,
                    error_bound,
                    class: Some(class),
                    fit_residual: Some(map.fit_residual),
                })
            }
            Err(PoincareError::DegenerateFit { .. }) => {
                // All base points collapse onto one attracting point y; the
                // displacement of y itself is then an integer to within the
                // collapse width.
                let tau = T::TAU();
                let y = poincare_lift(p, T::zero(), cfg)?;
                let z = poincare_lift(p, y, cfg)?;
                let rho = ((z - y) / tau).round();
                Ok(RotationResult {
                    rho,
                    method,
                    error_bound: T::lit(DEGENERATE_SEPARATION),
                    class: Some(MapClass::Hyperbolic),
                    fit_residual: None,
                })
            }
            Err(e) => Err(e),
        },
        RotationMethod::Direct { periods } => {
            let n = periods.max(1);
            let total = T::TAU() * T::from_int(n as i64);
            let x = flow_endpoint(p, T::zero(), T::zero(), total, cfg)?;
            let rho = x / total;
            Ok(RotationResult {
                rho,
                method,
                error_bound: T::one() / T::from_int(n as i64),
                class: None,
                fit_residual: None,
            })
        }
    }
}
