//! Adaptive Dormand–Prince 5(4) integration of the phase equation and its
//! parameter variations, with lift tracking and dense output.
//!
//! The phase is never reduced modulo `2π` here: every trajectory lives on the
//! universal cover so windings stay unambiguous.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{vector_field, Params, State};
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegratorError {
    #[error("step size underflow at t = {t}: controller asked for {step}, min_step is {min_step}")]
    StepUnderflow { t: f64, step: f64, min_step: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("invalid integrator config: {0}")]
    InvalidConfig(&'static str),
    #[error("span [{t0}, {t1}] does not match configured direction {direction:?}")]
    DirectionMismatch {
        t0: f64,
        t1: f64,
        direction: Direction,
    },
    #[error("empty integration span")]
    EmptySpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_step: T,
    pub min_step: T,
    pub direction: Direction,
}

impl<T: Scalar> Default for IntegratorConfig<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::tol_floor(1e-10),
            abs_tol: T::tol_floor(1e-10),
            max_step: T::lit(0.1),
            min_step: T::tol_floor(1e-12),
            direction: Direction::Forward,
        }
    }
}

impl<T: Scalar> IntegratorConfig<T> {
    pub fn with_direction(self, direction: Direction) -> Self {
        Self { direction, ..self }
    }

    pub fn with_tolerances(self, rel_tol: T, abs_tol: T) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..self
        }
    }

    /// Config whose direction matches the span `t0 -> t1`.
    pub fn for_span(self, t0: T, t1: T) -> Self {
        let direction = if t1 >= t0 {
            Direction::Forward
        } else {
            Direction::Backward
        };
        self.with_direction(direction)
    }

    pub fn validate(&self) -> Result<(), IntegratorError> {
        let one = T::one();
        if !(self.rel_tol > T::zero() && self.rel_tol < one) {
            return Err(IntegratorError::InvalidConfig("rel_tol must lie in (0, 1)"));
        }
        if !(self.abs_tol > T::zero() && self.abs_tol < one) {
            return Err(IntegratorError::InvalidConfig("abs_tol must lie in (0, 1)"));
        }
        if !(self.min_step > T::zero() && self.min_step <= self.max_step) {
            return Err(IntegratorError::InvalidConfig(
                "need 0 < min_step <= max_step",
            ));
        }
        Ok(())
    }
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Continuous extension (Hairer, Nørsett & Wanner, dopri5 `contd5`).
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Interpolation coefficients for one component over one accepted step.
pub(crate) type DenseCoeffs<T> = [T; 5];

#[inline]
fn eval_dense<T: Scalar>(c: &DenseCoeffs<T>, theta: T) -> T {
    let one = T::one();
    let s = one - theta;
    c[0] + theta * (c[1] + s * (c[2] + theta * (c[3] + s * c[4])))
}

/// Output of a raw solve: end state plus, when recorded, the step grid.
pub(crate) struct Solution<T, const N: usize> {
    pub y_end: [T; N],
    pub t_grid: Vec<T>,
    pub y_grid: Vec<[T; N]>,
    pub dense: Vec<[DenseCoeffs<T>; N]>,
    pub steps: usize,
}

fn scaled_norm<T: Scalar, const N: usize>(v: &[T; N], y: &[T; N], cfg: &IntegratorConfig<T>) -> T {
    let mut acc = T::zero();
    for i in 0..N {
        let sc = cfg.abs_tol + cfg.rel_tol * y[i].abs();
        let r = v[i] / sc;
        acc = acc + r * r;
    }
    (acc / T::from_int(N as i64)).sqrt()
}

#[inline]
fn axpy<T: Scalar, const N: usize>(y: &[T; N], h: T, terms: &[(f64, &[T; N])]) -> [T; N] {
    let mut out = *y;
    for i in 0..N {
        let mut s = T::zero();
        for (c, k) in terms {
            s = s + T::lit(*c) * k[i];
        }
        out[i] = out[i] + h * s;
    }
    out
}

/// Integrate `y' = rhs(t, y)` from `t0` to `t1` with error control.
pub(crate) fn solve<T, F, const N: usize>(
    mut rhs: F,
    t0: T,
    y0: [T; N],
    t1: T,
    cfg: &IntegratorConfig<T>,
    record: bool,
) -> Result<Solution<T, N>, IntegratorError>
where
    T: Scalar,
    F: FnMut(T, &[T; N]) -> [T; N],
{
    cfg.validate()?;
    if t1 == t0 || !(t1 - t0).is_finite() {
        return Err(IntegratorError::EmptySpan);
    }
    let forward = t1 > t0;
    if forward != (cfg.direction == Direction::Forward) {
        return Err(IntegratorError::DirectionMismatch {
            t0: t0.to_f64().unwrap_or(f64::NAN),
            t1: t1.to_f64().unwrap_or(f64::NAN),
            direction: cfg.direction,
        });
    }
    let sign = if forward { T::one() } else { -T::one() };
    let span = (t1 - t0).abs();

    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);

    let mut t_grid = Vec::new();
    let mut y_grid = Vec::new();
    let mut dense = Vec::new();
    if record {
        t_grid.push(t);
        y_grid.push(y);
    }

    let mut h = initial_step(&mut rhs, t, &y, &k1, sign, span, cfg);
    let safety = T::lit(0.9);
    let fac_min = T::lit(0.2);
    let fac_max = T::lit(10.0);
    let expo = T::lit(-0.2);
    let mut steps = 0usize;
    let mut rejected_last = false;
    let eps_t = T::epsilon() * T::lit(16.0) * (t0.abs() + t1.abs() + T::one());

    loop {
        let remaining = (t1 - t) * sign;
        if remaining <= eps_t {
            break;
        }
        let mut last = false;
        if h >= remaining {
            h = remaining;
            last = true;
        }
        let hs = h * sign;

        let k2 = rhs(t + T::lit(C2) * hs, &axpy(&y, hs, &[(A21, &k1)]));
        let k3 = rhs(
            t + T::lit(C3) * hs,
            &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]),
        );
        let k4 = rhs(
            t + T::lit(C4) * hs,
            &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = rhs(
            t + T::lit(C5) * hs,
            &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            t + hs,
            &axpy(
                &y,
                hs,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = axpy(
            &y,
            hs,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let t_new = if last { t1 } else { t + hs };
        let k7 = rhs(t_new, &y_new);

        let mut err_vec = [T::zero(); N];
        for i in 0..N {
            err_vec[i] = hs
                * (T::lit(E1) * k1[i]
                    + T::lit(E3) * k3[i]
                    + T::lit(E4) * k4[i]
                    + T::lit(E5) * k5[i]
                    + T::lit(E6) * k6[i]
                    + T::lit(E7) * k7[i]);
        }
        let mut ymax = [T::zero(); N];
        for i in 0..N {
            ymax[i] = y[i].abs().max(y_new[i].abs());
        }
        let err = scaled_norm(&err_vec, &ymax, cfg);
        if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            // Shrink hard and retry; give up once below min_step.
            h = h * fac_min;
            if h < cfg.min_step {
                return Err(IntegratorError::NonFinite {
                    t: t.to_f64().unwrap_or(f64::NAN),
                });
            }
            rejected_last = true;
            continue;
        }

        let mut fac = safety
            * if err > T::zero() {
                err.powf(expo)
            } else {
                fac_max
            };
        fac = fac.max(fac_min).min(fac_max);

        if err <= T::one() {
            if record {
                let mut coeffs = [[T::zero(); 5]; N];
                for i in 0..N {
                    let ydiff = y_new[i] - y[i];
                    let bspl = hs * k1[i] - ydiff;
                    coeffs[i] = [
                        y[i],
                        ydiff,
                        bspl,
                        ydiff - hs * k7[i] - bspl,
                        hs * (T::lit(D1) * k1[i]
                            + T::lit(D3) * k3[i]
                            + T::lit(D4) * k4[i]
                            + T::lit(D5) * k5[i]
                            + T::lit(D6) * k6[i]
                            + T::lit(D7) * k7[i]),
                    ];
                }
                dense.push(coeffs);
                t_grid.push(t_new);
                y_grid.push(y_new);
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            steps += 1;
            if rejected_last {
                fac = fac.min(T::one());
            }
            rejected_last = false;
            h = (h * fac).min(cfg.max_step);
            if last {
                break;
            }
        } else {
            h = h * fac.min(T::one());
            rejected_last = true;
            if h < cfg.min_step {
                return Err(IntegratorError::StepUnderflow {
                    t: t.to_f64().unwrap_or(f64::NAN),
                    step: h.to_f64().unwrap_or(f64::NAN),
                    min_step: cfg.min_step.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }

    Ok(Solution {
        y_end: y,
        t_grid,
        y_grid,
        dense,
        steps,
    })
}

fn initial_step<T, F, const N: usize>(
    rhs: &mut F,
    t: T,
    y: &[T; N],
    f0: &[T; N],
    sign: T,
    span: T,
    cfg: &IntegratorConfig<T>,
) -> T
where
    T: Scalar,
    F: FnMut(T, &[T; N]) -> [T; N],
{
    let d0 = scaled_norm(y, &y.map(|v| v.abs()), cfg);
    let d1 = scaled_norm(f0, &y.map(|v| v.abs()), cfg);
    let small = T::lit(1e-5);
    let mut h0 = if d0 < small || d1 < small {
        T::lit(1e-6)
    } else {
        T::lit(0.01) * d0 / d1
    };
    h0 = h0.min(cfg.max_step).min(span);
    let y1 = axpy(y, h0 * sign, &[(1.0, f0)]);
    let f1 = rhs(t + h0 * sign, &y1);
    let mut diff = [T::zero(); N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = scaled_norm(&diff, &y.map(|v| v.abs()), cfg) / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= T::lit(1e-15) {
        (h0 * T::lit(1e-3)).max(T::lit(1e-6))
    } else {
        (T::lit(0.01) / dm).powf(T::lit(0.2))
    };
    (T::lit(100.0) * h0)
        .min(h1)
        .min(cfg.max_step)
        .min(span)
        .max(cfg.min_step)
}

/// Variational values `∂x/∂a`, `∂x/∂b` along a trajectory.
#[derive(Debug, Clone)]
pub struct Variations<T> {
    pub u_a: Vec<T>,
    pub u_b: Vec<T>,
    ua_dense: Vec<DenseCoeffs<T>>,
    ub_dense: Vec<DenseCoeffs<T>>,
}

/// A phase trajectory on the universal cover with dense output.
///
/// `t_grid` is monotone in the direction of integration: increasing for
/// forward runs, decreasing for backward runs.
#[derive(Debug, Clone)]
pub struct LiftedTrajectory<T> {
    pub t_grid: Vec<T>,
    pub x_values: Vec<T>,
    x_dense: Vec<DenseCoeffs<T>>,
    pub variations: Option<Variations<T>>,
    pub steps: usize,
}

impl<T: Scalar> LiftedTrajectory<T> {
    pub fn t_start(&self) -> T {
        self.t_grid[0]
    }

    pub fn t_end(&self) -> T {
        *self.t_grid.last().expect("non-empty grid")
    }

    pub fn x_end(&self) -> T {
        *self.x_values.last().expect("non-empty grid")
    }

    pub fn u_a_end(&self) -> Option<T> {
        self.variations
            .as_ref()
            .map(|v| *v.u_a.last().expect("non-empty grid"))
    }

    pub fn u_b_end(&self) -> Option<T> {
        self.variations
            .as_ref()
            .map(|v| *v.u_b.last().expect("non-empty grid"))
    }

    fn locate(&self, t: T) -> Option<(usize, T)> {
        let n = self.t_grid.len();
        if n < 2 {
            return None;
        }
        let forward = self.t_grid[n - 1] > self.t_grid[0];
        let key = |s: T| if forward { s } else { -s };
        let tk = key(t);
        if tk < key(self.t_grid[0]) || tk > key(self.t_grid[n - 1]) {
            return None;
        }
        // first index whose key exceeds tk
        let idx = self.t_grid.partition_point(|&s| key(s) <= tk);
        let seg = idx.clamp(1, n - 1) - 1;
        let h = self.t_grid[seg + 1] - self.t_grid[seg];
        Some((seg, (t - self.t_grid[seg]) / h))
    }

    /// Dense evaluation of the lifted phase; `None` outside the span.
    pub fn x_at(&self, t: T) -> Option<T> {
        self.locate(t)
            .map(|(seg, th)| eval_dense(&self.x_dense[seg], th))
    }

    pub fn u_a_at(&self, t: T) -> Option<T> {
        let v = self.variations.as_ref()?;
        self.locate(t)
            .map(|(seg, th)| eval_dense(&v.ua_dense[seg], th))
    }

    pub fn u_b_at(&self, t: T) -> Option<T> {
        let v = self.variations.as_ref()?;
        self.locate(t)
            .map(|(seg, th)| eval_dense(&v.ub_dense[seg], th))
    }
}

/// Integrate the phase equation from `(x0, t0)` to `t1` (either direction).
pub fn integrate<T: Scalar>(
    p: &Params<T>,
    x0: T,
    t0: T,
    t1: T,
    cfg: &IntegratorConfig<T>,
) -> Result<LiftedTrajectory<T>, IntegratorError> {
    let sol = solve(
        |t, y: &[T; 1]| [vector_field(State::new(y[0], t), p)],
        t0,
        [x0],
        t1,
        cfg,
        true,
    )?;
    Ok(LiftedTrajectory {
        t_grid: sol.t_grid,
        x_values: sol.y_grid.iter().map(|y| y[0]).collect(),
        x_dense: sol.dense.iter().map(|d| d[0]).collect(),
        variations: None,
        steps: sol.steps,
    })
}

#[inline]
fn variational_rhs<T: Scalar>(p: &Params<T>) -> impl Fn(T, &[T; 3]) -> [T; 3] + '_ {
    move |t, y| {
        let (sx, cx) = y[0].sin_cos();
        let ct = t.cos();
        let inv_mu = T::one() / p.mu;
        [
            (cx + p.a + p.b * ct) * inv_mu,
            (-y[1] * sx + T::one()) * inv_mu,
            (-y[2] * sx + ct) * inv_mu,
        ]
    }
}

/// Integrate the phase together with `u_a = ∂x/∂a` and `u_b = ∂x/∂b`, both
/// starting from zero at `t0`.
pub fn integrate_with_variations<T: Scalar>(
    p: &Params<T>,
    x0: T,
    t0: T,
    t1: T,
    cfg: &IntegratorConfig<T>,
) -> Result<LiftedTrajectory<T>, IntegratorError> {
    let z = T::zero();
    let sol = solve(variational_rhs(p), t0, [x0, z, z], t1, cfg, true)?;
    let pick = |i: usize| sol.y_grid.iter().map(|y| y[i]).collect::<Vec<_>>();
    let pick_dense = |i: usize| sol.dense.iter().map(|d| d[i]).collect::<Vec<_>>();
    Ok(LiftedTrajectory {
        t_grid: sol.t_grid.clone(),
        x_values: pick(0),
        x_dense: pick_dense(0),
        variations: Some(Variations {
            u_a: pick(1),
            u_b: pick(2),
            ua_dense: pick_dense(1),
            ub_dense: pick_dense(2),
        }),
        steps: sol.steps,
    })
}

/// End value of the lifted phase only; no grid is kept.
pub fn flow_endpoint<T: Scalar>(
    p: &Params<T>,
    x0: T,
    t0: T,
    t1: T,
    cfg: &IntegratorConfig<T>,
) -> Result<T, IntegratorError> {
    let cfg = cfg.for_span(t0, t1);
    let sol = solve(
        |t, y: &[T; 1]| [vector_field(State::new(y[0], t), p)],
        t0,
        [x0],
        t1,
        &cfg,
        false,
    )?;
    Ok(sol.y_end[0])
}

/// End values `(x, u_a, u_b)` of the variational system; no grid is kept.
pub fn variational_endpoint<T: Scalar>(
    p: &Params<T>,
    x0: T,
    t0: T,
    t1: T,
    cfg: &IntegratorConfig<T>,
) -> Result<(T, T, T), IntegratorError> {
    let cfg = cfg.for_span(t0, t1);
    let z = T::zero();
    let sol = solve(variational_rhs(p), t0, [x0, z, z], t1, &cfg, false)?;
    Ok((sol.y_end[0], sol.y_end[1], sol.y_end[2]))
}

/// Flow over `[t0, t1]` of the homogeneous linear system whose projective
/// action on `(sin(x/2), cos(x/2))` is the phase flow. Returns the 2×2
/// fundamental matrix; it has determinant one.
pub fn projective_flow<T: Scalar>(
    p: &Params<T>,
    t0: T,
    t1: T,
    cfg: &IntegratorConfig<T>,
) -> Result<[[T; 2]; 2], IntegratorError> {
    let cfg = cfg.for_span(t0, t1);
    let half = T::lit(0.5) / p.mu;
    // s' = (1 + c) k / 2mu,  k' = (1 - c) s / 2mu,  c = a + b cos t
    let rhs = |t: T, y: &[T; 4]| {
        let c = p.a + p.b * t.cos();
        let up = (T::one() + c) * half;
        let dn = (T::one() - c) * half;
        [up * y[2], up * y[3], dn * y[0], dn * y[1]]
    };
    let (o, z) = (T::one(), T::zero());
    let sol = solve(rhs, t0, [o, z, z, o], t1, &cfg, false)?;
    let y = sol.y_end;
    Ok([[y[0], y[1]], [y[2], y[3]]])
}
