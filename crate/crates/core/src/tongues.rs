//! Phase-lock (Arnold tongue) boundaries.
//!
//! By the central symmetry of the equation, the boundary of the tongue with
//! rotation number `k` is the union of two graphs `a = a_{0,k}(b)` and
//! `a = a_{π,k}(b)`: the orbit through `x0 ∈ {0, π}` at `t = 0` reaches
//! `x0 + πk` at half period, `x̃(π) = x0 + πk`. The defect
//! `x̃(π) - x0 - πk` is strictly increasing in `a` (its `a`-derivative solves
//! a linear equation with positive forcing), so at fixed `b` each boundary is
//! the unique root of a monotone function. Continuation in `b` only supplies
//! good starting points for Newton's method; bisection is always available as
//! a fallback once a sign change is bracketed.
//!
//! In the backward formulation the orbit is started at `(x0 + πk, π)` and run
//! back to `t = 0`, where it must hit `x0`. It has the same zero set and is
//! the better-conditioned choice in region B at small `mu`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrator::{
    flow_endpoint, variational_endpoint, Direction, IntegratorConfig, IntegratorError,
};
use crate::model::Params;
use crate::poincare::{poincare_lift, rotation_number, PoincareError, RotationMethod};
use crate::scalar::{wrap_centered, Scalar};
use crate::slowfast::{classify_region, Region};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TongueError<T: Scalar> {
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error(transparent)]
    Poincare(#[from] PoincareError),
    #[error("could not bracket the boundary at b = {b}")]
    BracketFailure {
        b: T,
        partial: Option<Box<BoundaryCurve<T>>>,
    },
    #[error("bracket collapsed at b = {b} with defect {residual} above tolerance")]
    ResidualNotAttained {
        b: T,
        residual: T,
        partial: Option<Box<BoundaryCurve<T>>>,
    },
    #[error("invalid trace config: {0}")]
    InvalidConfig(&'static str),
    #[error("base point must be 0 or π")]
    BadBasePoint,
}

impl<T: Scalar> TongueError<T> {
    /// The partially traced curve carried by a continuation failure.
    pub fn partial(&self) -> Option<&BoundaryCurve<T>> {
        match self {
            TongueError::BracketFailure { partial, .. }
            | TongueError::ResidualNotAttained { partial, .. } => partial.as_deref(),
            _ => None,
        }
    }

    fn with_partial(self, curve: &BoundaryCurve<T>) -> Self {
        match self {
            TongueError::BracketFailure { b, .. } => TongueError::BracketFailure {
                b,
                partial: Some(Box::new(curve.clone())),
            },
            TongueError::ResidualNotAttained { b, residual, .. } => {
                TongueError::ResidualNotAttained {
                    b,
                    residual,
                    partial: Some(Box::new(curve.clone())),
                }
            }
            other => other,
        }
    }
}

/// Base point of a boundary family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Zero,
    Pi,
}

impl Side {
    pub fn x0<T: Scalar>(self) -> T {
        match self {
            Side::Zero => T::zero(),
            Side::Pi => T::PI(),
        }
    }

    /// Lifted half-period target `x0 + πk`.
    pub fn target<T: Scalar>(self, k: i64) -> T {
        self.x0::<T>() + T::PI() * T::from_int(k)
    }

    pub fn from_x0<T: Scalar>(x0: T) -> Result<Self, TongueError<T>> {
        if x0 == T::zero() {
            Ok(Side::Zero)
        } else if x0 == T::PI() {
            Ok(Side::Pi)
        } else {
            Err(TongueError::BadBasePoint)
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Zero => "0",
            Side::Pi => "pi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeDirection {
    Forward,
    Backward,
    /// Backward in region B, forward elsewhere.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig<T> {
    /// Continuation step in `b`.
    pub h: T,
    pub newton_tol: T,
    pub max_newton_iters: u32,
    /// Minimum initial half-width of a bisection bracket in `a`.
    pub bisection_bracket: T,
    pub time_direction: TimeDirection,
    pub integrator: IntegratorConfig<T>,
}

impl<T: Scalar> Default for TraceConfig<T> {
    fn default() -> Self {
        Self {
            h: T::lit(0.01),
            newton_tol: T::tol_floor(1e-9),
            max_newton_iters: 8,
            bisection_bracket: T::lit(1e-4),
            time_direction: TimeDirection::Auto,
            integrator: IntegratorConfig::default(),
        }
    }
}

impl<T: Scalar> TraceConfig<T> {
    pub fn validate(&self) -> Result<(), TongueError<T>> {
        if !(self.h > T::zero()) {
            return Err(TongueError::InvalidConfig("h must be positive"));
        }
        if !(self.newton_tol > T::zero()) {
            return Err(TongueError::InvalidConfig("newton_tol must be positive"));
        }
        if self.max_newton_iters < 1 {
            return Err(TongueError::InvalidConfig(
                "max_newton_iters must be at least 1",
            ));
        }
        if !(self.bisection_bracket > T::zero()) {
            return Err(TongueError::InvalidConfig(
                "bisection_bracket must be positive",
            ));
        }
        self.integrator.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMethod {
    /// Validated `b = 0` start point.
    Start,
    Newton,
    Bisection,
}

impl SampleMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SampleMethod::Start => "start",
            SampleMethod::Newton => "newton",
            SampleMethod::Bisection => "bisection",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample<T> {
    pub b: T,
    pub a: T,
    /// `|defect|` in the formulation that produced the sample.
    pub residual: T,
    /// Newton iterations or bisection evaluations spent.
    pub steps_used: u32,
    pub method: SampleMethod,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve<T> {
    pub k: i64,
    pub side: Side,
    pub mu: T,
    pub samples: Vec<BoundarySample<T>>,
}

impl<T: Scalar> BoundaryCurve<T> {
    pub fn bisection_count(&self) -> usize {
        self.samples
            .iter()
            .filter(|s| s.method == SampleMethod::Bisection)
            .count()
    }

    pub fn max_residual(&self) -> T {
        self.samples
            .iter()
            .fold(T::zero(), |m, s| m.max(s.residual))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bridge<T> {
    pub k: i64,
    pub b_star: T,
    pub a_star: T,
    pub residual_zero: T,
    pub residual_pi: T,
}

/// Lifted phase at `t = π` of the orbit through `(x0, 0)`.
pub fn half_period_value<T: Scalar>(
    p: &Params<T>,
    x0: T,
    cfg: &IntegratorConfig<T>,
) -> Result<T, TongueError<T>> {
    Side::from_x0(x0)?;
    Ok(flow_endpoint(p, x0, T::zero(), T::PI(), cfg)?)
}

/// Forward half-period defect `x̃_{x0}(π) - x0 - πk`; zero exactly on the
/// boundary curve of `side`.
pub fn boundary_condition<T: Scalar>(
    p: &Params<T>,
    k: i64,
    side: Side,
    cfg: &IntegratorConfig<T>,
) -> Result<T, TongueError<T>> {
    Ok(half_period_value(p, side.x0(), cfg)? - side.target(k))
}

/// Backward half-period defect: run from `(x0 + πk, π)` back to `t = 0`
/// and subtract `x0`.
pub fn boundary_condition_backward<T: Scalar>(
    p: &Params<T>,
    k: i64,
    side: Side,
    cfg: &IntegratorConfig<T>,
) -> Result<T, TongueError<T>> {
    Ok(flow_endpoint(p, side.target(k), T::PI(), T::zero(), cfg)? - side.x0())
}

/// Full-period check `|P(x0) - x0|` reduced modulo `2π`, by independent
/// integration over `[0, 2π]`.
pub fn full_period_defect<T: Scalar>(
    p: &Params<T>,
    side: Side,
    cfg: &IntegratorConfig<T>,
) -> Result<T, TongueError<T>> {
    let x0 = side.x0::<T>();
    let y = poincare_lift(p, x0, cfg)?;
    Ok(wrap_centered(y - x0, T::TAU()).abs())
}

/// `sqrt(1 + k² mu²)`: where `ρ = k` at `b = 0` (and, for `k = 0`, the
/// right-hand edge of the zero tongue).
pub fn initial_a<T: Scalar>(k: i64, mu: T) -> T {
    let kf = T::from_int(k);
    (T::one() + kf * kf * mu * mu).sqrt()
}

/// Defect and its `a`-derivative in one formulation.
fn defect<T: Scalar>(
    p: &Params<T>,
    k: i64,
    side: Side,
    dir: Direction,
    with_derivative: bool,
    cfg: &IntegratorConfig<T>,
) -> Result<(T, T), TongueError<T>> {
    let (start, t0, t1, goal) = match dir {
        Direction::Forward => (side.x0(), T::zero(), T::PI(), side.target(k)),
        Direction::Backward => (side.target(k), T::PI(), T::zero(), side.x0()),
    };
    if with_derivative {
        let (x, ua, _) = variational_endpoint(p, start, t0, t1, cfg)?;
        Ok((x - goal, ua))
    } else {
        Ok((flow_endpoint(p, start, t0, t1, cfg)? - goal, T::nan()))
    }
}

fn resolve_direction<T: Scalar>(mode: TimeDirection, a: T, b: T) -> Direction {
    match mode {
        TimeDirection::Forward => Direction::Forward,
        TimeDirection::Backward => Direction::Backward,
        TimeDirection::Auto => {
            if classify_region(a, b) == Region::B {
                Direction::Backward
            } else {
                Direction::Forward
            }
        }
    }
}

/// Newton iteration on `a` at fixed `b`; `None` when it stalls or diverges.
fn newton<T: Scalar>(
    p: Params<T>,
    k: i64,
    side: Side,
    dir: Direction,
    cfg: &TraceConfig<T>,
) -> Result<Option<(T, T, u32)>, TongueError<T>> {
    // forward defect increases with a, backward defect decreases
    let sign = if dir == Direction::Forward {
        T::one()
    } else {
        -T::one()
    };
    let mut a = p.a;
    let mut last_step = T::infinity();
    for it in 1..=cfg.max_newton_iters {
        let (d, dd) = match defect(&p.with_a(a), k, side, dir, true, &cfg.integrator) {
            Ok(v) => v,
            Err(TongueError::Integrator(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        if !d.is_finite() {
            return Ok(None);
        }
        if d.abs() < cfg.newton_tol {
            return Ok(Some((a, d.abs(), it)));
        }
        if !(dd.is_finite() && sign * dd > T::zero()) {
            return Ok(None);
        }
        let step = d / dd;
        if it > 1 && step.abs() > last_step.abs() {
            return Ok(None);
        }
        a = a - step;
        last_step = step;
    }
    let d = match defect(&p.with_a(a), k, side, dir, false, &cfg.integrator) {
        Ok((d, _)) => d,
        Err(TongueError::Integrator(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    Ok(if d.abs() < cfg.newton_tol {
        Some((a, d.abs(), cfg.max_newton_iters + 1))
    } else {
        None
    })
}

/// Bracket the monotone defect around `p.a` (half-width `width`, doubled up
/// to `expansions` times) and bisect.
fn bisect<T: Scalar>(
    p: Params<T>,
    k: i64,
    side: Side,
    dir: Direction,
    width: T,
    expansions: u32,
    cfg: &TraceConfig<T>,
) -> Result<(T, T, u32), TongueError<T>> {
    let sign = if dir == Direction::Forward {
        T::one()
    } else {
        -T::one()
    };
    let f = |a: T| -> Result<T, TongueError<T>> {
        Ok(sign * defect(&p.with_a(a), k, side, dir, false, &cfg.integrator)?.0)
    };
    let center = p.a;
    let mut evals = 0u32;
    let (mut lo, mut hi) = (center - width, center + width);
    let mut f_lo = f(lo)?;
    let mut f_hi = f(hi)?;
    evals += 2;
    let mut w = width;
    let mut expanded = 0;
    while !(f_lo <= T::zero() && f_hi >= T::zero()) {
        if expanded >= expansions {
            return Err(TongueError::BracketFailure {
                b: p.b,
                partial: None,
            });
        }
        w = w + w;
        expanded += 1;
        if f_lo > T::zero() {
            hi = lo;
            f_hi = f_lo;
            lo = center - w;
            f_lo = f(lo)?;
        } else {
            lo = hi;
            f_lo = f_hi;
            hi = center + w;
            f_hi = f(hi)?;
        }
        evals += 1;
        if !(f_lo.is_finite() && f_hi.is_finite()) {
            return Err(TongueError::BracketFailure {
                b: p.b,
                partial: None,
            });
        }
    }
    if f_lo.abs() < cfg.newton_tol {
        return Ok((lo, f_lo.abs(), evals));
    }
    if f_hi.abs() < cfg.newton_tol {
        return Ok((hi, f_hi.abs(), evals));
    }
    let mut best = (
        if f_lo.abs() < f_hi.abs() { lo } else { hi },
        f_lo.abs().min(f_hi.abs()),
    );
    for _ in 0..200 {
        let mid = lo + (hi - lo) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        evals += 1;
        if fm.abs() < best.1 {
            best = (mid, fm.abs());
        }
        if fm.abs() < cfg.newton_tol {
            return Ok((mid, fm.abs(), evals));
        }
        if fm < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(TongueError::ResidualNotAttained {
        b: p.b,
        residual: best.1,
        partial: None,
    })
}

/// Solve one boundary point at fixed `b`, starting from `guess`: Newton in
/// the preferred direction, then bisection, then the opposite direction.
pub fn solve_boundary<T: Scalar>(
    k: i64,
    side: Side,
    mu: T,
    b: T,
    guess: T,
    bracket: T,
    cfg: &TraceConfig<T>,
) -> Result<BoundarySample<T>, TongueError<T>> {
    solve_boundary_inner(k, side, mu, b, guess, bracket, 10, false, cfg)
}

#[allow(clippy::too_many_arguments)]
fn solve_boundary_inner<T: Scalar>(
    k: i64,
    side: Side,
    mu: T,
    b: T,
    guess: T,
    bracket: T,
    expansions: u32,
    skip_newton: bool,
    cfg: &TraceConfig<T>,
) -> Result<BoundarySample<T>, TongueError<T>> {
    let p = Params { a: guess, b, mu };
    let preferred = resolve_direction(cfg.time_direction, guess, b);
    let mut dirs = vec![preferred];
    if cfg.time_direction == TimeDirection::Auto {
        dirs.push(match preferred {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        });
    }
    let mut last_err = None;
    for dir in dirs {
        if !skip_newton {
            if let Some((a, residual, steps)) = newton(p, k, side, dir, cfg)? {
                return Ok(BoundarySample {
                    b,
                    a,
                    residual,
                    steps_used: steps,
                    method: SampleMethod::Newton,
                    direction: dir,
                });
            }
        }
        match bisect(
            p,
            k,
            side,
            dir,
            bracket.max(cfg.bisection_bracket),
            expansions,
            cfg,
        ) {
            Ok((a, residual, steps)) => {
                return Ok(BoundarySample {
                    b,
                    a,
                    residual,
                    steps_used: steps,
                    method: SampleMethod::Bisection,
                    direction: dir,
                })
            }
            Err(
                e @ (TongueError::BracketFailure { .. } | TongueError::ResidualNotAttained { .. }),
            ) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one direction tried"))
}

/// Result of validating the `b = 0` start of a boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StartPoint<T> {
    /// Root of the boundary condition at `b = 0`.
    pub root: T,
    /// `sqrt(1 + k² mu²)` (signed for `k < 0`; `-1` for `k = 0`, side 0).
    pub k_form: T,
    /// `sqrt(1 + (k/2)² mu²)`, the alternative reading of the start formula.
    pub half_k_form: T,
    /// Defect of the boundary condition at each candidate.
    pub k_form_defect: T,
    pub half_k_form_defect: T,
    pub residual: T,
}

impl<T: Scalar> StartPoint<T> {
    /// The candidate formula that zeroes the boundary condition.
    pub fn k_form_confirmed(&self, tol: T) -> bool {
        self.k_form_defect.abs() < tol && (self.root - self.k_form).abs() < tol
    }
}

/// Root-find the boundary condition at `b = 0` and compare it against both
/// candidate closed forms.
pub fn validate_start<T: Scalar>(
    k: i64,
    side: Side,
    mu: T,
    cfg: &TraceConfig<T>,
) -> Result<StartPoint<T>, TongueError<T>> {
    let sgn = |v: T| if k < 0 { -v } else { v };
    let half = T::from_int(k) * T::lit(0.5);
    let (k_form, half_k_form) = if k == 0 && side == Side::Zero {
        // by a -> -a, x -> x + π the side-0 edge of the zero tongue is -1
        (-T::one(), -T::one())
    } else {
        (
            sgn(initial_a(k.abs(), mu)),
            sgn((T::one() + half * half * mu * mu).sqrt()),
        )
    };
    let fwd = cfg.integrator.with_direction(Direction::Forward);
    let d_k = boundary_condition(
        &Params {
            a: k_form,
            b: T::zero(),
            mu,
        },
        k,
        side,
        &fwd,
    )?;
    let d_h = boundary_condition(
        &Params {
            a: half_k_form,
            b: T::zero(),
            mu,
        },
        k,
        side,
        &fwd,
    )?;
    // seed halfway between the candidates so neither is favoured
    let guess = (k_form + half_k_form) * T::lit(0.5);
    let mut start_cfg = *cfg;
    start_cfg.time_direction = TimeDirection::Forward;
    start_cfg.max_newton_iters = cfg.max_newton_iters.max(20);
    let bracket = T::lit(1e-3)
        .max(mu * mu * T::lit(0.1))
        .max((k_form - half_k_form).abs());
    let s = solve_boundary_inner(
        k,
        side,
        mu,
        T::zero(),
        guess,
        bracket,
        30,
        false,
        &start_cfg,
    )?;
    Ok(StartPoint {
        root: s.a,
        k_form,
        half_k_form,
        k_form_defect: d_k,
        half_k_form_defect: d_h,
        residual: s.residual,
    })
}

/// Continue the boundary `a_{side,k}(b)` from `b = 0` to `b_max` in steps of
/// `cfg.h`, Newton first (derivative from the `a`-variational equation) with
/// bisection fallback.
pub fn trace_boundary<T: Scalar>(
    k: i64,
    side: Side,
    mu: T,
    b_max: T,
    cfg: &TraceConfig<T>,
) -> Result<BoundaryCurve<T>, TongueError<T>> {
    cfg.validate()?;
    if !(b_max > T::zero()) {
        return Err(TongueError::InvalidConfig("b_max must be positive"));
    }
    let start = validate_start(k, side, mu, cfg)?;
    let mut curve = BoundaryCurve {
        k,
        side,
        mu,
        samples: vec![BoundarySample {
            b: T::zero(),
            a: start.root,
            residual: start.residual,
            steps_used: 0,
            method: SampleMethod::Start,
            direction: Direction::Forward,
        }],
    };
    let n = (b_max / cfg.h).ceil().to_i64().unwrap_or(0).max(1);
    let five = T::lit(5.0);
    for i in 1..=n {
        let b = (T::from_int(i) * cfg.h).min(b_max);
        let last = curve.samples[curve.samples.len() - 1];
        let slope = if curve.samples.len() >= 2 {
            let prev = curve.samples[curve.samples.len() - 2];
            (last.a - prev.a) / (last.b - prev.b)
        } else {
            T::zero()
        };
        let db = b - last.b;
        let guess = last.a + slope * db;
        let bracket = five * cfg.h * slope.abs();
        // The zero tongue starts at a parabolic cusp; step off it by bracketing.
        let skip_newton = k == 0 && i == 1;
        let sample = solve_boundary_inner(k, side, mu, b, guess, bracket, 10, skip_newton, cfg)
            .map_err(|e| e.with_partial(&curve))?;
        curve.samples.push(sample);
    }
    Ok(curve)
}

/// Bridges of tongue `k`: crossings of `a_{0,k}` and `a_{π,k}` for
/// `0 < b <= b_max`, refined by bisection in `b`.
pub fn find_bridges<T: Scalar>(
    k: i64,
    mu: T,
    b_max: T,
    cfg: &TraceConfig<T>,
) -> Result<Vec<Bridge<T>>, TongueError<T>> {
    let zero = trace_boundary(k, Side::Zero, mu, b_max, cfg)?;
    let pi = trace_boundary(k, Side::Pi, mu, b_max, cfg)?;
    bridges_from_curves(&zero, &pi, cfg)
}

/// Bridge search on two already traced curves sharing a `b`-grid.
pub fn bridges_from_curves<T: Scalar>(
    zero: &BoundaryCurve<T>,
    pi: &BoundaryCurve<T>,
    cfg: &TraceConfig<T>,
) -> Result<Vec<Bridge<T>>, TongueError<T>> {
    let k = zero.k;
    let mu = zero.mu;
    let n = zero.samples.len().min(pi.samples.len());
    let mut bridges = Vec::new();
    let diff = |i: usize| zero.samples[i].a - pi.samples[i].a;
    let tight = T::tol_floor(1e-12);
    let mut i = 1;
    while i + 1 < n {
        let (g0, g1) = (diff(i), diff(i + 1));
        if g0 == T::zero() || g0 * g1 < T::zero() {
            let (mut lo, mut hi) = (zero.samples[i].b, zero.samples[i + 1].b);
            let (mut guess0, mut guess_pi) = (zero.samples[i].a, pi.samples[i].a);
            let mut g_lo = g0;
            let mut best = None;
            for _ in 0..80 {
                let mid = lo + (hi - lo) * T::lit(0.5);
                let s0 =
                    solve_boundary(k, Side::Zero, mu, mid, guess0, cfg.bisection_bracket, cfg)?;
                let sp =
                    solve_boundary(k, Side::Pi, mu, mid, guess_pi, cfg.bisection_bracket, cfg)?;
                guess0 = s0.a;
                guess_pi = sp.a;
                let g = s0.a - sp.a;
                best = Some((mid, s0, sp));
                if g == T::zero() || (hi - lo) < tight {
                    break;
                }
                if g * g_lo > T::zero() {
                    lo = mid;
                    g_lo = g;
                } else {
                    hi = mid;
                }
            }
            if let Some((b_star, s0, sp)) = best {
                bridges.push(Bridge {
                    k,
                    b_star,
                    a_star: (s0.a + sp.a) * T::lit(0.5),
                    residual_zero: s0.residual,
                    residual_pi: sp.residual,
                });
            }
            // skip the bracketing cell
            i += 2;
            continue;
        }
        i += 1;
    }
    bridges.sort_by(|x, y| x.b_star.partial_cmp(&y.b_star).expect("finite b"));
    Ok(bridges)
}

/// Both boundaries of tongue `k` at fixed `b`, ordered `(lower, upper)` in `a`.
pub fn tongue_interval<T: Scalar>(
    k: i64,
    mu: T,
    b: T,
    guess: T,
    cfg: &TraceConfig<T>,
) -> Result<(T, T), TongueError<T>> {
    let width = cfg.bisection_bracket.max(mu * T::lit(0.05));
    let s0 = solve_boundary_inner(k, Side::Zero, mu, b, guess, width, 40, false, cfg)?;
    let sp = solve_boundary_inner(k, Side::Pi, mu, b, guess, width, 40, false, cfg)?;
    Ok((s0.a.min(sp.a), s0.a.max(sp.a)))
}

/// Gap in `a` at fixed `b` between tongue `k` and tongue `k + 1`.
pub fn tongue_gap<T: Scalar>(
    k: i64,
    mu: T,
    b: T,
    guess: T,
    cfg: &TraceConfig<T>,
) -> Result<T, TongueError<T>> {
    let (_, hi_k) = tongue_interval(k, mu, b, guess, cfg)?;
    let (lo_next, _) = tongue_interval(k + 1, mu, b, hi_k, cfg)?;
    Ok(lo_next - hi_k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapReport<T> {
    /// Lower tongue of the pair; the gap separates `k` and `k + 1`.
    pub k: i64,
    pub gap: T,
    /// Upper edge of tongue `k` and lower edge of tongue `k + 1`.
    pub a_lo: T,
    pub a_hi: T,
    pub rho: T,
}

/// The inter-tongue gap nearest the point `(a, b)`.
pub fn gap_near<T: Scalar>(
    a: T,
    b: T,
    mu: T,
    cfg: &TraceConfig<T>,
) -> Result<GapReport<T>, TongueError<T>> {
    let p = Params { a, b, mu };
    let r = rotation_number(&p, RotationMethod::Mobius, &cfg.integrator)?;
    let report = |k: i64, hi_k: T, lo_next: T| GapReport {
        k,
        gap: lo_next - hi_k,
        a_lo: hi_k,
        a_hi: lo_next,
        rho: r.rho,
    };
    let locked = r.class.map(|c| c.is_locked()).unwrap_or(false);
    if locked {
        let m = r.rho.round().to_i64().unwrap_or(0);
        let (lo_m, hi_m) = tongue_interval(m, mu, b, a, cfg)?;
        let (_, hi_below) = tongue_interval(m - 1, mu, b, lo_m, cfg)?;
        let (lo_above, _) = tongue_interval(m + 1, mu, b, hi_m, cfg)?;
        let below = report(m - 1, hi_below, lo_m);
        let above = report(m, hi_m, lo_above);
        let half = T::lit(0.5);
        let d_below = (a - (below.a_lo + below.a_hi) * half).abs();
        let d_above = (a - (above.a_lo + above.a_hi) * half).abs();
        Ok(if d_below <= d_above { below } else { above })
    } else {
        let k = r.rho.floor().to_i64().unwrap_or(0);
        let (_, hi_k) = tongue_interval(k, mu, b, a, cfg)?;
        let (lo_next, _) = tongue_interval(k + 1, mu, b, a, cfg)?;
        Ok(report(k, hi_k, lo_next))
    }
}
