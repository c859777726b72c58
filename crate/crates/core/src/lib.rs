//! Numerics for the forced Josephson equation `dx/dt = (cos x + a + b cos t)/mu`
//! on the 2-torus: rotation numbers via the Möbius structure of the period
//! map, continuation of phase-lock (Arnold tongue) boundaries, the Bessel
//! asymptote of those boundaries, and the slow-curve geometry that governs
//! small-`mu` behaviour.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*64` aliases
//! below fix the working precision used by the CLI.

// `!(x > 0)` style checks are meant to reject NaN too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod integrator;
pub mod model;
pub mod poincare;
pub mod scalar;
pub mod slowfast;
pub mod tongues;

pub use asymptotics::{BesselEval, ResidualScan, ScanPoint};
pub use integrator::{Direction, IntegratorConfig, IntegratorError, LiftedTrajectory};
pub use model::{Params, State};
pub use poincare::{MapClass, MobiusMap, RotationMethod, RotationResult};
pub use scalar::Scalar;
pub use slowfast::{Region, SlowCurve};
pub use tongues::{BoundaryCurve, Bridge, Side, TimeDirection, TraceConfig};

pub type Params64 = Params<f64>;
pub type State64 = State<f64>;
pub type IntegratorConfig64 = IntegratorConfig<f64>;
pub type LiftedTrajectory64 = LiftedTrajectory<f64>;
pub type MobiusMap64 = MobiusMap<f64>;
pub type RotationResult64 = RotationResult<f64>;
pub type TraceConfig64 = TraceConfig<f64>;
pub type BoundaryCurve64 = BoundaryCurve<f64>;
pub type Bridge64 = Bridge<f64>;
pub type ResidualScan64 = ResidualScan<f64>;
