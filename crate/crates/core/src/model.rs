//! The forced Josephson equation `dx/dt = (cos x + a + b cos t) / mu` on the
//! 2-torus, written in slow time `t` so the forcing period is always `2π`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("mu must be positive and finite, got {0}")]
    NonPositiveMu(String),
    #[error("parameters must be finite (a = {a}, b = {b})")]
    NonFinite { a: String, b: String },
}

/// Bias `a`, forcing amplitude `b` and frequency ratio `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params<T> {
    pub a: T,
    pub b: T,
    pub mu: T,
}

impl<T: Scalar> Params<T> {
    pub fn new(a: T, b: T, mu: T) -> Result<Self, ModelError> {
        let p = Self { a, b, mu };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.mu.is_finite() && self.mu > T::zero()) {
            return Err(ModelError::NonPositiveMu(self.mu.to_string()));
        }
        if !(self.a.is_finite() && self.b.is_finite()) {
            return Err(ModelError::NonFinite {
                a: self.a.to_string(),
                b: self.b.to_string(),
            });
        }
        Ok(())
    }

    pub fn with_a(self, a: T) -> Self {
        Self { a, ..self }
    }

    pub fn with_b(self, b: T) -> Self {
        Self { b, ..self }
    }
}

/// A point `(x, t)` with `x` on the universal cover.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State<T> {
    pub x: T,
    pub t: T,
}

impl<T: Scalar> State<T> {
    pub fn new(x: T, t: T) -> Self {
        Self { x, t }
    }
}

/// `dx/dt = (cos x + a + b cos t) / mu`.
#[inline]
pub fn vector_field<T: Scalar>(s: State<T>, p: &Params<T>) -> T {
    (s.x.cos() + p.a + p.b * s.t.cos()) / p.mu
}

/// Central symmetry `(x, t) -> (-x, -t)`; the field is even under it.
#[inline]
pub fn reflect<T: Scalar>(s: State<T>) -> State<T> {
    State { x: -s.x, t: -s.t }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    fn p(a: f64, b: f64, mu: f64) -> Params<f64> {
        Params::new(a, b, mu).unwrap()
    }

    #[test]
    fn field_examples() {
        assert_eq!(vector_field(State::new(0.0, 0.0), &p(0.0, 0.0, 1.0)), 1.0);
        assert!(vector_field(State::new(PI, 0.0), &p(1.0, 0.0, 1.0)).abs() < 1e-15);
        assert!(vector_field(State::new(0.0, PI), &p(2.0, 3.0, 0.5)).abs() < 1e-14);
    }

    #[test]
    fn reflect_examples() {
        assert_eq!(reflect(State::new(1.0, 2.0)), State::new(-1.0, -2.0));
        assert_eq!(reflect(State::new(0.0, 0.0)), State::new(0.0, 0.0));
    }

    #[test]
    fn rejects_bad_params() {
        assert!(Params::new(0.0, 0.0, 0.0).is_err());
        assert!(Params::new(0.0, 0.0, -1.0).is_err());
        assert!(Params::new(f64::NAN, 0.0, 1.0).is_err());
        assert!(Params::new(0.0, f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let q = Params::new(2.0f32, 3.0, 0.5).unwrap();
        assert!(vector_field(State::new(0.0f32, std::f32::consts::PI), &q).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn field_even_under_reflection(x in -20.0..20.0f64, t in -20.0..20.0f64,
                                       a in -3.0..3.0f64, b in -3.0..3.0f64, mu in 0.01..3.0f64) {
            let q = p(a, b, mu);
            let s = State::new(x, t);
            prop_assert_eq!(vector_field(reflect(s), &q), vector_field(s, &q));
            prop_assert_eq!(reflect(reflect(s)), s);
        }

        #[test]
        fn field_is_two_pi_periodic(x in -20.0..20.0f64, t in -20.0..20.0f64,
                                    a in -3.0..3.0f64, b in -3.0..3.0f64, mu in 0.01..3.0f64) {
            let q = p(a, b, mu);
            let f = vector_field(State::new(x, t), &q);
            let scale = (1.0 + a.abs() + b.abs()) / mu;
            prop_assert!((vector_field(State::new(x + TAU, t), &q) - f).abs() < 1e-13 * scale);
            prop_assert!((vector_field(State::new(x, t + TAU), &q) - f).abs() < 1e-13 * scale);
        }
    }
}
