//! Fully resolved job descriptions. A job plus the integrator settings is
//! everything needed to reproduce an output file.

use jtorus::tongues::{Side, TimeDirection, TraceConfig};
use jtorus::{IntegratorConfig64, Params64, RotationMethod, TraceConfig64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Job {
    Rotnum(RotnumJob),
    Sweep(SweepJob),
    Trace(TraceJob),
    Bridges(BridgesJob),
    Bessel(BesselJob),
    Slowcurve(SlowcurveJob),
}

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Job::Rotnum(_) => "rotnum",
            Job::Sweep(_) => "sweep",
            Job::Trace(_) => "trace",
            Job::Bridges(_) => "bridges",
            Job::Bessel(_) => "bessel",
            Job::Slowcurve(_) => "slowcurve",
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        match self {
            Job::Rotnum(j) => Params64::new(j.a, j.b, j.mu)
                .map(|_| ())
                .map_err(Into::into),
            Job::Sweep(j) => j.validate(),
            Job::Trace(j) => {
                positive("mu", j.mu)?;
                positive("b_max", j.b_max)?;
                if j.ks.is_empty() || j.sides.is_empty() {
                    return Err(CliError::Usage(
                        "trace needs at least one k and one side".into(),
                    ));
                }
                Ok(())
            }
            Job::Bridges(j) => {
                positive("mu", j.mu)?;
                positive("b_max", j.b_max)?;
                if j.ks.is_empty() {
                    return Err(CliError::Usage("bridges needs at least one k".into()));
                }
                Ok(())
            }
            Job::Bessel(j) => {
                positive("mu", j.mu)?;
                positive("b_min", j.b_range[0])?;
                if !(j.b_range[1] > j.b_range[0]) || j.n_points < 2 {
                    return Err(CliError::Usage(
                        "bessel needs b_min < b_max and at least 2 points".into(),
                    ));
                }
                Ok(())
            }
            Job::Slowcurve(j) => {
                if !(j.a.is_finite() && j.b.is_finite()) || j.n_samples < 2 {
                    return Err(CliError::Usage(
                        "slowcurve needs finite a, b and at least 2 samples".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{name} must be positive, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotnumJob {
    pub a: f64,
    pub b: f64,
    pub mu: f64,
    pub method: RotationMethod,
}

/// Rotation-number grid over `a_range × b_range`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepJob {
    pub a_range: [f64; 2],
    pub b_range: [f64; 2],
    /// `[n_a, n_b]`.
    pub grid: [usize; 2],
    pub mu: f64,
    #[serde(default = "default_method")]
    pub method: RotationMethod,
}

fn default_method() -> RotationMethod {
    RotationMethod::Mobius
}

impl SweepJob {
    pub fn validate(&self) -> Result<(), CliError> {
        positive("mu", self.mu)?;
        if self.grid.iter().any(|&n| n < 2) {
            return Err(CliError::Usage(format!(
                "grid counts must be at least 2, got {:?}",
                self.grid
            )));
        }
        for (name, r) in [("a_range", self.a_range), ("b_range", self.b_range)] {
            if !(r[0].is_finite() && r[1].is_finite() && r[1] > r[0]) {
                return Err(CliError::Usage(format!(
                    "{name} must be a finite interval with lo < hi, got {r:?}"
                )));
            }
        }
        Ok(())
    }

    fn axis(r: [f64; 2], n: usize, i: usize) -> f64 {
        r[0] + (r[1] - r[0]) * i as f64 / (n - 1) as f64
    }

    /// Cell parameters in row-major order: `a` outer, `b` inner.
    pub fn cells(&self) -> Vec<(f64, f64)> {
        let [na, nb] = self.grid;
        (0..na * nb)
            .map(|idx| {
                (
                    Self::axis(self.a_range, na, idx / nb),
                    Self::axis(self.b_range, nb, idx % nb),
                )
            })
            .collect()
    }
}

/// Continuation settings shared by the tongue commands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSettings {
    pub h: f64,
    pub newton_tol: f64,
    pub max_newton_iters: u32,
    pub bisection_bracket: f64,
    pub time_direction: TimeDirection,
}

impl Default for TraceSettings {
    fn default() -> Self {
        let d = TraceConfig64::default();
        Self {
            h: d.h,
            newton_tol: d.newton_tol,
            max_newton_iters: d.max_newton_iters,
            bisection_bracket: d.bisection_bracket,
            time_direction: d.time_direction,
        }
    }
}

impl TraceSettings {
    pub fn config(&self, integrator: IntegratorConfig64) -> TraceConfig64 {
        TraceConfig {
            h: self.h,
            newton_tol: self.newton_tol,
            max_newton_iters: self.max_newton_iters,
            bisection_bracket: self.bisection_bracket,
            time_direction: self.time_direction,
            integrator,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceJob {
    pub ks: Vec<i64>,
    pub sides: Vec<Side>,
    pub mu: f64,
    pub b_max: f64,
    pub settings: TraceSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgesJob {
    pub ks: Vec<i64>,
    pub mu: f64,
    pub b_max: f64,
    pub settings: TraceSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselJob {
    pub k: i64,
    pub mu: f64,
    pub b_range: [f64; 2],
    pub n_points: usize,
    pub settings: TraceSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlowcurveJob {
    pub a: f64,
    pub b: f64,
    pub n_samples: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job() -> SweepJob {
        SweepJob {
            a_range: [0.0, 1.0],
            b_range: [0.0, 2.0],
            grid: [2, 3],
            mu: 1.0,
            method: RotationMethod::Mobius,
        }
    }

    #[test]
    fn cells_are_row_major() {
        let cells = job().cells();
        assert_eq!(
            cells,
            vec![
                (0.0, 0.0),
                (0.0, 1.0),
                (0.0, 2.0),
                (1.0, 0.0),
                (1.0, 1.0),
                (1.0, 2.0)
            ]
        );
    }

    #[test]
    fn rejects_degenerate_sweeps() {
        assert!(job().validate().is_ok());
        assert!(SweepJob {
            grid: [1, 3],
            ..job()
        }
        .validate()
        .is_err());
        assert!(SweepJob {
            a_range: [1.0, 1.0],
            ..job()
        }
        .validate()
        .is_err());
        assert!(SweepJob { mu: -1.0, ..job() }.validate().is_err());
    }

    #[test]
    fn sweep_json_defaults_method() {
        let j: SweepJob =
            serde_json::from_str(r#"{"a_range":[0,1],"b_range":[0,2],"grid":[2,3],"mu":1}"#)
                .unwrap();
        assert_eq!(j, job());
    }

    #[test]
    fn job_roundtrips_through_json() {
        let j = Job::Trace(TraceJob {
            ks: vec![1, 2],
            sides: vec![Side::Zero, Side::Pi],
            mu: 0.2,
            b_max: 3.0,
            settings: TraceSettings::default(),
        });
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains(r#""command":"trace""#));
        assert_eq!(serde_json::from_str::<Job>(&text).unwrap(), j);
    }
}
