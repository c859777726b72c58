//! Job execution. Every job is computed in memory; parallel work is mapped
//! over an indexed list and collected in index order, so the rendered CSV
//! does not depend on the worker count.

use std::fmt::Write as _;

use jtorus::asymptotics::{bessel_j, scan_grid, scan_point, summarize_scan};
use jtorus::poincare::rotation_number;
use jtorus::slowfast::{curve_residual, slow_curve};
use jtorus::tongues::{bridges_from_curves, trace_boundary, BoundaryCurve, Side};
use jtorus::{IntegratorConfig64, Params64, RotationResult64};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::job::*;

/// Result of a job: optional CSV body, a human-readable report and a
/// machine-readable summary for the manifest.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub csv: Option<String>,
    pub report: String,
    pub summary: Value,
}

/// Fixed 17-significant-digit scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Run `job` on a pool of `threads` workers (`0` means one per core).
pub fn execute(
    job: &Job,
    integrator: &IntegratorConfig64,
    threads: usize,
) -> Result<Outcome, CliError> {
    job.validate()?;
    integrator.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
    pool.install(|| match job {
        Job::Rotnum(j) => rotnum(j, integrator),
        Job::Sweep(j) => sweep(j, integrator),
        Job::Trace(j) => trace(j, integrator),
        Job::Bridges(j) => bridges(j, integrator),
        Job::Bessel(j) => bessel(j, integrator),
        Job::Slowcurve(j) => slowcurve(j),
    })
}

fn rotnum(j: &RotnumJob, integrator: &IntegratorConfig64) -> Result<Outcome, CliError> {
    let p = Params64::new(j.a, j.b, j.mu)?;
    let r: RotationResult64 = rotation_number(&p, j.method, integrator)?;
    let mut report = String::new();
    writeln!(report, "rho          {}", r.rho).unwrap();
    writeln!(report, "error_bound  {:e}", r.error_bound).unwrap();
    if let Some(c) = r.class {
        writeln!(report, "class        {}", c.as_str()).unwrap();
    }
    if let Some(f) = r.fit_residual {
        writeln!(report, "fit_residual {f:e}").unwrap();
    }
    Ok(Outcome {
        csv: None,
        report,
        summary: serde_json::to_value(r).expect("plain data"),
    })
}

/// Rotation number of every cell of the grid, in row-major order.
pub fn sweep_cells(
    j: &SweepJob,
    integrator: &IntegratorConfig64,
) -> Result<Vec<(f64, f64, RotationResult64)>, CliError> {
    j.cells()
        .into_par_iter()
        .map(|(a, b)| {
            let p = Params64::new(a, b, j.mu)?;
            Ok((a, b, rotation_number(&p, j.method, integrator)?))
        })
        .collect()
}

fn sweep(j: &SweepJob, integrator: &IntegratorConfig64) -> Result<Outcome, CliError> {
    let cells = sweep_cells(j, integrator)?;
    let mut csv = String::from("a,b,rho,class,fit_residual\n");
    let mut locked = 0usize;
    for (a, b, r) in &cells {
        let class = r.class.map(|c| c.as_str()).unwrap_or("");
        if r.class.is_some_and(|c| c.is_locked()) {
            locked += 1;
        }
        writeln!(
            csv,
            "{},{},{},{},{}",
            num(*a),
            num(*b),
            num(r.rho),
            class,
            opt_num(r.fit_residual)
        )
        .unwrap();
    }
    let report = format!("{} cells, {} locked\n", cells.len(), locked);
    Ok(Outcome {
        csv: Some(csv),
        report,
        summary: json!({ "cells": cells.len(), "locked": locked }),
    })
}

fn trace_all(
    ks: &[i64],
    sides: &[Side],
    mu: f64,
    b_max: f64,
    settings: &TraceSettings,
    integrator: &IntegratorConfig64,
) -> Result<Vec<BoundaryCurve<f64>>, CliError> {
    let cfg = settings.config(*integrator);
    let tasks: Vec<(i64, Side)> = ks
        .iter()
        .flat_map(|&k| sides.iter().map(move |&s| (k, s)))
        .collect();
    tasks
        .into_par_iter()
        .map(|(k, side)| trace_boundary(k, side, mu, b_max, &cfg).map_err(CliError::from))
        .collect()
}

fn curve_summary(c: &BoundaryCurve<f64>) -> Value {
    json!({
        "k": c.k,
        "side": c.side.as_str(),
        "samples": c.samples.len(),
        "bisections": c.bisection_count(),
        "max_residual": c.max_residual(),
    })
}

fn trace(j: &TraceJob, integrator: &IntegratorConfig64) -> Result<Outcome, CliError> {
    let curves = trace_all(&j.ks, &j.sides, j.mu, j.b_max, &j.settings, integrator)?;
    let mut csv = String::from("k,side,b,a,residual,method,steps,direction\n");
    let mut report = String::new();
    for c in &curves {
        for s in &c.samples {
            let dir = match s.direction {
                jtorus::Direction::Forward => "forward",
                jtorus::Direction::Backward => "backward",
            };
            writeln!(
                csv,
                "{},{},{},{},{},{},{},{}",
                c.k,
                c.side.as_str(),
                num(s.b),
                num(s.a),
                num(s.residual),
                s.method.as_str(),
                s.steps_used,
                dir
            )
            .unwrap();
        }
        writeln!(
            report,
            "k={} side={} samples={} bisections={} max_residual={:e}",
            c.k,
            c.side.as_str(),
            c.samples.len(),
            c.bisection_count(),
            c.max_residual()
        )
        .unwrap();
    }
    let summary = Value::Array(curves.iter().map(curve_summary).collect());
    Ok(Outcome {
        csv: Some(csv),
        report,
        summary,
    })
}

fn bridges(j: &BridgesJob, integrator: &IntegratorConfig64) -> Result<Outcome, CliError> {
    let curves = trace_all(
        &j.ks,
        &[Side::Zero, Side::Pi],
        j.mu,
        j.b_max,
        &j.settings,
        integrator,
    )?;
    let cfg = j.settings.config(*integrator);
    let found = curves
        .par_chunks(2)
        .map(|pair| bridges_from_curves(&pair[0], &pair[1], &cfg).map_err(CliError::from))
        .collect::<Result<Vec<_>, _>>()?;
    let mut csv = String::from("k,b_star,a_star,k_mu,offset,residual_zero,residual_pi\n");
    let mut report = String::new();
    for list in &found {
        for br in list {
            let k_mu = br.k as f64 * j.mu;
            writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                br.k,
                num(br.b_star),
                num(br.a_star),
                num(k_mu),
                num(br.a_star - k_mu),
                num(br.residual_zero),
                num(br.residual_pi)
            )
            .unwrap();
        }
    }
    for (k, list) in j.ks.iter().zip(&found) {
        writeln!(report, "k={k}: {} bridges", list.len()).unwrap();
    }
    let summary = json!(j
        .ks
        .iter()
        .zip(&found)
        .map(|(k, l)| json!({ "k": k, "bridges": l.len() }))
        .collect::<Vec<_>>());
    Ok(Outcome {
        csv: Some(csv),
        report,
        summary,
    })
}

fn bessel(j: &BesselJob, integrator: &IntegratorConfig64) -> Result<Outcome, CliError> {
    let cfg = j.settings.config(*integrator);
    let grid = scan_grid((j.b_range[0], j.b_range[1]), j.n_points);
    let points = grid
        .into_par_iter()
        .map(|b| scan_point(j.k, j.mu, b, &cfg).map_err(CliError::from))
        .collect::<Result<Vec<_>, _>>()?;
    let scan = summarize_scan(j.k, j.mu, points);
    let mut csv = String::from(
        "b,a_zero,a_pi,asymptote_zero,asymptote_pi,residual_zero,residual_pi,bessel,parity_check\n",
    );
    let sign = if j.k % 2 == 0 { 1.0 } else { -1.0 };
    for p in &scan.points {
        let z = p.b / j.mu;
        let jm = bessel_j(j.k, -z).value;
        let parity = (jm - sign * bessel_j(j.k, z).value).abs();
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            num(p.b),
            num(p.a_zero),
            num(p.a_pi),
            num(p.asymptote_zero),
            num(p.asymptote_pi),
            num(p.residual_zero),
            num(p.residual_pi),
            num(jm),
            num(parity)
        )
        .unwrap();
    }
    let report = format!(
        "fitted exponent: side 0 {}, side pi {}\n",
        scan.exponent_zero, scan.exponent_pi
    );
    let summary = json!({ "exponent_zero": scan.exponent_zero, "exponent_pi": scan.exponent_pi });
    Ok(Outcome {
        csv: Some(csv),
        report,
        summary,
    })
}

fn slowcurve(j: &SlowcurveJob) -> Result<Outcome, CliError> {
    let c = slow_curve(j.a, j.b, j.n_samples);
    let region = c.region.as_str();
    let mut csv = String::from("region,kind,component,t,x,residual\n");
    for (i, comp) in c.components.iter().enumerate() {
        for p in &comp.points {
            writeln!(
                csv,
                "{region},point,{i},{},{},{}",
                num(p.t),
                num(p.x),
                num(curve_residual(j.a, j.b, p))
            )
            .unwrap();
        }
    }
    for f in &c.folds {
        writeln!(
            csv,
            "{region},fold,,{},{},{}",
            num(f.t),
            num(f.x),
            num(curve_residual(j.a, j.b, f))
        )
        .unwrap();
    }
    let contractible: Vec<bool> = c.components.iter().map(|k| k.contractible).collect();
    let report = format!(
        "region {region}: {} components (contractible {:?}), {} folds\n",
        c.components.len(),
        contractible,
        c.folds.len()
    );
    let summary = json!({
        "region": region,
        "components": c.components.len(),
        "contractible": contractible,
        "folds": c.folds.len(),
    });
    Ok(Outcome {
        csv: Some(csv),
        report,
        summary,
    })
}
