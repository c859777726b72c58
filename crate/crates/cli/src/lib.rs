//! Batch runs, sweeps and CSV export on top of the `jtorus` core.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod job;
pub mod output;
pub mod run;

pub use error::CliError;
pub use job::{
    BesselJob, BridgesJob, Job, RotnumJob, SlowcurveJob, SweepJob, TraceJob, TraceSettings,
};
pub use output::{manifest_path, replay, run_to_file, write_atomic, RunManifest};
pub use run::{execute, num, sweep_cells, Outcome};
