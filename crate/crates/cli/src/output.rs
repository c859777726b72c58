use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use jtorus::IntegratorConfig64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::job::Job;
use crate::run::{execute, Outcome};

/// Sidecar written next to every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub job: Job,
    pub integrator: IntegratorConfig64,
    pub output: PathBuf,
    pub threads: usize,
    pub wall_time_s: f64,
    pub summary: serde_json::Value,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Write via a sibling temporary file and rename, so `path` never holds a
/// partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut tmp_name = path
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

/// Execute a job and, when it produces a table, write it to `out` with its
/// manifest. On any failure neither file is left behind.
pub fn run_to_file(
    job: &Job,
    integrator: &IntegratorConfig64,
    threads: usize,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let outcome = execute(job, integrator, threads)?;
    let (Some(csv), Some(out)) = (&outcome.csv, out) else {
        return Ok(outcome);
    };
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        job: job.clone(),
        integrator: *integrator,
        output: out.to_path_buf(),
        threads,
        wall_time_s: start.elapsed().as_secs_f64(),
        summary: outcome.summary.clone(),
    };
    let body = serde_json::to_string_pretty(&manifest)?;
    write_atomic(out, csv.as_bytes())?;
    if let Err(e) = write_atomic(&manifest_path(out), body.as_bytes()) {
        let _ = fs::remove_file(out);
        return Err(e);
    }
    Ok(outcome)
}

/// Re-run the job recorded in a manifest, writing to `out` (or the recorded
/// path).
pub fn replay(manifest: &Path, out: Option<&Path>, threads: usize) -> Result<Outcome, CliError> {
    let m = RunManifest::load(manifest)?;
    let target = out.map(Path::to_path_buf).unwrap_or(m.output.clone());
    run_to_file(&m.job, &m.integrator, threads, Some(&target))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(
            manifest_path(Path::new("out/run.csv")),
            Path::new("out/run.csv.manifest.json")
        );
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
