use std::path::Path;
use std::process::{Command, Output};

use jtorus_cli::{RunManifest, SweepJob};
use tempfile::tempdir;

fn jtorus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jtorus"))
        .args(args)
        .env_remove("JT_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap()
        .trim()
        .parse()
        .unwrap()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn rotnum_examples() {
    let o = jtorus(&["rotnum", "--a", "2", "--b", "0", "--mu", "1"]);
    assert!(o.status.success());
    assert!((field(&stdout(&o), "rho") - 3f64.sqrt()).abs() < 1e-7);

    let o = jtorus(&["rotnum", "--a", "0.5", "--b", "0", "--mu", "1"]);
    assert_eq!(field(&stdout(&o), "rho"), 0.0);

    let o = jtorus(&[
        "rotnum", "--a", "0.5", "--b", "0.5", "--mu", "1", "--method", "direct",
    ]);
    assert!(field(&stdout(&o), "rho").abs() < 1e-3);

    let o = jtorus(&["rotnum", "--a", "-1.5", "--b", "0", "--mu", "1", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["rho"].as_f64().unwrap() + 1.25f64.sqrt()).abs() < 1e-7);
}

#[test]
fn exit_codes() {
    assert_eq!(jtorus(&["rotnum", "--a", "1"]).status.code(), Some(1));
    assert_eq!(
        jtorus(&["rotnum", "--a", "1", "--b", "0", "--mu", "0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(jtorus(&["--help"]).status.code(), Some(0));
    let o = jtorus(&[
        "slowcurve",
        "--a",
        "1",
        "--b",
        "1",
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn numeric_failure_leaves_no_output() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = jtorus(&[
        "trace",
        "--k",
        "1",
        "--mu",
        "1",
        "--b-max",
        "0.1",
        "--newton-tol",
        "1e-300",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn sweep_csv_and_replay() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = jtorus(&[
        "sweep",
        "--a-range",
        "-1",
        "3",
        "--b-range",
        "0",
        "2",
        "--grid",
        "3",
        "3",
        "--mu",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("a,b,rho,class,fit_residual\n"));
    let rows = rows(&out);
    assert_eq!(rows.len(), 9);
    for r in &rows {
        let (a, b, rho): (f64, f64, f64) = (
            r[0].parse().unwrap(),
            r[1].parse().unwrap(),
            r[2].parse().unwrap(),
        );
        if b == 0.0 {
            let expect = if a.abs() <= 1.0 {
                0.0
            } else {
                a.signum() * (a * a - 1.0).sqrt()
            };
            assert!((rho - expect).abs() < 1e-6, "{r:?}");
        }
        if r[3] == "hyperbolic" {
            assert_eq!(rho, rho.round());
        }
        // 17 significant digits
        assert_eq!(
            r[2].split('e')
                .next()
                .unwrap()
                .trim_start_matches('-')
                .len(),
            18
        );
    }
    let manifest = jtorus_cli::manifest_path(&out);
    let m = RunManifest::load(&manifest).unwrap();
    assert_eq!(m.job.name(), "sweep");

    let again = dir.path().join("again.csv");
    let o = jtorus(&[
        "replay",
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn sweep_from_config_ignores_worker_count() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("job.json");
    let job = SweepJob {
        a_range: [0.0, 2.0],
        b_range: [0.0, 2.0],
        grid: [6, 5],
        mu: 0.7,
        method: jtorus::RotationMethod::Mobius,
    };
    std::fs::write(&cfg, serde_json::to_string(&job).unwrap()).unwrap();
    let one = dir.path().join("one.csv");
    let many = dir.path().join("many.csv");
    let o = jtorus(&[
        "--threads",
        "1",
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        one.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_jtorus"))
        .args([
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            many.to_str().unwrap(),
        ])
        .env("JT_THREADS", "3")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(std::fs::read(&one).unwrap(), std::fs::read(&many).unwrap());
    assert_eq!(
        RunManifest::load(&jtorus_cli::manifest_path(&many))
            .unwrap()
            .threads,
        3
    );
    assert_eq!(rows(&one).len(), 30);
}

#[test]
fn trace_starts_at_validated_point() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = jtorus(&[
        "trace",
        "--k",
        "1,2",
        "--side",
        "0",
        "--mu",
        "0.5",
        "--b-max",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let rows = rows(&out);
    assert_eq!(rows.len(), 2 * 51);
    for (k, first) in [(1.0, &rows[0]), (2.0, &rows[51])] {
        assert_eq!(first[2].parse::<f64>().unwrap(), 0.0);
        let a: f64 = first[3].parse().unwrap();
        assert!((a - (1.0f64 + k * k * 0.25).sqrt()).abs() < 1e-8);
        assert_eq!(first[5], "start");
    }
    assert!(rows.iter().all(|r| r[4].parse::<f64>().unwrap() < 1e-9));
}

#[test]
fn bridges_on_vertical_lines() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("b.csv");
    let o = jtorus(&[
        "bridges",
        "--k",
        "0,1",
        "--mu",
        "1",
        "--b-max",
        "6",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let rows = rows(&out);
    assert_eq!(rows.iter().filter(|r| r[0] == "0").count(), 2);
    assert_eq!(rows.iter().filter(|r| r[0] == "1").count(), 1);
    for r in &rows {
        assert!(r[4].parse::<f64>().unwrap().abs() < 1e-6);
    }
    let short = dir.path().join("short.csv");
    let o = jtorus(&[
        "bridges",
        "--k",
        "1",
        "--mu",
        "1",
        "--b-max",
        "0.5",
        "--out",
        short.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&short).unwrap().lines().count(), 1);
}

#[test]
fn bessel_scan_reports_exponent() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("j.csv");
    let o = jtorus(&[
        "bessel",
        "--k",
        "1",
        "--mu",
        "1",
        "--n-points",
        "11",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let rows = rows(&out);
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 20.0);
    assert_eq!(rows[10][0].parse::<f64>().unwrap(), 60.0);
    assert!(rows.iter().all(|r| r[8].parse::<f64>().unwrap() < 1e-12));
    let m = RunManifest::load(&jtorus_cli::manifest_path(&out)).unwrap();
    assert!(m.summary["exponent_zero"].as_f64().unwrap() < 0.0);
}

#[test]
fn slowcurve_regions() {
    let dir = tempdir().unwrap();
    let cases = [
        ("3", "1", "A", 0, 0),
        ("1", "1", "B", 1, 2),
        ("0", "2", "C", 2, 4),
    ];
    for (a, b, region, comps, folds) in cases {
        let out = dir.path().join(format!("{region}.csv"));
        let o = jtorus(&[
            "slowcurve",
            "--a",
            a,
            "--b",
            b,
            "--samples",
            "50",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        let m = RunManifest::load(&jtorus_cli::manifest_path(&out)).unwrap();
        assert_eq!(m.summary["region"], region);
        assert_eq!(m.summary["components"], comps);
        assert_eq!(m.summary["folds"], folds);
        for r in rows(&out).iter().filter(|r| r[1] == "fold") {
            assert!(r[5].parse::<f64>().unwrap() < 1e-10);
        }
    }
}

#[test]
fn slowcurve_splits_with_growing_forcing() {
    let dir = tempdir().unwrap();
    let mut seen = Vec::new();
    for b in ["0.5", "1.5", "2.5", "3.5"] {
        let out = dir.path().join(format!("m{b}.csv"));
        assert!(jtorus(&[
            "slowcurve",
            "--a",
            "2",
            "--b",
            b,
            "--out",
            out.to_str().unwrap()
        ])
        .status
        .success());
        let m = RunManifest::load(&jtorus_cli::manifest_path(&out)).unwrap();
        seen.push(m.summary["components"].as_u64().unwrap());
    }
    assert_eq!(seen, vec![0, 1, 1, 2]);
}
