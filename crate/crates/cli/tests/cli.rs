use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isotriplet")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn csv_body(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let head = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (head, rows)
}

fn col(head: &[String], name: &str) -> usize {
    head.iter().position(|h| h == name).unwrap()
}

#[test]
fn verify_algebra_passes() {
    let o = run(&["verify", "--suite", "algebra"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS") || l.contains("checks pass")));
}

#[test]
fn unknown_suite_is_usage_error() {
    assert_eq!(run(&["verify", "--suite", "none"]).status.code(), Some(2));
}

#[test]
fn twisted_alpha_reports_expected_non_commutation() {
    let o = run(&["verify", "--suite", "discrete", "--alpha", "1+0.5i", "--profile", "bps:1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS discrete/does_not_commute"));
}

#[test]
fn verify_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--suite", "gauges", "--out", dir.path().to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn free_spectrum_has_no_modes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["spectrum", "--profile", "trivial", "--twoj", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("modes.json")).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["modes"].as_array().unwrap().len(), 0);
    assert_eq!(v["case"], "reduced_min_W0");
    let text = fs::read_to_string(dir.path().join("solutions.csv")).unwrap();
    assert!(text.starts_with("# schema: 1\n"));
    assert!(text.contains(&format!("# config_hash: {}", v["config_hash"].as_str().unwrap())));
}

#[test]
fn reduced_solution_has_six_amplitudes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["spectrum", "--profile", "trivial", "--j", "3/2", "--case", "reduced_W0", "--scan-points", "20", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (head, rows) = csv_body(&dir.path().join("solutions.csv"));
    let amps: Vec<_> = head.iter().filter(|h| h.starts_with("re_")).collect();
    assert_eq!(amps.len(), 6);
    assert_eq!(head.len(), 3 + 12);
    assert!(!rows.is_empty());
}

#[test]
fn bps_scan_emits_trace() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["spectrum", "--profile", "bps:1", "--twoj", "1", "--eps-min", "-0.9", "--eps-max", "0.9", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (head, rows) = csv_body(&dir.path().join("determinant_trace.csv"));
    assert_eq!(head, ["epsilon", "block", "re_det", "im_det"]);
    assert!(!rows.is_empty());
}

#[test]
fn same_sector_norm_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["matelem", "--observable", "density", "--twoj", "1", "--delta", "1", "--n-theta", "32", "--n-phi", "32", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (head, rows) = csv_body(&dir.path().join("matelem.csv"));
    assert_eq!(rows.len(), 1);
    let v: f64 = rows[0][col(&head, "re_value")].parse().unwrap();
    assert!(v > 0.0);
    assert_eq!(rows[0][col(&head, "verdict")], "doubled");
}

#[test]
fn opposite_sectors_are_forbidden() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["matelem", "--observable", "I:identity*cos2_theta", "--twoj", "3", "--n-theta", "32", "--n-phi", "32", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let (head, rows) = csv_body(&dir.path().join("matelem.csv"));
    let (d, dp, om) = (col(&head, "delta"), col(&head, "delta_p"), col(&head, "omega"));
    for row in rows.iter().filter(|r| r[d] != r[dp]) {
        assert_eq!(row[om], "1");
        assert_eq!(row[col(&head, "verdict")], "forbidden");
        let re: f64 = row[col(&head, "re_value")].parse().unwrap();
        let im: f64 = row[col(&head, "im_value")].parse().unwrap();
        assert!(re.hypot(im) < 1e-9);
    }
}

#[test]
fn complex_a_adds_scale_column() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["matelem", "--A", "0.3+0.2i", "--twoj", "1", "--n-theta", "16", "--n-phi", "16", "--n-r", "100", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (head, rows) = csv_body(&dir.path().join("matelem.csv"));
    let s: f64 = rows[0][col(&head, "minus_scale")].parse().unwrap();
    assert!((s - (-0.4f64).exp()).abs() < 1e-15);
}

#[test]
fn malformed_observable_reports_column() {
    let o = run(&["matelem", "--observable", "I:gamma0*cos_phi"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("column 10"));
}

#[test]
fn bad_half_integer_is_rejected() {
    assert_eq!(run(&["spectrum", "--twoj", "2"]).status.code(), Some(2));
    assert_eq!(run(&["matelem", "--j", "1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--alpha", "1+"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = run(&["gauge-table", "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        for fmt in ["csv", "json"] {
            let o = run(&["gauge-table", "--profile", "bps:0.8", "--format", fmt, "--out", d.path().to_str().unwrap()]);
            assert_eq!(o.status.code(), Some(0));
        }
    }
    for f in ["gauge_table.csv", "gauge_table.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
    }
}

#[test]
fn profile_tables_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.txt");
    let body: String = (0..200).map(|k| {
        let x = 0.001 + 0.05 * k as f64;
        format!("{x} {}\n", if x < 1e-3 { 1.0 } else { x / x.sinh() })
    }).collect();
    fs::write(&w, format!("# r W\n{body}")).unwrap();
    let o = run(&["verify", "--suite", "gauges", "--profile", w.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}
