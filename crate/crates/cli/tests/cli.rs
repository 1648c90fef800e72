use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SYMMETRIC: &str = r#"{"type":"three_funnel","lengths":[6,6,6]}"#;

fn krein(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_krein")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV artifact, header comments and column names dropped.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn xi_table_starts_at_zero() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "g.json", SYMMETRIC);
    let out = dir.path().join("xi.csv");
    let o = krein(&[
        "xi",
        "--spec",
        spec.to_str().unwrap(),
        "--zmax",
        "10",
        "--samples",
        "11",
        "-o",
        out.to_str().unwrap(),
    ]);
    stdout(&o);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().any(|l| l == "t,xi,dxi,weyl_residual"));
    assert!(text
        .lines()
        .any(|l| l.starts_with("# config ") && l.contains("\"zmax\":10.0")));
    let table = rows(&text);
    assert_eq!(table.len(), 11);
    assert_eq!(table[0][..2], ["0", "0"]);
    let xi10: f64 = table[10][1].parse().unwrap();
    assert!((xi10 - 49.934_648_678_718).abs() < 1e-8, "{xi10}");
}

#[test]
fn malformed_spec_exits_2_naming_the_field() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("d.csv");
    for (body, field) in [
        (r#"{"type":"three_funnel","lenghts":[6,6,6]}"#, "lenghts"),
        (r#"{"type":"three_funnel"}"#, "lengths"),
        (r#"{"type":"three_funnel","lengths":[6,-1,6]}"#, "lengths"),
        (r#"{"type":"matrices","generators":[[1,0,0,2]]}"#, "generators"),
    ] {
        let spec = write(dir.path(), "bad.json", body);
        let o = krein(&["delta", "--spec", spec.to_str().unwrap(), "-o", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{body}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(field) && err.contains("\"error\":\"spec\""), "{err}");
        assert!(!out.exists());
    }
    let o = krein(&["delta"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_run_leaves_no_artifact() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "s.csv", "x,u\n0.5,1\n1,2\n");
    let out = dir.path().join("fp.csv");
    let o = krein(&[
        "renorm",
        "--input",
        input.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("fit window"));
    assert!(fs::read_dir(dir.path()).unwrap().count() == 1, "only the input remains");
}

#[test]
fn zeta_routes_agree_and_reruns_are_identical() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "g.json", SYMMETRIC);
    let spec = spec.to_str().unwrap();
    let args = ["zeta", "--spec", spec, "--grid", "1.4:2.2:3,-4:4:3", "--l-max", "45"];
    let first = stdout(&krein(&args));
    let table = rows(&first);
    assert_eq!(table.len(), 18);
    for r in &table {
        let d: f64 = r[6].parse().unwrap();
        assert!(d <= 1e-8, "{r:?}");
    }
    for threads in ["1", "4", "8"] {
        let mut a = args.to_vec();
        a.extend(["--threads", threads]);
        assert_eq!(stdout(&krein(&a)), first, "threads = {threads}");
    }
}

#[test]
fn spectrum_lists_boundary_lengths() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "g.json", r#"{"type":"three_funnel","lengths":[5,6,7]}"#);
    let text = stdout(&krein(&["spectrum", "--spec", spec.to_str().unwrap(), "--l-max", "8"]));
    let lengths: Vec<f64> = rows(&text).iter().map(|r| r[1].parse().unwrap()).collect();
    for l in [5.0, 6.0, 7.0] {
        assert!(
            lengths.iter().any(|x| (x - l).abs() < 1e-9),
            "{l} missing from {lengths:?}"
        );
    }
}

#[test]
fn renorm_reads_csv() {
    let dir = TempDir::new().unwrap();
    let mut body = String::from("# comment lines are skipped\nx,u\n");
    for k in 0..600 {
        let x = 1e-4f64 * 1e4f64.powf(k as f64 / 599.0);
        body.push_str(&format!("{x},{}\n", x.powi(-2) + 3.0 + x));
    }
    let input = write(dir.path(), "s.csv", &body);
    let text = stdout(&krein(&[
        "renorm",
        "--input",
        input.to_str().unwrap(),
        "--shape",
        "-2,-1L,0,1,2",
    ]));
    let fp: f64 = rows(&text)[0][0].parse().unwrap();
    assert!((fp - 2.5).abs() < 1e-9, "{fp}");
}

#[test]
fn detpk_reports_its_contour() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "g.json", SYMMETRIC);
    let text = stdout(&krein(&[
        "detpk",
        "--spec",
        spec.to_str().unwrap(),
        "--contour-side",
        "lower",
        "--contour-radius",
        "0.05",
    ]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let det = &v["det_pk"];
    assert_eq!(det["contour"]["side"], "lower");
    assert_eq!(det["contour"]["radius"], 0.05);
    assert!(det["value"][1].as_f64().unwrap().abs() < 1e-8);
    assert_eq!(v["config"]["derived"]["zeta_route"], "euler");
}
