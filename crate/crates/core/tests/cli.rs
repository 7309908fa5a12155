use std::path::Path;
use std::process::{Command, Output};

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thermal-arrow")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    reader.records().map(|r| r.unwrap().iter().map(str::to_string).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn invalid_parameters_exit_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["heatmap", "--gamma", "1.5"][..],
        &["heatmap", "--lambda-a", "0.7"],
        &["deltaq", "--resolution", "0"],
        &["walk", "--lambda-a", "0.4", "--lambda-b", "0.1", "--lambda-c", "0.1"],
        &["walk", "--step-max", "-1"],
        &["polytope", "--energy", "5"],
        &["witness-region", "--resolution", "0"],
        &["check", "--inject-fault", "no-such-suite"],
        &["heatmap", "--no-such-flag"],
    ] {
        let out = run(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn single_point_grid_has_one_row() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["heatmap", "--resolution", "1"]).status.success());
    for site in ["A", "B", "C"] {
        let r = rows(&dir.path().join(format!("heat_entangled_{site}.csv")));
        assert_eq!(r.len(), 1);
        assert_eq!(num(&r[0][0]), 0.0);
        assert_eq!(num(&r[0][2]), 0.0);
    }
    assert!(dir.path().join("heatmap_entangled.manifest.json").exists());
}

#[test]
fn csv_headers_and_format() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["heatmap", "--resolution", "5", "--state", "product"]).status.success());
    let text = std::fs::read_to_string(dir.path().join("heat_product_A.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,s,Q"));
    assert_eq!(lines.count(), 25);
    assert!(!text.contains('\r'));
    assert!(text.lines().nth(1).unwrap().split(',').all(|f| f.contains('e')));
}

#[test]
fn zero_s_range_gives_empty_mask() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["deltaq", "--s-max", "0", "--resolution", "11"]).status.success());
    let r = rows(&dir.path().join("deltaq.csv"));
    assert_eq!(r.len(), 121);
    assert!(r.iter().all(|row| row[3] == "0"));
}

#[test]
fn default_deltaq_has_masked_cells() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["deltaq", "--resolution", "41"]).status.success());
    let r = rows(&dir.path().join("deltaq.csv"));
    assert!(r.iter().any(|row| row[3] == "1"));
}

#[test]
fn polytope_slices() {
    let dir = tempfile::tempdir().unwrap();
    let slice = |energy: &str| {
        assert!(run(dir.path(), &["polytope", "--energy", energy]).status.success());
        rows(&dir.path().join("slice_vertices.csv"))
            .iter()
            .map(|r| r.iter().map(|x| num(x)).collect::<Vec<f64>>())
            .collect::<Vec<_>>()
    };
    assert_eq!(slice("0"), vec![vec![0.0; 3]]);
    assert_eq!(slice("1.5"), vec![vec![0.5; 3]]);
    let one = slice("1");
    for v in [[0.5, 0.5, 0.0], [0.5, 0.0, 0.5], [0.0, 0.5, 0.5]] {
        assert!(one.iter().any(|p| p.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-12)), "{v:?} missing");
    }
    assert_eq!(rows(&dir.path().join("polytope_vertices.csv")).len(), 5);
}

#[test]
fn zero_step_walk_has_initial_row_only() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["walk", "--steps", "0"]).status.success());
    let r = rows(&dir.path().join("walk_constrained.csv"));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][0], "0");
    assert_eq!(r[0][5], "0");
}

#[test]
fn walk_is_reproducible_per_seed() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert!(run(d.path(), &["walk", "--steps", "500", "--seed", "7", "--constrained", "false"]).status.success());
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("walk_unconstrained.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn witness_region_bell_corner_is_capable() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["witness-region", "--resolution", "0.1"]).status.success());
    let r = rows(&dir.path().join("witness_region.csv"));
    let bell = r
        .iter()
        .find(|row| num(&row[0]) == 0.5 && num(&row[1]) == 0.5 && num(&row[2]) == 1.0)
        .expect("Bell corner in scan");
    assert_eq!(bell[4], "1");
    assert!((num(&bell[3]) - 2.0 * std::f64::consts::LN_2).abs() < 1e-9);
}

#[test]
fn check_reports_and_fault_injection() {
    let dir = tempfile::tempdir().unwrap();
    let clean = run(dir.path(), &["check", "--trials", "20"]);
    assert_eq!(clean.status.code(), Some(0));
    let faulty = run(dir.path(), &["check", "--trials", "20", "--inject-fault", "isospectral"]);
    assert_eq!(faulty.status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("check_report.json")).unwrap()).unwrap();
    assert_eq!(report["total_violations"], 1);
    let bad: Vec<_> = report["checks"].as_array().unwrap().iter().filter(|c| c["violations"] != 0).collect();
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0]["id"], "isospectral");
}

#[test]
fn manifest_records_parameters() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["walk", "--steps", "10", "--seed", "3"]).status.success());
    let m: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("walk_constrained.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "walk");
    assert_eq!(m["seed"], 3);
    assert_eq!(m["parameters"]["steps"], 10);
    assert_eq!(m["outputs"][0], "walk_constrained.csv");
}
