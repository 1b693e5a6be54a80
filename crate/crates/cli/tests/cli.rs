use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use crossvol::{BoundReport, Matrix};

fn crossvol(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crossvol"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = crossvol(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    crossvol(dir, args).status.code().unwrap()
}

#[test]
fn gallery_writes_tridiagonal_example() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "gallery",
            "--name",
            "tridiag_bm",
            "--n",
            "3",
            "-o",
            "b3.mat",
        ],
    );
    let text = fs::read_to_string(dir.path().join("b3.mat")).unwrap();
    let b = Matrix::parse(&text).unwrap();
    let expected = Matrix::from_rows(&[
        vec![1.0, -0.5, 0.0],
        vec![0.5, 1.0, -0.5],
        vec![0.0, 0.5, 1.0],
    ])
    .unwrap();
    assert_eq!(b, expected);
}

#[test]
fn tightness_csv_reports_quadratic_slope() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "tightness",
            "--family",
            "quad_growth",
            "--n",
            "8:4:40",
            "-o",
            "t.csv",
        ],
    );
    let text = fs::read_to_string(dir.path().join("t.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|&h| h == "slope_r_m").unwrap();
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 9);
    let slope: f64 = rows[0][col].parse().unwrap();
    assert!((slope - 2.0).abs() < 0.3, "slope {slope}");
    assert!(rows
        .iter()
        .all(|r| r[header.iter().position(|&h| h == "interchanges").unwrap()] == "false"));
}

#[test]
fn bounds_json_round_trips_with_spsd_ratio_below_one() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "bounds",
            "--gallery",
            "random_spsd",
            "--n",
            "10",
            "--seed",
            "7",
            "--m",
            "4",
            "-o",
            "r.json",
        ],
    );
    let text = fs::read_to_string(dir.path().join("r.json")).unwrap();
    let report: BoundReport = serde_json::from_str(&text).unwrap();
    assert!(report.matrix_class.is_spsd);
    let spsd = report.ratios[&crossvol::BoundKind::Spsd];
    assert!(spsd <= 1.0, "ratio {spsd}");
    let again = serde_json::to_string_pretty(&report).unwrap() + "\n";
    assert_eq!(again, text);
}

#[test]
fn human_output_is_one_based() {
    let dir = tempfile::tempdir().unwrap();
    let json = ok(
        dir.path(),
        &[
            "maxvol",
            "--gallery",
            "offdiag_identity",
            "--n",
            "1",
            "--m",
            "1",
        ],
    );
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["overall"]["rows"], serde_json::json!([1]));
    assert_eq!(v["overall"]["cols"], serde_json::json!([2]));
    assert_eq!(v["principal_optimal"], serde_json::json!(false));

    let csv = ok(
        dir.path(),
        &[
            "cross",
            "--gallery",
            "identity",
            "--n",
            "3",
            "--m",
            "2",
            "--format",
            "csv",
        ],
    );
    assert_eq!(csv, "step,row,col,value\n1,1,1,1\n2,2,2,1\n");
}

#[test]
fn format_follows_extension_unless_overridden() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "classify",
            "--gallery",
            "identity",
            "--n",
            "2",
            "-o",
            "c.csv",
        ],
    );
    let csv = fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert!(csv.starts_with("property,value\nis_symmetric,true\n"));
    ok(
        dir.path(),
        &[
            "classify",
            "--gallery",
            "identity",
            "--n",
            "2",
            "-o",
            "c.csv",
            "--format",
            "json",
        ],
    );
    let json = fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert!(serde_json::from_str::<serde_json::Value>(&json).is_ok());
}

#[test]
fn matrix_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.mat"), "# spd\n2 2\n2 -1\n-1 2\n").unwrap();
    let json = ok(
        dir.path(),
        &["cross", "a.mat", "--m", "1", "--strategy", "diagonal"],
    );
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["skeleton_error"], serde_json::json!(1.5));
    assert_eq!(v["lookahead"]["value"], serde_json::json!(1.5));
}

#[test]
fn funcross_csv_lists_residual_grid() {
    let dir = tempfile::tempdir().unwrap();
    let csv = ok(
        dir.path(),
        &[
            "funcross",
            "--function",
            "product",
            "--m",
            "1",
            "--grid",
            "5",
            "--format",
            "csv",
        ],
    );
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "x,y,residual");
    assert_eq!(lines.len(), 26);
    // x·y has rank one, so one step reproduces it on the grid.
    assert!(lines[1..]
        .iter()
        .all(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap().abs() < 1e-15));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.mat"), "2 2\n1 2\n3\n").unwrap();
    assert_eq!(code(dir.path(), &["classify", "bad.mat"]), 2);
    assert_eq!(code(dir.path(), &["verify", "nonsense"]), 2);
    assert_eq!(code(dir.path(), &["cross", "--gallery", "identity"]), 2);
    assert_eq!(code(dir.path(), &["frobnicate"]), 2);
    assert_eq!(
        code(
            dir.path(),
            &[
                "maxvol",
                "--gallery",
                "random_general",
                "--n",
                "40",
                "--m",
                "10"
            ]
        ),
        3
    );
    assert_eq!(
        code(dir.path(), &["gallery", "--name", "identity", "--n", "0"]),
        1
    );
    assert_eq!(code(dir.path(), &["cross", "missing.mat", "--m", "1"]), 1);
}

#[test]
fn rank_deficient_input_reports_zero_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("sing.mat"), "3 3\n1 2 3\n2 4 6\n1 0 1\n").unwrap();
    let report: BoundReport =
        serde_json::from_str(&ok(dir.path(), &["bounds", "sing.mat", "--m", "2"])).unwrap();
    assert_eq!(report.achieved_error, 0.0);
    assert!(report.all_satisfied());
    assert_eq!(code(dir.path(), &["bounds", "sing.mat", "--m", "3"]), 1);
}

#[test]
fn invalid_thread_count_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_crossvol"))
        .current_dir(dir.path())
        .env("CROSSVOL_THREADS", "zero")
        .args(["gallery", "--name", "identity", "--n", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    for suite in ["theorems2", "bounds3", "funcross", "tightness"] {
        let text = ok(dir.path(), &["verify", suite, "--budget", "600"]);
        assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
    }
}
