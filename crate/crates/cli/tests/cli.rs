use std::path::Path;
use std::process::{Command, Output};

use effnoise::StabilizerCode;

fn effnoise(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_effnoise"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8")
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn channel_csv_shape_and_noiseless_row() {
    let out = effnoise(&["channel", "--code", "cluster-ring", "--m", "5", "--p-grid", "0.9:1:3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "code,m,p,lambda0,lambda1,lambda2,lambda3,mu0,mu1,mu2,mu3,p_eff"
    );
    let rows = rows(&text);
    assert_eq!(rows.len(), 3);
    let last = &rows[2];
    assert_eq!(last[2].parse::<f64>().unwrap(), 1.0);
    let vals: Vec<f64> = last[3..].iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(vals, [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
}

#[test]
fn p_eff_is_na_outside_the_five_qubit_ring() {
    let out = effnoise(&["channel", "--code", "ghz", "--m", "3", "--p-grid", "0.5:0.5:1"]);
    assert!(out.status.success());
    assert_eq!(rows(&stdout(&out))[0].last().unwrap(), "NA");
}

#[test]
fn custom_noise_writes_na_for_p() {
    let out = effnoise(&["channel", "--noise", "custom", "--lambda", "0.7,0.1,0.1,0.1", "--m", "3,5"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = rows(&stdout(&out));
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r[2] == "NA"));
}

#[test]
fn rows_are_sorted_by_m_then_p() {
    let out = effnoise(&["channel", "--code", "ghz,repetition", "--m", "5,3", "--p-grid", "0:1:3"]);
    assert!(out.status.success());
    let keys: Vec<(usize, f64)> = rows(&stdout(&out))
        .iter()
        .map(|r| (r[1].parse().unwrap(), r[2].parse().unwrap()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(keys, sorted);
}

#[test]
fn code_file_equal_to_cluster_ring_reproduces_its_table() {
    let dir = tempfile::tempdir().unwrap();
    let code = StabilizerCode::cluster_ring(5).unwrap();
    let gens: Vec<String> = code.generators().iter().map(|g| format!("\"{g}\"")).collect();
    let json = format!(
        "{{\n  \"label\": \"ring-copy\",\n  \"m\": 5,\n  \"generators\": [{}],\n  \"logical_x\": \"{}\",\n  \"logical_z\": \"{}\",\n  \"recovery_alphabet\": \"full\"\n}}\n",
        gens.join(", "),
        code.logical_x(),
        code.logical_z()
    );
    let path = write(dir.path(), "ring.json", &json);
    let grid = "0.8:1:11";
    let from_file = effnoise(&["channel", "--code-file", &path, "--p-grid", grid]);
    let builtin = effnoise(&["channel", "--code", "cluster-ring", "--m", "5", "--p-grid", grid]);
    assert!(from_file.status.success(), "{}", stderr(&from_file));
    let a = rows(&stdout(&from_file));
    let b = rows(&stdout(&builtin));
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x[0], "ring-copy");
        assert_eq!(x[1..11], y[1..11]);
    }
}

#[test]
fn malformed_code_file_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "bad.json",
        "{\n  \"label\": \"bad\",\n  \"m\": 3,\n  \"generators\": [\"ZZI\" \"IZZ\"],\n  \"logical_x\": \"XXX\",\n  \"logical_z\": \"ZII\",\n  \"recovery_alphabet\": \"x_only\"\n}\n",
    );
    let out = effnoise(&["validate", "--code-file", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));
}

#[test]
fn invalid_code_file_fails_validation_with_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    // Anticommuting generators.
    let path = write(
        dir.path(),
        "anti.json",
        r#"{"label": "anti", "m": 3, "generators": ["XII", "ZII"], "logical_x": "XXX", "logical_z": "ZZZ", "recovery_alphabet": "full"}"#,
    );
    let out = effnoise(&["validate", "--code-file", &path]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stdout(&out).contains("[FAIL] generators pairwise commute"));
}

#[test]
fn validate_builtins_passes() {
    let out = effnoise(&["validate"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("all checks passed"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["lifetime", "--n-grid", ""][..],
        &["channel", "--noise", "custom"],
        &["channel", "--lambda", "0.7,0.1,0.1,0.1"],
        &["negativity", "--p", "1.5"],
        &["channel", "--code", "nonsense"],
        &["channel", "--m", "4"],
        &["concat", "--noise", "phase"],
        &["channel", "--jobs", "0"],
    ] {
        let out = effnoise(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn resource_limits_exit_3() {
    assert_eq!(effnoise(&["channel", "--m", "13"]).status.code(), Some(3));
    assert_eq!(effnoise(&["lifetime", "--m", "1", "--n-grid", "12"]).status.code(), Some(3));
}

#[test]
fn negativity_reports_crossings_on_stderr() {
    let out = effnoise(&["negativity", "--code", "ghz,cluster-ring", "--m", "5", "--n-grid", "2-30"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("N_crit ghz vs cluster-ring (m = 5): 15"), "{}", stderr(&out));
    assert_eq!(rows(&stdout(&out)).len(), 58);
}

#[test]
fn noiseless_negativity_is_one_half() {
    let out = effnoise(&["negativity", "--p", "1", "--m", "3", "--n-grid", "2,10,50"]);
    for r in rows(&stdout(&out)) {
        assert_eq!(r[3].parse::<f64>().unwrap(), 0.5);
    }
}

#[test]
fn concat_marks_absent_thresholds() {
    let out = effnoise(&["concat", "--m1", "1,3", "--m2", "1,3"]);
    assert!(out.status.success());
    let rows = rows(&stdout(&out));
    assert_eq!(rows[0], ["1", "1", "NA", "true"]);
    let p: f64 = rows[3][2].parse().unwrap();
    assert!((p - 0.8869).abs() < 1e-3);
}

#[test]
fn config_file_is_merged_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.json",
        r#"{"code": ["ghz"], "m": [3], "p_grid": {"start": 0.5, "stop": 1.0, "count": 2}, "out": "result.csv"}"#,
    );
    let out = effnoise(&["channel", "--config", &cfg]);
    assert!(out.status.success(), "{}", stderr(&out));
    let written = std::fs::read_to_string(dir.path().join("result.csv")).unwrap();
    assert_eq!(rows(&written).len(), 2);

    let out = effnoise(&["channel", "--config", &cfg, "--m", "5", "--out", dir.path().join("b.csv").to_str().unwrap()]);
    assert!(out.status.success());
    let written = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert!(rows(&written).iter().all(|r| r[0] == "ghz" && r[1] == "5"));

    let bad = write(dir.path(), "bad.json", r#"{"code": ["ghz"], "colour": 1}"#);
    assert_eq!(effnoise(&["channel", "--config", &bad]).status.code(), Some(2));
}

#[test]
fn lifetime_rows() {
    let out = effnoise(&["lifetime", "--m", "1", "--n-grid", "2,4"]);
    assert!(out.status.success());
    let rows = rows(&stdout(&out));
    assert_eq!(rows.len(), 2);
    let p: f64 = rows[0][3].parse().unwrap();
    assert!((p - 1.0 / 3f64.sqrt()).abs() < 1e-6);
}
