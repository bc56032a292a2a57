use std::process::Command;

use latdisc::cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["latdisc"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn count_prints_the_integer() {
    assert_eq!(call(&["count", "--m", "2", "--k", "3", "--x", "2"]), (0, "33\n".into(), String::new()));
    let (code, out, _) = call(&["count", "--m", "2", "--k", "3", "--x", "7", "--method", "brute"]);
    assert_eq!(code, 0);
    assert_eq!(out, call(&["count", "--m", "2", "--k", "3", "--x", "7"]).1);
    let (code, out, _) = call(&["count", "--m", "1", "--k", "2", "--x", "1", "--relaxed"]);
    assert_eq!((code, out.as_str()), (0, "7\n"));
}

#[test]
fn disc_emits_a_record() {
    let (code, out, _) = call(&["disc", "--m", "2", "--k", "3", "--x", "50"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["A"], 821617);
    let p = v["P"].as_f64().unwrap();
    let r = v["R"].as_f64().unwrap();
    let h = v["H1"].as_f64().unwrap() + v["H2"].as_f64().unwrap();
    assert!((p - h - r).abs() < 1e-6);
}

#[test]
fn sweep_writes_csv() {
    let (code, out, _) = call(&["sweep", "--m", "2", "--k", "3", "--grid", "10,20,40"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "x,A,vol_term,H1,H2,P,R");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("10,"));
}

#[test]
fn sweep_to_file_and_json() {
    let dir = std::env::temp_dir().join(format!("latdisc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sweep.csv");
    let (code, out, _) = call(&[
        "--output", path.to_str().unwrap(), "sweep", "--m", "2", "--k", "3",
        "--x-min", "10", "--x-max", "100", "--points", "5", "--spacing", "linear",
    ]);
    assert_eq!((code, out.as_str()), (0, ""));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().nth(5).unwrap().starts_with("100,"));
    std::fs::remove_dir_all(&dir).unwrap();

    let (code, out, _) = call(&["sweep", "--m", "2", "--k", "3", "--grid", "5,6", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
}

#[test]
fn reports_are_json() {
    for args in [
        vec!["hardy", "--k", "3", "--w", "10000"],
        vec!["transform", "--k", "4", "--w", "5000"],
        vec!["classify", "--m", "2", "--k", "3"],
        vec!["vaaler", "--samples", "500", "--orders", "2,16"],
    ] {
        let (code, out, err) = call(&args);
        assert_eq!(code, 0, "{args:?}: {err}");
        serde_json::from_str::<serde_json::Value>(&out).unwrap();
    }
    let (_, out, _) = call(&["classify", "--m", "2", "--k", "3"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["case_id"], 1);
    assert_eq!(v["exponent"], 1.48);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["count", "--m", "2", "--k", "3"],
        vec!["count", "--m", "2", "--k", "3", "--x", "2", "--bogus"],
        vec!["frobnicate"],
        vec!["sweep", "--m", "2", "--k", "3"],
        vec!["sweep", "--m", "2", "--k", "3", "--grid", "5,4"],
        vec!["count", "--m", "1", "--k", "2", "--x", "3"],
        vec!["count", "--m", "2", "--k", "3", "--x", "3", "--policy", "exact", "--relaxed", "--k", "2.5"],
        vec!["hardy", "--k", "3", "--w", "10000", "--order", "1"],
        vec!["vaaler", "--orders", "1"],
        vec!["disc", "--m", "1.1", "--k", "2.1", "--x", "5"],
    ] {
        let (code, _, err) = call(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty());
    }
}

#[test]
fn help_succeeds() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    for sub in ["count", "disc", "sweep", "hardy", "vaaler", "transform", "classify"] {
        assert!(out.contains(sub));
    }
}

#[test]
fn binary_matches_library_and_honours_worker_env() {
    let bin = env!("CARGO_BIN_EXE_latdisc");
    let args = ["sweep", "--m", "2", "--k", "3", "--x-min", "30", "--x-max", "200", "--points", "12"];
    let a = Command::new(bin).args(args).env("LATDISC_WORKERS", "1").output().unwrap();
    let b = Command::new(bin).args(args).env("LATDISC_WORKERS", "8").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut full = vec!["latdisc"];
    full.extend_from_slice(&args);
    let mut out = Vec::new();
    run(full, &mut out, &mut Vec::new());
    assert_eq!(a.stdout, out);
    let bad = Command::new(bin).args(["count"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn unresolved_boundary_points_fail_validation() {
    // |u1|^2.2 = 1 on the axes and 4.4 is not an integer, so these stay flagged
    let (code, out, err) = call(&["count", "--m", "1", "--k", "2.2", "--x", "1", "--relaxed"]);
    assert_eq!(code, 1);
    assert_eq!(out, "7\n");
    assert!(err.contains("could not be resolved"));
}
