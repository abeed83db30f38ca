use std::process::{Command, Output};

fn tildecheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tildecheck"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn report(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json report on stdout")
}

#[test]
fn commutator_on_schwarzschild_passes() {
    let o = tildecheck(&[
        "verify", "--suite", "commutator", "--metric", "schwarzschild", "--points", "32", "--seed", "7", "--tol", "1e-9",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("PASS curvature-commutator"), "{out}");
    assert!(out.contains("0 failed"));
}

#[test]
fn onshell_report_has_tb_equals_tm() {
    let o = tildecheck(&[
        "verify", "--suite", "emt-onshell", "--theory", "maxwell", "--fields", "plane-em-wave", "--points", "4", "--report", "-",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(&o);
    assert_eq!(r["schema_version"], 1);
    assert!(r["summary"]["wall_ms"].is_null());
    let rec = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == "tb-equals-tm")
        .expect("tb-equals-tm record");
    assert_eq!(rec["equation"], "tb");
    assert_eq!(rec["scenario"], "minkowski4/plane-em-wave");
    assert_eq!(rec["pass"], true);
    assert!(rec["max_abs"].as_f64().unwrap() <= 1e-8);
    // the table goes to stderr when the report takes stdout
    assert!(stderr(&o).contains("PASS tb-equals-tm"));
}

#[test]
fn unknown_metric_is_a_config_error() {
    let o = tildecheck(&["verify", "--suite", "gauge", "--metric", "kerr"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kerr"));
}

#[test]
fn low_jet_order_names_the_check() {
    let o = tildecheck(&["verify", "--suite", "emt-onshell", "--jet-order", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("div-tb"), "{}", stderr(&o));
}

#[test]
fn off_shell_field_rejected_for_onshell_suite() {
    let o = tildecheck(&["verify", "--suite", "emt-onshell", "--fields", "random-scalar"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn explain_cites_equation_and_section() {
    let o = tildecheck(&["explain", "tb-equals-tm"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("equation: tb"), "{out}");
    assert!(out.contains("§3(iv)"), "{out}");
    assert_eq!(tildecheck(&["explain", "bogus"]).status.code(), Some(2));
}

#[test]
fn list_shows_catalog() {
    let o = tildecheck(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for name in ["schwarzschild", "plane-em-wave", "conformal-bump", "master-identity"] {
        assert!(out.contains(name), "{name}");
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    let out = dir.path().join("report.json");
    std::fs::write(
        &path,
        format!(
            "suite = \"lie-calculus\"\nmetric = \"schwarzschild\"\npoints = 3\nseed = 5\nquiet = true\nreport = {:?}\n\n[tolerances]\nlie-forms = 1e-11\n",
            out.display().to_string()
        ),
    )
    .unwrap();
    let o = tildecheck(&["verify", "--config", path.to_str().unwrap(), "--points", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).is_empty(), "quiet from the file");
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["config"]["metric"], "schwarzschild");
    assert_eq!(r["config"]["points"], 5);
    assert_eq!(r["config"]["seed"], 5);
    let forms = r["checks"].as_array().unwrap().iter().find(|c| c["id"] == "lie-forms").unwrap();
    assert_eq!(forms["tolerance"], 1e-11);
}

#[test]
fn unknown_config_key_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "suite = \"gauge\"\npointz = 3\n").unwrap();
    let o = tildecheck(&["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = tildecheck(&[
            "verify", "--suite", "kinematic-lagrangian", "--metric", "conformal-bump", "--points", "6", "--quiet", "--report",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read(p).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn timing_fills_wall_ms() {
    let o = tildecheck(&["verify", "--suite", "gauge", "--points", "2", "--timing", "--report", "-"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(report(&o)["summary"]["wall_ms"].is_u64());
}

#[test]
fn failing_check_exits_one() {
    // a floor no control can reach
    let o = tildecheck(&["verify", "--suite", "gauge", "--points", "2", "--tol", "gauge-tc-control=1e6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL gauge-tc-control"));
}
