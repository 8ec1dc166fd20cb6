use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn gsl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsl")).args(args).output().expect("run gsl")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn abel_trefoil() {
    let o = gsl(&["abel", &data("trefoil.grp")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "H1 = Z\n");
}

#[test]
fn lcs_free_group() {
    let o = gsl(&["lcs", &data("F2.grp"), "--upto", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("l = 2,1,2,3\n"), "{}", stdout(&o));
}

#[test]
fn bad_complex_reports_location() {
    let o = gsl(&["ccx-audit", &data("bad.ccx")]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("bad.ccx") && err.contains("entry (0, 0)"), "{err}");
}

#[test]
fn parse_errors_name_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.grp");
    fs::write(&path, "gens x y\nrel x z\n").unwrap();
    let o = gsl(&["abel", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("broken.grp") && err.contains("2:7") && err.contains("unknown generator"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(gsl(&["lcs"]).status.code(), Some(1));
    assert_eq!(gsl(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(gsl(&["--help"]).status.code(), Some(0));
}

#[test]
fn hypothesis_failures_exit_two() {
    let o = gsl(&["stallings", &data("F2.grp"), &data("Z2.grp"), &data("F2_Z2.hom"), "--upto", "3"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    assert!(stdout(&o).contains("fails at degree 2"));
    let o = gsl(&["freesolv", &data("F2.grp"), "--elems", &data("F2_dependent.txt"), "--n", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = gsl(&["meta-mono", &data("F2.grp"), &data("Z2.grp"), &data("F2_Z2.hom")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ill_defined_hom_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.hom");
    fs::write(&path, "map x -> a, y -> a^2\n").unwrap();
    let o = gsl(&["meta-mono", &data("Z2.grp"), &data("trefoil.grp"), path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    fs::write(&path, "map x -> x, y -> y\n").unwrap();
    let o = gsl(&["meta-mono", &data("Z2.grp"), &data("F2.grp"), path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("not well defined"));
}

#[test]
fn verdict_commands_succeed() {
    let ok = [
        vec!["stallings", &data("F2.grp"), &data("F2.grp"), &data("F2_twist.hom"), "--upto", "5"],
        vec!["dwyer", &data("F2.grp"), &data("B_xyy.grp"), &data("F2_B_xyy.hom"), "--n", "2"],
        vec!["meta-mono", &data("F2.grp"), &data("B_meta.grp"), &data("F2_B_meta.hom")],
        vec!["two-conn", &data("F1.grp"), &data("trefoil.grp"), &data("F1_trefoil.hom"), "--gamma", "abel"],
        vec!["freesolv", &data("F2.grp"), "--elems", &data("F2_gens.txt"), "--n", "2"],
        vec!["dwyer-dim", &data("F3.grp"), "--n", "2"],
        vec!["alex-rank", &data("hopf.grp")],
        vec!["ccx-audit", &data("trefoil.ccx")],
    ]
    .map(|v| v.into_iter().map(String::from).collect::<Vec<_>>());
    for args in ok {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = gsl(&refs);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}{}", stdout(&o), stderr(&o));
    }
}

#[test]
fn two_conn_explicit_gamma() {
    let o = gsl(&["--json", "two-conn", &data("F2.grp"), &data("Z2.grp"), &data("F2_Z2.hom"), "--gamma", "1,0;0,1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kernel_rank"], 1);
    assert_eq!(v["cokernel_rank"], 0);
    assert_eq!(v["falsification"], false);
    assert_eq!(o.status.code(), Some(2));
    let o = gsl(&["two-conn", &data("F1.grp"), &data("trefoil.grp"), &data("F1_trefoil.hom"), "--gamma", "1;0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("coefficient system"), "{}", stderr(&o));
}

#[test]
fn milnor_outputs() {
    let o = gsl(&["milnor", &data("hopf_wirtinger.lnk"), "--maxlen", "2", "--csv"]);
    assert_eq!(stdout(&o), "I,value,delta\n11,0,0\n12,1,0\n21,1,0\n22,0,0\n");
    let o = gsl(&["--json", "milnor", &data("borromean.lnk"), "--maxlen", "3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let e = v["entries"].as_array().unwrap().iter().find(|e| e["index"] == serde_json::json!([2, 3, 1])).unwrap();
    assert_eq!(e["value"], 1);
    assert_eq!(e["delta"], 0);
}

#[test]
fn json_is_deterministic_and_parseable() {
    let runs = [
        vec!["--json".to_string(), "fuzz-strebel".into(), "--count".into(), "150".into(), "--seed".into(), "9".into()],
        vec!["--json".to_string(), "lcs".into(), data("B_xyy.grp"), "--upto".into(), "4".into()],
        vec!["--json".to_string(), "dwyer".into(), data("F2.grp"), data("B_xyy.grp"), data("F2_B_xyy.hom"), "--n".into(), "3".into()],
    ];
    for args in runs {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = gsl(&refs);
        let b = gsl(&refs);
        let mut seq = vec!["--sequential"];
        seq.extend(&refs);
        let c = gsl(&seq);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.stdout, c.stdout);
        let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
        assert!(v.is_object());
    }
}

#[test]
fn basis_bound_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_gsl"))
        .args(["lcs", &data("F3.grp"), "--upto", "4"])
        .env("GSL_MAX_BASIS", "50")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("basis bound 50"), "{}", stderr(&o));
}
