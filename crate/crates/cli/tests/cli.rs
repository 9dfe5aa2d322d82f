use std::process::{Command, Output};

fn polyw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyw")).args(args).env_remove("POLYW_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn check_height_one_relator() {
    let o = polyw(&["check", "a (a^2)^b"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["word"], "a^2 b a b^-1");
}

#[test]
fn check_reports_obstruction() {
    let o = polyw(&["check", "a b a b^2 a b^3"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "not-polygonal");
}

#[test]
fn single_strategy_not_applicable() {
    let o = polyw(&["check", "a (a^2)^b", "--strategy", "f2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_input_exits_three() {
    assert_eq!(polyw(&["check", "a a^-1"]).status.code(), Some(3));
    assert_eq!(polyw(&["check", "a ^ ^"]).status.code(), Some(3));
    assert_eq!(polyw(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(polyw(&["--help"]).status.code(), Some(0));
}

#[test]
fn certificate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let p = path.to_str().unwrap();
    let o = polyw(&["check", "a^2 b^-1 a^-1 b a b^-1 a b", "--strategy", "search", "--max-disks", "1", "--output", p]);
    assert_eq!(o.status.code(), Some(0));
    let v = polyw(&["verify", p]);
    assert_eq!((v.status.code(), stdout(&v).trim()), (Some(0), "valid"));
    let c = polyw(&["cover", p]);
    assert_eq!(c.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&c)).unwrap();
    assert_eq!(report["degree"], 7);
    assert_eq!(report["chi_S0"], -4);
    assert!(stdout(&polyw(&["render", p])).contains("graph"));
    assert!(stdout(&polyw(&["cover", p, "--dot"])).starts_with("digraph"));
}

#[test]
fn tampered_certificate_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let p = path.to_str().unwrap();
    assert_eq!(polyw(&["check", "a b a^-1 b^-1", "--output", p]).status.code(), Some(0));
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    v["verdict"]["chi"] = serde_json::json!(-7);
    std::fs::write(&path, v.to_string()).unwrap();
    let o = polyw(&["verify", p]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(1), "invalid"));
    std::fs::write(&path, "{").unwrap();
    assert_eq!(polyw(&["verify", p]).status.code(), Some(3));
}

#[test]
fn declarative_certificate_has_no_cover() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let p = path.to_str().unwrap();
    assert_eq!(polyw(&["check", "(a b^2)^2", "--output", p]).status.code(), Some(0));
    assert_eq!(polyw(&["cover", p]).status.code(), Some(2));
}

#[test]
fn rho_minimize_and_equivalence() {
    let r = polyw(&["rho", "a^6 b^-3 c^5 b^4 c^-7"]);
    assert!(stdout(&r).contains("in T_3"));
    let m = polyw(&["minimize", "a b a b^2 a b^3", "--json"]);
    let trace: serde_json::Value = serde_json::from_str(&stdout(&m)).unwrap();
    assert_eq!(trace["final"]["word"].as_str().unwrap().split_whitespace().count(), 4);
    assert_eq!(polyw(&["equivalent", "a b a b^2 a b^3", "a (a^2)^b"]).status.code(), Some(0));
    assert_eq!(polyw(&["equivalent", "a^2", "a"]).status.code(), Some(1));
    assert_eq!(polyw(&["diskbusting", "a b a^-1 b^-1"]).status.code(), Some(0));
    assert_eq!(polyw(&["diskbusting", "a^2 b^2 c^3 b^-3"]).status.code(), Some(1));
    assert_eq!(polyw(&["diskbusting", "a b a^-1 b^-1 c^2", "--orbit-cap", "1"]).status.code(), Some(2));
}

#[test]
fn stats_are_reproducible() {
    let a = polyw(&["stats", "--length", "60", "--samples", "300", "--seed", "4", "--format", "json"]);
    let b = polyw(&["stats", "--length", "60", "--samples", "300", "--seed", "4", "--format", "json", "--jobs", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let csv = stdout(&polyw(&["stats", "--length", "10", "--samples", "5"]));
    assert!(csv.starts_with("N,samples,seed,p_condition"));
    let env = Command::new(env!("CARGO_BIN_EXE_polyw"))
        .args(["stats", "--length", "10", "--samples", "5"])
        .env("POLYW_SEED", "0")
        .output()
        .unwrap();
    assert_eq!(stdout(&env), csv);
    assert_eq!(polyw(&["stats", "--length", "1", "--samples", "5"]).status.code(), Some(3));
}
