use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rhdist")).args(args).output().expect("running rhdist")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{:?}: {}", args, String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

#[test]
fn germ_verbs() {
    assert_eq!(ok(&["germ", "u(1/2,0)"]).trim(), "t^-1*tb^-1*u(-1/2,0)");
    assert_eq!(ok(&["germ", "u(-1,1) | dt | dtb"]).trim(), "-tau*d(0,0)");
    assert_eq!(ok(&["orders", "t*u(-1/2,1) + d(1,0)"]).trim(), "(1, 0)");
    assert_eq!(ok(&["L", "-a", "-1/2", "3*u(-1/2,0)"]).trim(), "3*tau");
    assert_eq!(ok(&["L", "-a", "0", "u(-1,1) | dt | dtb"]).trim(), "-tau");
    assert_eq!(ok(&["mellin", "u(-1/2,1)"]).trim(), "s0 = -1/2 order = 2 : tau, 0");
    let c = ok(&["class", "-o", "-1/2,-1/2", "u(-1/2,2) + t*u(-1/2,0)"]);
    assert_eq!(c.trim(), "u(-1/2,2)");
}

#[test]
fn json_output() {
    let v: serde_json::Value = serde_json::from_str(&ok(&["--json", "orders", "u(-1/3,0)"])).unwrap();
    assert_eq!(v["aprime"], "-1/3");
    let v: serde_json::Value = serde_json::from_str(&ok(&["--json", "mellin", "--k1", "1", "--k2", "1", "u(-1/2,0)"])).unwrap();
    assert_eq!(v[0]["s0"], "-3/2");
    assert_eq!(v[0]["order"], 1);
}

#[test]
fn parse_errors_exit_2_with_caret() {
    let o = run(&["germ", "u(1/2"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("expected ','"), "{}", err);
    assert!(err.lines().last().unwrap().trim() == "^", "{}", err);
    assert_eq!(run(&["L", "-a", "1/2", "u(-1/2,0)"]).status.code(), Some(2));
    assert_eq!(run(&["module", "check", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn module_verbs() {
    assert_eq!(ok(&["module", "check", &fixture("module_xy.json")]).trim(), "OK");
    let o = run(&["module", "check", &fixture("broken.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL"));
    let psi = ok(&["module", "psi", &fixture("module_xy.json")]);
    assert!(psi.contains("Jordan type [2]") && psi.contains("iso"), "{}", psi);
    let dual = ok(&["module", "dual", &fixture("module_xy.json")]);
    let m: serde_json::Value = serde_json::from_str(&dual).unwrap();
    assert!(m["psi"].is_object());
    ok(&["module", "localize", &fixture("jordan2.json")]);
}

#[test]
fn pairing_verbs() {
    let t = ok(&["pairing", "two-route", &fixture("rank1.json")]);
    assert!(t.starts_with("EQUAL"), "{}", t);
    let t = ok(&["pairing", "two-route", &fixture("jordan2.json")]);
    assert!(t.starts_with("EQUAL"), "{}", t);
    let p = ok(&["pairing", "check-props", &fixture("localized.json")]);
    assert!(p.lines().all(|l| l.starts_with("PASS")), "{}", p);
    let c = ok(&["pairing", "check-cor", &fixture("localized.json")]);
    assert!(c.contains("HOLDS"));
    assert_eq!(ok(&["pairing", "psi", &fixture("rank1.json")]).trim(), "alpha = -1/2\n[tau]");
    ok(&["pairing", "phi", &fixture("localized.json")]);
}

#[test]
fn barlet_verbs() {
    let l = ok(&["barlet", "ledger", "-f", "x*y", "--window", "2"]);
    assert!(l.contains("s0 = -1 order = 2"), "{}", l);
    let l = ok(&["barlet", "ledger", "-f", "x^2", "--window", "1", "--form", "a=0"]);
    assert_eq!(l.lines().count(), 2, "{}", l);
    let f = ok(&["barlet", "fixtures", "--manifest", &fixture("barlet/manifest.json")]);
    assert_eq!(f.lines().count(), 6);
    assert!(!f.contains("MISMATCH"));
    assert_eq!(run(&["barlet", "ledger", "-f", "x*y", "--form", "a=0"]).status.code(), Some(2));
}

#[test]
fn selftest_is_deterministic() {
    let a = ok(&["selftest", "--quick", "--seed", "7"]);
    let b = ok(&["selftest", "--quick", "--seed", "7"]);
    assert_eq!(a, b);
    assert!(a.lines().skip(1).all(|l| l.starts_with("PASS")), "{}", a);
}
