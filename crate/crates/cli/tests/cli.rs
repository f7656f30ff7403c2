use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rankin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rankin")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn slope_of_delta_at_seven() {
    let o = rankin(&["slope"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("Hecke polynomial: X^2 + 16744X + 7^11"), "{s}");
    assert!(s.contains("Newton polygon slopes: 1, 10"), "{s}");
    assert!(s.contains("slope 1, h=2, need k-l >= 4"), "{s}");
}

#[test]
fn ordinary_prime_has_slope_zero() {
    let o = rankin(&["slope", "--p", "13"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("slope 0, h=1"));
}

#[test]
fn slope_from_a_form_file() {
    // E4 Delta to q^5 by hand: a_n = sum_j 240 sigma_3(j) tau(n - j) + tau(n)
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e4delta.json");
    let body = r#"{"weight": 16, "level": 1, "coefficients": ["0", "1", "216", "-3348", "13888", "52110"]}"#;
    fs::write(&path, body).unwrap();
    let out = dir.path().join("out");
    let o = rankin(&["slope", "--f", path.to_str().unwrap(), "--p", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // v_5(52110) = 1 and v_5(5^15) = 15
    assert!(stdout(&o).contains("Newton polygon slopes: 1, 14"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("slope.json")).unwrap()).unwrap();
    assert_eq!(report["a_p"], "52110");
    assert_eq!(report["required_weight_gap"], 4);
}

#[test]
fn zero_budget_exits_three() {
    let o = rankin(&["certify", "--budget", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("budget"));
}

#[test]
fn weight_gap_violation_exits_two() {
    let o = rankin(&["certify", "--g", "eisenstein:10", "--N", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("2(\u{230a}v_p(\u{3b1})\u{230b}+1) \u{2264} k\u{2212}l fails"), "{}", stderr(&o));
}

#[test]
fn unknown_config_key_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "prime = 7\n").unwrap();
    let o = rankin(&["certify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn worked_example_certifies() {
    let dir = tempfile::tempdir().unwrap();
    let o = rankin(&["certify", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let summary = fs::read_to_string(dir.path().join("summary.tsv")).unwrap();
    assert_eq!(summary.lines().count(), 6);
    assert!(summary.lines().skip(1).all(|l| l.ends_with("\ttrue")), "{summary}");
    // every unit mod 77, r <= 3, both open kinds (60 and 6 opens)
    let div = fs::read_to_string(dir.path().join("divisibility.tsv")).unwrap();
    assert_eq!(div.lines().count(), 1 + 4 * (60 + 6));
}

fn certify_with_config(dir: &Path, cfg: &Path) -> Vec<u8> {
    let o = rankin(&["certify", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    fs::read(dir.join("certify.json")).unwrap()
}

#[test]
fn reports_are_deterministic_and_carry_the_plan() {
    let root = tempfile::tempdir().unwrap();
    let cfg = root.path().join("small.toml");
    fs::write(&cfg, "r_max = 1\nout_len = 4\ncheck_len = 8\n").unwrap();
    let a = certify_with_config(&root.path().join("a"), &cfg);
    let b = certify_with_config(&root.path().join("b"), &cfg);
    assert_eq!(a, b);
    let report: serde_json::Value = serde_json::from_slice(&a).unwrap();
    let header = &report["header"];
    assert_eq!(header["scenario"]["r_max"], 1);
    assert_eq!(header["defaults"]["r_max"], 3);
    assert_eq!(header["plan"]["levels"][0]["input_len"], 3 * 49 + 1);
    assert_eq!(report["pass"], true);
}

#[test]
fn mellin_reports_the_interpolation_factor() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["mellin", "--chi", "triv", "--chi", "quad", "--r-max", "0", "--out-len", "4"];
    let o = rankin(&[&args[..], &["--out", dir.path().to_str().unwrap()]].concat());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // 1 - 2^10 psi(2) with psi trivial
    assert!(stdout(&o).contains("triv r=0: "));
    assert!(stdout(&o).contains("factor 7^0 * -1023 + O(7^40)"));
    assert!(stdout(&o).contains("Petersson"));
    let table = fs::read_to_string(dir.path().join("mellin.tsv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert!(table.lines().nth(2).unwrap().starts_with("quad\t0\t1\t4\t"));
}

#[test]
fn vanishing_factor_is_flagged() {
    // at r = (k-l)/2 the factor for trivial chi is 1 - b^0 = 0
    let o = rankin(&["mellin", "--r-max", "5", "--out-len", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    let line = s.lines().find(|l| l.starts_with("triv r=5:")).unwrap();
    assert!(line.ends_with("FACTOR ZERO"), "{line}");
    assert!(!s.lines().find(|l| l.starts_with("triv r=4:")).unwrap().contains("ZERO"));
}
