use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ldp_cli::CSV_HEADER;

fn ldp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ldp")).args(args).output().expect("spawn ldp")
}

fn scenario(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.cfg"));
    p.to_string_lossy().into_owned()
}

fn temp_file(tag: &str, body: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("ldp-cli-{}-{tag}.cfg", std::process::id()));
    std::fs::write(&p, body).unwrap();
    p
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn without_wall_ms(csv: &str) -> Vec<String> {
    csv.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
}

#[test]
fn run_writes_exact_header_and_passes() {
    let out = ldp(&["run", &scenario("first_passage"), "--budget", "20000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().next(), Some(CSV_HEADER));
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row.len(), 13);
    assert_eq!((row[0], row[9], row[10]), ("first_passage", "naive", "20000"));
    assert!(!csv.contains('\r'));
    // defaults are echoed, overridden keys are not
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("default: estimator = naive") && !err.contains("default: budget"));
}

#[test]
fn same_seed_reproduces_numeric_columns() {
    let args = ["run", &scenario("stopped_poisson"), "--seed", "42", "--budget", "20000"];
    let a = ldp(&args);
    let b = ldp(&args);
    assert_eq!(a.status.code(), b.status.code());
    let (a, b) = (String::from_utf8(a.stdout).unwrap(), String::from_utf8(b.stdout).unwrap());
    assert_eq!(without_wall_ms(&a), without_wall_ms(&b));
    let c = ldp(&["run", &scenario("stopped_poisson"), "--seed", "43", "--budget", "20000"]);
    assert_ne!(without_wall_ms(&a), without_wall_ms(&String::from_utf8(c.stdout).unwrap()));
}

#[test]
fn out_flag_writes_file() {
    let out = std::env::temp_dir().join(format!("ldp-cli-{}-out.csv", std::process::id()));
    let r = ldp(&["run", &scenario("kernel_scaling"), "--out", path_str(&out)]);
    assert_eq!(r.status.code(), Some(0));
    assert!(r.stdout.is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.lines().nth(1).unwrap().contains(",scaling,"));
    std::fs::remove_file(out).unwrap();
}

#[test]
fn out_of_regime_exits_2() {
    let r = ldp(&["run", &scenario("out_of_regime")]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("ld_condition"));
    assert_eq!(String::from_utf8(r.stdout).unwrap().lines().count(), 1);
}

#[test]
fn unsupported_exits_3() {
    let f = temp_file("light", "model = iid\nlaw = exponential(1)\nn_grid = [10]\nx_rule = fixed(40)\nbudget = 1000\n");
    assert_eq!(ldp(&["run", path_str(&f)]).status.code(), Some(3));
    std::fs::remove_file(f).unwrap();
}

#[test]
fn config_errors_exit_4() {
    let f = temp_file("beta1", "model = iid\nlaw = pareto\nbeta = 1.0\nn_grid = [10]\n");
    let r = ldp(&["run", path_str(&f)]);
    assert_eq!(r.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&r.stderr).contains("line 3, key `beta`"));
    std::fs::remove_file(f).unwrap();
    assert_eq!(ldp(&["run", &scenario("iid_beta07"), "--budget", "10"]).status.code(), Some(4));
    assert_eq!(ldp(&["run", "/nonexistent/x.cfg"]).status.code(), Some(4));
    assert_eq!(ldp(&["frobnicate"]).status.code(), Some(4));
}

#[test]
fn constants_and_verify() {
    let r = ldp(&["constants", "bigjump", "--gamma", "0.5", "--beta", "0.5"]);
    let c: f64 = String::from_utf8(r.stdout).unwrap().trim().parse().unwrap();
    assert!((c - 1.925_655_564_892_835).abs() < 1e-12);
    let r = ldp(&["constants", "zeta", "--s", "2"]);
    let z: f64 = String::from_utf8(r.stdout).unwrap().trim().parse().unwrap();
    assert!((z - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
    assert_eq!(ldp(&["constants", "zeta", "--s", "1"]).status.code(), Some(4));

    let r = ldp(&["verify", "convolution", "--law", "pareto(beta=0.5, scale=1)", "--x", "1e4"]);
    let text = String::from_utf8(r.stdout).unwrap();
    let v: f64 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - 0.019_998_999_974_998_75).abs() < 1e-12);

    let r = ldp(&["verify", "pgf", "--counting", "poisson(2)", "--t", "10", "--z", "0.5"]);
    let text = String::from_utf8(r.stdout).unwrap();
    let v: f64 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - (-10f64).exp()).abs() < 1e-12);

    let r = ldp(&["verify", "walk", "--n-max", "4", "--walks", "20000"]);
    let text = String::from_utf8(r.stdout).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")), "{text}");
}
