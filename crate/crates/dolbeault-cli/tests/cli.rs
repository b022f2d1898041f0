use std::path::PathBuf;
use std::process::{Command as Proc, Output};

use dolbeault::ncalg::NCPoly;
use dolbeault::qdolbeault::{Z, ZS};
use dolbeault::report::{Check, Report, Status};
use dolbeault::Scalar;
use dolbeault_cli::*;

fn bin(args: &[&str]) -> Output {
    Proc::new(env!("CARGO_BIN_EXE_dolbeault")).args(args).output().expect("run binary")
}

fn write_config(name: &str, json: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, json).unwrap();
    p
}

fn report_of(o: &Output) -> Report {
    serde_json::from_slice(&o.stdout).expect("json report")
}

fn strip_elapsed(o: &Output) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for c in v["checks"].as_array_mut().unwrap() {
        c.as_object_mut().unwrap().remove("elapsed");
    }
    v
}

#[test]
fn half_integer_power_is_a_scalar() {
    assert_eq!(parse_expr("q^(3/2)").unwrap(), Parsed::Scalar(Scalar::s_pow(3)));
}

#[test]
fn reversed_product_normal_orders() {
    let expect = NCPoly::monomial(vec![Z, ZS], Scalar::q());
    assert_eq!(parse_expr("z*z").unwrap(), Parsed::Poly(expect));
}

#[test]
fn unterminated_group_reports_offset() {
    match parse_expr("z*(") {
        Err(ExprError::Syntax(e)) => assert_eq!(e.offset, 3),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_symbol_is_rejected() {
    assert!(parse_expr("x + 1").is_err());
}

#[test]
fn printer_round_trips() {
    for text in ["z*z", "2*z*z - q*z*z*", "q^(-1/2)*z + i", "w*z", "dz*z", "z*dbz*dz", "delta*z*delta^-1", "delta * z * delta^-1", "delta*z", "s^3/q"] {
        let p = parse_expr(text).unwrap();
        let back = parse_expr(&render(&p)).unwrap();
        assert_eq!(back, p, "{text} -> {}", render(&p));
    }
}

#[test]
fn empty_report_json() {
    assert_eq!(emit_report(&Report::default(), Format::Json), "{\"version\":1,\"checks\":[]}\n");
}

#[test]
fn single_pass_and_fail_records() {
    let mut r = Report::default();
    r.push(Check::pass("a", "1", "1"));
    let v: serde_json::Value = serde_json::from_str(&emit_report(&r, Format::Json)).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 1);
    assert_eq!(v["checks"][0]["status"], "pass");
    assert_eq!(exit_code(&r), 0);
    r.push(Check::fail("b", "1", "2", "1 != 2"));
    let v: serde_json::Value = serde_json::from_str(&emit_report(&r, Format::Json)).unwrap();
    assert_eq!(v["checks"][1]["witness"], "1 != 2");
    assert_eq!(exit_code(&r), 1);
    assert!(emit_report(&r, Format::Md).contains("| b | fail | 1 | 2 | 1 != 2 |"));
}

#[test]
fn skip_does_not_fail() {
    let mut r = Report::default();
    r.push(Check::skip("c", "not applicable"));
    assert_eq!(exit_code(&r), 0);
}

#[test]
fn unknown_config_key_rejected() {
    assert!(SuiteConfig::from_json(r#"{"target":"qplane","colour":"red"}"#).is_err());
    assert!(SuiteConfig::from_json(r#"{"group":{"degree":3,"generators":{},"extra":1}}"#).is_err());
}

#[test]
fn config_target_must_match_command() {
    let cfg = SuiteConfig::from_json(r#"{"target":"bundle"}"#).unwrap();
    assert!(matches!(resolve(Command::QplaneVerify, &cfg), Err(ConfigError::TargetMismatch { .. })));
}

#[test]
fn config_errors_precede_checks() {
    let p = write_config("bad_split.json", r#"{"target":"group","group":"a4","split":["t","nope"]}"#);
    let o = bin(&["group", "dims", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid config"));
}

#[test]
fn metric_rows_validated() {
    let rows = vec![vec!["1".to_string(); 12]; 3];
    let cfg = SuiteConfig { metric: Some(rows), ..Default::default() };
    assert!(resolve(Command::GroupChern, &cfg).is_err());
    let mut rows = vec![vec!["1".to_string(); 12]; 4];
    rows[2][5] = "0".into();
    let cfg = SuiteConfig { metric: Some(rows), ..Default::default() };
    assert!(resolve(Command::GroupChern, &cfg).is_err());
}

#[test]
fn wor_config_reports_published_dims() {
    let p = write_config("a4_wor.json", r#"{"target":"group","group":"a4","flavor":"Wor","factorise":true}"#);
    let o = bin(&["group", "dims", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let r = report_of(&o);
    let dim = |suffix: &str| r.checks.iter().find(|c| c.check.ends_with(suffix)).map(|c| (c.lhs.clone(), c.status)).unwrap();
    assert_eq!(dim("dim Omega^2"), ("38".into(), Status::Pass));
    assert_eq!(dim("dim Omega^2 after factorisation"), ("32".into(), Status::Pass));
}

#[test]
fn braided_qplane_dims_to_degree_five() {
    let p = write_config("braided.json", r#"{"target":"braided","preset":"qplane","max_degree":5}"#);
    let o = bin(&["braided", "dims", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = report_of(&o);
    assert!(r.checks.iter().any(|c| c.check.contains("symmetric algebra dims") && c.lhs == "1,2,3,4,5,6"));
}

#[test]
fn qplane_suite_passes_and_is_deterministic() {
    let a = bin(&["qplane", "verify", "--seed", "4"]);
    let b = bin(&["qplane", "verify", "--seed", "4"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(strip_elapsed(&a), strip_elapsed(&b));
    let m = bin(&["qplane", "metric", "--format", "md"]);
    assert_eq!(m.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&m.stdout).starts_with("# Report (version 1)"));
}

#[test]
fn failing_suite_exits_one_with_witness() {
    let o = bin(&["group", "dims", "--flavor", "L"]);
    assert_eq!(o.status.code(), Some(1));
    let r = report_of(&o);
    assert!(r.checks.iter().filter(|c| c.status == Status::Fail).all(|c| c.witness.is_some()));
}

#[test]
fn cyclic_chern_and_bundle_pass() {
    let o = bin(&["group", "chern", "--group", "cyclic", "--n", "5", "--flavor", "LL", "--seed", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let o = bin(&["bundle", "verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn permutation_group_config() {
    let p = write_config("s3.json", r#"{"target":"group","group":{"degree":3,"generators":{"r":"(1 2 3)","f":"(1 2)"}},"split":["r"],"flavor":"LL","factorise":false}"#);
    let o = bin(&["group", "dims", "--config", p.to_str().unwrap()]);
    assert!(o.status.code() == Some(0) || o.status.code() == Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report_of(&o);
    assert!(r.checks.iter().any(|c| c.check.ends_with("dim Omega^2")));
}

#[test]
fn expr_subcommand() {
    let o = bin(&["expr", "z*z"]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "q * z * z*");
    assert_eq!(bin(&["expr", "z*("]).status.code(), Some(2));
}
