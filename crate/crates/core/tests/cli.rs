//! Integration tests for the ncsuper binary: exit codes, report formats,
//! and agreement between subcommand output and the library.

use std::process::{Command, Output};

use ncsuper::expr::Scope;
use ncsuper::forms::FormContext;
use ncsuper::geometry::{Connection, ConnectionParams};
use ncsuper::presentations::Algebras;
use ncsuper::report::Report;

fn ncsuper(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncsuper"))
        .args(args)
        .output()
        .expect("spawn ncsuper")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

// ---------------------------------------------------------------------------
// verify

#[test]
fn verify_json_is_well_formed_and_green() {
    let out = ncsuper(&["verify", "--suite", "matrices", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("\"check_id\""));
    assert!(text.contains("\"paper_anchor\""));
    let report = Report::from_json(&text).expect("well-formed report");
    assert_eq!(report.version, "1");
    assert_eq!(report.suites, ["matrices"]);
    assert!(!report.results.is_empty());
    assert_eq!(report.summary.pass, report.results.len());
    assert_eq!(report.summary.fail, 0);
    for row in &report.results {
        assert_eq!(row.status, "pass", "{}", row.check_id);
        assert!(row.residual.is_empty(), "{}", row.check_id);
        assert!(!row.paper_anchor.is_empty(), "{}", row.check_id);
    }
}

#[test]
fn verify_text_lists_checks_and_summary() {
    let out = ncsuper(&["verify", "--suite", "curvature"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("PASS curvature/curvature-exact"));
    assert!(text.contains("summary: 5 passed, 0 failed"));
}

#[test]
fn verify_requested_suite_order_is_kept() {
    let out = ncsuper(&[
        "verify", "--suite", "metric", "--suite", "curvature", "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let report = Report::from_json(&stdout(&out)).unwrap();
    assert_eq!(report.suites, ["metric", "curvature"]);
}

#[test]
fn verify_writes_report_file() {
    let path = std::env::temp_dir().join(format!("ncsuper-cli-{}.json", std::process::id()));
    let path_str = path.to_str().unwrap();
    let out = ncsuper(&[
        "verify", "--suite", "metric", "--format", "json", "--output", path_str,
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).is_empty(), "report should go to the file only");
    let written = std::fs::read_to_string(&path).expect("report file");
    std::fs::remove_file(&path).ok();
    assert!(written.ends_with('\n'));
    let report = Report::from_json(&written).expect("well-formed report file");
    assert_eq!(report.suites, ["metric"]);
    assert!(report.summary.fail == 0);
}

#[test]
fn pinned_parameters_fail_metric_compatibility() {
    let out = ncsuper(&["verify", "--suite", "metric", "--c0", "1", "--c1", "0"]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("FAIL metric/metric-compatibility"), "{text}");
    assert!(text.contains("residual:"), "{text}");
}

#[test]
fn pinned_origin_is_metric_compatible() {
    let out = ncsuper(&["verify", "--suite", "metric", "--c0", "0", "--c1", "0"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("PASS metric/metric-compatibility"));
}

#[test]
fn corrupt_rule_fails_with_exit_one() {
    let out = ncsuper(&[
        "verify",
        "--suite",
        "presentations",
        "--corrupt-rule",
        "group:det",
    ]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("FAIL presentations/confluence/group"), "{text}");
    assert!(text.contains("overlap"), "{text}");
}

#[test]
fn corrupt_rule_fails_even_for_other_suites() {
    let out = ncsuper(&[
        "verify",
        "--suite",
        "covariance",
        "--corrupt-rule",
        "superspace:theta2-theta2",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("FAIL presentations/confluence/superspace"));
}

#[test]
fn corrupt_rule_unknown_id_is_a_config_error() {
    let out = ncsuper(&["verify", "--corrupt-rule", "superspace:nope"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("error:"));
}

#[test]
fn corrupt_rule_without_colon_is_a_config_error() {
    let out = ncsuper(&["verify", "--corrupt-rule", "det"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("ALGEBRA:RULE-ID"));
}

#[test]
fn unknown_suite_is_a_config_error() {
    let out = ncsuper(&["verify", "--suite", "bogus"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("bogus"));
}

// ---------------------------------------------------------------------------
// normalize / sigma / curvature

#[test]
fn normalize_agrees_with_the_library() {
    let algebras = Algebras::build().unwrap();
    let ctx = FormContext::superspace(&algebras).unwrap();
    let scope = Scope::over_forms(&ctx);
    let expected = scope.render(&scope.eval("x*theta1").unwrap());

    let out = ncsuper(&["normalize", "x*theta1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out).trim_end(), expected);
}

#[test]
fn normalize_in_the_calculus_agrees_with_the_library() {
    let algebras = Algebras::build().unwrap();
    let scope = Scope::plain(&algebras.calculus);
    let expected = scope.render(&scope.eval("dx*x - 1").unwrap());

    let out = ncsuper(&["normalize", "dx*x - 1", "--algebra", "calculus"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out).trim_end(), expected);
}

#[test]
fn normalize_rejects_a_syntax_error() {
    let out = ncsuper(&["normalize", "x*("]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("error:"));
}

#[test]
fn normalize_rejects_an_unknown_algebra() {
    let out = ncsuper(&["normalize", "x", "--algebra", "bogus"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("bogus"));
}

#[test]
fn sigma_agrees_with_the_library() {
    let algebras = Algebras::build().unwrap();
    let ctx = FormContext::superspace(&algebras).unwrap();
    let scope = Scope::over_forms(&ctx);
    let expected = match scope.eval("xi1 ox eta").unwrap() {
        ncsuper::expr::Value::Tens(t) => ctx.format_tensor(&ctx.sigma_at(&t, 0).unwrap()),
        _ => panic!("expected a two-slot tensor"),
    };

    let out = ncsuper(&["sigma", "xi1 ox eta"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out).trim_end(), expected);
}

#[test]
fn sigma_rejects_a_non_tensor() {
    let out = ncsuper(&["sigma", "x"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("two-slot"));
}

#[test]
fn curvature_agrees_with_the_library() {
    let algebras = Algebras::build().unwrap();
    let ctx = FormContext::superspace(&algebras).unwrap();
    let conn = Connection::new(&ctx, ConnectionParams::symbolic_torsionless()).unwrap();
    let expected = ctx.format_wedge_tensor(&conn.curvature(0).unwrap());

    let out = ncsuper(&["curvature", "--a", "1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out).trim_end(), expected);
}

#[test]
fn curvature_rejects_an_index_out_of_range() {
    let out = ncsuper(&["curvature", "--a", "0"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--a"));
}
