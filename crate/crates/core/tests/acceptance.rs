//! End-to-end acceptance gate. Each test certifies one headline property of
//! the engine and prints a single PASS/FAIL line (visible with --nocapture).
//! The checks here go through the same suite runner as the CLI, so a green
//! run of this file means `verify --suite all` is green too.

use std::process::Command;
use std::sync::LazyLock;

use ncsuper::algebra::AlgebraId;
use ncsuper::geometry::ConnectionParams;
use ncsuper::coeff::Poly;
use ncsuper::presentations::Algebras;
use ncsuper::report::Report;
use ncsuper::suites::{run_suites, RunConfig, RunOutcome, Suite};

/// One full verification run shared by the read-only criteria.
static FULL: LazyLock<RunOutcome> =
    LazyLock::new(|| run_suites(&Suite::ALL, &RunConfig::default()).expect("full run"));

fn verdict(n: u32, name: &str, pass: bool) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("acceptance {n:02} {tag}: {name}");
    assert!(pass, "acceptance criterion {n:02} failed: {name}");
}

fn passed(id: &str) -> bool {
    FULL.checks.iter().any(|c| c.id == id && c.pass)
}

fn all_passed(ids: &[&str]) -> bool {
    ids.iter().all(|id| passed(id))
}

/// All checks of one suite, by the "{suite}/" id prefix.
fn suite_rows(suite: Suite) -> Vec<&'static ncsuper::check::Check> {
    let prefix = format!("{}/", suite.name());
    FULL.checks
        .iter()
        .filter(|c| c.id.starts_with(&prefix))
        .collect()
}

fn suite_green(suite: Suite) -> bool {
    let rows = suite_rows(suite);
    !rows.is_empty() && rows.iter().all(|c| c.pass)
}

#[test]
fn acceptance_01_presentations_confluent() {
    let a = Algebras::build().expect("audited build");
    let sizes = [
        a.superspace.rules.len(),
        a.calculus.rules.len(),
        a.group.rules.len(),
        a.combined.rules.len(),
    ];
    let audits = ["superspace", "calculus", "group", "combined"]
        .iter()
        .all(|n| passed(&format!("presentations/confluence/{n}")));
    verdict(
        1,
        "all four presentations build with every overlap resolving",
        sizes == [5, 41, 18, 113] && audits,
    );
}

#[test]
fn acceptance_02_matrix_identities() {
    let need = [
        "matrices/r-inverse",
        "matrices/b-inverse",
        "matrices/b-yang-baxter",
        "matrices/permuted-r-involution",
        "matrices/permuted-r-braid",
        "matrices/r-from-b",
        "matrices/b-inverse-sign-rule",
        "matrices/sigma-involution",
        "matrices/sigma-braid",
        "matrices/j-determinant",
        "matrices/j-inverse",
        "matrices/j-invariant-length",
    ];
    verdict(
        2,
        "R, B, the permuted R, sigma, and J satisfy their defining identities",
        suite_green(Suite::Matrices) && all_passed(&need),
    );
}

#[test]
fn acceptance_03_supergroup_structure() {
    let need = [
        "matrices/rtt-supergroup",
        "matrices/orthosymplectic-form",
        "matrices/orthosymplectic-inverse-form",
        "matrices/antipode-left",
        "matrices/antipode-right",
        "matrices/inverse-supertranspose-left",
        "matrices/inverse-supertranspose-right",
    ];
    let center: Vec<_> = FULL
        .checks
        .iter()
        .filter(|c| c.id.starts_with("presentations/group/center/"))
        .collect();
    let add: Vec<_> = FULL
        .checks
        .iter()
        .filter(|c| c.id.starts_with("presentations/group/add/"))
        .collect();
    let theorems = center.len() == 4
        && add.len() == 23
        && center.iter().chain(add.iter()).all(|c| c.pass);
    verdict(
        3,
        "the supergroup satisfies RTT, the orthosymplectic conditions, and the antipode laws",
        all_passed(&need) && theorems,
    );
}

#[test]
fn acceptance_04_coaction_covariance() {
    let rows = suite_rows(Suite::Covariance);
    let primed = rows
        .iter()
        .filter(|c| c.id.starts_with("covariance/primed/"))
        .count();
    verdict(
        4,
        "the coaction preserves every relation and fixes the invariants",
        rows.len() == 49 && primed == 41 && rows.iter().all(|c| c.pass),
    );
}

#[test]
fn acceptance_05_differential_forms() {
    let need = [
        "forms/sigma-action",
        "forms/sigma-involution-forms",
        "forms/sigma-braid-forms",
        "forms/wedge-after-sigma",
        "forms/invariant-two-form-vanishes",
        "forms/rho-wedge-square",
        "forms/sigma-rho",
        "forms/d-respects-relations",
        "forms/d-squared",
        "forms/d-rho-vanishes",
    ];
    verdict(
        5,
        "sigma, the wedge calculus, and d form a consistent exterior differential",
        suite_green(Suite::Forms) && all_passed(&need),
    );
}

#[test]
fn acceptance_06_connection() {
    let need = [
        "connection/connection-explicit",
        "connection/torsion-general-family",
        "connection/torsion-free",
        "connection/connection-invariant-one-form",
        "connection/wedge-of-connection-rho",
        "connection/connection-leibniz-products",
        "connection/connection-right-leibniz",
        "connection/connection-tensor-leibniz",
    ];
    verdict(
        6,
        "the torsionless connection acts as stated and obeys the Leibniz rules",
        suite_green(Suite::Connection) && all_passed(&need),
    );
}

#[test]
fn acceptance_07_curvature() {
    let need = [
        "curvature/curvature-exact",
        "curvature/curvature-two-form",
        "curvature/curvature-left-linear",
        "curvature/curvature-right-linear",
    ];
    verdict(
        7,
        "the curvature is the stated two-form valued operator and is bilinear",
        suite_green(Suite::Curvature) && all_passed(&need),
    );
}

#[test]
fn acceptance_08_metric_incompatibility() {
    // Symbolic run: the split of the compatibility defect into its c0 and c1
    // parts, each nonzero, shows the defect vanishes only at c0 = c1 = 0.
    let symbolic = suite_green(Suite::Metric);
    // Pinned runs demonstrate the same statement pointwise.
    let mut pointwise = true;
    for (c0, c1) in [(0i64, 0i64), (1, 0), (0, 1), (2, 3)] {
        let cfg = RunConfig {
            params: ConnectionParams::torsionless(Poly::int(c0), Poly::int(c1)),
            pinned: true,
            ..RunConfig::default()
        };
        let run = run_suites(&[Suite::Metric], &cfg).expect("pinned metric run");
        let compat = run
            .checks
            .iter()
            .find(|c| c.id == "metric/metric-compatibility")
            .expect("pinned runs add the compatibility check");
        pointwise &= compat.pass == (c0 == 0 && c1 == 0);
    }
    verdict(
        8,
        "the connection is metric exactly at c0 = c1 = 0",
        symbolic && pointwise,
    );
}

#[test]
fn acceptance_09_classical_limit() {
    let need = [
        "presentations/superspace/classical/x-theta1",
        "presentations/superspace/classical/theta2-theta1",
        "presentations/superspace/classical/theta2-x",
        "presentations/superspace/classical/theta1-theta1",
        "presentations/superspace/classical/theta2-theta2",
        "matrices/r-classical-limit",
        "matrices/b-classical-limit",
        "forms/sigma-classical-limit",
        "curvature/curvature-classical-limit",
    ];
    verdict(
        9,
        "at h = 0 the geometry degenerates to the classical graded one",
        all_passed(&need),
    );
}

#[test]
fn acceptance_10_cli_and_single_fault_detection() {
    // Full verification through the real binary, with a JSON round trip.
    let out = Command::new(env!("CARGO_BIN_EXE_ncsuper"))
        .args(["verify", "--suite", "all", "--format", "json"])
        .output()
        .expect("spawn ncsuper");
    let exit_zero = out.status.code() == Some(0);
    let text = String::from_utf8(out.stdout).expect("utf-8 report");
    let report = Report::from_json(&text).expect("well-formed report");
    let round_trip = Report::from_json(&report.to_json()).expect("reparse") == report;
    let clean = report.summary.fail == 0
        && report
            .results
            .iter()
            .all(|r| r.status == "pass" && r.residual.is_empty());

    // Damage each rewrite rule in turn and insist something notices. Only the
    // damaged presentation can lose confluence (the other three are the
    // untouched audited ones), so auditing it alone is the full audit.
    let base = Algebras::build().expect("audited build");
    let mut rules = 0usize;
    let mut detected = 0usize;
    for id in [
        AlgebraId::Superspace,
        AlgebraId::Calculus,
        AlgebraId::Group,
        AlgebraId::Combined,
    ] {
        let p = base.get(id);
        for rule in &p.rules {
            rules += 1;
            let damaged = p.with_corrupted_rule(&rule.id).expect("known rule");
            if !damaged.failed_overlaps().expect("audit").is_empty() {
                detected += 1;
                continue;
            }
            let cfg = RunConfig {
                corrupt: Some((id, rule.id.clone())),
                ..RunConfig::default()
            };
            let run = run_suites(&Suite::ALL, &cfg).expect("corrupted run");
            if run.checks.iter().any(|c| !c.pass) {
                detected += 1;
            }
        }
    }
    let sweep = rules == 177 && detected == rules;

    // The exit-code contract for a corrupted rule, one rule per algebra.
    let exit_one = [
        "superspace:x-theta1",
        "calculus:dx-x",
        "group:det",
        "combined:cross/x-b",
    ]
    .iter()
    .all(|spec| {
        Command::new(env!("CARGO_BIN_EXE_ncsuper"))
            .args(["verify", "--suite", "all", "--corrupt-rule", spec])
            .output()
            .expect("spawn ncsuper")
            .status
            .code()
            == Some(1)
    });

    verdict(
        10,
        "the CLI verifies everything and every corrupted rule trips a failure",
        exit_zero && round_trip && clean && sweep && exit_one,
    );
}
