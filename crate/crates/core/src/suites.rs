//! Suite inventory and runner.
//!
//! Seven named suites partition every check in the crate. The runner builds
//! the presentations once (optionally with one rule damaged), executes the
//! requested suites in order, and returns a flat check list plus free-text
//! notes. A confluence failure of a damaged build is itself reported as a
//! failing presentations check, because detecting damage is exit-code
//! behavior, not an internal error.

use crate::algebra::{AlgebraError, AlgebraId, Element, Presentation, Word};
use crate::check::Check;
use crate::coeff::Poly;
use crate::forms::{form_checks, FormContext, FormError, Tensor};
use crate::geometry::{
    connection_checks, curvature_checks, metric_compat_check, metric_theorem_checks,
    sigma_metric_note, ConnectionParams,
};
use crate::matrix::{matrix_checks, rtt_check};
use crate::presentations::{
    classical_limit_theorems, counit_collapse, group_theorems, j_matrix, relation_checks,
    Algebras, BuildError, Coaction, TheoremCheck, CAL_SHIFT,
};
use std::fmt;

// ---------------------------------------------------------------------------
// suite names

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Presentations,
    Matrices,
    Covariance,
    Forms,
    Connection,
    Curvature,
    Metric,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Presentations,
        Suite::Matrices,
        Suite::Covariance,
        Suite::Forms,
        Suite::Connection,
        Suite::Curvature,
        Suite::Metric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Presentations => "presentations",
            Suite::Matrices => "matrices",
            Suite::Covariance => "covariance",
            Suite::Forms => "forms",
            Suite::Connection => "connection",
            Suite::Curvature => "curvature",
            Suite::Metric => "metric",
        }
    }

    pub fn parse(name: &str) -> Option<Suite> {
        Suite::ALL.iter().copied().find(|s| s.name() == name)
    }
}

/// Expands "all", validates names, and deduplicates preserving request order.
pub fn parse_suites(names: &[String]) -> Result<Vec<Suite>, String> {
    if names.is_empty() {
        return Err("no suites requested".to_string());
    }
    if names.iter().any(|n| n == "all") {
        return Ok(Suite::ALL.to_vec());
    }
    let mut out: Vec<Suite> = Vec::new();
    for name in names {
        let suite = Suite::parse(name).ok_or_else(|| {
            format!(
                "unknown suite '{name}'; valid suites: all, {}",
                Suite::ALL.map(Suite::name).join(", ")
            )
        })?;
        if !out.contains(&suite) {
            out.push(suite);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// errors and configuration

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SuiteError {
    /// The request itself is invalid (unknown rule id, bad input).
    Config(String),
    /// An internal operation failed; not a verification verdict.
    Engine(String),
}

impl fmt::Display for SuiteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuiteError::Config(m) => write!(f, "{m}"),
            SuiteError::Engine(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<AlgebraError> for SuiteError {
    fn from(e: AlgebraError) -> SuiteError {
        SuiteError::Engine(e.to_string())
    }
}

impl From<FormError> for SuiteError {
    fn from(e: FormError) -> SuiteError {
        SuiteError::Engine(e.to_string())
    }
}

/// What to verify and against which connection parameters.
pub struct RunConfig {
    pub params: ConnectionParams,
    /// True when the caller pinned c0/c1; adds the metric compatibility
    /// check at those parameters to the metric suite.
    pub pinned: bool,
    /// Damage one rule of one presentation before running.
    pub corrupt: Option<(AlgebraId, String)>,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            params: ConnectionParams::symbolic_torsionless(),
            pinned: false,
            corrupt: None,
        }
    }
}

/// Everything a report needs: the suites that ran, their checks, and notes.
pub struct RunOutcome {
    pub suites: Vec<String>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

// ---------------------------------------------------------------------------
// runner

pub fn run_suites(requested: &[Suite], cfg: &RunConfig) -> Result<RunOutcome, SuiteError> {
    let suites: Vec<String> = requested.iter().map(|s| s.name().to_string()).collect();
    let algebras = match &cfg.corrupt {
        None => Algebras::build().map_err(|e| SuiteError::Engine(e.to_string()))?,
        Some((id, rule_id)) => match Algebras::build_corrupted(*id, rule_id) {
            Ok(a) => a,
            Err(BuildError::NotConfluent { algebra, failures }) => {
                let check = confluence_failure_check(*id, rule_id, algebra, &failures)?;
                return Ok(RunOutcome {
                    suites,
                    checks: vec![check],
                    notes: vec![format!(
                        "the {} presentation lost confluence; remaining suites were skipped",
                        algebra.name()
                    )],
                });
            }
            Err(BuildError::Algebra(AlgebraError::UnknownRule { rule })) => {
                return Err(SuiteError::Config(format!(
                    "unknown rule id '{rule}' in the {} presentation",
                    id.name()
                )))
            }
            Err(BuildError::Algebra(e)) => return Err(e.into()),
        },
    };

    let mut checks = Vec::new();
    let mut notes = Vec::new();
    for suite in requested {
        match suite {
            Suite::Presentations => checks.extend(presentations_suite(&algebras)?),
            Suite::Matrices => {
                for c in matrix_checks(&algebras)? {
                    checks.push(suite_check("matrices", c));
                }
            }
            Suite::Covariance => checks.extend(covariance_suite(&algebras)?),
            Suite::Forms => {
                for c in form_checks(&algebras)? {
                    checks.push(suite_check("forms", c));
                }
            }
            Suite::Connection => {
                for c in connection_checks(&algebras, &cfg.params)? {
                    checks.push(suite_check("connection", c));
                }
            }
            Suite::Curvature => {
                for c in curvature_checks(&algebras, &cfg.params)? {
                    checks.push(suite_check("curvature", c));
                }
            }
            Suite::Metric => {
                for c in metric_theorem_checks(&algebras)? {
                    checks.push(suite_check("metric", c));
                }
                if cfg.pinned {
                    checks.push(suite_check(
                        "metric",
                        metric_compat_check(&algebras, &cfg.params)?,
                    ));
                }
                notes.push(sigma_metric_note(&algebras)?);
            }
        }
    }
    Ok(RunOutcome {
        suites,
        checks,
        notes,
    })
}

/// Final check ids are "{suite}/{local}"; a family that already carries its
/// suite prefix (the matrix checks) is re-homed when run under another suite.
fn suite_check(suite: &str, c: Check) -> Check {
    let local = c.id.strip_prefix("matrices/").unwrap_or(&c.id).to_string();
    Check {
        id: format!("{suite}/{local}"),
        ..c
    }
}

fn theorem_check(suite: &str, p: &Presentation, tc: TheoremCheck) -> Check {
    let pass = tc.residual.is_zero();
    Check::new(
        format!("{suite}/{}", tc.id),
        tc.anchor,
        pass,
        p.format_element(&tc.residual),
    )
}

/// Renders the first unresolved overlap of a damaged build as a failing
/// presentations check. The damaged presentation is rebuilt without the
/// audit so the offending words can be printed with generator names.
fn confluence_failure_check(
    id: AlgebraId,
    rule_id: &str,
    algebra: AlgebraId,
    failures: &[crate::algebra::Overlap],
) -> Result<Check, SuiteError> {
    let unaudited = Algebras::build_unaudited()?;
    let p = if algebra == id {
        unaudited.get(id).with_corrupted_rule(rule_id)?
    } else {
        unaudited.get(algebra).clone()
    };
    let first = failures.first().expect("at least one failed overlap");
    let residual = format!(
        "overlap {} resolves two ways: rule {} gives {}, rule {} gives {}",
        p.format_word(&first.word),
        first.left_rule,
        p.format_element(&first.left_nf),
        first.right_rule,
        p.format_element(&first.right_nf),
    );
    Ok(Check::new(
        format!("presentations/confluence/{}", algebra.name()),
        "every three-letter overlap of the rewrite rules reduces to one normal form",
        false,
        residual,
    ))
}

// ---------------------------------------------------------------------------
// presentations suite

fn presentations_suite(a: &Algebras) -> Result<Vec<Check>, SuiteError> {
    let mut out = Vec::new();
    // Reaching this point means the build's overlap audit already passed.
    for p in a.all() {
        out.push(Check::new(
            format!("presentations/confluence/{}", p.id.name()),
            "every three-letter overlap of the rewrite rules reduces to one normal form",
            true,
            "0",
        ));
    }
    for p in a.all() {
        for tc in relation_checks(p)? {
            out.push(theorem_check("presentations", p, tc));
        }
    }
    for tc in group_theorems(&a.group)? {
        out.push(theorem_check("presentations", &a.group, tc));
    }
    for tc in classical_limit_theorems(&a.superspace) {
        out.push(theorem_check("presentations", &a.superspace, tc));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// covariance suite

fn raw_element(id: AlgebraId, terms: &[(Word, Poly)]) -> Element {
    let mut out = Element::zero(id);
    for (w, c) in terms {
        let t = Element::with_term(id, w.clone(), c.clone());
        out = out.add(&t).expect("same algebra");
    }
    out
}

/// Re-interprets a calculus element inside the combined algebra.
fn embed_calculus(combined: &Presentation, e: &Element) -> Result<Element, AlgebraError> {
    let chain: Vec<(Word, Poly)> = e
        .terms
        .iter()
        .map(|(w, c)| (w.iter().map(|g| g + CAL_SHIFT).collect(), c.clone()))
        .collect();
    combined.normalize_terms(chain)
}

/// The invariant one-form as a calculus element: sum J_ab X^a Xi^b.
fn rho_calculus(cal: &Presentation) -> Result<Element, AlgebraError> {
    let mut chain = Vec::new();
    for (a, row) in j_matrix().iter().enumerate() {
        for (b, c) in row.iter().enumerate() {
            if !c.is_zero() {
                chain.push((vec![3 + a as u8, b as u8], c.clone()));
            }
        }
    }
    cal.normalize_terms(chain)
}

/// The invariant length x^2 - 2 theta1 theta2 as a calculus element.
fn phi_calculus(cal: &Presentation) -> Result<Element, AlgebraError> {
    let xx = cal.word_of(&["x", "x"])?;
    let tt = cal.word_of(&["theta1", "theta2"])?;
    xx.sub(&tt.scale(&Poly::int(2)))
}

/// Covariance under the supergroup coaction: the primed images satisfy the
/// calculus relations, the invariant tensors are fixed, and the counit
/// collapses the coaction back to the identity.
fn covariance_suite(a: &Algebras) -> Result<Vec<Check>, SuiteError> {
    let mut out = Vec::new();
    for which in 1..=4u8 {
        out.push(suite_check("covariance", rtt_check(&a.group, which)?));
    }

    let co = Coaction::new(a)?;

    // Every calculus relation holds with every generator replaced by its
    // coaction image; the combined algebra does the reduction, so a damaged
    // calculus rule cannot certify itself here.
    for r in &a.calculus.rules {
        let lhs = Element::with_term(AlgebraId::Calculus, r.lhs.to_vec(), Poly::one());
        let rhs = raw_element(AlgebraId::Calculus, &r.rhs);
        let diff = lhs.sub(&rhs)?;
        let image = co.apply(&a.combined, &diff)?;
        out.push(Check::new(
            format!("covariance/primed/{}", r.id),
            format!(
                "Delta({}) = Delta({})",
                a.calculus.format_element(&lhs),
                a.calculus.format_element(&rhs)
            ),
            image.is_zero(),
            a.combined.format_element(&image),
        ));
    }

    let rho = rho_calculus(&a.calculus)?;
    let phi = phi_calculus(&a.calculus)?;
    for (name, anchor, e) in [
        (
            "invariant-one-form",
            "Delta(theta1 xi2 + x eta - theta2 xi1 - (h/2) theta2 xi2) = 1 ox rho",
            &rho,
        ),
        (
            "invariant-length",
            "Delta(x^2 - 2 theta1 theta2) = 1 ox (x^2 - 2 theta1 theta2)",
            &phi,
        ),
    ] {
        let image = co.apply(&a.combined, e)?;
        let embedded = embed_calculus(&a.combined, e)?;
        let diff = image.sub(&embedded)?;
        out.push(Check::new(
            format!("covariance/{name}"),
            anchor,
            diff.is_zero(),
            a.combined.format_element(&diff),
        ));
    }

    // The invariant two-tensor, checked at the tensor level over the
    // combined coefficients: Lambda built from primed one-forms equals
    // Lambda built from the plain ones.
    let ctx = FormContext::combined(a)?;
    let mut primed = Vec::with_capacity(3);
    for l in 0..3usize {
        primed.push(ctx.elem_to_tensor(&co.images[l], 1)?);
    }
    let j = j_matrix();
    let mut lhs = Tensor::zero(a.combined.id, 2);
    for (ai, row) in j.iter().enumerate() {
        for (bi, c) in row.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let pair = ctx.tensor(&primed[ai], &primed[bi])?;
            lhs = lhs.add(&pair.scale(c))?;
        }
    }
    let diff = lhs.sub(&ctx.lambda())?;
    out.push(Check::new(
        "covariance/invariant-two-tensor",
        "sum J_ab Xi'^a ox Xi'^b = sum J_ab Xi^a ox Xi^b",
        diff.is_zero(),
        ctx.format_tensor(&diff),
    ));

    let mut residual = None;
    for g in 0..9u8 {
        let back = counit_collapse(&co.images[g as usize]);
        let expect = Element::generator(AlgebraId::Calculus, g);
        let d = back.sub(&expect)?;
        if !d.is_zero() {
            residual = Some(format!(
                "{}: {}",
                a.calculus.table.name(g),
                a.calculus.format_element(&d)
            ));
            break;
        }
    }
    out.push(Check::new(
        "covariance/counit-collapse",
        "(eps ox id) Delta = id on the calculus generators",
        residual.is_none(),
        residual.unwrap_or_else(|| "0".to_string()),
    ));

    Ok(out)
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;

    #[test]
    fn suite_names_parse_and_dedupe() {
        let all = parse_suites(&["all".to_string()]).unwrap();
        assert_eq!(all.len(), 7);
        let two = parse_suites(&[
            "metric".to_string(),
            "forms".to_string(),
            "metric".to_string(),
        ])
        .unwrap();
        assert_eq!(two, vec![Suite::Metric, Suite::Forms]);
        assert!(parse_suites(&[]).is_err());
        let err = parse_suites(&["nope".to_string()]).unwrap_err();
        assert!(err.contains("nope") && err.contains("covariance"), "{err}");
    }

    #[test]
    fn every_suite_is_green_by_default() {
        let run = run_suites(&Suite::ALL, &RunConfig::default()).unwrap();
        let failed: Vec<&Check> = run.checks.iter().filter(|c| !c.pass).collect();
        assert!(
            failed.is_empty(),
            "failing checks: {:?}",
            failed.iter().map(|c| &c.id).collect::<Vec<_>>()
        );
        assert!(run.checks.len() > 250, "found {}", run.checks.len());
        for id in [
            "presentations/confluence/combined",
            "matrices/rtt-supergroup",
            "covariance/rtt-coordinates",
            "covariance/invariant-two-tensor",
            "forms/d-squared",
            "connection/torsion-free",
            "curvature/curvature-exact",
            "metric/metric-incompatibility",
        ] {
            assert!(
                run.checks.iter().any(|c| c.id == id),
                "missing check id {id}"
            );
        }
        assert_eq!(run.notes.len(), 1);
        assert!(run.notes[0].contains("sigma"), "{}", run.notes[0]);
    }

    #[test]
    fn pinned_parameters_add_the_compatibility_check() {
        let cfg = RunConfig {
            params: ConnectionParams::torsionless(
                Poly::one(),
                Poly::zero(),
            ),
            pinned: true,
            corrupt: None,
        };
        let run = run_suites(&[Suite::Metric], &cfg).unwrap();
        let failed: Vec<&Check> = run.checks.iter().filter(|c| !c.pass).collect();
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].id, "metric/metric-compatibility");
        assert!(!failed[0].residual.is_empty());

        let origin = RunConfig {
            params: ConnectionParams::torsionless(Poly::zero(), Poly::zero()),
            pinned: true,
            corrupt: None,
        };
        let run = run_suites(&[Suite::Metric], &origin).unwrap();
        assert!(run.checks.iter().all(|c| c.pass));
    }

    #[test]
    fn corruption_fails_even_when_presentations_not_requested() {
        // theta2^2 -> 1 breaks confluence, and the confluence gate runs
        // before any requested suite, so the failure surfaces even though
        // only the covariance suite was asked for.
        let cfg = RunConfig {
            corrupt: Some((AlgebraId::Superspace, "theta2-theta2".to_string())),
            ..RunConfig::default()
        };
        let run = run_suites(&[Suite::Covariance], &cfg).unwrap();
        let failed: Vec<&Check> = run.checks.iter().filter(|c| !c.pass).collect();
        assert_eq!(failed.len(), 1, "corruption went unnoticed");
        assert_eq!(failed[0].id, "presentations/confluence/superspace");
    }

    #[test]
    fn nonconfluent_corruption_reports_the_overlap() {
        let cfg = RunConfig {
            corrupt: Some((AlgebraId::Group, "det".to_string())),
            ..RunConfig::default()
        };
        let run = run_suites(&[Suite::Presentations], &cfg).unwrap();
        let failed: Vec<&Check> = run.checks.iter().filter(|c| !c.pass).collect();
        assert_eq!(failed.len(), 1, "expected one confluence failure");
        assert_eq!(failed[0].id, "presentations/confluence/group");
        assert!(failed[0].residual.contains("overlap"), "{}", failed[0].residual);
    }

    #[test]
    fn unknown_rule_is_a_config_error() {
        let cfg = RunConfig {
            corrupt: Some((AlgebraId::Superspace, "no-such-rule".to_string())),
            ..RunConfig::default()
        };
        match run_suites(&[Suite::Presentations], &cfg) {
            Err(SuiteError::Config(m)) => assert!(m.contains("no-such-rule"), "{m}"),
            other => panic!("expected a config error, got {:?}", other.map(|r| r.checks.len())),
        }
    }

    #[test]
    fn rational_parameters_run_cleanly() {
        let cfg = RunConfig {
            params: ConnectionParams::torsionless(
                Poly::one().scale(&rat(2, 3)),
                Poly::h().neg(),
            ),
            pinned: false,
            corrupt: None,
        };
        let run = run_suites(&[Suite::Connection, Suite::Curvature], &cfg).unwrap();
        assert!(run.checks.iter().all(|c| c.pass));
    }
}
