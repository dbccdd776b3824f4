//! Command-line interface.
//!
//! Exit codes: 0 when every requested check passes, 1 when at least one
//! check fails, 2 for configuration, usage, or I/O problems. The hidden
//! --corrupt-rule flag damages one rewrite rule before verifying, for
//! demonstrating that the checks notice; its failures use exit code 1
//! like any other verification verdict.

use crate::algebra::AlgebraId;
use crate::coeff::{Poly, Symbol};
use crate::expr::{scalar_expr, Scope, Value};
use crate::forms::FormContext;
use crate::geometry::{Connection, ConnectionParams};
use crate::presentations::Algebras;
use crate::report::Report;
use crate::suites::{parse_suites, run_suites, RunConfig};
use clap::{Parser, Subcommand, ValueEnum};
use std::fs;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "ncsuper",
    version,
    about = "Exact checks for a Z2-graded quantum superspace: rewriting, braiding, \
             connections, curvature"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and report one pass/fail line per check.
    Verify {
        /// Suite to run (repeatable): presentations, matrices, covariance,
        /// forms, connection, curvature, metric, or all.
        #[arg(long = "suite", value_name = "NAME", default_value = "all")]
        suites: Vec<String>,
        /// Report format.
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write the report to this file instead of stdout.
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
        /// Pin the connection parameter c0 (scalar expression over h).
        #[arg(long, value_name = "EXPR")]
        c0: Option<String>,
        /// Pin the connection parameter c1 (scalar expression over h).
        #[arg(long, value_name = "EXPR")]
        c1: Option<String>,
        /// Damage one rewrite rule before verifying, as ALGEBRA:RULE-ID.
        #[arg(long = "corrupt-rule", value_name = "ALGEBRA:RULE", hide = true)]
        corrupt_rule: Option<String>,
    },
    /// Normalize an expression in one of the algebras.
    Normalize {
        /// Expression, e.g. "x*theta1" or "rho ox rho".
        expr: String,
        /// Algebra: superspace, calculus, group, or combined.
        #[arg(long, value_name = "NAME", default_value = "superspace")]
        algebra: String,
    },
    /// Print the curvature two-form of a one-form basis element.
    Curvature {
        /// Basis index: 1, 2, or 3.
        #[arg(long, value_name = "INDEX")]
        a: u8,
        /// Connection parameter c0 (scalar expression; symbolic by default).
        #[arg(long, value_name = "EXPR")]
        c0: Option<String>,
        /// Connection parameter c1 (scalar expression; symbolic by default).
        #[arg(long, value_name = "EXPR")]
        c1: Option<String>,
    },
    /// Apply the generalized permutation to a two-slot form tensor.
    Sigma {
        /// Expression evaluating to a two-slot tensor, e.g. "xi1 ox eta".
        expr: String,
    },
}

/// Parses std::env args and executes; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            2
        }
    }
}

fn execute(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Verify {
            suites,
            format,
            output,
            c0,
            c1,
            corrupt_rule,
        } => verify(suites, format, output, c0, c1, corrupt_rule),
        Command::Normalize { expr, algebra } => normalize(&expr, &algebra),
        Command::Curvature { a, c0, c1 } => curvature(a, c0, c1),
        Command::Sigma { expr } => sigma(&expr),
    }
}

fn pinned_params(c0: Option<String>, c1: Option<String>) -> Result<ConnectionParams, String> {
    let c0p = match c0 {
        Some(s) => scalar_expr(&s).map_err(|e| format!("--c0: {e}"))?,
        None => Poly::sym(Symbol::C0),
    };
    let c1p = match c1 {
        Some(s) => scalar_expr(&s).map_err(|e| format!("--c1: {e}"))?,
        None => Poly::sym(Symbol::C1),
    };
    Ok(ConnectionParams::torsionless(c0p, c1p))
}

fn verify(
    suites: Vec<String>,
    format: Format,
    output: Option<PathBuf>,
    c0: Option<String>,
    c1: Option<String>,
    corrupt_rule: Option<String>,
) -> Result<i32, String> {
    let requested = parse_suites(&suites)?;
    let pinned = c0.is_some() || c1.is_some();
    let params = pinned_params(c0, c1)?;
    let corrupt = match corrupt_rule {
        None => None,
        Some(s) => {
            let (alg, rule) = s
                .split_once(':')
                .ok_or("--corrupt-rule expects ALGEBRA:RULE-ID")?;
            let id = AlgebraId::from_name(alg).ok_or_else(|| {
                format!("unknown algebra '{alg}'; valid: superspace, calculus, group, combined")
            })?;
            Some((id, rule.to_string()))
        }
    };
    let cfg = RunConfig {
        params,
        pinned,
        corrupt,
    };
    let outcome = run_suites(&requested, &cfg).map_err(|e| e.to_string())?;
    let report = Report::from_checks(outcome.suites.clone(), &outcome.checks);
    let rendered = match format {
        Format::Text => report.to_text(&outcome.notes),
        Format::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
    };
    match output {
        Some(path) => fs::write(&path, &rendered)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(if report.all_pass() { 0 } else { 1 })
}

fn normalize(expr: &str, algebra: &str) -> Result<i32, String> {
    let id = AlgebraId::from_name(algebra).ok_or_else(|| {
        format!("unknown algebra '{algebra}'; valid: superspace, calculus, group, combined")
    })?;
    let algebras = Algebras::build().map_err(|e| e.to_string())?;
    let text = if id == AlgebraId::Superspace {
        let ctx = FormContext::superspace(&algebras).map_err(|e| e.to_string())?;
        let scope = Scope::over_forms(&ctx);
        let v = scope.eval(expr).map_err(|e| e.to_string())?;
        scope.render(&v)
    } else {
        let scope = Scope::plain(algebras.get(id));
        let v = scope.eval(expr).map_err(|e| e.to_string())?;
        scope.render(&v)
    };
    println!("{text}");
    Ok(0)
}

fn curvature(a: u8, c0: Option<String>, c1: Option<String>) -> Result<i32, String> {
    if !(1..=3).contains(&a) {
        return Err("--a must be 1, 2, or 3".to_string());
    }
    let params = pinned_params(c0, c1)?;
    let algebras = Algebras::build().map_err(|e| e.to_string())?;
    let ctx = FormContext::superspace(&algebras).map_err(|e| e.to_string())?;
    let conn = Connection::new(&ctx, params).map_err(|e| e.to_string())?;
    let w = conn.curvature(a - 1).map_err(|e| e.to_string())?;
    println!("{}", ctx.format_wedge_tensor(&w));
    Ok(0)
}

fn sigma(expr: &str) -> Result<i32, String> {
    let algebras = Algebras::build().map_err(|e| e.to_string())?;
    let ctx = FormContext::superspace(&algebras).map_err(|e| e.to_string())?;
    let scope = Scope::over_forms(&ctx);
    match scope.eval(expr).map_err(|e| e.to_string())? {
        Value::Tens(t) if t.slots == 2 => {
            let s = ctx.sigma_at(&t, 0).map_err(|e| e.to_string())?;
            println!("{}", ctx.format_tensor(&s));
            Ok(0)
        }
        v => Err(format!(
            "sigma expects a two-slot form tensor such as 'xi1 ox eta', got {}",
            v.kind()
        )),
    }
}
