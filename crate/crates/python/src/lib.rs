//! Python bindings. One `Engine` instance holds the four audited
//! presentations; its methods mirror the CLI subcommands and return
//! display strings (or a JSON report for `verify`).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ncsuper::algebra::{AlgebraId, Element};
use ncsuper::coeff::{Poly, Symbol};
use ncsuper::expr::{scalar_expr, Scope, Value};
use ncsuper::forms::FormContext;
use ncsuper::geometry::{Connection, ConnectionParams};
use ncsuper::presentations::Algebras;
use ncsuper::report::Report;
use ncsuper::suites::{parse_suites, run_suites, RunConfig};

fn value_error<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn algebra_id(name: &str) -> PyResult<AlgebraId> {
    AlgebraId::from_name(name).ok_or_else(|| {
        value_error(format!(
            "unknown algebra '{name}'; valid: superspace, calculus, group, combined"
        ))
    })
}

fn scalar_or_symbol(text: Option<&str>, fallback: Symbol) -> PyResult<Poly> {
    match text {
        Some(s) => scalar_expr(s).map_err(value_error),
        None => Ok(Poly::sym(fallback)),
    }
}

/// The four presentations, built and confluence-audited once.
#[pyclass]
struct Engine {
    algebras: Algebras,
}

#[pymethods]
impl Engine {
    #[new]
    fn new() -> PyResult<Engine> {
        let algebras = Algebras::build().map_err(value_error)?;
        Ok(Engine { algebras })
    }

    /// Normal form of an expression, e.g. normalize("x*theta1").
    /// In the superspace the form generators xi1, eta, xi2, rho, Lambda,
    /// and phi are in scope as well.
    #[pyo3(signature = (expr, algebra = "superspace"))]
    fn normalize(&self, expr: &str, algebra: &str) -> PyResult<String> {
        let id = algebra_id(algebra)?;
        if id == AlgebraId::Superspace {
            let ctx = FormContext::superspace(&self.algebras).map_err(value_error)?;
            let scope = Scope::over_forms(&ctx);
            let v = scope.eval(expr).map_err(value_error)?;
            Ok(scope.render(&v))
        } else {
            let scope = Scope::plain(self.algebras.get(id));
            let v = scope.eval(expr).map_err(value_error)?;
            Ok(scope.render(&v))
        }
    }

    /// Generalized permutation of a two-slot form tensor,
    /// e.g. sigma("xi1 ox eta").
    fn sigma(&self, expr: &str) -> PyResult<String> {
        let ctx = FormContext::superspace(&self.algebras).map_err(value_error)?;
        let scope = Scope::over_forms(&ctx);
        match scope.eval(expr).map_err(value_error)? {
            Value::Tens(t) if t.slots == 2 => {
                let s = ctx.sigma_at(&t, 0).map_err(value_error)?;
                Ok(ctx.format_tensor(&s))
            }
            _ => Err(value_error(
                "sigma expects a two-slot form tensor such as 'xi1 ox eta'",
            )),
        }
    }

    /// Curvature two-form of the a-th one-form basis element (a = 1, 2, 3),
    /// for the torsionless connection with the given parameters (symbolic
    /// when omitted).
    #[pyo3(signature = (a, c0 = None, c1 = None))]
    fn curvature(&self, a: u8, c0: Option<&str>, c1: Option<&str>) -> PyResult<String> {
        if !(1..=3).contains(&a) {
            return Err(value_error("a must be 1, 2, or 3"));
        }
        let params = ConnectionParams::torsionless(
            scalar_or_symbol(c0, Symbol::C0)?,
            scalar_or_symbol(c1, Symbol::C1)?,
        );
        let ctx = FormContext::superspace(&self.algebras).map_err(value_error)?;
        let conn = Connection::new(&ctx, params).map_err(value_error)?;
        let w = conn.curvature(a - 1).map_err(value_error)?;
        Ok(ctx.format_wedge_tensor(&w))
    }

    /// Runs verification suites and returns the JSON report. Pinning c0 or
    /// c1 adds the metric-compatibility check, as on the command line.
    #[pyo3(signature = (suites = None, c0 = None, c1 = None))]
    fn verify(
        &self,
        suites: Option<Vec<String>>,
        c0: Option<&str>,
        c1: Option<&str>,
    ) -> PyResult<String> {
        let requested = suites.unwrap_or_else(|| vec!["all".to_string()]);
        let requested = parse_suites(&requested).map_err(value_error)?;
        let pinned = c0.is_some() || c1.is_some();
        let params = ConnectionParams::torsionless(
            scalar_or_symbol(c0, Symbol::C0)?,
            scalar_or_symbol(c1, Symbol::C1)?,
        );
        let cfg = RunConfig {
            params,
            pinned,
            corrupt: None,
        };
        let outcome = run_suites(&requested, &cfg).map_err(value_error)?;
        let report = Report::from_checks(outcome.suites.clone(), &outcome.checks);
        Ok(report.to_json())
    }

    /// The rewrite rules of one presentation as (id, lhs, rhs) display
    /// triples.
    fn rules(&self, algebra: &str) -> PyResult<Vec<(String, String, String)>> {
        let id = algebra_id(algebra)?;
        let p = self.algebras.get(id);
        let mut out = Vec::with_capacity(p.rules.len());
        for rule in &p.rules {
            let lhs = p.format_word(&rule.lhs);
            let mut rhs = Element::zero(id);
            for (word, coeff) in &rule.rhs {
                let term = Element::with_term(id, word.clone(), coeff.clone());
                rhs = rhs.add(&term).map_err(value_error)?;
            }
            out.push((rule.id.clone(), lhs, p.format_element(&rhs)));
        }
        Ok(out)
    }
}

#[pymodule]
fn ncsuper_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Engine>()?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
