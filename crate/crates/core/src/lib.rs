//! Exact symbolic engine for a Z2-graded quantum superspace and its symmetry
//! supergroup: coefficient arithmetic over Q[h,c0,c1,c2], graded term rewriting
//! to normal form, deformed R/B matrices, covariant differential calculus,
//! one-parameter families of torsionless connections, curvature, and the
//! metric-compatibility obstruction.
//!
//! Everything is exact: no floats, no numerical tolerance. An identity passes
//! only when its residual normalizes to the zero element.

pub mod algebra;
pub mod check;
pub mod cli;
pub mod coeff;
pub mod expr;
pub mod forms;
pub mod geometry;
pub mod matrix;
pub mod presentations;
pub mod report;
pub mod suites;

pub use algebra::{AlgebraId, Element, Presentation};
pub use coeff::{Poly, Rational, Symbol};
