//! Exact and numeric scalar computation.

mod expr;
mod parse;
mod poly;
mod resultant;
mod roots;

use thiserror::Error;

pub use expr::{smoothstep, Compiled, Expr, Node, Prim};
pub use parse::parse_expr;
pub use poly::{int, rat, rat_from_f64, MPoly, Rational};
pub use resultant::{bareiss_determinant, discriminant_resultant, leading_coefficients, resultant, sylvester_matrix};
pub use roots::{complex_roots, complex_roots_real, horner, trim_leading, ComplexRoots, Root, RootConfig};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AlgebraError {
    #[error("no derivative rule for primitive '{0}'")]
    NoDerivativeRule(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("zero polynomial input")]
    ZeroPolynomial,
    #[error("ring error: {0}")]
    Ring(String),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
}
