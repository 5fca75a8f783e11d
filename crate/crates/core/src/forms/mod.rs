//! Exterior calculus over single named coordinate charts.

mod chart;
mod form;
mod positivity;

use thiserror::Error;

use crate::algebra::AlgebraError;

pub use chart::{Chart, Coord};
pub use form::{CompiledForm, DiffForm, FormJson, TermJson, VectorFieldExpr};
pub use positivity::{check_positive, PointError, Positivity, PositivityReport, DEFAULT_POSITIVITY_MARGIN};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FormsError {
    #[error("chart error: {0}")]
    Chart(String),
    #[error("forms live on different charts")]
    ChartMismatch,
    #[error("degree error: {0}")]
    Degree(String),
    #[error("map error: {0}")]
    Map(String),
    #[error("sampling error: {0}")]
    Sampling(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
