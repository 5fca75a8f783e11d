//! Explicit contact-geometric models: the deformation family `α_t`, the
//! Anosov cylinder, characteristic foliations, the modified contactization
//! and the plastikstufe identity.
//!
//! Orientation convention throughout: the coordinate order of each chart
//! fixes the orientation, and "positive" means positive against its
//! coordinate volume form.

mod anosov;
mod charfol;
mod contactization;
mod family;
mod plastikstufe;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::forms::FormsError;
use crate::sl2::Sl2Error;

pub use anosov::{
    anosov_chart, boundary_contact_form, build_anosov_cylinder, liouville_field_at, verify_anosov, AnosovCylinder,
    AnosovReport,
};
pub use charfol::{
    characteristic_field, charfol_report, check_characteristic, disk_model, proportionality, Boundary, CharFolConfig,
    CharFolReport, CharacteristicCheck, DiskModel, SingularPoint, Tangency, CHARACTERISTIC_TOL,
};
pub use contactization::{contactization_form, verify_contactization, ContactizationReport};
pub use family::{
    build_family, build_family_unchecked, family_chart, proof_coefficient, validate_cutoffs, verify_family, CutoffSpec,
    CutoffViolation, Cutoffs, FamilyConfig, FamilyReport, FamilyStep, INTEGRABILITY_TOL, MIN_NORM, PROOF_TOL,
};
pub use plastikstufe::{plastikstufe_antiderivative, verify_plastikstufe, GSpec, PlastikstufeReport};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ContactError {
    #[error("invalid cutoffs: {}", fmt_violations(.0))]
    Cutoffs(Vec<CutoffViolation>),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("degenerate: {0}")]
    Degenerate(String),
    #[error("volume form vanishes at {0:?}")]
    VanishingVolume(Vec<f64>),
    #[error("form is not contact: {0}")]
    NotContact(String),
    #[error("singular points are not isolated: {0}")]
    NonIsolated(String),
    #[error(transparent)]
    Forms(#[from] FormsError),
    #[error(transparent)]
    Sl2(#[from] Sl2Error),
}

impl From<AlgebraError> for ContactError {
    fn from(e: AlgebraError) -> Self {
        ContactError::Forms(FormsError::Algebra(e))
    }
}

fn fmt_violations(v: &[CutoffViolation]) -> String {
    v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("; ")
}

/// Worst sampled value of a check together with where it occurred.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extremum {
    pub value: f64,
    pub at: Vec<f64>,
}

impl Extremum {
    fn min_of(values: impl IntoIterator<Item = (f64, Vec<f64>)>) -> Extremum {
        values.into_iter().fold(Extremum { value: f64::INFINITY, at: Vec::new() }, |best, (v, p)| {
            if v < best.value {
                Extremum { value: v, at: p }
            } else {
                best
            }
        })
    }

    fn max_of(values: impl IntoIterator<Item = (f64, Vec<f64>)>) -> Extremum {
        values.into_iter().fold(Extremum { value: f64::NEG_INFINITY, at: Vec::new() }, |best, (v, p)| {
            if v > best.value {
                Extremum { value: v, at: p }
            } else {
                best
            }
        })
    }
}

fn loc(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|v| format!("{v:.6}")).collect();
    format!("({})", parts.join(", "))
}
