//! Numerical braid monodromy of the critical values `η` of `f_{m,k}(ξ, η, 0)`
//! as `ξ` runs once around `|ξ| = ε`.

mod extract;
mod track;
mod verify;

use thiserror::Error;

use crate::algebra::{int, AlgebraError, MPoly};

pub use extract::{extract_braid, path_permutation, CrossingEvent, Extraction, MAX_PERTURBATIONS};
pub use track::{check_circle, track, RootPaths, TrackConfig, ETA, XI};
pub use verify::{expected_word, verify_monodromy, MonodromyConfig, MonodromyReport};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MonodromyError {
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error("η-discriminant has a root at distance {distance:.3e} from |ξ| = {eps}")]
    DiscriminantOnCircle { eps: f64, distance: f64 },
    #[error("polynomial is not square-free in η")]
    NotSquareFree,
    #[error("leading η-coefficient depends on ξ")]
    NonConstantLeading,
    #[error("roots collide or cannot be separated near θ = {0}")]
    Collision(f64),
    #[error("θ-refinement exceeded {0} samples")]
    StepCap(usize),
    #[error("projection stays non-generic after perturbation: {0}")]
    NonGeneric(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Validates `(m, k)` for the two families `f_{1,(k₁)}` and `f_{2,(k₁,k₂)}`.
pub fn validate_mk(m: usize, k: &[u32]) -> Result<(), MonodromyError> {
    match (m, k.len()) {
        (1, 1) if k[0] > 0 => Ok(()),
        (2, 2) if k[0] + k[1] > 0 => Ok(()),
        (1 | 2, _) => Err(MonodromyError::Unsupported(format!("invalid exponents {k:?} for m = {m}"))),
        _ => Err(MonodromyError::Unsupported(format!("m = {m} (only 1 and 2)"))),
    }
}

/// `f_{m,k}(ξ, η, 0)` expanded exactly in the ring `(ξ, η)`:
///
/// * `m = 1`: `(η − 2ξ²)(η² + 2ξ²η + ξ⁴ − ξ^{4+k₁})`
/// * `m = 2`: `((ξ+η)² − ξ^{2+k₁})((ξ−η)² + ξ^{2+k₂})`
pub fn critical_value_polynomial(m: usize, k: &[u32]) -> Result<MPoly, MonodromyError> {
    validate_mk(m, k)?;
    let v = [XI, ETA];
    let x = MPoly::var(&v, XI)?;
    let y = MPoly::var(&v, ETA)?;
    let c = |n: i64| MPoly::constant(&v, int(n));
    Ok(if m == 1 {
        let x2 = x.pow(2);
        (&y - &(&c(2) * &x2)) * (y.pow(2) + &(&c(2) * &x2) * &y + x.pow(4) - x.pow(4 + k[0]))
    } else {
        ((&x + &y).pow(2) - x.pow(2 + k[0])) * ((&x - &y).pow(2) + x.pow(2 + k[1]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{complex_roots, RootConfig};
    use num_complex::Complex64;

    #[test]
    fn m1_roots_match_closed_form() {
        let p = critical_value_polynomial(1, &[1]).unwrap();
        assert_eq!(p.degree_in(ETA).unwrap(), Some(3));
        let xi = 0.1f64;
        let c = p.univariate_complex(ETA, &[(XI, Complex64::new(xi, 0.0))]).unwrap();
        let r = complex_roots(&c, &RootConfig::default()).unwrap().values();
        let mut expect = [-xi * xi - xi.powf(2.5), -xi * xi + xi.powf(2.5), 2.0 * xi * xi];
        expect.sort_by(f64::total_cmp);
        for (z, e) in r.iter().zip(expect) {
            assert!((z.re - e).abs() < 1e-14 && z.im.abs() < 1e-14, "{z} vs {e}");
        }
    }

    #[test]
    fn m2_is_quartic() {
        let p = critical_value_polynomial(2, &[1, 1]).unwrap();
        assert_eq!(p.degree_in(ETA).unwrap(), Some(4));
    }

    #[test]
    fn m1_discriminant_clear_of_circle() {
        let p = critical_value_polynomial(1, &[1]).unwrap();
        assert!(check_circle(&p, 0.3, 1e-3).is_ok());
    }

    #[test]
    fn invalid_parameters() {
        assert!(critical_value_polynomial(3, &[1, 1, 1]).is_err());
        assert!(critical_value_polynomial(1, &[0]).is_err());
        assert!(critical_value_polynomial(2, &[0, 0]).is_err());
        assert!(critical_value_polynomial(2, &[1, 0]).is_ok());
    }
}
