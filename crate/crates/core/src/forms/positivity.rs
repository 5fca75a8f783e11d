use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::form::DiffForm;
use super::FormsError;

pub const DEFAULT_POSITIVITY_MARGIN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Positivity {
    Positive,
    NotPositive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointError {
    pub point: Vec<f64>,
    pub message: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PositivityReport {
    pub samples: usize,
    pub margin: f64,
    pub min_value: f64,
    pub argmin: Vec<f64>,
    pub verdict: Positivity,
    pub errors: Vec<PointError>,
}

/// Samples the coefficient of a top-degree form against the chart's
/// reference volume (coordinate order; `r dr ^ dtheta` on polar pairs, where
/// the `r = 0` value is the radial derivative of the coefficient).
pub fn check_positive(form: &DiffForm, samples: &[Vec<f64>], margin: f64) -> Result<PositivityReport, FormsError> {
    if samples.is_empty() {
        return Err(FormsError::Sampling("empty sample grid".into()));
    }
    let chart = form.chart().clone();
    let coeff = form.top_coefficient()?;
    let names = chart.names();
    let value = coeff.compile(&names)?;
    let polar = match chart.polar() {
        Some((ir, _)) => Some((ir, coeff.diff(chart.name(ir))?.compile(&names)?)),
        None => None,
    };
    let results: Vec<Result<f64, String>> = samples
        .par_iter()
        .map(|p| {
            let v = match &polar {
                Some((ir, d)) if p[*ir] == 0.0 => d.eval(p),
                Some((ir, _)) => value.eval(p).map(|v| v / p[*ir]),
                None => value.eval(p),
            };
            v.map_err(|e| e.to_string())
        })
        .collect();
    let mut min_value = f64::INFINITY;
    let mut argmin = Vec::new();
    let mut errors = Vec::new();
    for (p, r) in samples.iter().zip(results) {
        match r {
            Ok(v) if v < min_value => {
                min_value = v;
                argmin = p.clone();
            }
            Ok(_) => {}
            Err(message) => errors.push(PointError { point: p.clone(), message }),
        }
    }
    let verdict = if errors.is_empty() && min_value > margin { Positivity::Positive } else { Positivity::NotPositive };
    Ok(PositivityReport { samples: samples.len(), margin, min_value, argmin, verdict, errors })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::Expr;
    use crate::forms::Chart;

    #[test]
    fn volume_form_is_positive() {
        let c = Arc::new(Chart::new(&["x", "y", "z"]).unwrap());
        let rep = check_positive(&DiffForm::volume(&c), &c.grid(4), DEFAULT_POSITIVITY_MARGIN).unwrap();
        assert_eq!(rep.verdict, Positivity::Positive);
        assert_eq!(rep.min_value, 1.0);
    }

    #[test]
    fn zero_form_is_not_positive() {
        let c = Arc::new(Chart::new(&["a", "b", "c", "d", "e"]).unwrap());
        let rep = check_positive(&DiffForm::zero(&c, 5), &c.grid(2), DEFAULT_POSITIVITY_MARGIN).unwrap();
        assert_eq!(rep.verdict, Positivity::NotPositive);
        assert_eq!(rep.min_value, 0.0);
    }

    #[test]
    fn reports_argmin_and_domain_errors() {
        let c = Arc::new(Chart::new(&["x"]).unwrap().with_range("x", -1.0, 1.0).unwrap());
        let f = DiffForm::monomial(&c, Expr::var("x").ln(), &["x"]).unwrap();
        let rep = check_positive(&f, &c.grid(3), 0.0).unwrap();
        assert_eq!(rep.verdict, Positivity::NotPositive);
        assert_eq!(rep.errors.len(), 2);
        assert_eq!(rep.argmin, vec![1.0]);
    }

    #[test]
    fn polar_density_at_origin() {
        let c = Arc::new(
            Chart::new(&["r", "theta"])
                .unwrap()
                .with_range("r", 0.0, 1.0)
                .unwrap()
                .with_period("theta", std::f64::consts::TAU)
                .unwrap()
                .with_polar("r", "theta")
                .unwrap(),
        );
        // d(r^2 dtheta) = 2r dr^dtheta: twice the Cartesian area form
        let f = DiffForm::monomial(&c, Expr::var("r").powi(2), &["theta"]).unwrap().exterior_derivative().unwrap();
        let rep = check_positive(&f, &c.grid(5), DEFAULT_POSITIVITY_MARGIN).unwrap();
        assert_eq!(rep.verdict, Positivity::Positive);
        assert_eq!(rep.min_value, 2.0);
    }

    #[test]
    fn rejects_non_top_degree_and_empty_grid() {
        let c = Arc::new(Chart::new(&["x", "y"]).unwrap());
        let dx = DiffForm::coordinate(&c, "x").unwrap();
        assert!(check_positive(&dx, &c.grid(2), 0.0).is_err());
        assert!(check_positive(&DiffForm::volume(&c), &[], 0.0).is_err());
    }
}
