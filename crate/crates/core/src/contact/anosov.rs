use std::sync::Arc;

use nalgebra::{Matrix4, Vector4};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::Expr;
use crate::forms::{
    check_positive, Chart, CompiledForm, DiffForm, Positivity, PositivityReport, DEFAULT_POSITIVITY_MARGIN,
};
use crate::report::{Check, Verdict};
use crate::sl2::{eigen_data, EigenData, IntMatrix2};

use super::{ContactError, Extremum};

/// Residual bound for `β_± ∧ dβ_± = 0` and the Liouville solve.
pub const ANOSOV_TOL: f64 = 1e-10;

/// `W_A = [−1, 1] × T_A` on the chart `(s, x, y, z)` with `λ = β₊ + s β₋`.
#[derive(Clone, Debug)]
pub struct AnosovCylinder {
    pub matrix: IntMatrix2,
    pub eigen: EigenData,
    pub chart: Arc<Chart>,
    pub beta_plus: DiffForm,
    pub beta_minus: DiffForm,
    pub lambda: DiffForm,
}

pub fn anosov_chart() -> Arc<Chart> {
    let c = Chart::new(&["s", "x", "y", "z"])
        .and_then(|c| c.with_range("s", -1.0, 1.0))
        .and_then(|c| c.with_period("x", 1.0))
        .and_then(|c| c.with_period("y", 1.0))
        .and_then(|c| c.with_period("z", 1.0))
        .expect("static chart");
    Arc::new(c)
}

/// `dvol(v, ·) = v₁ dy − v₂ dx` on any chart containing `x, y`.
pub(super) fn dvol_contract(chart: &Arc<Chart>, v: [f64; 2]) -> Result<DiffForm, ContactError> {
    Ok(DiffForm::monomial(chart, Expr::constant(v[0]), &["y"])?.add(&DiffForm::monomial(
        chart,
        Expr::constant(-v[1]),
        &["x"],
    )?)?)
}

/// `a^{∓z}` written as `exp(∓z log a)`.
pub(super) fn a_pow_z(a: f64, sign: f64) -> Expr {
    (Expr::constant(sign * a.ln()) * Expr::var("z")).exp()
}

/// Builds `β₊ = a^{−z} dvol(v₊, ·)`, `β₋ = −a^{z} dvol(v₋, ·)` and
/// `λ = β₊ + s β₋`.
pub fn build_anosov_cylinder(a: &IntMatrix2) -> Result<AnosovCylinder, ContactError> {
    let eigen = eigen_data(a)?;
    let chart = anosov_chart();
    let beta_plus = dvol_contract(&chart, eigen.v_plus)?.scale(&a_pow_z(eigen.a, -1.0));
    let beta_minus = dvol_contract(&chart, eigen.v_minus)?.scale(&(-a_pow_z(eigen.a, 1.0)));
    let lambda = beta_plus.add(&beta_minus.scale(&Expr::var("s")))?;
    Ok(AnosovCylinder { matrix: *a, eigen, chart, beta_plus, beta_minus, lambda })
}

/// `β₊ + β₋` on the chart `(x, y, z)`: the contact form induced on the
/// boundary component `s = 1`.
pub fn boundary_contact_form(a: &IntMatrix2) -> Result<DiffForm, ContactError> {
    let eigen = eigen_data(a)?;
    let chart = Arc::new(
        Chart::new(&["x", "y", "z"])
            .and_then(|c| c.with_period("x", 1.0))
            .and_then(|c| c.with_period("y", 1.0))
            .and_then(|c| c.with_period("z", 1.0))?,
    );
    let plus = dvol_contract(&chart, eigen.v_plus)?.scale(&a_pow_z(eigen.a, -1.0));
    let minus = dvol_contract(&chart, eigen.v_minus)?.scale(&a_pow_z(eigen.a, 1.0));
    Ok(plus.sub(&minus)?)
}

fn two_form_matrix(omega: &CompiledForm, p: &[f64]) -> Result<Matrix4<f64>, ContactError> {
    let mut m = Matrix4::zeros();
    for (idx, v) in omega.eval(p)? {
        m[(idx[0], idx[1])] = v;
        m[(idx[1], idx[0])] = -v;
    }
    Ok(m)
}

fn one_form_vector(form: &CompiledForm, p: &[f64]) -> Result<Vector4<f64>, ContactError> {
    let mut v = Vector4::zeros();
    for (idx, c) in form.eval(p)? {
        v[idx[0]] = c;
    }
    Ok(v)
}

/// Solves `ι_X dλ = λ` at `p`; returns `X` and the solve residual.
pub fn liouville_field_at(cyl: &AnosovCylinder, p: &[f64]) -> Result<([f64; 4], f64), ContactError> {
    let omega = cyl.lambda.exterior_derivative()?.compile()?;
    let lambda = cyl.lambda.compile()?;
    liouville_compiled(&omega, &lambda, p)
}

fn liouville_compiled(omega: &CompiledForm, lambda: &CompiledForm, p: &[f64]) -> Result<([f64; 4], f64), ContactError> {
    // (ι_X ω)_j = Σ_i X^i ω_ij
    let w = two_form_matrix(omega, p)?.transpose();
    let rhs = one_form_vector(lambda, p)?;
    let x = w.lu().solve(&rhs).ok_or_else(|| ContactError::Degenerate(format!("dλ is singular at {p:?}")))?;
    let residual = (w * x - rhs).amax();
    Ok(([x[0], x[1], x[2], x[3]], residual))
}

#[derive(Clone, Debug, Serialize)]
pub struct AnosovReport {
    pub matrix: IntMatrix2,
    pub a: f64,
    pub v_plus: [f64; 2],
    pub v_minus: [f64; 2],
    pub orientation: String,
    pub samples: usize,
    pub symplectic: PositivityReport,
    pub beta_plus_integrability: f64,
    pub beta_minus_integrability: f64,
    /// Smallest `ds`-component of the Liouville field on `s = 1`.
    pub liouville_top: Extremum,
    /// Largest `ds`-component of the Liouville field on `s = −1`.
    pub liouville_bottom: Extremum,
    pub liouville_residual: f64,
}

impl AnosovReport {
    pub fn checks(&self) -> Vec<Check> {
        vec![
            Check::pass_if("dλ∧dλ > 0", self.symplectic.verdict == Positivity::Positive)
                .margin(self.symplectic.min_value)
                .location(super::loc(&self.symplectic.argmin)),
            Check::pass_if("β₊∧dβ₊ = 0", self.beta_plus_integrability < ANOSOV_TOL)
                .margin(self.beta_plus_integrability),
            Check::pass_if("β₋∧dβ₋ = 0", self.beta_minus_integrability < ANOSOV_TOL)
                .margin(self.beta_minus_integrability),
            Check::pass_if("Liouville field leaves through s = 1", self.liouville_top.value > 0.0)
                .margin(self.liouville_top.value)
                .location(super::loc(&self.liouville_top.at)),
            Check::pass_if("Liouville field leaves through s = -1", self.liouville_bottom.value < 0.0)
                .margin(-self.liouville_bottom.value)
                .location(super::loc(&self.liouville_bottom.at)),
            Check::pass_if("Liouville solve residual", self.liouville_residual < ANOSOV_TOL)
                .margin(self.liouville_residual),
        ]
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.verdict == Verdict::Pass)
    }
}

/// Samples symplecticity of `dλ`, integrability of `β_±` and the boundary
/// behaviour of the Liouville field on an `n⁴` grid.
pub fn verify_anosov(a: &IntMatrix2, n: usize) -> Result<AnosovReport, ContactError> {
    let cyl = build_anosov_cylinder(a)?;
    let grid = cyl.chart.grid(n.max(2));
    let dl = cyl.lambda.exterior_derivative()?;
    let symplectic = check_positive(&dl.wedge(&dl)?, &grid, DEFAULT_POSITIVITY_MARGIN)?;
    let integ = |b: &DiffForm| -> Result<f64, ContactError> {
        Ok(b.wedge(&b.exterior_derivative()?)?.max_abs_coefficient(&grid)?)
    };
    let omega = dl.compile()?;
    let lambda = cyl.lambda.compile()?;
    let boundary: Vec<&Vec<f64>> = grid.iter().filter(|p| p[0].abs() == 1.0).collect();
    let solved = boundary
        .par_iter()
        .map(|p| liouville_compiled(&omega, &lambda, p).map(|(x, r)| (p[0], x[0], r, p.to_vec())))
        .collect::<Result<Vec<_>, ContactError>>()?;
    let top = Extremum::min_of(solved.iter().filter(|s| s.0 > 0.0).map(|s| (s.1, s.3.clone())));
    let bottom = Extremum::max_of(solved.iter().filter(|s| s.0 < 0.0).map(|s| (s.1, s.3.clone())));
    let residual = solved.iter().map(|s| s.2).fold(0.0, f64::max);
    Ok(AnosovReport {
        matrix: *a,
        a: cyl.eigen.a,
        v_plus: cyl.eigen.v_plus,
        v_minus: cyl.eigen.v_minus,
        orientation: "coordinate order (s, x, y, z); dvol = dx^dy".into(),
        samples: grid.len(),
        beta_plus_integrability: integ(&cyl.beta_plus)?,
        beta_minus_integrability: integ(&cyl.beta_minus)?,
        symplectic,
        liouville_top: top,
        liouville_bottom: bottom,
        liouville_residual: residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cat_map_eigenvalue() {
        let cyl = build_anosov_cylinder(&IntMatrix2::new(2, 1, 1, 1)).unwrap();
        assert!((cyl.eigen.a - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn volume_is_constant_multiple_of_log_a() {
        let cyl = build_anosov_cylinder(&IntMatrix2::new(2, 1, 1, 1)).unwrap();
        let dl = cyl.lambda.exterior_derivative().unwrap();
        let vol = dl.wedge(&dl).unwrap().top_coefficient().unwrap();
        let e = &cyl.eigen;
        let det = e.v_plus[0] * e.v_minus[1] - e.v_plus[1] * e.v_minus[0];
        let expect = 2.0 * e.a.ln() * det;
        for p in cyl.chart.random_samples(20, 3) {
            let v = vol.compile(&cyl.chart.names()).unwrap().eval(&p).unwrap();
            assert!((v - expect).abs() < 1e-12, "{v} vs {expect}");
        }
    }

    #[test]
    fn anosov_report_passes() {
        for m in [IntMatrix2::new(2, 1, 1, 1), IntMatrix2::new(1, 1, 1, 2), IntMatrix2::new(-3, -1, -1, 0)] {
            let r = verify_anosov(&m, 5);
            match m.trace() {
                t if t > 2 => assert!(r.unwrap().passed()),
                _ => assert!(r.is_err()),
            }
        }
    }

    #[test]
    fn rejects_non_hyperbolic() {
        assert!(build_anosov_cylinder(&IntMatrix2::new(1, 1, 0, 1)).is_err());
        assert!(build_anosov_cylinder(&IntMatrix2::new(0, -1, 1, 0)).is_err());
    }
}
