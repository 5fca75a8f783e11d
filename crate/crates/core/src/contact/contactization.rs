use std::sync::Arc;

use serde::Serialize;

use crate::algebra::Expr;
use crate::forms::{check_positive, Chart, Coord, DiffForm, Positivity, PositivityReport, DEFAULT_POSITIVITY_MARGIN};
use crate::report::{Check, Verdict};

use super::ContactError;

/// Bound for `|Ω ∧ dz − α ∧ (dα)^n|` on samples.
pub const OMEGA_TOL: f64 = 1e-9;

/// Product chart `(s, Γ…, z)`, with `z` renamed to `w` when `Γ` already uses it.
fn product_chart(gamma: &Chart, eps: f64) -> Result<(Arc<Chart>, String), ContactError> {
    let names = gamma.names();
    let z = ["z", "w", "z0"].into_iter().find(|c| !names.contains(c) && *c != "s").expect("free name");
    if names.contains(&"s") {
        return Err(ContactError::Invalid("Γ-chart already uses the coordinate 's'".into()));
    }
    let mut all = vec!["s"];
    all.extend(names.iter().copied());
    all.push(z);
    let mut chart = Chart::new(&all)?.with_range("s", -eps, eps)?;
    for Coord { name, period, lo, hi } in gamma.coords() {
        chart = match period {
            Some(p) => chart.with_period(name, *p)?,
            None => chart.with_range(name, *lo, *hi)?,
        };
    }
    Ok((Arc::new(chart), z.to_string()))
}

/// `α = e^{−s²/ε′} μ − (s/ε′) dz` on `(s, Γ…, z)`, with `β = e^{−s²/ε′} μ`
/// and `H = −s/ε′` returned alongside.
pub fn contactization_form(mu: &DiffForm, eps: f64) -> Result<(DiffForm, DiffForm, Expr, String), ContactError> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(ContactError::Invalid(format!("ε′ = {eps} must be positive")));
    }
    if mu.degree() != 1 {
        return Err(ContactError::Invalid(format!("μ has degree {}", mu.degree())));
    }
    let (chart, z) = product_chart(mu.chart(), eps)?;
    let lift: Vec<Expr> = mu.chart().names().iter().map(|n| Expr::var(n)).collect();
    let s = Expr::var("s");
    let e = (Expr::constant(-1.0 / eps) * s.powi(2)).exp();
    let h = Expr::constant(-1.0 / eps) * s;
    let beta = mu.pullback(&chart, &lift)?.scale(&e);
    let alpha = beta.add(&DiffForm::monomial(&chart, h.clone(), &[&z])?)?;
    Ok((alpha, beta, h, z))
}

#[derive(Clone, Debug, Serialize)]
pub struct ContactizationReport {
    pub eps: f64,
    pub n: usize,
    pub chart: Vec<String>,
    pub orientation: String,
    pub mu_contact: PositivityReport,
    pub positivity: PositivityReport,
    pub omega_residual: f64,
}

impl ContactizationReport {
    pub fn checks(&self) -> Vec<Check> {
        vec![
            Check::pass_if("α∧(dα)^n > 0", self.positivity.verdict == Positivity::Positive)
                .margin(self.positivity.min_value)
                .location(super::loc(&self.positivity.argmin)),
            Check::pass_if("Ω∧dz = α∧(dα)^n", self.omega_residual < OMEGA_TOL).margin(self.omega_residual),
        ]
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.verdict == Verdict::Pass)
    }
}

/// Checks the modified contactization of a contact form `μ` on a
/// `(2n−1)`-dimensional chart and the identity `Ω∧dz = α∧(dα)^n` with
/// `Ω = (dβ)^{n−1} ∧ (H dβ + n β ∧ dH)`.
pub fn verify_contactization(mu: &DiffForm, eps: f64, grid: usize) -> Result<ContactizationReport, ContactError> {
    let (alpha, beta, h, z) = contactization_form(mu, eps)?;
    let gdim = mu.chart().dim();
    if gdim.is_multiple_of(2) {
        return Err(ContactError::NotContact(format!("Γ-chart has even dimension {gdim}")));
    }
    let n = gdim.div_ceil(2);
    let dmu = mu.exterior_derivative()?;
    let mu_top = if n == 1 { mu.clone() } else { mu.wedge(&dmu.wedge_power(n - 1)?)? };
    let mu_contact = check_positive(&mu_top, &mu.chart().grid(grid), DEFAULT_POSITIVITY_MARGIN)?;
    if mu_contact.verdict != Positivity::Positive {
        return Err(ContactError::NotContact(format!(
            "μ∧(dμ)^(n-1) has minimum {:.3e} at {:?}",
            mu_contact.min_value, mu_contact.argmin
        )));
    }
    let chart = alpha.chart().clone();
    let samples = chart.grid(grid);
    let dalpha = alpha.exterior_derivative()?;
    let top = alpha.wedge(&dalpha.wedge_power(n)?)?;
    let positivity = check_positive(&top, &samples, DEFAULT_POSITIVITY_MARGIN)?;

    let dbeta = beta.exterior_derivative()?;
    let dh = DiffForm::function(&chart, h.clone()).exterior_derivative()?;
    let inner = dbeta.scale(&h).add(&beta.wedge(&dh)?.scale(&Expr::constant(n as f64)))?;
    let omega = if n == 1 { inner } else { dbeta.wedge_power(n - 1)?.wedge(&inner)? };
    let omega_dz = omega.wedge(&DiffForm::coordinate(&chart, &z)?)?;
    let omega_residual = omega_dz.max_abs_diff(&top, &samples)?;
    Ok(ContactizationReport {
        eps,
        n,
        chart: chart.names().iter().map(|s| s.to_string()).collect(),
        orientation: format!("coordinate order ({})", chart.names().join(", ")),
        mu_contact,
        positivity,
        omega_residual,
    })
}
