use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Compiled, Expr};
use crate::forms::{Chart, DiffForm};
use crate::report::{Check, Verdict};
use crate::sl2::{eigen_data, IntMatrix2};

use super::anosov::{a_pow_z, dvol_contract};
use super::{ContactError, Extremum};

pub const PULLBACK_TOL: f64 = 1e-9;
/// Required drop of `∫₂^S (g + 2sg′) ds` between `S = 10²` and `S = 10³`.
pub const INTEGRAL_GAP: f64 = 0.5;
pub const INTEGRAL_TOL: f64 = 1e-8;
const SIMPSON_INTERVALS: usize = 4000;
const PULLBACK_S_MAX: f64 = 50.0;
const PULLBACK_LINE: usize = 1000;

/// `g(s) = S(s; lo, hi) / (s log s)`, `S` the quintic smoothstep, so
/// `g ≡ 0` for `s ≤ lo` and `g ≡ 1/(s log s)` for `s ≥ hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GSpec {
    pub lo: f64,
    pub hi: f64,
}

impl Default for GSpec {
    fn default() -> Self {
        GSpec { lo: 1.0, hi: 2.0 }
    }
}

impl GSpec {
    pub fn expr(&self) -> Result<Expr, ContactError> {
        if !(self.lo >= 1.0 && self.hi > self.lo) {
            return Err(ContactError::Invalid(format!("bridge [{}, {}] must satisfy 1 <= lo < hi", self.lo, self.hi)));
        }
        let s = Expr::var("s");
        Ok(s.smoothstep(self.lo, self.hi) * (s.clone() * s.ln()).recip())
    }
}

/// `F(s) = 2/log s − log(log s)`, an antiderivative of
/// `−(log s + 2)/(s log² s) = (g + 2sg′)(s)` on `s > 1` where `g = 1/(s log s)`.
pub fn plastikstufe_antiderivative(s: f64) -> f64 {
    let l = s.ln();
    2.0 / l - l.ln()
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralSample {
    pub upper: f64,
    pub value: f64,
    pub closed_form: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PlastikstufeReport {
    pub eps: f64,
    pub matrix: IntMatrix2,
    pub g: GSpec,
    pub orientation: String,
    pub samples: usize,
    /// Largest coefficient gap between the pullback and `ε(g + 2sg′)ds + dt`.
    pub pullback_residual: Extremum,
    /// `(g + 2sg′)(e²)` read from the pullback; exactly `−1/e²`.
    pub coefficient_at_e2: f64,
    pub decay_points: Vec<f64>,
    pub g_values: Vec<f64>,
    pub sg_values: Vec<f64>,
    pub integrals: Vec<IntegralSample>,
}

impl PlastikstufeReport {
    fn decays(v: &[f64]) -> bool {
        v.iter().all(|x| *x > 0.0) && v.windows(2).all(|w| w[1] < w[0])
    }

    pub fn checks(&self) -> Vec<Check> {
        let e2 = std::f64::consts::E.powi(2);
        let coef_err = (self.coefficient_at_e2 + 1.0 / e2).abs();
        let int_err = self.integrals.iter().map(|i| (i.value - i.closed_form).abs()).fold(0.0, f64::max);
        let gap = match (self.integrals.first(), self.integrals.get(1)) {
            (Some(a), Some(b)) => a.value - b.value,
            _ => f64::NAN,
        };
        vec![
            Check::pass_if("pullback = ε(g+2sg')ds + dt", self.pullback_residual.value < PULLBACK_TOL)
                .margin(self.pullback_residual.value)
                .location(super::loc(&self.pullback_residual.at)),
            Check::pass_if("coefficient at s = e^2 is -1/e^2", coef_err < 1e-12).margin(coef_err),
            Check::pass_if("g decreases to 0", Self::decays(&self.g_values)),
            Check::pass_if("s g decreases to 0", Self::decays(&self.sg_values)),
            Check::pass_if("integral matches closed form", int_err < INTEGRAL_TOL).margin(int_err),
            Check::pass_if(
                "integral decreases without bound",
                gap > INTEGRAL_GAP && Self::decays_strictly(&self.integrals),
            )
            .margin(gap - INTEGRAL_GAP),
        ]
    }

    fn decays_strictly(ints: &[IntegralSample]) -> bool {
        ints.windows(2).all(|w| w[1].value < w[0].value)
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.verdict == Verdict::Pass)
    }
}

/// Composite Simpson in `u = log s`.
fn integrate_log(c: &Compiled, a: f64, b: f64) -> Result<f64, ContactError> {
    let (ua, ub) = (a.ln(), b.ln());
    let n = SIMPSON_INTERVALS;
    let h = (ub - ua) / n as f64;
    let f = |u: f64| -> Result<f64, ContactError> {
        let s = u.exp();
        Ok(c.eval(&[s, 0.0, 0.0])? * s)
    };
    let mut acc = f(ua)? + f(ub)?;
    for i in 1..n {
        acc += f(ua + h * i as f64)? * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    Ok(acc * h / 3.0)
}

/// Pulls `α = β₊ + sβ₋ + dt` on `(s, x, y, z, t)` back along
/// `(x, y) = p v₊ + q v₋`, `p = ε a^{−z} g(s)`, `q = ε a^{z} s g(s)`, with
/// `v₋` rescaled so that `det[v₊ v₋] = 1`.
pub fn verify_plastikstufe(eps: f64, a: &IntMatrix2, g: &GSpec) -> Result<PlastikstufeReport, ContactError> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(ContactError::Invalid(format!("ε = {eps} must be positive")));
    }
    let gexpr = g.expr()?;
    let eig = eigen_data(a)?;
    let det = eig.v_plus[0] * eig.v_minus[1] - eig.v_plus[1] * eig.v_minus[0];
    let vm = [eig.v_minus[0] / det, eig.v_minus[1] / det];
    let vp = eig.v_plus;

    let target = Arc::new(
        Chart::new(&["s", "x", "y", "z", "t"])?
            .with_range("s", 0.0, PULLBACK_S_MAX)?
            .with_period("x", 1.0)?
            .with_period("y", 1.0)?
            .with_period("z", 1.0)?,
    );
    let beta_plus = dvol_contract(&target, vp)?.scale(&a_pow_z(eig.a, -1.0));
    let beta_minus = dvol_contract(&target, vm)?.scale(&(-a_pow_z(eig.a, 1.0)));
    let alpha = beta_plus.add(&beta_minus.scale(&Expr::var("s")))?.add(&DiffForm::coordinate(&target, "t")?)?;

    let source = Arc::new(Chart::new(&["s", "z", "t"])?.with_range("s", 0.0, PULLBACK_S_MAX)?.with_period("z", 1.0)?);
    let s = Expr::var("s");
    let p = Expr::constant(eps) * a_pow_z(eig.a, -1.0) * gexpr.clone();
    let q = Expr::constant(eps) * a_pow_z(eig.a, 1.0) * s.clone() * gexpr.clone();
    let map = [
        s.clone(),
        Expr::constant(vp[0]) * p.clone() + Expr::constant(vm[0]) * q.clone(),
        Expr::constant(vp[1]) * p + Expr::constant(vm[1]) * q,
        Expr::var("z"),
        Expr::var("t"),
    ];
    let pulled = alpha.pullback(&source, &map)?;
    let coeff = gexpr.clone() + Expr::constant(2.0) * s.clone() * gexpr.diff("s")?;
    let expected =
        DiffForm::monomial(&source, Expr::constant(eps) * coeff, &["s"])?.add(&DiffForm::coordinate(&source, "t")?)?;

    let mut samples = source.grid(6);
    samples.extend((0..=PULLBACK_LINE).map(|i| vec![PULLBACK_S_MAX * i as f64 / PULLBACK_LINE as f64, 0.37, 0.1]));
    let diff = pulled.sub(&expected)?.compile()?;
    let residuals = samples
        .par_iter()
        .map(|pt| Ok((diff.eval(pt)?.values().fold(0.0_f64, |m, v| m.max(v.abs())), pt.clone())))
        .collect::<Result<Vec<_>, crate::forms::FormsError>>()?;
    let pullback_residual = Extremum::max_of(residuals);

    let ds = pulled.coefficient(&[0]).compile(&source.names())?;
    let c_over_eps = |x: f64| -> Result<f64, ContactError> { Ok(ds.eval(&[x, 0.0, 0.0])? / eps) };
    let coefficient_at_e2 = c_over_eps(std::f64::consts::E.powi(2))?;

    let gc = gexpr.compile(&["s"])?;
    let decay_points = vec![1e2, 1e3, 1e4];
    let g_values = decay_points.iter().map(|&x| gc.eval(&[x])).collect::<Result<Vec<_>, _>>()?;
    let sg_values = decay_points.iter().zip(&g_values).map(|(x, v)| x * v).collect();

    let integrand = (pulled.coefficient(&[0]) * Expr::constant(1.0 / eps)).compile(&source.names())?;
    let lower = g.hi.max(2.0);
    let integrals = decay_points
        .iter()
        .map(|&upper| {
            Ok(IntegralSample {
                upper,
                value: integrate_log(&integrand, lower, upper)?,
                closed_form: plastikstufe_antiderivative(upper) - plastikstufe_antiderivative(lower),
            })
        })
        .collect::<Result<Vec<_>, ContactError>>()?;

    Ok(PlastikstufeReport {
        eps,
        matrix: *a,
        g: *g,
        orientation: "target (s, x, y, z, t) with dvol = dx^dy; source (s, z, t)".into(),
        samples: samples.len(),
        pullback_residual,
        coefficient_at_e2,
        decay_points,
        g_values,
        sg_values,
        integrals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antiderivative_differentiates_back() {
        for s in [3.0, 10.0, 250.0] {
            let h = 1e-5 * s;
            let num = (plastikstufe_antiderivative(s + h) - plastikstufe_antiderivative(s - h)) / (2.0 * h);
            let l = f64::ln(s);
            assert!((num + (l + 2.0) / (s * l * l)).abs() < 1e-8);
        }
        let gap = plastikstufe_antiderivative(1e3) - plastikstufe_antiderivative(1e2);
        assert!((gap + 0.55022).abs() < 1e-5, "{gap}");
    }

    #[test]
    fn plastikstufe_passes() {
        let r = verify_plastikstufe(0.1, &IntMatrix2::new(2, 1, 1, 1), &GSpec::default()).unwrap();
        assert!(r.passed(), "{r:#?}");
        assert!((r.coefficient_at_e2 + (-2.0f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn below_one_only_dt_survives() {
        let r = verify_plastikstufe(0.1, &IntMatrix2::new(2, 1, 1, 1), &GSpec::default()).unwrap();
        assert!(r.pullback_residual.value < PULLBACK_TOL);
        let g = GSpec::default().expr().unwrap().compile(&["s"]).unwrap();
        for s in [0.0, 0.5, 1.0] {
            assert_eq!(g.eval(&[s]).unwrap(), 0.0);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let a = IntMatrix2::new(2, 1, 1, 1);
        assert!(verify_plastikstufe(0.0, &a, &GSpec::default()).is_err());
        assert!(verify_plastikstufe(0.1, &a, &GSpec { lo: 0.5, hi: 2.0 }).is_err());
        assert!(verify_plastikstufe(0.1, &IntMatrix2::new(1, 1, 0, 1), &GSpec::default()).is_err());
    }
}
