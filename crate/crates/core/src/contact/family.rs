use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{parse_expr, Expr};
use crate::forms::{check_positive, Chart, DiffForm, PositivityReport, DEFAULT_POSITIVITY_MARGIN};
use crate::report::{Check, Verdict};

use super::{ContactError, Extremum};

/// Width of the "near 0" and "near 1" windows used by the cutoff checks.
pub const NEAR: f64 = 0.05;
/// Half-width of the window around `r = 1/2` that must contain the support of `e`.
pub const E_SUPPORT: f64 = 0.25;
const CUTOFF_SAMPLES: usize = 401;
const CUTOFF_TOL: f64 = 1e-12;
/// Relative tolerance for the direct computation against the closed-form coefficient.
pub const PROOF_TOL: f64 = 1e-9;
pub const INTEGRABILITY_TOL: f64 = 1e-10;
pub const MIN_NORM: f64 = 1e-6;

/// Cutoff functions of `r` as expression strings (see `docs/grammar.md`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CutoffSpec {
    pub f: String,
    pub g: String,
    pub f1: String,
    pub g1: String,
    pub h: String,
    pub e: String,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        CutoffSpec {
            f: "2 - r^2".into(),
            g: "(1 - smoothstep(r, 0.25, 0.75))*r^2 + smoothstep(r, 0.25, 0.75)".into(),
            f1: "1 - smoothstep(r, 0.15, 0.45)".into(),
            g1: "smoothstep(r, 0.55, 0.85)".into(),
            h: "1 - smoothstep(r, 0.5, 0.9)".into(),
            e: "smoothstep(r, 0.3, 0.5)*(1 - smoothstep(r, 0.5, 0.7))".into(),
        }
    }
}

impl CutoffSpec {
    pub fn parse(&self) -> Result<Cutoffs, ContactError> {
        let p = |name: &str, s: &str| -> Result<Expr, ContactError> {
            let e = parse_expr(s)?;
            if let Some(v) = e.variables().into_iter().find(|v| v != "r") {
                return Err(ContactError::Invalid(format!("cutoff {name} depends on '{v}', expected only r")));
            }
            Ok(e)
        };
        Ok(Cutoffs {
            f: p("f", &self.f)?,
            g: p("g", &self.g)?,
            f1: p("f1", &self.f1)?,
            g1: p("g1", &self.g1)?,
            h: p("h", &self.h)?,
            e: p("e", &self.e)?,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Cutoffs {
    pub f: Expr,
    pub g: Expr,
    pub f1: Expr,
    pub g1: Expr,
    pub h: Expr,
    pub e: Expr,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FamilyConfig {
    /// Half-dimension; the chart model is fixed at `n = 2`.
    pub n: usize,
    /// Binding parameter: `μ = dy + m z dx`.
    pub m: i64,
    pub cutoffs: CutoffSpec,
    pub t: f64,
    /// Points per axis of the tensor sample grid.
    pub grid: usize,
    /// Radial resolution of the extra line samples used for `|α₁|`.
    pub radial: usize,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig { n: 2, m: 3, cutoffs: CutoffSpec::default(), t: 0.0, grid: 6, radial: 101 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffViolation {
    pub function: String,
    pub condition: String,
    pub r: f64,
    pub value: f64,
}

impl fmt::Display for CutoffViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} fails at r = {} (value {:.3e})", self.function, self.condition, self.r, self.value)
    }
}

/// Chart `(x, y, z, r, θ)`: `x, y, z` of period 1, `r ∈ [0, 1]`, `θ` of
/// period 2π, with `(r, θ)` a polar pair.
pub fn family_chart() -> Arc<Chart> {
    let c = Chart::new(&["x", "y", "z", "r", "theta"])
        .and_then(|c| c.with_period("x", 1.0))
        .and_then(|c| c.with_period("y", 1.0))
        .and_then(|c| c.with_period("z", 1.0))
        .and_then(|c| c.with_range("r", 0.0, 1.0))
        .and_then(|c| c.with_period("theta", TAU))
        .and_then(|c| c.with_polar("r", "theta"))
        .expect("static chart");
    Arc::new(c)
}

/// Sampled inequality tests for every cutoff condition. Empty means valid.
pub fn validate_cutoffs(c: &Cutoffs) -> Result<Vec<CutoffViolation>, ContactError> {
    let rs: Vec<f64> = (0..CUTOFF_SAMPLES).map(|i| i as f64 / (CUTOFF_SAMPLES - 1) as f64).collect();
    let ev = |e: &Expr| -> Result<Vec<f64>, ContactError> {
        let comp = e.compile(&["r"])?;
        rs.iter().map(|&r| comp.eval(&[r]).map_err(ContactError::from)).collect()
    };
    let d = |e: &Expr| -> Result<Vec<f64>, ContactError> { ev(&e.diff("r")?) };
    let mut out = Vec::new();
    let mut require = |function: &str, condition: &str, values: &[f64], ok: &dyn Fn(f64, f64) -> bool| {
        if let Some((r, v)) = rs.iter().zip(values).find(|(r, v)| !ok(**r, **v)) {
            out.push(CutoffViolation { function: function.into(), condition: condition.into(), r: *r, value: *v });
        }
    };
    let near0 = |r: f64| r <= NEAR;
    let near1 = |r: f64| r >= 1.0 - NEAR;
    let eq = |v: f64, w: f64| (v - w).abs() <= CUTOFF_TOL;

    require("f", "f > 0", &ev(&c.f)?, &|_, v| v > 0.0);
    require("f", "f' < 0 on (0,1]", &d(&c.f)?, &|r, v| r == 0.0 || v < 0.0);
    require("g", "g' >= 0", &d(&c.g)?, &|_, v| v >= -CUTOFF_TOL);
    require("g", "g = r^2 near 0", &ev(&c.g)?, &|r, v| !near0(r) || eq(v, r * r));
    require("g", "g = 1 near 1", &ev(&c.g)?, &|r, v| !near1(r) || eq(v, 1.0));
    require("f1", "f1 = 1 near 0", &ev(&c.f1)?, &|r, v| !near0(r) || eq(v, 1.0));
    require("f1", "f1 = 0 on [1/2,1]", &ev(&c.f1)?, &|r, v| r < 0.5 || eq(v, 0.0));
    require("f1", "f1' <= 0", &d(&c.f1)?, &|_, v| v <= CUTOFF_TOL);
    require("g1", "g1 = 1 near 1", &ev(&c.g1)?, &|r, v| !near1(r) || eq(v, 1.0));
    require("g1", "g1 = 0 on [0,1/2]", &ev(&c.g1)?, &|r, v| r > 0.5 || eq(v, 0.0));
    require("g1", "g1' >= 0", &d(&c.g1)?, &|_, v| v >= -CUTOFF_TOL);
    require("h", "h = 1 on [0,1/2]", &ev(&c.h)?, &|r, v| r > 0.5 || eq(v, 1.0));
    require("h", "h = 0 near 1", &ev(&c.h)?, &|r, v| !near1(r) || eq(v, 0.0));
    require("e", "e supported near 1/2", &ev(&c.e)?, &|r, v| (r - 0.5).abs() <= E_SUPPORT || eq(v, 0.0));
    let e_half = c.e.compile(&["r"])?.eval(&[0.5])?;
    if e_half.abs() <= CUTOFF_TOL {
        out.push(CutoffViolation { function: "e".into(), condition: "e(1/2) != 0".into(), r: 0.5, value: e_half });
    }
    Ok(out)
}

fn interpolate(t: f64, a: &Expr, b: &Expr) -> Expr {
    Expr::constant(1.0 - t) * a.clone() + Expr::constant(t) * b.clone()
}

fn check_config(cfg: &FamilyConfig) -> Result<(), ContactError> {
    if cfg.n != 2 {
        return Err(ContactError::Invalid(format!("half-dimension {} (the chart model has n = 2)", cfg.n)));
    }
    if cfg.m <= 0 {
        return Err(ContactError::Invalid(format!("binding parameter m = {} must be positive", cfg.m)));
    }
    if !(0.0..=1.0).contains(&cfg.t) {
        return Err(ContactError::Invalid(format!("t = {} outside [0, 1]", cfg.t)));
    }
    Ok(())
}

/// `α_t = f_t((1−t)μ + t h dz) + g_t dθ + t e dr` with `μ = dy + m z dx`,
/// `f_t = (1−t)f + t f₁` and `g_t = (1−t)g + t g₁`.
pub fn build_family(cfg: &FamilyConfig) -> Result<DiffForm, ContactError> {
    let cut = cfg.cutoffs.parse()?;
    let bad = validate_cutoffs(&cut)?;
    if !bad.is_empty() {
        return Err(ContactError::Cutoffs(bad));
    }
    build_family_unchecked(cfg)
}

/// [`build_family`] without the cutoff conditions, for probing degenerate data.
pub fn build_family_unchecked(cfg: &FamilyConfig) -> Result<DiffForm, ContactError> {
    check_config(cfg)?;
    let c = cfg.cutoffs.parse()?;
    let chart = family_chart();
    let t = cfg.t;
    let ft = interpolate(t, &c.f, &c.f1);
    let gt = interpolate(t, &c.g, &c.g1);
    let mu = DiffForm::coordinate(&chart, "y")?.add(&DiffForm::monomial(
        &chart,
        Expr::constant(cfg.m as f64) * Expr::var("z"),
        &["x"],
    )?)?;
    let nu = DiffForm::monomial(&chart, Expr::constant(t) * c.h, &["z"])?;
    let alpha = mu
        .scale(&Expr::constant(1.0 - t))
        .add(&nu)?
        .scale(&ft)
        .add(&DiffForm::monomial(&chart, gt, &["theta"])?)?
        .add(&DiffForm::monomial(&chart, Expr::constant(t) * c.e, &["r"])?)?;
    Ok(alpha)
}

/// Closed-form volume coefficient `2 m (1−t)² f_t (g_t' f_t − f_t' g_t)`.
pub fn proof_coefficient(cfg: &FamilyConfig) -> Result<Expr, ContactError> {
    let c = cfg.cutoffs.parse()?;
    let t = cfg.t;
    let ft = interpolate(t, &c.f, &c.f1);
    let gt = interpolate(t, &c.g, &c.g1);
    let (dft, dgt) = (ft.diff("r")?, gt.diff("r")?);
    let n = cfg.n as f64;
    Ok(Expr::constant(n * cfg.m as f64 * (1.0 - t).powi(cfg.n as i32))
        * ft.powi(cfg.n as i32 - 1)
        * (dgt * ft.clone() - dft * gt))
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyStep {
    pub t: f64,
    pub verdict: Verdict,
    /// Positivity of `α_t ∧ (dα_t)²` for `t < 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positivity: Option<PositivityReport>,
    /// Sampled minimum of the volume coefficient divided by `(1−t)²`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaled_margin: Option<f64>,
    /// Largest gap between the direct computation and the closed form,
    /// relative to the largest closed-form value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proof_residual: Option<f64>,
    /// `max |α₁ ∧ dα₁|` for `t = 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integrability: Option<Extremum>,
    /// `min |α₁|` for `t = 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_norm: Option<Extremum>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub m: i64,
    pub orientation: String,
    pub samples: usize,
    pub cutoff_violations: Vec<CutoffViolation>,
    pub steps: Vec<FamilyStep>,
}

impl FamilyReport {
    pub fn checks(&self) -> Vec<Check> {
        let mut cut = Check::pass_if("cutoff conditions", self.cutoff_violations.is_empty());
        if !self.cutoff_violations.is_empty() {
            cut = cut.detail(super::fmt_violations(&self.cutoff_violations));
        }
        let mut out = vec![cut];
        for s in &self.steps {
            let name = if s.t < 1.0 {
                format!("contact condition at t = {}", s.t)
            } else {
                "integrable nonvanishing limit at t = 1".to_string()
            };
            let mut c = Check::new(&name, s.verdict);
            if let Some(m) = s.scaled_margin {
                c = c.margin(m);
            }
            if let Some(p) = &s.positivity {
                c = c.location(super::loc(&p.argmin));
            }
            if let Some(n) = &s.min_norm {
                c = c.margin(n.value).location(super::loc(&n.at));
            }
            out.push(c);
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.verdict == Verdict::Pass)
    }
}

fn samples(cfg: &FamilyConfig) -> Vec<Vec<f64>> {
    family_chart().grid(cfg.grid)
}

/// Radial lines through a coarse grid of `(x, y, z, θ)`.
fn radial_samples(cfg: &FamilyConfig) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for &x in &[0.0, 0.5] {
        for &y in &[0.0, 0.5] {
            for &z in &[0.0, 0.5] {
                for &th in &[0.0, 0.5 * TAU] {
                    for i in 0..cfg.radial {
                        out.push(vec![x, y, z, i as f64 / (cfg.radial - 1).max(1) as f64, th]);
                    }
                }
            }
        }
    }
    out
}

fn step(cfg: &FamilyConfig, grid: &[Vec<f64>], radial: &[Vec<f64>]) -> Result<FamilyStep, ContactError> {
    let alpha = build_family_unchecked(cfg)?;
    let dalpha = alpha.exterior_derivative()?;
    let t = cfg.t;
    if t < 1.0 {
        let top = alpha.wedge(&dalpha.wedge_power(cfg.n)?)?;
        let scale = (1.0 - t).powi(cfg.n as i32);
        let pos = check_positive(&top, grid, DEFAULT_POSITIVITY_MARGIN * scale)?;
        let direct = top.top_coefficient()?.compile(&alpha.chart().names())?;
        let closed = proof_coefficient(cfg)?.compile(&alpha.chart().names())?;
        let (gap, size) = grid
            .par_iter()
            .map(|p| {
                let c = closed.eval(p)?;
                Ok(((direct.eval(p)? - c).abs(), c.abs()))
            })
            .try_reduce(|| (0.0, 0.0), |a: (f64, f64), b: (f64, f64)| Ok((a.0.max(b.0), a.1.max(b.1))))
            .map_err(|e: crate::algebra::AlgebraError| ContactError::from(e))?;
        let residual = gap / size.max(f64::MIN_POSITIVE);
        let ok = pos.verdict == crate::forms::Positivity::Positive && residual < PROOF_TOL;
        Ok(FamilyStep {
            t,
            verdict: Verdict::from_bool(ok),
            scaled_margin: Some(pos.min_value / scale),
            positivity: Some(pos),
            proof_residual: Some(residual),
            integrability: None,
            min_norm: None,
        })
    } else {
        let three = alpha.wedge(&dalpha)?.compile()?;
        let all: Vec<Vec<f64>> = grid.iter().chain(radial).cloned().collect();
        let integ = all
            .par_iter()
            .map(|p| {
                let v = three.eval(p)?.values().fold(0.0_f64, |m, x| m.max(x.abs()));
                Ok((v, p.clone()))
            })
            .collect::<Result<Vec<_>, crate::forms::FormsError>>()?;
        let a = alpha.compile()?;
        let norms = all
            .par_iter()
            .map(|p| Ok((a.norm(p)?, p.clone())))
            .collect::<Result<Vec<_>, crate::forms::FormsError>>()?;
        let integ = Extremum::max_of(integ);
        let min_norm = Extremum::min_of(norms);
        let ok = integ.value < INTEGRABILITY_TOL && min_norm.value > MIN_NORM;
        Ok(FamilyStep {
            t,
            verdict: Verdict::from_bool(ok),
            positivity: None,
            scaled_margin: None,
            proof_residual: None,
            integrability: Some(integ),
            min_norm: Some(min_norm),
        })
    }
}

/// Verifies the contact condition for each `t < 1` and integrability with
/// nonvanishing for `t = 1`. Cutoff violations are reported, not fatal.
pub fn verify_family(cfg: &FamilyConfig, ts: &[f64]) -> Result<FamilyReport, ContactError> {
    if let Some(t) = ts.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(ContactError::Invalid(format!("t = {t} outside [0, 1]")));
    }
    let cutoff_violations = validate_cutoffs(&cfg.cutoffs.parse()?)?;
    let grid = samples(cfg);
    let radial = radial_samples(cfg);
    let mut steps = Vec::with_capacity(ts.len());
    for &t in ts {
        steps.push(step(&FamilyConfig { t, ..cfg.clone() }, &grid, &radial)?);
    }
    Ok(FamilyReport {
        m: cfg.m,
        orientation: "coordinate order (x, y, z, r, theta); r dr^dtheta on the polar pair".into(),
        samples: grid.len(),
        cutoff_violations,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(t: f64) -> FamilyConfig {
        FamilyConfig { t, ..FamilyConfig::default() }
    }

    #[test]
    fn default_cutoffs_are_valid() {
        let v = validate_cutoffs(&CutoffSpec::default().parse().unwrap()).unwrap();
        assert!(v.is_empty(), "{v:?}");
    }

    #[test]
    fn violations_name_condition_and_location() {
        let spec = CutoffSpec { f: "1 + r^2".into(), ..CutoffSpec::default() };
        match build_family(&FamilyConfig { cutoffs: spec, ..cfg(0.5) }) {
            Err(ContactError::Cutoffs(v)) => {
                assert_eq!(v.len(), 1);
                assert_eq!(v[0].condition, "f' < 0 on (0,1]");
                assert!(v[0].r > 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn endpoints_are_the_displayed_forms() {
        let chart = family_chart();
        let samples = chart.random_samples(50, 7);
        let c = CutoffSpec::default().parse().unwrap();
        let a0 = build_family(&cfg(0.0)).unwrap();
        let mu = DiffForm::coordinate(&chart, "y")
            .unwrap()
            .add(&DiffForm::monomial(&chart, Expr::constant(3.0) * Expr::var("z"), &["x"]).unwrap())
            .unwrap();
        let e0 = mu.scale(&c.f).add(&DiffForm::monomial(&chart, c.g.clone(), &["theta"]).unwrap()).unwrap();
        assert!(a0.max_abs_diff(&e0, &samples).unwrap() < 1e-14);
        let a1 = build_family(&cfg(1.0)).unwrap();
        let e1 = DiffForm::monomial(&chart, c.f1 * c.h, &["z"])
            .unwrap()
            .add(&DiffForm::monomial(&chart, c.g1, &["theta"]).unwrap())
            .unwrap()
            .add(&DiffForm::monomial(&chart, c.e, &["r"]).unwrap())
            .unwrap();
        assert!(a1.max_abs_diff(&e1, &samples).unwrap() < 1e-14);
    }

    #[test]
    fn family_verifies() {
        let r = verify_family(&cfg(0.0), &[0.0, 0.5, 0.99, 1.0]).unwrap();
        for s in &r.steps {
            assert_eq!(s.verdict, Verdict::Pass, "{s:?}");
        }
    }

    #[test]
    fn vanishing_e_is_caught_at_t_one() {
        let spec = CutoffSpec { e: "0".into(), ..CutoffSpec::default() };
        let r = verify_family(&FamilyConfig { cutoffs: spec, ..cfg(0.0) }, &[1.0]).unwrap();
        assert!(!r.cutoff_violations.is_empty());
        let s = &r.steps[0];
        assert_eq!(s.verdict, Verdict::Fail);
        let n = s.min_norm.as_ref().unwrap();
        assert!(n.value < MIN_NORM && (n.at[3] - 0.5).abs() < 0.06, "{n:?}");
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_family(&cfg(1.5)).is_err());
        assert!(build_family(&FamilyConfig { m: 0, ..cfg(0.5) }).is_err());
        assert!(verify_family(&cfg(0.0), &[-0.1]).is_err());
    }
}
