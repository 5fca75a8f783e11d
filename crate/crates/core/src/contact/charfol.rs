use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Compiled, Expr};
use crate::forms::{Chart, DiffForm, VectorFieldExpr};
use crate::report::{Check, Verdict};

use super::{ContactError, Extremum};

/// Residual bound for the defining equation and the flow identities.
pub const CHARACTERISTIC_TOL: f64 = 1e-9;
const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 60;
const WINDING_SAMPLES: usize = 720;
const DEGENERATE_DET: f64 = 1e-10;

/// Solves `ι_X ν = β ∧ (dβ)^{n−1}` symbolically on a `2n`-dimensional chart.
///
/// With `ν = ρ dx₁∧…∧dx_{2n}` and `γ = β ∧ (dβ)^{n−1}`, the solution is
/// `X^i = (−1)^i γ_{î} / ρ`, `γ_{î}` the coefficient omitting `dx_i`.
pub fn characteristic_field(beta: &DiffForm, nu: &DiffForm, n: usize) -> Result<VectorFieldExpr, ContactError> {
    let chart = beta.chart().clone();
    if beta.degree() != 1 {
        return Err(ContactError::Invalid(format!("β has degree {}", beta.degree())));
    }
    if n == 0 || chart.dim() != 2 * n {
        return Err(ContactError::Invalid(format!("chart of dimension {} is not 2n for n = {n}", chart.dim())));
    }
    if **nu.chart() != *chart {
        return Err(ContactError::Invalid("β and ν live on different charts".into()));
    }
    let rho = nu.top_coefficient()?;
    if rho.is_zero() {
        return Err(ContactError::VanishingVolume(Vec::new()));
    }
    if beta.is_zero() {
        return Err(ContactError::Degenerate("β ≡ 0 has no characteristic direction".into()));
    }
    let gamma = gamma_form(beta, n)?;
    if gamma.is_zero() {
        return Err(ContactError::Degenerate("β ∧ (dβ)^(n-1) ≡ 0".into()));
    }
    let inv = rho.recip();
    let d = chart.dim();
    let comps = (0..d)
        .map(|i| {
            let idx: Vec<usize> = (0..d).filter(|&j| j != i).collect();
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            Expr::constant(sign) * gamma.coefficient(&idx) * inv.clone()
        })
        .collect();
    Ok(VectorFieldExpr::new(&chart, comps)?)
}

fn gamma_form(beta: &DiffForm, n: usize) -> Result<DiffForm, ContactError> {
    if n == 1 {
        return Ok(beta.clone());
    }
    Ok(beta.wedge(&beta.exterior_derivative()?.wedge_power(n - 1)?)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacteristicCheck {
    pub samples: usize,
    /// `max |ι_X ν − β∧(dβ)^{n−1}|`.
    pub defining_residual: f64,
    /// `max |ι_X(β∧(dβ)^{n−1})|`.
    pub flow_residual: f64,
    /// `max |β ∧ ι_X dβ|`.
    pub tangency_residual: f64,
    pub min_volume: f64,
}

impl CharacteristicCheck {
    pub fn passed(&self) -> bool {
        self.defining_residual < CHARACTERISTIC_TOL
            && self.flow_residual < CHARACTERISTIC_TOL
            && self.tangency_residual < CHARACTERISTIC_TOL
    }

    pub fn checks(&self) -> Vec<Check> {
        vec![
            Check::pass_if("ι_X ν = β∧(dβ)^(n-1)", self.defining_residual < CHARACTERISTIC_TOL)
                .margin(self.defining_residual),
            Check::pass_if("ι_X(β∧(dβ)^(n-1)) = 0", self.flow_residual < CHARACTERISTIC_TOL).margin(self.flow_residual),
            Check::pass_if("β∧ι_X dβ = 0", self.tangency_residual < CHARACTERISTIC_TOL).margin(self.tangency_residual),
        ]
    }
}

/// Samples the defining equation and the flow-invariance identities of `X`.
pub fn check_characteristic(
    x: &VectorFieldExpr,
    beta: &DiffForm,
    nu: &DiffForm,
    n: usize,
    samples: &[Vec<f64>],
) -> Result<CharacteristicCheck, ContactError> {
    let chart = beta.chart();
    let rho = nu.top_coefficient()?.compile(&chart.names())?;
    let mut min_volume = f64::INFINITY;
    for p in samples {
        let v = rho.eval(p)?.abs();
        if v < 1e-14 {
            return Err(ContactError::VanishingVolume(p.clone()));
        }
        min_volume = min_volume.min(v);
    }
    let gamma = gamma_form(beta, n)?;
    let defining = nu.interior_product(x)?.max_abs_diff(&gamma, samples)?;
    let flow = gamma.interior_product(x)?.max_abs_coefficient(samples)?;
    let tangency = beta.wedge(&beta.exterior_derivative()?.interior_product(x)?)?.max_abs_coefficient(samples)?;
    Ok(CharacteristicCheck {
        samples: samples.len(),
        defining_residual: defining,
        flow_residual: flow,
        tangency_residual: tangency,
        min_volume,
    })
}

/// Largest 2×2 minor of `(X₁, X₂)` and smallest `X₁·X₂` over `samples`:
/// the fields are positively proportional when the first is ~0 and the
/// second is nonnegative.
pub fn proportionality(
    x1: &VectorFieldExpr,
    x2: &VectorFieldExpr,
    samples: &[Vec<f64>],
) -> Result<(f64, f64), ContactError> {
    let (c1, c2) = (x1.compile()?, x2.compile()?);
    let mut cross = 0.0_f64;
    let mut dot = f64::INFINITY;
    for p in samples {
        let a = eval_all(&c1, p)?;
        let b = eval_all(&c2, p)?;
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                cross = cross.max((a[i] * b[j] - a[j] * b[i]).abs());
            }
        }
        dot = dot.min(a.iter().zip(&b).map(|(u, v)| u * v).sum());
    }
    Ok((cross, dot))
}

fn eval_all(c: &[Compiled], p: &[f64]) -> Result<Vec<f64>, ContactError> {
    c.iter().map(|e| e.eval(p).map_err(ContactError::from)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tangency {
    Positive,
    Negative,
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularPoint {
    pub location: Vec<f64>,
    pub sign: Tangency,
    pub index: i64,
    pub divergence: f64,
    /// `"winding"` on 2D charts, `"jacobian"` otherwise.
    pub method: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Boundary {
    None,
    /// Sphere of the given radius about the origin.
    Sphere {
        radius: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CharFolConfig {
    pub seeds_per_axis: usize,
    pub dedup_radius: f64,
    /// More distinct zeros than this is treated as a non-isolated zero set.
    pub max_points: usize,
    pub boundary: Boundary,
    pub boundary_samples: usize,
}

impl Default for CharFolConfig {
    fn default() -> Self {
        CharFolConfig {
            seeds_per_axis: 32,
            dedup_radius: 1e-4,
            max_points: 64,
            boundary: Boundary::None,
            boundary_samples: 2048,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CharFolReport {
    pub dimension: usize,
    pub orientation: String,
    pub seeds: usize,
    pub singular_points: Vec<SingularPoint>,
    pub negative_index_sum: i64,
    pub positive_index_sum: i64,
    /// Smallest outward component of `X` on the boundary.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_outward: Option<Extremum>,
    pub boundary_verdict: Verdict,
    /// Whether the sum of indices over negative points is `≤ 0`.
    pub tb_holds: bool,
}

impl CharFolReport {
    pub fn checks(&self) -> Vec<Check> {
        let mut b = Check::new("boundary transverse outward", self.boundary_verdict);
        if let Some(e) = &self.boundary_outward {
            b = b.margin(e.value).location(super::loc(&e.at));
        }
        vec![
            Check::pass_if("negative index sum <= 0", self.tb_holds)
                .margin(-(self.negative_index_sum as f64))
                .detail(format!("S- sum {}, S+ sum {}", self.negative_index_sum, self.positive_index_sum)),
            b,
        ]
    }
}

struct FieldEval {
    comps: Vec<Compiled>,
    jac: Vec<Vec<Compiled>>,
    div: Compiled,
}

impl FieldEval {
    fn new(x: &VectorFieldExpr) -> Result<FieldEval, ContactError> {
        let names = x.chart().names();
        let jac = x
            .jacobian()?
            .iter()
            .map(|row| row.iter().map(|e| e.compile(&names).map_err(ContactError::from)).collect())
            .collect::<Result<_, ContactError>>()?;
        Ok(FieldEval { comps: x.compile()?, jac, div: x.divergence()?.compile(&names)? })
    }

    fn value(&self, p: &[f64]) -> Result<DVector<f64>, ContactError> {
        Ok(DVector::from_vec(eval_all(&self.comps, p)?))
    }

    fn jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>, ContactError> {
        let d = self.comps.len();
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = self.jac[i][j].eval(p)?;
            }
        }
        Ok(m)
    }
}

fn axis_box(chart: &Chart) -> Vec<(f64, f64)> {
    chart.coords().iter().map(|c| (c.lo, c.hi)).collect()
}

fn inside(p: &[f64], bx: &[(f64, f64)]) -> bool {
    p.iter().zip(bx).all(|(v, (lo, hi))| {
        let tol = 1e-9 * (hi - lo).max(1.0);
        *v >= lo - tol && *v <= hi + tol
    })
}

/// Gauss–Newton with an SVD solve, so singular Jacobians still make progress
/// towards a zero set.
fn newton(f: &FieldEval, seed: Vec<f64>, bx: &[(f64, f64)]) -> Result<Option<Vec<f64>>, ContactError> {
    let mut p = seed;
    for _ in 0..NEWTON_MAX_ITER {
        let v = match f.value(&p) {
            Ok(v) => v,
            Err(_) => return Ok(None),
        };
        if v.amax() < NEWTON_TOL {
            return Ok(Some(p));
        }
        let j = f.jacobian(&p)?;
        let step = match j.svd(true, true).solve(&v, 1e-14) {
            Ok(s) => s,
            Err(_) => return Ok(None),
        };
        if !step.iter().all(|s| s.is_finite()) {
            return Ok(None);
        }
        for (x, s) in p.iter_mut().zip(step.iter()) {
            *x -= s;
        }
        if !inside(&p, bx) {
            return Ok(None);
        }
    }
    let v = f.value(&p)?;
    Ok(if v.amax() < NEWTON_TOL { Some(p) } else { None })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn winding_number(f: &FieldEval, p: &[f64], radius: f64) -> Result<Option<i64>, ContactError> {
    let mut total = 0.0;
    let angle = |q: &[f64]| -> Result<Option<f64>, ContactError> {
        let v = f.value(q)?;
        Ok(if v.norm() > 0.0 { Some(v[1].atan2(v[0])) } else { None })
    };
    let at = |k: usize| {
        let th = TAU * k as f64 / WINDING_SAMPLES as f64;
        vec![p[0] + radius * th.cos(), p[1] + radius * th.sin()]
    };
    let Some(mut prev) = angle(&at(0))? else { return Ok(None) };
    for k in 1..=WINDING_SAMPLES {
        let Some(a) = angle(&at(k))? else { return Ok(None) };
        let mut d = a - prev;
        while d > std::f64::consts::PI {
            d -= TAU;
        }
        while d < -std::f64::consts::PI {
            d += TAU;
        }
        total += d;
        prev = a;
    }
    let w = total / TAU;
    Ok(if (w - w.round()).abs() < 1e-6 { Some(w.round() as i64) } else { None })
}

fn seeds(bx: &[(f64, f64)], n: usize) -> Vec<Vec<f64>> {
    let axis = |(lo, hi): (f64, f64)| -> Vec<f64> {
        if n == 1 {
            vec![0.5 * (lo + hi)]
        } else {
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
        }
    };
    let mut out = vec![Vec::new()];
    for &b in bx {
        let vals = axis(b);
        out = out.iter().flat_map(|p| vals.iter().map(move |v| [p.as_slice(), &[*v]].concat())).collect();
    }
    out
}

fn boundary_points(d: usize, radius: f64, count: usize) -> Vec<Vec<f64>> {
    if d == 2 {
        return (0..count)
            .map(|k| {
                let th = TAU * k as f64 / count as f64;
                vec![radius * th.cos(), radius * th.sin()]
            })
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(count + 2 * d);
    for i in 0..d {
        for s in [-1.0, 1.0] {
            let mut e = vec![0.0; d];
            e[i] = s * radius;
            out.push(e);
        }
    }
    while out.len() < count + 2 * d {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            out.push(v.iter().map(|x| radius * x / n).collect());
        }
    }
    out
}

/// Finds the zeros of `X` by Newton from a seed grid over the chart box and
/// classifies each by sign (divergence) and index.
pub fn charfol_report(x: &VectorFieldExpr, cfg: &CharFolConfig) -> Result<CharFolReport, ContactError> {
    let chart = x.chart().clone();
    let d = chart.dim();
    let f = FieldEval::new(x)?;
    let bx = axis_box(&chart);
    let seed_list = seeds(&bx, cfg.seeds_per_axis);
    let found: Vec<Vec<f64>> = seed_list
        .into_par_iter()
        .map(|s| newton(&f, s, &bx))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut points: Vec<Vec<f64>> = Vec::new();
    for p in found {
        if !points.iter().any(|q| dist(q, &p) < cfg.dedup_radius) {
            points.push(p);
            if points.len() > cfg.max_points {
                return Err(ContactError::NonIsolated(format!("more than {} distinct zeros", cfg.max_points)));
            }
        }
    }
    points.sort_by(|a, b| {
        a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    let spacing =
        bx.iter().map(|(lo, hi)| (hi - lo) / (cfg.seeds_per_axis.max(2) - 1) as f64).fold(f64::INFINITY, f64::min);

    let mut singular = Vec::with_capacity(points.len());
    for (k, p) in points.iter().enumerate() {
        let nearest =
            points.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, q)| dist(p, q)).fold(f64::INFINITY, f64::min);
        let det = f.jacobian(p)?.determinant();
        let degenerate = det.abs() < DEGENERATE_DET;
        if degenerate && nearest < 1.5 * spacing {
            return Err(ContactError::NonIsolated(format!("degenerate zeros accumulate near {p:?}")));
        }
        let (index, method) = if d == 2 {
            let radius = (0.25 * nearest).min(1e-3);
            match winding_number(&f, p, radius)? {
                Some(w) => (w, "winding"),
                None if !degenerate => (det.signum() as i64, "jacobian"),
                None => return Err(ContactError::Degenerate(format!("index undetermined at {p:?}"))),
            }
        } else if !degenerate {
            (det.signum() as i64, "jacobian")
        } else {
            return Err(ContactError::Degenerate(format!("degenerate zero at {p:?}")));
        };
        let divergence = f.div.eval(p)?;
        if divergence.abs() < 1e-12 {
            return Err(ContactError::Degenerate(format!("divergence vanishes at zero {p:?}")));
        }
        singular.push(SingularPoint {
            location: p.clone(),
            sign: if divergence > 0.0 { Tangency::Positive } else { Tangency::Negative },
            index,
            divergence,
            method: method.into(),
        });
    }
    let sum = |s: Tangency| singular.iter().filter(|p| p.sign == s).map(|p| p.index).sum::<i64>();
    let (neg, pos) = (sum(Tangency::Negative), sum(Tangency::Positive));

    let (boundary_outward, boundary_verdict) = match cfg.boundary {
        Boundary::None => (None, Verdict::Skip),
        Boundary::Sphere { radius } => {
            let pts = boundary_points(d, radius, cfg.boundary_samples);
            let vals = pts
                .par_iter()
                .map(|q| {
                    let v = f.value(q)?;
                    let out: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum::<f64>() / radius;
                    Ok((out, q.clone()))
                })
                .collect::<Result<Vec<_>, ContactError>>()?;
            let e = Extremum::min_of(vals);
            let v = Verdict::from_bool(e.value > 0.0);
            (Some(e), v)
        }
    };
    Ok(CharFolReport {
        dimension: d,
        orientation: format!("coordinate order ({})", chart.names().join(", ")),
        seeds: cfg.seeds_per_axis.pow(d as u32),
        singular_points: singular,
        negative_index_sum: neg,
        positive_index_sum: pos,
        boundary_outward,
        boundary_verdict,
        tb_holds: neg <= 0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiskModel {
    /// `{z = 0}` in `(ℝ³, dz + x dy − y dx)`.
    Disk3d,
    /// `{t = 0}` in `(ℝ⁵, dt + x₁dy₁ − y₁dx₁ + x₂dy₂ − y₂dx₂)`.
    Disk5d,
}

impl std::str::FromStr for DiskModel {
    type Err = ContactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "disk3d" => Ok(DiskModel::Disk3d),
            "disk5d" => Ok(DiskModel::Disk5d),
            _ => Err(ContactError::Invalid(format!("unknown model '{s}' (disk3d or disk5d)"))),
        }
    }
}

/// `(β, ν, n)` of the disk model on the unit box.
pub fn disk_model(model: DiskModel) -> Result<(DiffForm, DiffForm, usize), ContactError> {
    let names: &[&str] = match model {
        DiskModel::Disk3d => &["x", "y"],
        DiskModel::Disk5d => &["x1", "y1", "x2", "y2"],
    };
    let chart = Arc::new(Chart::new(names)?);
    let mut beta = DiffForm::zero(&chart, 1);
    for pair in names.chunks(2) {
        beta = beta.add(&DiffForm::monomial(&chart, Expr::var(pair[0]), &[pair[1]])?)?.add(&DiffForm::monomial(
            &chart,
            -Expr::var(pair[1]),
            &[pair[0]],
        )?)?;
    }
    Ok((beta, DiffForm::volume(&chart), names.len() / 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere() -> CharFolConfig {
        CharFolConfig { boundary: Boundary::Sphere { radius: 1.0 }, ..CharFolConfig::default() }
    }

    #[test]
    fn disk3d_is_radial() {
        let (beta, nu, n) = disk_model(DiskModel::Disk3d).unwrap();
        let x = characteristic_field(&beta, &nu, n).unwrap();
        let c = x.compile().unwrap();
        assert_eq!(c[0].eval(&[0.3, -0.7]).unwrap(), 0.3);
        assert_eq!(c[1].eval(&[0.3, -0.7]).unwrap(), -0.7);
        let r = charfol_report(&x, &sphere()).unwrap();
        assert_eq!(r.singular_points.len(), 1);
        let p = &r.singular_points[0];
        assert_eq!((p.sign, p.index), (Tangency::Positive, 1));
        assert!((p.divergence - 2.0).abs() < 1e-12);
        assert!(r.tb_holds && r.boundary_verdict == Verdict::Pass);
    }

    #[test]
    fn disk5d_is_twice_radial() {
        let (beta, nu, n) = disk_model(DiskModel::Disk5d).unwrap();
        let x = characteristic_field(&beta, &nu, n).unwrap();
        let p = [0.1, 0.2, -0.3, 0.4];
        for (c, v) in x.compile().unwrap().iter().zip(p) {
            assert!((c.eval(&p).unwrap() - 2.0 * v).abs() < 1e-15);
        }
        let chk = check_characteristic(&x, &beta, &nu, n, &beta.chart().random_samples(100, 1)).unwrap();
        assert!(chk.passed(), "{chk:?}");
    }

    #[test]
    fn saddle_and_empty() {
        let chart = Arc::new(Chart::new(&["x", "y"]).unwrap());
        let saddle = VectorFieldExpr::new(&chart, vec![Expr::var("x"), -Expr::var("y") * Expr::constant(0.5)]).unwrap();
        let r = charfol_report(&saddle, &CharFolConfig::default()).unwrap();
        assert_eq!(r.singular_points.len(), 1);
        assert_eq!(r.singular_points[0].index, -1);
        let shifted = VectorFieldExpr::new(&chart, vec![Expr::constant(1.0), Expr::var("y")]).unwrap();
        let r = charfol_report(&shifted, &CharFolConfig::default()).unwrap();
        assert!(r.singular_points.is_empty());
        assert_eq!((r.negative_index_sum, r.positive_index_sum), (0, 0));
        assert!(r.tb_holds);
    }

    #[test]
    fn negative_sink_breaks_tb() {
        let chart = Arc::new(Chart::new(&["x", "y"]).unwrap());
        let sink = VectorFieldExpr::new(&chart, vec![-Expr::var("x"), -Expr::var("y")]).unwrap();
        let r = charfol_report(&sink, &sphere()).unwrap();
        assert_eq!(r.singular_points[0].sign, Tangency::Negative);
        assert!(!r.tb_holds);
        assert_eq!(r.boundary_verdict, Verdict::Fail);
    }

    #[test]
    fn zero_line_is_rejected() {
        let chart = Arc::new(Chart::new(&["x", "y"]).unwrap());
        let line = VectorFieldExpr::new(&chart, vec![Expr::var("x"), Expr::zero()]).unwrap();
        assert!(matches!(charfol_report(&line, &CharFolConfig::default()), Err(ContactError::NonIsolated(_))));
    }

    #[test]
    fn degenerate_inputs() {
        let (beta, nu, _) = disk_model(DiskModel::Disk3d).unwrap();
        let zero = DiffForm::zero(beta.chart(), 1);
        assert!(matches!(characteristic_field(&zero, &nu, 1), Err(ContactError::Degenerate(_))));
        assert!(matches!(
            characteristic_field(&beta, &DiffForm::zero(beta.chart(), 2), 1),
            Err(ContactError::VanishingVolume(_))
        ));
        assert!(characteristic_field(&beta, &nu, 2).is_err());
        let nu_bad = nu.scale(&Expr::var("x"));
        let x = characteristic_field(&beta, &DiffForm::volume(beta.chart()), 1).unwrap();
        assert!(matches!(
            check_characteristic(&x, &beta, &nu_bad, 1, &[vec![0.0, 0.5]]),
            Err(ContactError::VanishingVolume(_))
        ));
    }

    #[test]
    fn volume_rescaling_keeps_direction() {
        let (beta, nu, n) = disk_model(DiskModel::Disk3d).unwrap();
        let x1 = characteristic_field(&beta, &nu, n).unwrap();
        let nu2 = nu.scale(&(Expr::one() + Expr::var("x").powi(2)));
        let x2 = characteristic_field(&beta, &nu2, n).unwrap();
        let (cross, dot) = proportionality(&x1, &x2, &beta.chart().random_samples(200, 9)).unwrap();
        assert!(cross < 1e-12 && dot >= 0.0);
    }
}
