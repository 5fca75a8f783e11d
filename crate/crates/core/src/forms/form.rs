use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chart::Chart;
use super::FormsError;
use crate::algebra::{parse_expr, Compiled, Expr};

/// Differential form on a chart. Keys are strictly increasing index tuples.
#[derive(Clone, Debug)]
pub struct DiffForm {
    chart: Arc<Chart>,
    degree: usize,
    terms: BTreeMap<Vec<usize>, Expr>,
}

/// Vector field with one symbolic component per chart coordinate.
#[derive(Clone, Debug)]
pub struct VectorFieldExpr {
    chart: Arc<Chart>,
    components: Vec<Expr>,
}

/// Sign of the permutation sorting `idx` and the sorted result, or `None` on
/// a repeated index.
fn sort_sign(idx: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut v = idx.to_vec();
    let mut sign = 1.0;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> Result<(), FormsError> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(FormsError::ChartMismatch)
    }
}

impl DiffForm {
    pub fn zero(chart: &Arc<Chart>, degree: usize) -> DiffForm {
        DiffForm { chart: chart.clone(), degree, terms: BTreeMap::new() }
    }

    /// 0-form.
    pub fn function(chart: &Arc<Chart>, f: Expr) -> DiffForm {
        DiffForm::zero(chart, 0).with_term(vec![], f)
    }

    /// The coordinate 1-form `d(name)`.
    pub fn coordinate(chart: &Arc<Chart>, name: &str) -> Result<DiffForm, FormsError> {
        let i = chart.index_of(name)?;
        Ok(DiffForm::zero(chart, 1).with_term(vec![i], Expr::one()))
    }

    /// `f dx_{i1} ^ ... ^ dx_{ik}` for coordinate names in any order.
    pub fn monomial(chart: &Arc<Chart>, f: Expr, names: &[&str]) -> Result<DiffForm, FormsError> {
        let idx: Vec<usize> = names.iter().map(|n| chart.index_of(n)).collect::<Result<_, _>>()?;
        Ok(match sort_sign(&idx) {
            None => DiffForm::zero(chart, idx.len()),
            Some((sorted, s)) => DiffForm::zero(chart, idx.len()).with_term(sorted, Expr::constant(s) * f),
        })
    }

    /// The coordinate volume form `dx_1 ^ ... ^ dx_n`.
    pub fn volume(chart: &Arc<Chart>) -> DiffForm {
        DiffForm::zero(chart, chart.dim()).with_term((0..chart.dim()).collect(), Expr::one())
    }

    fn with_term(mut self, idx: Vec<usize>, c: Expr) -> DiffForm {
        self.push(idx, c);
        self
    }

    fn push(&mut self, idx: Vec<usize>, c: Expr) {
        if c.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&idx) {
            Some(old) => old + c,
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(idx, merged);
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, Expr> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `dx_I` for increasing `idx`.
    pub fn coefficient(&self, idx: &[usize]) -> Expr {
        self.terms.get(idx).cloned().unwrap_or_else(Expr::zero)
    }

    /// Coefficient of the top-degree basis element.
    pub fn top_coefficient(&self) -> Result<Expr, FormsError> {
        if self.degree != self.chart.dim() {
            return Err(FormsError::Degree(format!(
                "form has degree {} on a {}-dimensional chart",
                self.degree,
                self.chart.dim()
            )));
        }
        Ok(self.coefficient(&(0..self.degree).collect::<Vec<_>>()))
    }

    pub fn add(&self, other: &DiffForm) -> Result<DiffForm, FormsError> {
        same_chart(&self.chart, &other.chart)?;
        if self.degree != other.degree {
            return Err(FormsError::Degree("adding forms of different degree".into()));
        }
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.push(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DiffForm) -> Result<DiffForm, FormsError> {
        self.add(&other.scale(&Expr::constant(-1.0)))
    }

    /// Multiplication by a function.
    pub fn scale(&self, f: &Expr) -> DiffForm {
        let mut out = DiffForm::zero(&self.chart, self.degree);
        for (k, v) in &self.terms {
            out.push(k.clone(), f * v);
        }
        out
    }

    pub fn wedge(&self, other: &DiffForm) -> Result<DiffForm, FormsError> {
        same_chart(&self.chart, &other.chart)?;
        let deg = self.degree + other.degree;
        let mut out = DiffForm::zero(&self.chart, deg);
        if deg > self.chart.dim() {
            return Ok(out);
        }
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                let idx: Vec<usize> = i.iter().chain(j).copied().collect();
                if let Some((sorted, s)) = sort_sign(&idx) {
                    out.push(sorted, Expr::constant(s) * (a * b));
                }
            }
        }
        Ok(out)
    }

    /// `self ^ self ^ ... ^ self` (`n` factors); `n = 0` gives the constant 1.
    pub fn wedge_power(&self, n: usize) -> Result<DiffForm, FormsError> {
        let mut acc = DiffForm::function(&self.chart, Expr::one());
        for _ in 0..n {
            acc = acc.wedge(self)?;
        }
        Ok(acc)
    }

    pub fn exterior_derivative(&self) -> Result<DiffForm, FormsError> {
        let mut out = DiffForm::zero(&self.chart, self.degree + 1);
        if self.degree + 1 > self.chart.dim() {
            return Ok(out);
        }
        for (idx, c) in &self.terms {
            for j in 0..self.chart.dim() {
                if idx.contains(&j) {
                    continue;
                }
                let dc = c.diff(self.chart.name(j))?;
                if dc.is_zero() {
                    continue;
                }
                let mut full = vec![j];
                full.extend_from_slice(idx);
                if let Some((sorted, s)) = sort_sign(&full) {
                    out.push(sorted, Expr::constant(s) * dc);
                }
            }
        }
        Ok(out)
    }

    pub fn interior_product(&self, x: &VectorFieldExpr) -> Result<DiffForm, FormsError> {
        same_chart(&self.chart, &x.chart)?;
        if self.degree == 0 {
            return Ok(DiffForm::zero(&self.chart, 0));
        }
        let mut out = DiffForm::zero(&self.chart, self.degree - 1);
        for (idx, c) in &self.terms {
            for (p, &i) in idx.iter().enumerate() {
                let xi = &x.components[i];
                if xi.is_zero() {
                    continue;
                }
                let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                let mut rest = idx.clone();
                rest.remove(p);
                out.push(rest, Expr::constant(sign) * (xi * c));
            }
        }
        Ok(out)
    }

    /// Pullback along `map`, given as one expression per target coordinate in
    /// the source coordinates.
    pub fn pullback(&self, source: &Arc<Chart>, map: &[Expr]) -> Result<DiffForm, FormsError> {
        if map.len() != self.chart.dim() {
            return Err(FormsError::Map(format!(
                "map has {} components, target chart has dimension {}",
                map.len(),
                self.chart.dim()
            )));
        }
        let subst: Vec<(String, Expr)> =
            self.chart.names().iter().zip(map).map(|(n, e)| (n.to_string(), e.clone())).collect();
        let mut differentials = Vec::with_capacity(map.len());
        for comp in map {
            let mut d = DiffForm::zero(source, 1);
            for (j, name) in source.names().iter().enumerate() {
                d.push(vec![j], comp.diff(name)?);
            }
            differentials.push(d);
        }
        let mut out = DiffForm::zero(source, self.degree);
        for (idx, c) in &self.terms {
            let mut piece = DiffForm::function(source, c.substitute_all(&subst));
            for &i in idx {
                piece = piece.wedge(&differentials[i])?;
            }
            out = out.add(&piece)?;
        }
        Ok(out)
    }

    pub fn compile(&self) -> Result<CompiledForm, FormsError> {
        let names = self.chart.names();
        let terms = self
            .terms
            .iter()
            .map(|(k, v)| Ok((k.clone(), v.compile(&names)?)))
            .collect::<Result<Vec<_>, FormsError>>()?;
        Ok(CompiledForm { degree: self.degree, terms })
    }

    /// Largest absolute coefficient difference from `other` over `samples`.
    pub fn max_abs_diff(&self, other: &DiffForm, samples: &[Vec<f64>]) -> Result<f64, FormsError> {
        self.sub(other)?.max_abs_coefficient(samples)
    }

    /// Largest absolute coefficient value over `samples` (zero for the zero form).
    pub fn max_abs_coefficient(&self, samples: &[Vec<f64>]) -> Result<f64, FormsError> {
        let c = self.compile()?;
        samples
            .par_iter()
            .map(|p| c.eval(p).map(|v| v.values().fold(0.0_f64, |m, x| m.max(x.abs()))))
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
    }

    pub fn to_json(&self) -> FormJson {
        FormJson {
            chart: (*self.chart).clone(),
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| TermJson {
                    indices: k.iter().map(|&i| self.chart.name(i).to_string()).collect(),
                    expr: v.to_string(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &FormJson) -> Result<DiffForm, FormsError> {
        let chart = Arc::new(j.chart.clone());
        let mut out = DiffForm::zero(&chart, j.degree);
        for t in &j.terms {
            if t.indices.len() != j.degree {
                return Err(FormsError::Degree(format!("term {:?} does not have degree {}", t.indices, j.degree)));
            }
            let names: Vec<&str> = t.indices.iter().map(|s| s.as_str()).collect();
            out = out.add(&DiffForm::monomial(&chart, parse_expr(&t.expr)?, &names)?)?;
        }
        Ok(out)
    }
}

/// Serialized form: `{chart, degree, terms: [{indices, expr}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormJson {
    pub chart: Chart,
    pub degree: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub indices: Vec<String>,
    pub expr: String,
}

#[derive(Clone, Debug)]
pub struct CompiledForm {
    degree: usize,
    terms: Vec<(Vec<usize>, Compiled)>,
}

impl CompiledForm {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval(&self, point: &[f64]) -> Result<BTreeMap<Vec<usize>, f64>, FormsError> {
        self.terms.iter().map(|(k, c)| Ok((k.clone(), c.eval(point)?))).collect()
    }

    /// Value of the coefficient at `idx` (zero when absent).
    pub fn eval_at(&self, idx: &[usize], point: &[f64]) -> Result<f64, FormsError> {
        match self.terms.iter().find(|(k, _)| k == idx) {
            Some((_, c)) => Ok(c.eval(point)?),
            None => Ok(0.0),
        }
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self, point: &[f64]) -> Result<f64, FormsError> {
        Ok(self.eval(point)?.values().map(|v| v * v).sum::<f64>().sqrt())
    }
}

impl VectorFieldExpr {
    pub fn new(chart: &Arc<Chart>, components: Vec<Expr>) -> Result<VectorFieldExpr, FormsError> {
        if components.len() != chart.dim() {
            return Err(FormsError::Map(format!(
                "vector field has {} components on a {}-dimensional chart",
                components.len(),
                chart.dim()
            )));
        }
        Ok(VectorFieldExpr { chart: chart.clone(), components })
    }

    /// Coordinate vector field `d/d(name)`.
    pub fn coordinate(chart: &Arc<Chart>, name: &str) -> Result<VectorFieldExpr, FormsError> {
        let i = chart.index_of(name)?;
        let comps = (0..chart.dim()).map(|j| if i == j { Expr::one() } else { Expr::zero() }).collect();
        VectorFieldExpr::new(chart, comps)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn scale(&self, f: &Expr) -> VectorFieldExpr {
        VectorFieldExpr { chart: self.chart.clone(), components: self.components.iter().map(|c| f * c).collect() }
    }

    /// Coordinate divergence `sum d X^i / dx^i`.
    pub fn divergence(&self) -> Result<Expr, FormsError> {
        let mut terms = Vec::new();
        for (i, c) in self.components.iter().enumerate() {
            terms.push(c.diff(self.chart.name(i))?);
        }
        Ok(Expr::sum(terms))
    }

    /// Jacobian matrix `J[i][j] = d X^i / dx^j`.
    pub fn jacobian(&self) -> Result<Vec<Vec<Expr>>, FormsError> {
        let names = self.chart.names();
        self.components.iter().map(|c| names.iter().map(|n| c.diff(n).map_err(FormsError::from)).collect()).collect()
    }

    pub fn compile(&self) -> Result<Vec<Compiled>, FormsError> {
        let names = self.chart.names();
        Ok(self.components.iter().map(|c| c.compile(&names)).collect::<Result<_, _>>()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r3() -> Arc<Chart> {
        Arc::new(Chart::new(&["x", "y", "z"]).unwrap())
    }

    fn v(n: &str) -> Expr {
        Expr::var(n)
    }

    #[test]
    fn antisymmetry() {
        let c = r3();
        let dx = DiffForm::coordinate(&c, "x").unwrap();
        let dy = DiffForm::coordinate(&c, "y").unwrap();
        let a = dx.wedge(&dy).unwrap();
        let b = dy.wedge(&dx).unwrap();
        assert!(a.add(&b).unwrap().is_zero());
        assert!(dx.wedge(&dx).unwrap().is_zero());
    }

    #[test]
    fn standard_contact_form_volume() {
        let c = r3();
        let alpha =
            DiffForm::coordinate(&c, "z").unwrap().add(&DiffForm::monomial(&c, v("x"), &["y"]).unwrap()).unwrap();
        let vol = alpha.wedge(&alpha.exterior_derivative().unwrap()).unwrap();
        assert_eq!(vol.top_coefficient().unwrap().as_const(), Some(1.0));
    }

    #[test]
    fn derivative_examples() {
        let c = r3();
        let f = DiffForm::monomial(&c, v("x"), &["y"]).unwrap();
        let df = f.exterior_derivative().unwrap();
        assert_eq!(df.terms().len(), 1);
        assert_eq!(df.coefficient(&[0, 1]).as_const(), Some(1.0));

        let polar = Arc::new(Chart::new(&["r", "theta"]).unwrap());
        let g = DiffForm::monomial(&polar, v("r").powi(2), &["theta"]).unwrap();
        let dg = g.exterior_derivative().unwrap();
        assert_eq!(dg.coefficient(&[0, 1]).eval(&[("r", 0.5)]).unwrap(), 1.0);
    }

    #[test]
    fn interior_products() {
        let c = Arc::new(Chart::new(&["x", "y"]).unwrap());
        let area = DiffForm::volume(&c);
        let dx_field = VectorFieldExpr::coordinate(&c, "x").unwrap();
        let i = area.interior_product(&dx_field).unwrap();
        assert_eq!(i.coefficient(&[1]).as_const(), Some(1.0));
        assert!(i.coefficient(&[0]).is_zero());

        let radial = VectorFieldExpr::new(&c, vec![v("x"), v("y")]).unwrap();
        let j = area.interior_product(&radial).unwrap();
        let at = [("x", 0.3), ("y", -0.7)];
        assert_eq!(j.coefficient(&[1]).eval(&at).unwrap(), 0.3);
        assert_eq!(j.coefficient(&[0]).eval(&at).unwrap(), 0.7);
    }

    #[test]
    fn pullback_of_dx_under_square() {
        let target = Arc::new(Chart::new(&["x"]).unwrap());
        let source = Arc::new(Chart::new(&["t"]).unwrap());
        let dx = DiffForm::coordinate(&target, "x").unwrap();
        let pb = dx.pullback(&source, &[v("t").powi(2)]).unwrap();
        assert_eq!(pb.coefficient(&[0]).eval(&[("t", 1.5)]).unwrap(), 3.0);
    }

    #[test]
    fn pullback_under_identity() {
        let c = r3();
        let a = DiffForm::monomial(&c, v("x") * v("z").sin(), &["y", "z"]).unwrap();
        let pb = a.pullback(&c, &[v("x"), v("y"), v("z")]).unwrap();
        let samples = c.random_samples(20, 1);
        assert_eq!(pb.max_abs_diff(&a, &samples).unwrap(), 0.0);
    }

    #[test]
    fn chart_mismatch() {
        let a = DiffForm::coordinate(&r3(), "x").unwrap();
        let other = Arc::new(Chart::new(&["u", "v"]).unwrap());
        let b = DiffForm::coordinate(&other, "u").unwrap();
        assert!(matches!(a.wedge(&b), Err(FormsError::ChartMismatch)));
    }

    #[test]
    fn json_round_trip() {
        let c = r3();
        let a = DiffForm::monomial(&c, v("x").exp() - v("y"), &["z", "x"]).unwrap();
        let j = a.to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back = DiffForm::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        let samples = c.random_samples(10, 3);
        assert!(back.max_abs_diff(&a, &samples).unwrap() < 1e-15);
    }
}
