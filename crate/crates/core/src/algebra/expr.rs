//! Scalar expression trees with exact symbolic differentiation.
//!
//! Expressions are immutable and cheaply clonable (`Arc`-backed). The
//! constructors perform light local simplification (constant folding,
//! dropping additive zeros and multiplicative ones) so that derivatives of
//! cutoff-gated coefficients stay small; there is no general simplifier.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::AlgebraError;

/// Highest derivative order of the quintic smoothstep that is not identically zero.
const SMOOTHSTEP_MAX_ORDER: u8 = 5;

/// Named smooth primitive applied to a single argument.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Prim {
    Exp,
    Log,
    Sin,
    Cos,
    /// Absolute value. Has no registered derivative rule.
    Abs,
    /// `order`-th derivative (in the argument) of the cutoff that is 0 for
    /// `u <= lo`, 1 for `u >= hi` and the quintic smoothstep
    /// `s(w) = w^3 (10 - 15 w + 6 w^2)`, `w = (u - lo)/(hi - lo)`, in between.
    Smoothstep {
        lo: f64,
        hi: f64,
        order: u8,
    },
}

impl Prim {
    pub fn name(&self) -> &'static str {
        match self {
            Prim::Exp => "exp",
            Prim::Log => "log",
            Prim::Sin => "sin",
            Prim::Cos => "cos",
            Prim::Abs => "abs",
            Prim::Smoothstep { .. } => "smoothstep",
        }
    }

    fn apply(&self, u: f64) -> Result<f64, AlgebraError> {
        match *self {
            Prim::Exp => Ok(u.exp()),
            Prim::Log => {
                if u > 0.0 {
                    Ok(u.ln())
                } else {
                    Err(AlgebraError::Domain(format!("log of non-positive value {u}")))
                }
            }
            Prim::Sin => Ok(u.sin()),
            Prim::Cos => Ok(u.cos()),
            Prim::Abs => Ok(u.abs()),
            Prim::Smoothstep { lo, hi, order } => Ok(smoothstep(u, lo, hi, order)),
        }
    }
}

/// Evaluates the `order`-th derivative of the rescaled quintic smoothstep.
pub fn smoothstep(u: f64, lo: f64, hi: f64, order: u8) -> f64 {
    let width = hi - lo;
    let w = (u - lo) / width;
    if w <= 0.0 {
        return 0.0;
    }
    if w >= 1.0 {
        return if order == 0 { 1.0 } else { 0.0 };
    }
    let v = match order {
        0 => w * w * w * (10.0 - 15.0 * w + 6.0 * w * w),
        1 => 30.0 * w * w * (1.0 - w) * (1.0 - w),
        2 => 60.0 * w - 180.0 * w * w + 120.0 * w * w * w,
        3 => 60.0 - 360.0 * w + 360.0 * w * w,
        4 => -360.0 + 720.0 * w,
        5 => 720.0,
        _ => 0.0,
    };
    v / width.powi(order as i32)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Const(f64),
    Var(Arc<str>),
    Sum(Vec<Expr>),
    /// Factors are kept in construction order.
    Product(Vec<Expr>),
    Pow(Expr, i32),
    Apply(Prim, Expr),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr(Arc<Node>);

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(c: f64) -> Expr {
        Expr(Arc::new(Node::Const(c)))
    }

    pub fn zero() -> Expr {
        Expr::constant(0.0)
    }

    pub fn one() -> Expr {
        Expr::constant(1.0)
    }

    pub fn var(name: &str) -> Expr {
        Expr(Arc::new(Node::Var(Arc::from(name))))
    }

    pub fn as_const(&self) -> Option<f64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    pub fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
        let mut flat = Vec::new();
        let mut c = 0.0;
        for t in terms {
            match t.node() {
                Node::Const(v) => c += v,
                Node::Sum(inner) => {
                    for s in inner {
                        match s.node() {
                            Node::Const(v) => c += v,
                            _ => flat.push(s.clone()),
                        }
                    }
                }
                _ => flat.push(t),
            }
        }
        if c != 0.0 {
            flat.push(Expr::constant(c));
        }
        match flat.len() {
            0 => Expr::zero(),
            1 => flat.pop().unwrap(),
            _ => Expr(Arc::new(Node::Sum(flat))),
        }
    }

    pub fn product(factors: impl IntoIterator<Item = Expr>) -> Expr {
        let mut flat = Vec::new();
        let mut c = 1.0;
        for f in factors {
            match f.node() {
                Node::Const(v) => c *= v,
                Node::Product(inner) => {
                    for g in inner {
                        match g.node() {
                            Node::Const(v) => c *= v,
                            _ => flat.push(g.clone()),
                        }
                    }
                }
                _ => flat.push(f),
            }
        }
        if c == 0.0 {
            return Expr::zero();
        }
        if c != 1.0 {
            flat.insert(0, Expr::constant(c));
        }
        match flat.len() {
            0 => Expr::one(),
            1 => flat.pop().unwrap(),
            _ => Expr(Arc::new(Node::Product(flat))),
        }
    }

    pub fn powi(&self, n: i32) -> Expr {
        match (self.node(), n) {
            (_, 0) => Expr::one(),
            (_, 1) => self.clone(),
            (Node::Const(c), _) => Expr::constant(c.powi(n)),
            (Node::Pow(base, m), _) => base.powi(m * n),
            _ => Expr(Arc::new(Node::Pow(self.clone(), n))),
        }
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    pub fn apply(prim: Prim, arg: Expr) -> Expr {
        if let Some(c) = arg.as_const() {
            if let Ok(v) = prim.apply(c) {
                return Expr::constant(v);
            }
        }
        Expr(Arc::new(Node::Apply(prim, arg)))
    }

    pub fn exp(&self) -> Expr {
        Expr::apply(Prim::Exp, self.clone())
    }

    pub fn ln(&self) -> Expr {
        Expr::apply(Prim::Log, self.clone())
    }

    pub fn sin(&self) -> Expr {
        Expr::apply(Prim::Sin, self.clone())
    }

    pub fn cos(&self) -> Expr {
        Expr::apply(Prim::Cos, self.clone())
    }

    /// Cutoff rising from 0 at `lo` to 1 at `hi`.
    pub fn smoothstep(&self, lo: f64, hi: f64) -> Expr {
        Expr::apply(Prim::Smoothstep { lo, hi, order: 0 }, self.clone())
    }

    /// Sorted set of variable names occurring in the expression.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self.node() {
            Node::Const(_) => {}
            Node::Var(v) => {
                out.insert(v.to_string());
            }
            Node::Sum(xs) | Node::Product(xs) => xs.iter().for_each(|x| x.collect_vars(out)),
            Node::Pow(b, _) => b.collect_vars(out),
            Node::Apply(_, a) => a.collect_vars(out),
        }
    }

    /// Exact symbolic derivative with respect to `var`.
    pub fn diff(&self, var: &str) -> Result<Expr, AlgebraError> {
        Ok(match self.node() {
            Node::Const(_) => Expr::zero(),
            Node::Var(v) => {
                if &**v == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Sum(xs) => {
                let mut terms = Vec::with_capacity(xs.len());
                for x in xs {
                    terms.push(x.diff(var)?);
                }
                Expr::sum(terms)
            }
            Node::Product(xs) => {
                let mut terms = Vec::new();
                for i in 0..xs.len() {
                    let di = xs[i].diff(var)?;
                    if di.is_zero() {
                        continue;
                    }
                    let factors = xs.iter().enumerate().map(|(j, x)| if i == j { di.clone() } else { x.clone() });
                    terms.push(Expr::product(factors));
                }
                Expr::sum(terms)
            }
            Node::Pow(b, n) => {
                let db = b.diff(var)?;
                if db.is_zero() {
                    Expr::zero()
                } else {
                    Expr::product([Expr::constant(*n as f64), b.powi(n - 1), db])
                }
            }
            Node::Apply(p, a) => {
                let da = a.diff(var)?;
                if da.is_zero() {
                    return Ok(Expr::zero());
                }
                let outer = match *p {
                    Prim::Exp => self.clone(),
                    Prim::Log => a.recip(),
                    Prim::Sin => a.cos(),
                    Prim::Cos => -a.sin(),
                    Prim::Abs => return Err(AlgebraError::NoDerivativeRule(p.name().into())),
                    Prim::Smoothstep { lo, hi, order } => {
                        if order >= SMOOTHSTEP_MAX_ORDER {
                            Expr::zero()
                        } else {
                            Expr::apply(Prim::Smoothstep { lo, hi, order: order + 1 }, a.clone())
                        }
                    }
                };
                Expr::product([outer, da])
            }
        })
    }

    /// Replaces every occurrence of the variable `var` by `with`.
    pub fn substitute(&self, var: &str, with: &Expr) -> Expr {
        match self.node() {
            Node::Const(_) => self.clone(),
            Node::Var(v) => {
                if &**v == var {
                    with.clone()
                } else {
                    self.clone()
                }
            }
            Node::Sum(xs) => Expr::sum(xs.iter().map(|x| x.substitute(var, with))),
            Node::Product(xs) => Expr::product(xs.iter().map(|x| x.substitute(var, with))),
            Node::Pow(b, n) => b.substitute(var, with).powi(*n),
            Node::Apply(p, a) => Expr::apply(*p, a.substitute(var, with)),
        }
    }

    /// Simultaneous substitution of several variables.
    pub fn substitute_all(&self, map: &[(String, Expr)]) -> Expr {
        match self.node() {
            Node::Const(_) => self.clone(),
            Node::Var(v) => map
                .iter()
                .find(|(name, _)| name.as_str() == &**v)
                .map(|(_, e)| e.clone())
                .unwrap_or_else(|| self.clone()),
            Node::Sum(xs) => Expr::sum(xs.iter().map(|x| x.substitute_all(map))),
            Node::Product(xs) => Expr::product(xs.iter().map(|x| x.substitute_all(map))),
            Node::Pow(b, n) => b.substitute_all(map).powi(*n),
            Node::Apply(p, a) => Expr::apply(*p, a.substitute_all(map)),
        }
    }

    /// Binds variable names to slot indices for fast repeated evaluation.
    pub fn compile(&self, vars: &[&str]) -> Result<Compiled, AlgebraError> {
        Ok(Compiled(self.compile_node(vars)?))
    }

    fn compile_node(&self, vars: &[&str]) -> Result<CNode, AlgebraError> {
        Ok(match self.node() {
            Node::Const(c) => CNode::Const(*c),
            Node::Var(v) => match vars.iter().position(|n| *n == &**v) {
                Some(i) => CNode::Var(i),
                None => return Err(AlgebraError::UnknownVariable(v.to_string())),
            },
            Node::Sum(xs) => CNode::Sum(xs.iter().map(|x| x.compile_node(vars)).collect::<Result<_, _>>()?),
            Node::Product(xs) => CNode::Product(xs.iter().map(|x| x.compile_node(vars)).collect::<Result<_, _>>()?),
            Node::Pow(b, n) => CNode::Pow(Box::new(b.compile_node(vars)?), *n),
            Node::Apply(p, a) => CNode::Apply(*p, Box::new(a.compile_node(vars)?)),
        })
    }

    /// One-off evaluation at a named assignment.
    pub fn eval(&self, assignment: &[(&str, f64)]) -> Result<f64, AlgebraError> {
        let names: Vec<&str> = assignment.iter().map(|(n, _)| *n).collect();
        let values: Vec<f64> = assignment.iter().map(|(_, v)| *v).collect();
        self.compile(&names)?.eval(&values)
    }

    fn precedence(&self) -> u8 {
        match self.node() {
            Node::Sum(_) => 1,
            Node::Product(_) => 2,
            Node::Const(c) if *c < 0.0 => 1,
            Node::Pow(..) => 3,
            _ => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.precedence() < min;
        if paren {
            write!(f, "(")?;
        }
        match self.node() {
            Node::Const(c) => write!(f, "{c:?}")?,
            Node::Var(v) => write!(f, "{v}")?,
            Node::Sum(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    x.fmt_prec(f, 2)?;
                }
            }
            Node::Product(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " * ")?;
                    }
                    x.fmt_prec(f, 3)?;
                }
            }
            Node::Pow(b, n) => {
                b.fmt_prec(f, 4)?;
                if *n < 0 {
                    write!(f, "^({n})")?;
                } else {
                    write!(f, "^{n}")?;
                }
            }
            Node::Apply(p, a) => match p {
                Prim::Smoothstep { lo, hi, order: 0 } => write!(f, "smoothstep({a}, {lo:?}, {hi:?})")?,
                Prim::Smoothstep { lo, hi, order } => write!(f, "smoothstep_d({a}, {lo:?}, {hi:?}, {order})")?,
                _ => write!(f, "{}({a})", p.name())?,
            },
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Self {
        Expr::constant(c)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::sum([self, rhs])
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        Expr::sum([self.clone(), rhs.clone()])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sum([self, -rhs])
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        Expr::sum([self.clone(), -rhs.clone()])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::product([self, rhs])
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        Expr::product([self.clone(), rhs.clone()])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::product([Expr::constant(-1.0), self])
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}

#[derive(Clone, Debug)]
enum CNode {
    Const(f64),
    Var(usize),
    Sum(Vec<CNode>),
    Product(Vec<CNode>),
    Pow(Box<CNode>, i32),
    Apply(Prim, Box<CNode>),
}

/// Expression with variables resolved to positions in a value slice.
#[derive(Clone, Debug)]
pub struct Compiled(CNode);

impl Compiled {
    pub fn eval(&self, values: &[f64]) -> Result<f64, AlgebraError> {
        let v = eval_node(&self.0, values)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(AlgebraError::Domain(format!("non-finite value {v}")))
        }
    }
}

fn eval_node(n: &CNode, x: &[f64]) -> Result<f64, AlgebraError> {
    match n {
        CNode::Const(c) => Ok(*c),
        CNode::Var(i) => Ok(x[*i]),
        CNode::Sum(xs) => {
            let mut acc = 0.0;
            for t in xs {
                acc += eval_node(t, x)?;
            }
            Ok(acc)
        }
        // A factor that evaluates to exactly zero annihilates the product even
        // when another factor is undefined there (cutoff-gated terms).
        CNode::Product(xs) => {
            let mut acc = 1.0;
            let mut err = None;
            for t in xs {
                match eval_node(t, x) {
                    Ok(0.0) => return Ok(0.0),
                    Ok(v) => acc *= v,
                    Err(e) => err = err.or(Some(e)),
                }
            }
            match err {
                Some(e) => Err(e),
                None => Ok(acc),
            }
        }
        CNode::Pow(b, e) => {
            let v = eval_node(b, x)?;
            if v == 0.0 && *e < 0 {
                return Err(AlgebraError::Domain("division by zero".into()));
            }
            Ok(v.powi(*e))
        }
        CNode::Apply(p, a) => p.apply(eval_node(a, x)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::var("x")
    }

    #[test]
    fn power_rule() {
        let r = Expr::var("r");
        let d = r.powi(2).diff("r").unwrap();
        assert_eq!(d.eval(&[("r", 3.0)]).unwrap(), 6.0);
        assert_eq!(d.to_string(), "2.0 * r");
    }

    #[test]
    fn constant_derivative_is_zero() {
        assert!(Expr::constant(5.0).diff("x").unwrap().is_zero());
    }

    #[test]
    fn derivative_of_inverse_s_log_s() {
        let s = Expr::var("s");
        let g = (&s * &s.ln()).recip();
        let dg = g.diff("s").unwrap();
        let e2 = std::f64::consts::E.powi(2);
        let v = dg.eval(&[("s", e2)]).unwrap();
        let expected = -3.0 / (4.0 * std::f64::consts::E.powi(4));
        assert!((v - expected).abs() < 1e-15);
        let h = 1e-6;
        let fd = (g.eval(&[("s", e2 + h)]).unwrap() - g.eval(&[("s", e2 - h)]).unwrap()) / (2.0 * h);
        assert!((fd - expected).abs() / expected.abs() < 1e-6);
    }

    #[test]
    fn abs_has_no_derivative_rule() {
        let e = Expr::apply(Prim::Abs, x());
        assert!(matches!(e.diff("x"), Err(AlgebraError::NoDerivativeRule(_))));
    }

    #[test]
    fn log_domain_error() {
        assert!(matches!(x().ln().eval(&[("x", -1.0)]), Err(AlgebraError::Domain(_))));
    }

    #[test]
    fn zero_factor_gates_undefined_factor() {
        let gated = x().smoothstep(1.0, 2.0) * x().ln().recip();
        assert_eq!(gated.eval(&[("x", 0.5)]).unwrap(), 0.0);
        assert!(x().ln().recip().eval(&[("x", 1.0)]).is_err());
    }

    #[test]
    fn smoothstep_profile() {
        assert_eq!(smoothstep(0.0, 0.0, 1.0, 0), 0.0);
        assert_eq!(smoothstep(1.0, 0.0, 1.0, 0), 1.0);
        assert!((smoothstep(0.5, 0.0, 1.0, 0) - 0.5).abs() < 1e-15);
        // derivative scales with 1/width
        assert!((smoothstep(0.5, 0.0, 2.0, 1) - 30.0 * 0.0625 * 0.5625 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn unknown_variable_on_compile() {
        assert!(matches!(x().compile(&["y"]), Err(AlgebraError::UnknownVariable(_))));
    }

    #[test]
    fn display_round_trips_structure() {
        let e = (x().powi(-2) + Expr::constant(-3.0) * x().sin()).exp();
        assert_eq!(e.to_string(), "exp(x^(-2) + (-3.0) * sin(x))");
    }
}
