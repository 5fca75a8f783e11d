//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use sha2::{Digest, Sha256};

use super::AlgebraError;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact conversion of a finite float to a rational.
pub fn rat_from_f64(v: f64) -> Result<Rational, AlgebraError> {
    BigRational::from_float(v).ok_or_else(|| AlgebraError::Domain(format!("non-finite float {v}")))
}

/// Exponent vectors are ordered lexicographically by variable position;
/// the greatest key is the leading monomial.
#[derive(Clone, PartialEq, Eq)]
pub struct MPoly {
    vars: Arc<[String]>,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MPoly {
    pub fn zero(vars: &[&str]) -> MPoly {
        MPoly { vars: vars.iter().map(|s| s.to_string()).collect(), terms: BTreeMap::new() }
    }

    fn zero_like(&self) -> MPoly {
        MPoly { vars: self.vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &[&str], c: Rational) -> MPoly {
        let mut p = MPoly::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    pub fn constant_like(&self, c: Rational) -> MPoly {
        let mut p = self.zero_like();
        p.add_term(vec![0; self.vars.len()], c);
        p
    }

    /// The polynomial consisting of the single variable `name`.
    pub fn var(vars: &[&str], name: &str) -> Result<MPoly, AlgebraError> {
        let mut p = MPoly::zero(vars);
        let i = p.index_of(name)?;
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        p.add_term(e, Rational::one());
        Ok(p)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn index_of(&self, name: &str) -> Result<usize, AlgebraError> {
        self.vars.iter().position(|v| v == name).ok_or_else(|| AlgebraError::UnknownVariable(name.to_string()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, exp: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_ring(&self, other: &MPoly) {
        assert!(self.vars == other.vars, "polynomial ring mismatch: {:?} vs {:?}", self.vars, other.vars);
    }

    pub fn scale(&self, c: &Rational) -> MPoly {
        if c.is_zero() {
            return self.zero_like();
        }
        MPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> MPoly {
        let mut acc = self.constant_like(Rational::one());
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        acc
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Degree in one variable; `None` for the zero polynomial.
    pub fn degree_in(&self, var: &str) -> Result<Option<u32>, AlgebraError> {
        let i = self.index_of(var)?;
        Ok(self.terms.keys().map(|e| e[i]).max())
    }

    /// Largest power of `var` dividing the polynomial.
    pub fn min_degree_in(&self, var: &str) -> Result<u32, AlgebraError> {
        let i = self.index_of(var)?;
        Ok(self.terms.keys().map(|e| e[i]).min().unwrap_or(0))
    }

    /// Coefficients `c_0, ..., c_d` with `self = sum c_j var^j`; each `c_j`
    /// lives in the same ring with zero exponent in `var`.
    pub fn coefficients_in(&self, var: &str) -> Result<Vec<MPoly>, AlgebraError> {
        let i = self.index_of(var)?;
        let d = self.degree_in(var)?.unwrap_or(0) as usize;
        let mut out = vec![self.zero_like(); d + 1];
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[i] as usize;
            e2[i] = 0;
            out[k].add_term(e2, c.clone());
        }
        Ok(out)
    }

    pub fn leading_coefficient_in(&self, var: &str) -> Result<MPoly, AlgebraError> {
        Ok(self.coefficients_in(var)?.pop().unwrap_or_else(|| self.zero_like()))
    }

    pub fn derivative(&self, var: &str) -> Result<MPoly, AlgebraError> {
        let i = self.index_of(var)?;
        let mut out = self.zero_like();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c * int(e[i] as i64));
        }
        Ok(out)
    }

    /// Substitutes an exact value for `var`; the variable stays in the ring
    /// with exponent zero.
    pub fn substitute(&self, var: &str, value: &Rational) -> Result<MPoly, AlgebraError> {
        let i = self.index_of(var)?;
        let mut out = self.zero_like();
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[i];
            e2[i] = 0;
            out.add_term(e2, c * num_traits::pow(value.clone(), k as usize));
        }
        Ok(out)
    }

    /// Removes `var` from the ring; fails if it still occurs.
    pub fn drop_var(&self, var: &str) -> Result<MPoly, AlgebraError> {
        let i = self.index_of(var)?;
        if self.terms.keys().any(|e| e[i] != 0) {
            return Err(AlgebraError::Ring(format!("variable {var} still occurs")));
        }
        let vars: Arc<[String]> =
            self.vars.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v.clone()).collect();
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2.remove(i);
                (e2, c.clone())
            })
            .collect();
        Ok(MPoly { vars, terms })
    }

    /// Re-expresses the polynomial over a (super-)ring with the given
    /// variable order.
    pub fn embed(&self, vars: &[&str]) -> Result<MPoly, AlgebraError> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                vars.iter()
                    .position(|w| w == v)
                    .ok_or_else(|| AlgebraError::Ring(format!("variable {v} missing from target ring")))
            })
            .collect::<Result<_, _>>()?;
        let mut out = MPoly::zero(vars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; vars.len()];
            for (j, &k) in e.iter().enumerate() {
                e2[map[j]] = k;
            }
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder.
    pub fn div_exact(&self, divisor: &MPoly) -> Option<MPoly> {
        self.check_ring(divisor);
        let (lead_e, lead_c) = divisor.terms.iter().next_back()?;
        let mut rem = self.clone();
        let mut quot = self.zero_like();
        while let Some((e, c)) = rem.terms.iter().next_back() {
            if e.iter().zip(lead_e).any(|(a, b)| a < b) {
                return None;
            }
            let qe: Vec<u32> = e.iter().zip(lead_e).map(|(a, b)| a - b).collect();
            let qc = c / lead_c;
            let mut mono = self.zero_like();
            mono.add_term(qe.clone(), qc.clone());
            rem = &rem - &(&mono * divisor);
            quot.add_term(qe, qc);
        }
        Some(quot)
    }

    /// Exact rational value when the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Coefficient of the leading (lex-greatest) monomial.
    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.terms.values().next_back()
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = c.to_f64().unwrap_or(f64::NAN);
                for (k, x) in e.iter().zip(point) {
                    v *= x.powi(*k as i32);
                }
                v
            })
            .sum()
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
                for (k, x) in e.iter().zip(point) {
                    v *= x.powi(*k as i32);
                }
                v
            })
            .sum()
    }

    /// Univariate float coefficients (low degree first) after evaluating
    /// every other variable at the given complex values.
    pub fn univariate_complex(&self, var: &str, others: &[(&str, Complex64)]) -> Result<Vec<Complex64>, AlgebraError> {
        let mut point = vec![Complex64::new(0.0, 0.0); self.vars.len()];
        for (name, v) in others {
            point[self.index_of(name)?] = *v;
        }
        let iv = self.index_of(var)?;
        Ok(self
            .coefficients_in(var)?
            .iter()
            .map(|c| {
                let mut p = point.clone();
                p[iv] = Complex64::new(0.0, 0.0);
                c.eval_complex(&p)
            })
            .collect())
    }

    /// Canonical text form used for hashing: `vars|exp:coeff;...` with terms
    /// in ascending monomial order.
    pub fn canonical_string(&self) -> String {
        let mut s = self.vars.join(",");
        s.push('|');
        for (e, c) in &self.terms {
            let exps: Vec<String> = e.iter().map(|k| k.to_string()).collect();
            s.push_str(&format!("{}:{};", exps.join(","), c));
        }
        s
    }

    /// SHA-256 digest of the canonical form.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_string().as_bytes()))
    }

    /// `self == c * other` for some rational `c`; returns `c`.
    pub fn proportionality_constant(&self, other: &MPoly) -> Option<Rational> {
        self.check_ring(other);
        let (oe, oc) = other.terms.iter().next_back()?;
        let sc = self.terms.get(oe)?;
        let c = sc / oc;
        (*self == other.scale(&c)).then_some(c)
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i > 0 {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            } else if neg {
                write!(f, "-")?;
            }
            let a = c.abs();
            let mono: Vec<String> = e
                .iter()
                .zip(self.vars.iter())
                .filter(|(k, _)| **k > 0)
                .map(|(k, v)| if *k == 1 { v.clone() } else { format!("{v}^{k}") })
                .collect();
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{a}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        self.check_ring(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        self.check_ring(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    #[allow(clippy::suspicious_arithmetic_impl)] // exponents add
    fn mul(self, rhs: &MPoly) -> MPoly {
        self.check_ring(rhs);
        let mut out = self.zero_like();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(&int(-1))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for MPoly {
            type Output = MPoly;
            fn $m(self, rhs: MPoly) -> MPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&MPoly> for MPoly {
            type Output = MPoly;
            fn $m(self, rhs: &MPoly) -> MPoly {
                (&self).$m(rhs)
            }
        }
        impl $tr<MPoly> for &MPoly {
            type Output = MPoly;
            fn $m(self, rhs: MPoly) -> MPoly {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
}
