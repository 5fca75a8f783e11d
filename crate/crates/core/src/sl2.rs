//! Exact SL(2,Z) arithmetic: the `R L^{k_1} R L^{k_2} ⋯` normal form of
//! hyperbolic classes, eigendata, and filling Euler characteristics.
//!
//! Normal form works on the attracting/repelling fixed points `u`, `v` of the
//! Möbius action `x ↦ (ax+b)/(cx+d)`. A determinant-one matrix with `u > 0 > v`
//! has positive entries and factors uniquely into `R = [[1,0],[1,1]]` and
//! `L = [[1,1],[0,1]]`. Double continued-fraction steps on `u` reach that
//! situation after finitely many moves (Galois: complete quotients of a
//! quadratic irrational are eventually reduced).

use std::fmt;
use std::ops::Mul;

use num_integer::{Integer, Roots};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Sl2Error {
    #[error("invalid (m, k): {0}")]
    Invalid(String),
    #[error("determinant is {0}, expected 1")]
    Determinant(i128),
    #[error("trace {0} is not > 2")]
    NotHyperbolic(i128),
    #[error("integer overflow in matrix arithmetic")]
    Overflow,
    #[error("reduction did not terminate after {0} steps")]
    NoConvergence(usize),
}

/// Integer 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix2 {
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub d: i128,
}

pub const R: IntMatrix2 = IntMatrix2 { a: 1, b: 0, c: 1, d: 1 };
pub const L: IntMatrix2 = IntMatrix2 { a: 1, b: 1, c: 0, d: 1 };

impl IntMatrix2 {
    pub const IDENTITY: IntMatrix2 = IntMatrix2 { a: 1, b: 0, c: 0, d: 1 };

    pub fn new(a: i128, b: i128, c: i128, d: i128) -> IntMatrix2 {
        IntMatrix2 { a, b, c, d }
    }

    pub fn det(&self) -> i128 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> i128 {
        self.a + self.d
    }

    pub fn checked_mul(&self, o: &IntMatrix2) -> Result<IntMatrix2, Sl2Error> {
        let dot = |x: i128, y: i128, z: i128, w: i128| -> Result<i128, Sl2Error> {
            x.checked_mul(y).and_then(|p| z.checked_mul(w).and_then(|q| p.checked_add(q))).ok_or(Sl2Error::Overflow)
        };
        Ok(IntMatrix2 {
            a: dot(self.a, o.a, self.b, o.c)?,
            b: dot(self.a, o.b, self.b, o.d)?,
            c: dot(self.c, o.a, self.d, o.c)?,
            d: dot(self.c, o.b, self.d, o.d)?,
        })
    }

    /// Adjugate; equals the inverse when `det = 1` and `-inverse` when `det = -1`.
    pub fn adjugate(&self) -> IntMatrix2 {
        IntMatrix2 { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Inverse of a determinant ±1 matrix.
    pub fn unimodular_inverse(&self) -> Result<IntMatrix2, Sl2Error> {
        match self.det() {
            1 => Ok(self.adjugate()),
            -1 => {
                let j = self.adjugate();
                Ok(IntMatrix2 { a: -j.a, b: -j.b, c: -j.c, d: -j.d })
            }
            det => Err(Sl2Error::Determinant(det)),
        }
    }

    pub fn checked_pow(&self, n: u32) -> Result<IntMatrix2, Sl2Error> {
        let mut acc = IntMatrix2::IDENTITY;
        for _ in 0..n {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }
}

impl Mul for IntMatrix2 {
    type Output = IntMatrix2;
    fn mul(self, o: IntMatrix2) -> IntMatrix2 {
        self.checked_mul(&o).expect("IntMatrix2 overflow")
    }
}

impl fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RlLetter {
    R,
    L,
}

impl RlLetter {
    fn matrix(self) -> IntMatrix2 {
        match self {
            RlLetter::R => R,
            RlLetter::L => L,
        }
    }
}

/// `A` conjugate to `R L^{k_1} ⋯ R L^{k_m}`, with `witness · A_{m,k} · witness⁻¹ = A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalForm {
    pub m: usize,
    pub k: Vec<u32>,
    pub witness: IntMatrix2,
}

impl NormalForm {
    pub fn word(&self) -> Vec<RlLetter> {
        mk_word(&self.k)
    }

    /// Every cyclic rotation of the RL-word that starts with `R`, as `k` tuples.
    pub fn rotations(&self) -> Vec<Vec<u32>> {
        let mut out: Vec<Vec<u32>> = (0..self.k.len())
            .map(|i| {
                let mut k = self.k.clone();
                k.rotate_left(i);
                k
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn word_string(&self) -> String {
        let parts: Vec<String> = self
            .k
            .iter()
            .map(|&k| match k {
                0 => "R".to_string(),
                1 => "R L".to_string(),
                _ => format!("R L^{k}"),
            })
            .collect();
        parts.join(" ")
    }
}

fn validate_mk(m: usize, k: &[u32]) -> Result<(), Sl2Error> {
    if m == 0 {
        return Err(Sl2Error::Invalid("m must be at least 1".into()));
    }
    if k.len() != m {
        return Err(Sl2Error::Invalid(format!("expected {m} exponents, got {}", k.len())));
    }
    if k.iter().all(|&x| x == 0) {
        return Err(Sl2Error::Invalid("exponents must not all vanish".into()));
    }
    Ok(())
}

fn mk_word(k: &[u32]) -> Vec<RlLetter> {
    let mut w = Vec::new();
    for &ki in k {
        w.push(RlLetter::R);
        w.extend(std::iter::repeat_n(RlLetter::L, ki as usize));
    }
    w
}

fn word_product(w: &[RlLetter]) -> Result<IntMatrix2, Sl2Error> {
    w.iter().try_fold(IntMatrix2::IDENTITY, |acc, l| acc.checked_mul(&l.matrix()))
}

/// `R L^{k_1} R L^{k_2} ⋯ R L^{k_m}`.
pub fn a_mk(m: usize, k: &[u32]) -> Result<IntMatrix2, Sl2Error> {
    validate_mk(m, k)?;
    word_product(&mk_word(k))
}

/// `χ(V)` of the Stein filling attached to `A_{m,k}`.
pub fn chi_filling(m: usize, k: &[u32]) -> Result<i64, Sl2Error> {
    validate_mk(m, k)?;
    let sum: i64 = k.iter().map(|&x| x as i64).sum();
    Ok(if m == 1 { 11 + sum } else { sum })
}

fn check_hyperbolic(a: &IntMatrix2) -> Result<(), Sl2Error> {
    if a.det() != 1 {
        return Err(Sl2Error::Determinant(a.det()));
    }
    if a.trace() <= 2 {
        return Err(Sl2Error::NotHyperbolic(a.trace()));
    }
    Ok(())
}

/// Floor of `(p + √disc)/q` for non-square `disc > 0`, `q ≠ 0`.
fn floor_quadratic(p: i128, disc: i128, q: i128) -> i128 {
    let s = disc.sqrt();
    if q > 0 {
        Integer::div_floor(&(p + s), &q)
    } else {
        Integer::div_floor(&(-p - s - 1), &(-q))
    }
}

/// Floors of the attracting and repelling fixed points of a hyperbolic
/// matrix with determinant ±1.
fn fixed_point_floors(m: &IntMatrix2) -> (i128, i128) {
    let t = m.trace();
    let disc = t * t - 4 * m.det();
    let (p, q) = (m.a - m.d, 2 * m.c);
    // attracting eigenvalue (t + √disc)/2 ↔ u = (a − d + √disc)/(2c)
    let u = floor_quadratic(p, disc, q);
    let v = floor_quadratic(-p, disc, -q);
    (u, v)
}

const MAX_REDUCTION_STEPS: usize = 10_000;

/// Conjugates `A` into `R/L`-normal form; see the module docs.
pub fn normal_form(a: &IntMatrix2) -> Result<NormalForm, Sl2Error> {
    check_hyperbolic(a)?;
    // invariant: cur = cinv · A · c
    let mut cur = *a;
    let mut c = IntMatrix2::IDENTITY;
    let mut steps = 0;
    loop {
        let (u, v) = fixed_point_floors(&cur);
        if u >= 0 && v < 0 {
            break;
        }
        for _ in 0..2 {
            let n = fixed_point_floors(&cur).0;
            // Möbius x ↦ 1/(x − n)
            let g = IntMatrix2::new(0, 1, 1, -n);
            let g_inv = g.unimodular_inverse()?;
            cur = g.checked_mul(&cur)?.checked_mul(&g_inv)?;
            c = c.checked_mul(&g_inv)?;
        }
        steps += 1;
        if steps > MAX_REDUCTION_STEPS {
            return Err(Sl2Error::NoConvergence(steps));
        }
    }

    let mut word = Vec::new();
    let mut rest = cur;
    while rest != IntMatrix2::IDENTITY {
        if rest.a >= rest.c && rest.b >= rest.d {
            word.push(RlLetter::L);
            rest = IntMatrix2::new(rest.a - rest.c, rest.b - rest.d, rest.c, rest.d);
        } else if rest.c >= rest.a && rest.d >= rest.b {
            word.push(RlLetter::R);
            rest = IntMatrix2::new(rest.a, rest.b, rest.c - rest.a, rest.d - rest.b);
        } else {
            unreachable!("reduced hyperbolic matrix has a positive R/L factorization: {rest}");
        }
    }

    // W = X Y  and  Y X = X⁻¹ W X
    let n = word.len();
    let best = (0..n)
        .min_by(|&i, &j| word[i..].iter().chain(&word[..i]).cmp(word[j..].iter().chain(&word[..j])))
        .expect("nonempty word");
    let x = word_product(&word[..best])?;
    let witness = c.checked_mul(&x)?;
    let mut rotated = word[best..].to_vec();
    rotated.extend_from_slice(&word[..best]);

    let mut k: Vec<u32> = Vec::new();
    for l in &rotated {
        match l {
            RlLetter::R => k.push(0),
            RlLetter::L => *k.last_mut().expect("minimal rotation starts with R") += 1,
        }
    }
    let nf = NormalForm { m: k.len(), k, witness };
    debug_assert_eq!(witness.checked_mul(&a_mk(nf.m, &nf.k)?)?.checked_mul(&witness.unimodular_inverse()?)?, *a);
    Ok(nf)
}

/// Checks `witness · A_{m,k} · witness⁻¹ = A` exactly.
pub fn verify_normal_form(a: &IntMatrix2, nf: &NormalForm) -> Result<bool, Sl2Error> {
    let amk = a_mk(nf.m, &nf.k)?;
    let w = nf.witness;
    Ok(w.checked_mul(&amk)?.checked_mul(&w.unimodular_inverse()?)? == *a)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenData {
    /// Expanding eigenvalue, `a > 1`.
    pub a: f64,
    pub v_plus: [f64; 2],
    pub v_minus: [f64; 2],
}

/// `A v_± = a^{±1} v_±` with unit vectors and `det[v₊ v₋] > 0`.
pub fn eigen_data(m: &IntMatrix2) -> Result<EigenData, Sl2Error> {
    check_hyperbolic(m)?;
    let t = m.trace() as f64;
    let s = (t * t - 4.0).sqrt();
    let a = (t + s) / 2.0;
    let a_inv = (t - s) / 2.0;
    let (ma, mb, mc, md) = (m.a as f64, m.b as f64, m.c as f64, m.d as f64);
    let vec_for = |lambda: f64| -> [f64; 2] {
        // kernel of A − λ: (b, λ − a) or (λ − d, c), take the longer
        let v1 = [mb, lambda - ma];
        let v2 = [lambda - md, mc];
        let v = if v1[0].hypot(v1[1]) >= v2[0].hypot(v2[1]) { v1 } else { v2 };
        let n = v[0].hypot(v[1]);
        let s = if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) { -1.0 } else { 1.0 };
        [s * v[0] / n, s * v[1] / n]
    };
    let v_plus = vec_for(a);
    let mut v_minus = vec_for(a_inv);
    if v_plus[0] * v_minus[1] - v_plus[1] * v_minus[0] < 0.0 {
        v_minus = [-v_minus[0], -v_minus[1]];
    }
    Ok(EigenData { a, v_plus, v_minus })
}
