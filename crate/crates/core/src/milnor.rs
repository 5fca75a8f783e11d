//! Critical points of `π_ξ` on the Milnor fibre `{f_{m,k}(ξ, η, 0) = δ}` and
//! the exact eliminations behind their count.
//!
//! Critical values of `π_ξ` are the `ξ` where `f − δ` has a double root in
//! `η`, i.e. the zeros of `Res_η(f − δ, ∂_η f)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    complex_roots, horner, int, rat, rat_from_f64, resultant, AlgebraError, MPoly, Rational, RootConfig,
};
use crate::monodromy::{critical_value_polynomial, validate_mk, MonodromyError, ETA, XI};

pub const DELTA: &str = "delta";
const RING: [&str; 3] = [XI, ETA, DELTA];
const PLANE: [&str; 2] = [XI, DELTA];

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MilnorError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("eliminant vanishes identically at this δ")]
    Degenerate,
    #[error("eigenvalue count {eigen} disagrees with the argument principle ({winding})")]
    RootCount { eigen: usize, winding: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl From<MonodromyError> for MilnorError {
    fn from(e: MonodromyError) -> Self {
        match e {
            MonodromyError::Algebra(a) => MilnorError::Algebra(a),
            other => MilnorError::Invalid(other.to_string()),
        }
    }
}

fn lift(p: &MPoly) -> Result<MPoly, MilnorError> {
    Ok(p.embed(&RING)?)
}

fn xi(vars: &[&str]) -> MPoly {
    MPoly::var(vars, XI).expect("ξ in ring")
}

fn cst(vars: &[&str], c: Rational) -> MPoly {
    MPoly::constant(vars, c)
}

/// `Res_η(f_{m,k} − δ, ∂_η f_{m,k})` in the ring `(ξ, δ)`.
pub fn eliminant(m: usize, k: &[u32]) -> Result<MPoly, MilnorError> {
    let f = lift(&critical_value_polynomial(m, k)?)?;
    let d = MPoly::var(&RING, DELTA)?;
    let shifted = &f - &d;
    let fe = f.derivative(ETA)?;
    Ok(resultant(&shifted, &fe, ETA)?)
}

/// The eliminant with `δ` fixed, as a polynomial in `ξ` alone.
pub fn eliminant_at(m: usize, k: &[u32], delta: &Rational) -> Result<MPoly, MilnorError> {
    Ok(eliminant(m, k)?.substitute(DELTA, delta)?.drop_var(DELTA)?)
}

/// `4ξ^{12+k}(9 − ξ^k)² − 108ξ⁶(1 − ξ^k)δ − 27δ²`.
pub fn m1_relation(k1: u32) -> MPoly {
    let x = xi(&PLANE);
    let d = MPoly::var(&PLANE, DELTA).expect("δ in ring");
    let one = cst(&PLANE, int(1));
    let xk = x.pow(k1);
    cst(&PLANE, int(4)) * x.pow(12 + k1) * (cst(&PLANE, int(9)) - &xk).pow(2)
        - cst(&PLANE, int(108)) * x.pow(6) * (&one - &xk) * &d
        - cst(&PLANE, int(27)) * d.pow(2)
}

/// `p`, `q`, `r` in `(ξ, δ)`: `p = ξ²(2 + ξ^{k₁} − ξ^{k₂})/6`,
/// `q = −ξ³(ξ^{k₁} + ξ^{k₂})/2`, `r = ξ⁴(1 − ξ^{k₁})(1 + ξ^{k₂}) − δ`.
pub fn m2_pqr(k1: u32, k2: u32) -> (MPoly, MPoly, MPoly) {
    let x = xi(&PLANE);
    let d = MPoly::var(&PLANE, DELTA).expect("δ in ring");
    let one = cst(&PLANE, int(1));
    let (a, b) = (x.pow(k1), x.pow(k2));
    let p = (x.pow(2) * (cst(&PLANE, int(2)) + &a - &b)).scale(&rat(1, 6));
    let q = (x.pow(3) * (&a + &b)).scale(&rat(-1, 2));
    let r = x.pow(4) * (&one - &a) * (&one + &b) - d;
    (p, q, r)
}

/// `(27q⁴ − r³) + 54(prq² − p³q²) + 18p²r² − 81p⁴r`.
pub fn m2_combination(k1: u32, k2: u32) -> MPoly {
    let (p, q, r) = m2_pqr(k1, k2);
    let c = |n: i64| cst(&PLANE, int(n));
    let q2 = q.pow(2);
    (c(27) * q2.pow(2) - r.pow(3)) + c(54) * (&p * &r * &q2 - p.pow(3) * &q2) + c(18) * p.pow(2) * r.pow(2)
        - c(81) * p.pow(4) * &r
}

/// `ξ^{12+k₁+k₂}{1 − (ξ^{k₁} − ξ^{k₂})/2 + (ξ^{k₁} + ξ^{k₂})²/16}²`.
pub fn m2_limit(k1: u32, k2: u32) -> MPoly {
    let x = xi(&[XI]);
    let (a, b) = (x.pow(k1), x.pow(k2));
    let inner = cst(&[XI], int(1)) - (&a - &b).scale(&rat(1, 2)) + (&a + &b).pow(2).scale(&rat(1, 16));
    x.pow(12 + k1 + k2) * inner.pow(2)
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub holds: bool,
    /// `lhs = constant · rhs` when the identity holds.
    pub constant: Option<String>,
    pub lhs_digest: String,
    pub rhs_digest: String,
    /// Nonzero remainder `lhs − c·rhs` (or `lhs` when no `c` exists), printed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub difference: Option<String>,
}

fn proportional(name: &str, lhs: &MPoly, rhs: &MPoly) -> IdentityCheck {
    let c = lhs.proportionality_constant(rhs);
    let difference = match &c {
        Some(_) => None,
        None => {
            let guess =
                lhs.leading_coefficient().zip(rhs.leading_coefficient()).map(|(a, b)| a / b).unwrap_or_else(|| int(0));
            Some((lhs - &rhs.scale(&guess)).to_string())
        }
    };
    IdentityCheck {
        name: name.into(),
        holds: c.as_ref().is_some_and(|c| *c != int(0)),
        constant: c.map(|c| c.to_string()),
        lhs_digest: lhs.digest(),
        rhs_digest: rhs.digest(),
        difference,
    }
}

/// Exact check that the `m = 1` eliminant is a nonzero rational multiple of
/// the displayed relation.
pub fn verify_m1_discriminant(k1: u32) -> Result<IdentityCheck, MilnorError> {
    let e = eliminant(1, &[k1])?;
    Ok(proportional("m1 eliminant ∝ relation", &e, &m1_relation(k1)))
}

#[derive(Clone, Debug, Serialize)]
pub struct M2Report {
    pub k: [u32; 2],
    pub limit: IdentityCheck,
    pub eliminant: IdentityCheck,
    pub delta: f64,
    pub combination_roots: usize,
    pub eliminant_roots: usize,
    pub back_substitution: BackSubstitution,
}

impl M2Report {
    pub fn passed(&self) -> bool {
        self.limit.holds
            && self.combination_roots == self.eliminant_roots
            && self.back_substitution.max_residual < BACK_SUBSTITUTION_TOL
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BackSubstitution {
    pub trials: usize,
    /// Worst of the factorization and combination residuals, relative.
    pub max_residual: f64,
}

pub const BACK_SUBSTITUTION_TOL: f64 = 1e-8;

/// Picks rational `ξ`, solves `a³ − 3pa − q = 0`, sets `δ = ξ⁴(1−ξ^{k₁})(1+ξ^{k₂}) − (3a⁴ − 6pa²)`
/// and `b² = 6p − 2a²`, then checks both the factorization
/// `f − δ = (η − a)²(η + a − b)(η + a + b)` and the vanishing of the combination.
pub fn back_substitute(k1: u32, k2: u32, trials: usize, seed: u64) -> Result<BackSubstitution, MilnorError> {
    let f = critical_value_polynomial(2, &[k1, k2])?;
    let comb = m2_combination(k1, k2);
    let (p, q, _) = m2_pqr(k1, k2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let num: i64 = rng.gen_range(5..40);
        let xf = num as f64 / 100.0;
        let pt = [xf, 0.0];
        let (pv, qv) = (p.eval_f64(&pt), q.eval_f64(&pt));
        let cubic = [
            Complex64::new(-qv, 0.0),
            Complex64::new(-3.0 * pv, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        for a in complex_roots(&cubic, &RootConfig::default())?.values() {
            let r = 3.0 * a.powi(4) - 6.0 * pv * a * a;
            let xc = Complex64::new(xf, 0.0);
            let top = xc.powi(4) * (1.0 - xc.powi(k1 as i32)) * (1.0 + xc.powi(k2 as i32));
            let delta = top - r;
            let b = (6.0 * pv - 2.0 * a * a).sqrt();
            // coefficients of (η − a)²((η + a)² − b²), low to high
            let s = a * a - b * b;
            let fac = [
                a * a * s,
                -2.0 * a * s + 2.0 * a * a * a,
                a * a - 4.0 * a * a + s,
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ];
            let mut orig = f.univariate_complex(ETA, &[(XI, xc)])?;
            orig[0] -= delta;
            let scale = orig.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let fac_res = orig.iter().zip(fac).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max) / scale;
            let terms: f64 = comb
                .terms()
                .map(|(e, c)| {
                    let cv = num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN);
                    (cv * xc.powi(e[0] as i32) * delta.powi(e[1] as i32)).norm()
                })
                .sum();
            let comb_val = comb.eval_complex(&[xc, delta]).norm() / terms.max(f64::MIN_POSITIVE);
            worst = worst.max(fac_res).max(comb_val);
        }
    }
    Ok(BackSubstitution { trials, max_residual: worst })
}

/// Exact identity checks for the `m = 2` elimination.
pub fn verify_m2_identity(k1: u32, k2: u32, delta: f64, radius: f64) -> Result<M2Report, MilnorError> {
    validate_mk(2, &[k1, k2])?;
    let comb = m2_combination(k1, k2);
    let at_zero = comb.substitute(DELTA, &int(0))?.drop_var(DELTA)?;
    let limit = proportional("δ⁰ part ∝ limit", &at_zero, &m2_limit(k1, k2));
    let elim = eliminant(2, &[k1, k2])?;
    let elim_check = proportional("eliminant ∝ combination", &elim, &comb);
    let d = rat_from_f64(delta)?;
    let comb_at = comb.substitute(DELTA, &d)?.drop_var(DELTA)?;
    let elim_at = elim.substitute(DELTA, &d)?.drop_var(DELTA)?;
    let combination_roots = count_roots_inside(&comb_at, radius, delta, 12 + k1 + k2)?.0;
    let eliminant_roots = count_roots_inside(&elim_at, radius, delta, 12 + k1 + k2)?.0;
    Ok(M2Report {
        k: [k1, k2],
        limit,
        eliminant: elim_check,
        delta,
        combination_roots,
        eliminant_roots,
        back_substitution: back_substitute(k1, k2, 8, 7)?,
    })
}

/// Roots of a univariate `ξ`-polynomial with `|ξ| < radius`, after removing
/// the exact power of `ξ`. Coefficients are rescaled by the typical root size
/// `δ^{2/n}` before the eigenvalue solve; the number of roots inside is
/// confirmed independently by the argument principle on `|ξ| = radius`.
fn count_roots_inside(p: &MPoly, radius: f64, delta: f64, n: u32) -> Result<(usize, u32, Vec<Complex64>), MilnorError> {
    if p.is_zero() {
        return Err(MilnorError::Degenerate);
    }
    let low = p.min_degree_in(XI)?;
    let coeffs: Vec<Rational> = {
        let cs = p.coefficients_in(XI)?;
        cs[low as usize..].iter().map(|c| c.as_constant().expect("univariate")).collect()
    };
    let winding = winding_count(&coeffs, radius)?;
    // roots can sit on several scales (one per Newton-polygon edge), so the
    // solve is repeated over candidate scalings until it agrees with the winding count
    let typical = delta.abs().powf(2.0 / n as f64).max(1e-300);
    let mut eigen = 0;
    for s in [typical, radius, typical.sqrt() * radius.sqrt()] {
        let inside = roots_inside_scaled(&coeffs, s, radius)?;
        if inside.len() == winding {
            return Ok((winding, low, inside));
        }
        eigen = inside.len();
    }
    Err(MilnorError::RootCount { eigen, winding })
}

fn roots_inside_scaled(coeffs: &[Rational], s: f64, radius: f64) -> Result<Vec<Complex64>, MilnorError> {
    // c_i s^i computed exactly before rounding
    let sr = rat_from_f64(s)?;
    let mut pow = int(1);
    let mut scaled = Vec::with_capacity(coeffs.len());
    for c in coeffs {
        scaled.push(c * &pow);
        pow *= &sr;
    }
    let max = scaled.iter().map(num_traits::Signed::abs).max().unwrap_or_else(|| int(1));
    let as_f: Vec<Complex64> = scaled
        .iter()
        .map(|c| Complex64::new(num_traits::ToPrimitive::to_f64(&(c / &max)).unwrap_or(0.0), 0.0))
        .collect();
    let cfg = RootConfig { cluster_tol: 0.0, trim: 0.0, ..RootConfig::default() };
    let roots = complex_roots(&as_f, &cfg)?.values();
    Ok(roots.into_iter().map(|z| z * s).filter(|z| z.norm() < radius).collect())
}

/// Number of zeros inside `|ξ| < radius` by the argument principle, refining
/// the circle until every step turns by less than a quarter revolution.
fn winding_count(coeffs: &[Rational], radius: f64) -> Result<usize, MilnorError> {
    let c: Vec<Complex64> =
        coeffs.iter().map(|q| Complex64::new(num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN), 0.0)).collect();
    let mut samples = 4096usize;
    while samples <= 1 << 22 {
        let mut total = 0.0;
        let mut prev = horner(&c, Complex64::new(radius, 0.0));
        let mut fine = true;
        for k in 1..=samples {
            let z = Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / samples as f64);
            let v = horner(&c, z);
            if v.norm() == 0.0 || !v.is_finite() {
                return Err(MilnorError::Invalid(format!("eliminant vanishes on |ξ| = {radius}")));
            }
            let step = (v / prev).arg();
            if step.abs() > std::f64::consts::FRAC_PI_2 {
                fine = false;
                break;
            }
            total += step;
            prev = v;
        }
        if fine {
            let w = total / std::f64::consts::TAU;
            return Ok(w.round().max(0.0) as usize);
        }
        samples *= 4;
    }
    Err(MilnorError::Invalid("argument principle did not resolve".into()))
}

#[derive(Clone, Debug, Serialize)]
pub struct SideCondition {
    pub xi: [f64; 2],
    pub a: [f64; 2],
    /// `|3a|` for `m = 1`; `min(|b|, |4a² − b²|)` for `m = 2`.
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalReport {
    pub m: usize,
    pub k: Vec<u32>,
    pub delta: f64,
    pub radius: f64,
    pub eliminant_degree: u32,
    pub removed_multiplicity: u32,
    pub count: usize,
    pub expected_count: usize,
    pub chi: i64,
    pub side_conditions: Vec<SideCondition>,
    pub min_side_margin: f64,
    pub eliminant_digest: String,
}

/// Side-condition margins below this count as degenerate.
pub const SIDE_CONDITION_TOL: f64 = 1e-12;

/// Counts critical points of `π_ξ` on `{f_{m,k} = δ}` inside `|ξ| < radius`.
pub fn count_critical(m: usize, k: &[u32], delta: f64, radius: f64) -> Result<CriticalReport, MilnorError> {
    validate_mk(m, k)?;
    if delta == 0.0 || !delta.is_finite() {
        return Err(MilnorError::Invalid("δ must be finite and nonzero".into()));
    }
    let sum: u32 = k.iter().sum();
    let n = 12 + sum;
    let e = eliminant_at(m, k, &rat_from_f64(delta)?)?;
    let (count, low, inside) = count_roots_inside(&e, radius, delta, n)?;
    let f = critical_value_polynomial(m, k)?;
    let mut side = Vec::new();
    for z in &inside {
        let mut c = f.univariate_complex(ETA, &[(XI, *z)])?;
        c[0] -= delta;
        let roots = complex_roots(&c, &RootConfig { cluster_tol: 0.0, ..RootConfig::default() })?.values();
        let (mut bi, mut bj, mut best) = (0, 1, f64::INFINITY);
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                let d = (roots[i] - roots[j]).norm();
                if d < best {
                    (bi, bj, best) = (i, j, d);
                }
            }
        }
        let a = 0.5 * (roots[bi] + roots[bj]);
        let rest: Vec<Complex64> = (0..roots.len()).filter(|&i| i != bi && i != bj).map(|i| roots[i]).collect();
        let margin = if m == 1 {
            (3.0 * a).norm()
        } else {
            let b = 0.5 * (rest[1] - rest[0]);
            b.norm().min((4.0 * a * a - b * b).norm())
        };
        side.push(SideCondition { xi: [z.re, z.im], a: [a.re, a.im], margin });
    }
    let min_side_margin = side.iter().map(|s| s.margin).fold(f64::INFINITY, f64::min);
    Ok(CriticalReport {
        m,
        k: k.to_vec(),
        delta,
        radius,
        eliminant_degree: e.degree_in(XI)?.unwrap_or(0),
        removed_multiplicity: low,
        count,
        expected_count: n as usize,
        chi: 1 - (m as i64 + 1) + count as i64,
        side_conditions: side,
        min_side_margin,
        eliminant_digest: e.digest(),
    })
}

/// Milnor number `(a−1)(b−1)(c−1)` of `x^a + y^b + z^c`.
pub fn brieskorn_mu(a: u32, b: u32, c: u32) -> Result<u64, MilnorError> {
    if a == 0 || b == 0 || c == 0 {
        return Err(MilnorError::Invalid("exponents must be positive".into()));
    }
    Ok((a as u64 - 1) * (b as u64 - 1) * (c as u64 - 1))
}

/// Positivity of the Milnor-fibre Euler characteristic `1 + μ`.
pub fn pe_check(mu: u64) -> bool {
    1 + mu as i128 > 0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m1_eliminant_matches_relation() {
        for k in 1..=3 {
            let c = verify_m1_discriminant(k).unwrap();
            assert!(c.holds, "{c:?}");
            assert_eq!(c.constant.as_deref(), Some("-1"));
        }
    }

    #[test]
    fn m1_delta_zero_limit() {
        let e = eliminant_at(1, &[1], &int(0)).unwrap();
        let x = xi(&[XI]);
        let expect = cst(&[XI], int(4)) * x.pow(13) * (cst(&[XI], int(9)) - x.clone()).pow(2);
        assert!(e.proportionality_constant(&expect).is_some());
    }

    #[test]
    fn m2_identity_examples() {
        for (k1, k2) in [(1, 1), (1, 0), (2, 1)] {
            let r = verify_m2_identity(k1, k2, 1e-8, 0.5).unwrap();
            assert!(r.limit.holds, "{:?}", r.limit);
            assert_eq!(r.limit.constant.as_deref(), Some("16"));
            assert!(r.eliminant.holds);
            assert_eq!(r.combination_roots, r.eliminant_roots);
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn critical_counts() {
        let r = count_critical(1, &[1], 1e-8, 0.5).unwrap();
        assert_eq!((r.count, r.chi), (13, 12));
        let r = count_critical(2, &[1, 1], 1e-8, 0.5).unwrap();
        assert_eq!((r.count, r.chi), (14, 12));
        let r = count_critical(1, &[2], 1e-8, 0.5).unwrap();
        assert_eq!((r.count, r.chi), (14, 13));
        assert!(r.min_side_margin > SIDE_CONDITION_TOL);
    }

    #[test]
    fn brieskorn() {
        assert_eq!(brieskorn_mu(3, 3, 3).unwrap(), 8);
        assert_eq!(brieskorn_mu(6, 3, 2).unwrap(), 10);
        assert_eq!(brieskorn_mu(1, 5, 7).unwrap(), 0);
        assert!(pe_check(0));
        assert!(brieskorn_mu(0, 2, 2).is_err());
    }
}
