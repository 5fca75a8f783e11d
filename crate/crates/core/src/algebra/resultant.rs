//! Resultants via fraction-free (Bareiss) elimination of the Sylvester matrix.

use num_traits::{One, Zero};

use super::poly::{MPoly, Rational};
use super::AlgebraError;

/// Sylvester matrix of `p` and `q` with respect to `var`. Entries live in the
/// ring of `p` and do not involve `var`.
pub fn sylvester_matrix(p: &MPoly, q: &MPoly, var: &str) -> Result<Vec<Vec<MPoly>>, AlgebraError> {
    let pc = p.coefficients_in(var)?;
    let qc = q.coefficients_in(var)?;
    let m = pc.len() - 1;
    let n = qc.len() - 1;
    let size = m + n;
    let zero = p.constant_like(Rational::zero());
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![zero.clone(); size];
        for (j, c) in pc.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![zero.clone(); size];
        for (j, c) in qc.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Determinant of a square polynomial matrix by Bareiss elimination with
/// row pivoting. Every division is exact.
pub fn bareiss_determinant(mut a: Vec<Vec<MPoly>>) -> Result<MPoly, AlgebraError> {
    let n = a.len();
    if n == 0 {
        return Err(AlgebraError::Ring("empty matrix".into()));
    }
    let one = a[0][0].constant_like(Rational::one());
    let mut prev = one;
    let mut negate = false;
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(a[0][0].constant_like(Rational::zero())),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev).ok_or_else(|| AlgebraError::Ring("inexact Bareiss division".into()))?;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negate { -det } else { det })
}

/// Resultant of `p` and `q` with respect to `var`, as a polynomial in the
/// remaining variables (`var` is removed from the ring).
pub fn resultant(p: &MPoly, q: &MPoly, var: &str) -> Result<MPoly, AlgebraError> {
    if p.is_zero() || q.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let dp = p.degree_in(var)?.unwrap_or(0);
    let dq = q.degree_in(var)?.unwrap_or(0);
    if dp == 0 || dq == 0 {
        return Err(AlgebraError::Ring(format!("resultant needs positive degree in {var}")));
    }
    bareiss_determinant(sylvester_matrix(p, q, var)?)?.drop_var(var)
}

/// Leading coefficients of `p` and `q` in `var`. The resultant detects common
/// roots only where neither vanishes.
pub fn leading_coefficients(p: &MPoly, q: &MPoly, var: &str) -> Result<(MPoly, MPoly), AlgebraError> {
    Ok((p.leading_coefficient_in(var)?, q.leading_coefficient_in(var)?))
}

/// Discriminant-style eliminant `Res_var(p, dp/dvar)`.
pub fn discriminant_resultant(p: &MPoly, var: &str) -> Result<MPoly, AlgebraError> {
    resultant(p, &p.derivative(var)?, var)
}

#[cfg(test)]
mod tests {
    use super::super::poly::int;
    use super::*;

    const V: &[&str] = &["xi", "eta"];

    fn v(name: &str) -> MPoly {
        MPoly::var(V, name).unwrap()
    }

    #[test]
    fn square_root_discriminant() {
        let p = &v("eta").pow(2) - &v("xi");
        let q = v("eta").scale(&int(2));
        let r = resultant(&p, &q, "eta").unwrap();
        let expected = MPoly::var(&["xi"], "xi").unwrap().scale(&int(-4));
        assert_eq!(r, expected);
    }

    #[test]
    fn common_root_gives_zero() {
        let c = v("xi");
        let p = &v("eta") - &c;
        assert!(resultant(&p, &p, "eta").unwrap().is_zero());
    }

    #[test]
    fn zero_input_is_error() {
        let z = MPoly::zero(V);
        assert!(matches!(resultant(&z, &v("eta"), "eta"), Err(AlgebraError::ZeroPolynomial)));
    }

    #[test]
    fn linear_factors_product_of_differences() {
        // Res((eta-1)(eta-2), eta-3) = (3-1)(3-2) with leading coefficient 1
        let one = MPoly::constant(V, int(1));
        let p = &(&v("eta") - &one) * &(&v("eta") - &one.scale(&int(2)));
        let q = &v("eta") - &one.scale(&int(3));
        let r = resultant(&p, &q, "eta").unwrap();
        assert_eq!(r.as_constant(), Some(int(2)));
    }
}
