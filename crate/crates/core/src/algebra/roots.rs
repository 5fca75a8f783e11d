//! Univariate complex root finding: companion-matrix eigenvalues followed by
//! Newton polishing.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::AlgebraError;

#[derive(Clone, Copy, Debug)]
pub struct RootConfig {
    /// Coefficients below `trim * max|c|` at the top are treated as zero.
    pub trim: f64,
    /// Required backward-error-scaled residual per root.
    pub residual_tol: f64,
    pub newton_steps: usize,
    pub schur_max_iter: usize,
    /// Roots closer than `cluster_tol * (1 + |z|)` are merged into one
    /// entry with multiplicity.
    pub cluster_tol: f64,
}

impl Default for RootConfig {
    fn default() -> Self {
        RootConfig { trim: 1e-12, residual_tol: 1e-9, newton_steps: 3, schur_max_iter: 10_000, cluster_tol: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Root {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    /// `|P(z)| / sum |c_i| |z|^i`, a relative backward error.
    pub residual: f64,
}

impl Root {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexRoots {
    pub roots: Vec<Root>,
    pub residual_bound: f64,
    /// False when some residual exceeds the bound; roots are still returned.
    pub converged: bool,
}

impl ComplexRoots {
    pub fn count_with_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Roots repeated according to multiplicity.
    pub fn values(&self) -> Vec<Complex64> {
        self.roots.iter().flat_map(|r| std::iter::repeat_n(r.value(), r.multiplicity)).collect()
    }

    pub fn count_inside(&self, radius: f64) -> usize {
        self.roots.iter().filter(|r| r.value().norm() < radius).map(|r| r.multiplicity).sum()
    }
}

pub fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn horner_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn relative_residual(coeffs: &[Complex64], z: Complex64) -> f64 {
    let scale: f64 = coeffs.iter().enumerate().map(|(i, c)| c.norm() * z.norm().powi(i as i32)).sum();
    let r = horner(coeffs, z).norm();
    if scale == 0.0 {
        r
    } else {
        r / scale
    }
}

/// Aberth–Ehrlich simultaneous iteration from points on the Cauchy-bound circle.
fn aberth(c: &[Complex64], max_iter: usize) -> Result<Vec<Complex64>, AlgebraError> {
    let n = c.len() - 1;
    let lead = c[n].norm();
    let radius = 1.0 + c[..n].iter().map(|x| x.norm() / lead).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(0.5 * radius, 0.4 + std::f64::consts::TAU * k as f64 / n as f64))
        .collect();
    for _ in 0..max_iter {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = horner_with_derivative(c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            return Ok(z);
        }
    }
    if z.iter().all(|x| relative_residual(c, *x) < 1e-8) {
        Ok(z)
    } else {
        Err(AlgebraError::NoConvergence("companion Schur and Aberth iterations".into()))
    }
}

/// Strips negligible leading coefficients; returns the trimmed slice.
pub fn trim_leading(coeffs: &[Complex64], trim: f64) -> &[Complex64] {
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut end = coeffs.len();
    while end > 0 && coeffs[end - 1].norm() <= trim * max {
        end -= 1;
    }
    &coeffs[..end]
}

/// All complex roots of `sum coeffs[i] z^i`, sorted by real then imaginary part.
pub fn complex_roots(coeffs: &[Complex64], cfg: &RootConfig) -> Result<ComplexRoots, AlgebraError> {
    let c = trim_leading(coeffs, cfg.trim);
    if c.len() < 2 {
        return Err(AlgebraError::Degree("degree must be at least 1".into()));
    }
    let n = c.len() - 1;
    let lead = c[n];
    let mut raw: Vec<Complex64> = if n == 1 {
        vec![-c[0] / lead]
    } else {
        let mut comp = DMatrix::<Complex64>::zeros(n, n);
        for i in 1..n {
            comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..n {
            comp[(i, n - 1)] = -c[i] / lead;
        }
        match nalgebra::linalg::Schur::try_new(comp, f64::EPSILON, cfg.schur_max_iter) {
            Some(schur) => {
                let t = schur.unpack().1;
                (0..n).map(|i| t[(i, i)]).collect()
            }
            // exact repeated roots can stall the shifted QR sweep
            None => aberth(c, cfg.schur_max_iter)?,
        }
    };
    for z in raw.iter_mut() {
        for _ in 0..cfg.newton_steps {
            let (p, dp) = horner_with_derivative(c, *z);
            if dp.norm() == 0.0 {
                break;
            }
            let next = *z - p / dp;
            if relative_residual(c, next) < relative_residual(c, *z) {
                *z = next;
            } else {
                break;
            }
        }
    }
    raw.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut roots: Vec<Root> = Vec::new();
    let mut converged = true;
    for z in raw {
        let res = relative_residual(c, z);
        if res > cfg.residual_tol {
            converged = false;
        }
        if let Some(last) = roots.iter_mut().find(|r| (r.value() - z).norm() <= cfg.cluster_tol * (1.0 + z.norm())) {
            last.multiplicity += 1;
            last.residual = last.residual.max(res);
            continue;
        }
        roots.push(Root { re: z.re, im: z.im, multiplicity: 1, residual: res });
    }
    Ok(ComplexRoots { roots, residual_bound: cfg.residual_tol, converged })
}

/// Real-coefficient convenience wrapper.
pub fn complex_roots_real(coeffs: &[f64], cfg: &RootConfig) -> Result<ComplexRoots, AlgebraError> {
    let c: Vec<Complex64> = coeffs.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    complex_roots(&c, cfg)
}
