use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{complex_roots, discriminant_resultant, MPoly, RootConfig};

use super::MonodromyError;

pub const XI: &str = "xi";
pub const ETA: &str = "eta";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackConfig {
    pub initial_samples: usize,
    /// Bisection stops below this θ-step.
    pub min_step: f64,
    pub max_samples: usize,
    /// Discriminant roots closer than `guard * ε` to the circle are rejected.
    pub guard: f64,
}

impl Default for TrackConfig {
    fn default() -> Self {
        TrackConfig { initial_samples: 256, min_step: 1e-9, max_samples: 2_000_000, guard: 1e-3 }
    }
}

/// Roots of `P(ε e^{iθ}, η)` followed continuously for `θ ∈ [0, 2π]`.
#[derive(Clone, Debug, Serialize)]
pub struct RootPaths {
    pub strands: usize,
    pub eps: f64,
    pub thetas: Vec<f64>,
    /// `roots[s][j]` is strand `j` at `thetas[s]`.
    pub roots: Vec<Vec<Complex64>>,
    /// Largest nearest-neighbour move at each step.
    pub step_distance: Vec<f64>,
    /// Largest ratio `move / (gap / 2)` over all steps; below 1 by construction.
    pub worst_ratio: f64,
}

impl RootPaths {
    /// `perm[j]` is the strand whose starting root equals the end of strand `j`.
    pub fn closing_permutation(&self) -> Vec<usize> {
        let first = &self.roots[0];
        let last = self.roots.last().expect("nonempty paths");
        last.iter()
            .map(|z| {
                (0..first.len())
                    .min_by(|&a, &b| (first[a] - z).norm().total_cmp(&(first[b] - z).norm()))
                    .expect("nonempty")
            })
            .collect()
    }

    /// Writes `theta,strand,re,im` rows.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "theta,strand,re,im")?;
        for (t, rs) in self.thetas.iter().zip(&self.roots) {
            for (j, z) in rs.iter().enumerate() {
                writeln!(out, "{t:.17e},{j},{:.17e},{:.17e}", z.re, z.im)?;
            }
        }
        Ok(())
    }
}

fn min_gap(zs: &[Complex64]) -> f64 {
    let mut g = f64::INFINITY;
    for i in 0..zs.len() {
        for j in i + 1..zs.len() {
            g = g.min((zs[i] - zs[j]).norm());
        }
    }
    g
}

struct Sampler<'a> {
    coeffs: Vec<MPoly>,
    eps: f64,
    cfg: &'a RootConfig,
    degree: usize,
}

impl Sampler<'_> {
    fn roots_at(&self, theta: f64) -> Result<Vec<Complex64>, MonodromyError> {
        let xi = Complex64::from_polar(self.eps, theta);
        let c: Vec<Complex64> = self.coeffs.iter().map(|p| p.eval_complex(&[xi])).collect();
        let r = complex_roots(&c, self.cfg)?;
        let v = r.values();
        if v.len() != self.degree || r.roots.len() != self.degree {
            return Err(MonodromyError::Collision(theta));
        }
        Ok(v)
    }
}

/// Greedy nearest-neighbour matching; `None` unless it is a bijection with every
/// move below half the smaller of the two minimal gaps.
fn safe_match(prev: &[Complex64], next: &[Complex64]) -> Option<(Vec<Complex64>, f64, f64)> {
    let half = 0.5 * min_gap(prev).min(min_gap(next));
    let mut used = vec![false; next.len()];
    let mut out = Vec::with_capacity(prev.len());
    let mut worst: f64 = 0.0;
    for z in prev {
        let (j, d) = next
            .iter()
            .enumerate()
            .map(|(j, w)| (j, (w - z).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        if used[j] || d >= half {
            return None;
        }
        used[j] = true;
        worst = worst.max(d);
        out.push(next[j]);
    }
    Some((out, worst, worst / half))
}

/// Rejects `ε` when the η-discriminant has a root within `guard·ε` of `|ξ| = ε`.
pub fn check_circle(p: &MPoly, eps: f64, guard: f64) -> Result<f64, MonodromyError> {
    let disc = discriminant_resultant(p, ETA)?;
    if disc.is_zero() {
        return Err(MonodromyError::NotSquareFree);
    }
    let c = disc.univariate_complex(XI, &[])?;
    let low = c.iter().position(|z| z.norm() != 0.0).unwrap_or(0);
    if c.len() - low < 2 {
        return Ok(f64::INFINITY);
    }
    let r = complex_roots(&c[low..], &RootConfig::default())?;
    let dist = r.roots.iter().map(|z| (z.value().norm() - eps).abs()).fold(f64::INFINITY, f64::min);
    if dist < guard * eps {
        return Err(MonodromyError::DiscriminantOnCircle { eps, distance: dist });
    }
    Ok(dist)
}

/// Follows the η-roots of `p(ξ, η)` as `ξ = ε e^{iθ}` runs once around.
pub fn track(p: &MPoly, eps: f64, cfg: &TrackConfig) -> Result<RootPaths, MonodromyError> {
    check_circle(p, eps, cfg.guard)?;
    let lead = p.leading_coefficient_in(ETA)?;
    if lead.total_degree() != Some(0) {
        return Err(MonodromyError::NonConstantLeading);
    }
    let degree = p.degree_in(ETA)?.unwrap_or(0) as usize;
    let coeffs: Vec<MPoly> = p.coefficients_in(ETA)?.iter().map(|c| c.drop_var(ETA)).collect::<Result<_, _>>()?;
    let root_cfg = RootConfig { cluster_tol: 0.0, ..RootConfig::default() };
    let sampler = Sampler { coeffs, eps, cfg: &root_cfg, degree };

    let two_pi = std::f64::consts::TAU;
    let n = cfg.initial_samples.max(4);
    let mut thetas = vec![0.0];
    let mut roots = vec![sampler.roots_at(0.0)?];
    let mut step_distance = Vec::new();
    let mut worst_ratio: f64 = 0.0;

    for s in 1..=n {
        let target = two_pi * s as f64 / n as f64;
        // stack of pending right endpoints, nearest last
        let mut pending = vec![(target, sampler.roots_at(target)?)];
        while let Some((t1, r1)) = pending.pop() {
            let t0 = *thetas.last().expect("nonempty");
            let prev = roots.last().expect("nonempty");
            match safe_match(prev, &r1) {
                Some((matched, d, ratio)) => {
                    thetas.push(t1);
                    roots.push(matched);
                    step_distance.push(d);
                    worst_ratio = worst_ratio.max(ratio);
                    if thetas.len() > cfg.max_samples {
                        return Err(MonodromyError::StepCap(cfg.max_samples));
                    }
                }
                None => {
                    if t1 - t0 < cfg.min_step {
                        return Err(MonodromyError::Collision(t0));
                    }
                    let mid = 0.5 * (t0 + t1);
                    let rm = sampler.roots_at(mid)?;
                    pending.push((t1, r1));
                    pending.push((mid, rm));
                }
            }
        }
    }
    Ok(RootPaths { strands: degree, eps, thetas, roots, step_distance, worst_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::int;

    fn poly(terms: &[(i64, u32, u32)]) -> MPoly {
        let v = [XI, ETA];
        let x = MPoly::var(&v, XI).unwrap();
        let y = MPoly::var(&v, ETA).unwrap();
        terms.iter().fold(MPoly::zero(&v), |acc, &(c, a, b)| acc + x.pow(a) * y.pow(b) * MPoly::constant(&v, int(c)))
    }

    #[test]
    fn square_root_exchanges_strands() {
        let p = poly(&[(1, 0, 2), (-1, 1, 0)]);
        let paths = track(&p, 1.0, &TrackConfig::default()).unwrap();
        assert_eq!(paths.strands, 2);
        assert_eq!(paths.closing_permutation(), vec![1, 0]);
        assert!(paths.worst_ratio < 1.0);
    }

    #[test]
    fn full_turn_closes() {
        let p = poly(&[(1, 0, 2), (-1, 2, 0)]);
        let paths = track(&p, 1.0, &TrackConfig::default()).unwrap();
        assert_eq!(paths.closing_permutation(), vec![0, 1]);
    }

    #[test]
    fn discriminant_on_circle_rejected() {
        // η² − (ξ − 1) is singular at ξ = 1
        let p = poly(&[(1, 0, 2), (-1, 1, 0), (1, 0, 0)]);
        assert!(matches!(track(&p, 1.0, &TrackConfig::default()), Err(MonodromyError::DiscriminantOnCircle { .. })));
        assert!(track(&p, 0.5, &TrackConfig::default()).is_ok());
    }

    #[test]
    fn csv_dump() {
        let p = poly(&[(1, 0, 2), (-1, 0, 0)]);
        let cfg = TrackConfig { initial_samples: 4, ..TrackConfig::default() };
        let paths = track(&p, 1.0, &cfg).unwrap();
        let mut buf = Vec::new();
        paths.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("theta,strand,re,im\n"));
        assert_eq!(text.lines().count(), 1 + 2 * paths.thetas.len());
    }
}
