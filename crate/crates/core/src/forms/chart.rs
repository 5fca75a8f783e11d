use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::FormsError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coord {
    pub name: String,
    /// Period for angle-like coordinates; sampled on `[0, period)`.
    pub period: Option<f64>,
    pub lo: f64,
    pub hi: f64,
}

/// A single coordinate chart. Coordinate order fixes the orientation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    coords: Vec<Coord>,
    /// `(r, theta)` positions of a polar pair. Positivity of top-degree forms
    /// is then measured against `r dr ^ dtheta`, the pulled-back Cartesian
    /// area form, so the coordinate singularity at `r = 0` is not mistaken
    /// for degeneracy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    polar: Option<(usize, usize)>,
}

impl Chart {
    /// Chart with the given coordinate names, each sampled on `[-1, 1]`.
    pub fn new(names: &[&str]) -> Result<Chart, FormsError> {
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(FormsError::Chart(format!("duplicate coordinate '{n}'")));
            }
        }
        Ok(Chart {
            coords: names.iter().map(|n| Coord { name: n.to_string(), period: None, lo: -1.0, hi: 1.0 }).collect(),
            polar: None,
        })
    }

    pub fn with_range(mut self, name: &str, lo: f64, hi: f64) -> Result<Chart, FormsError> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(FormsError::Chart(format!("empty sampling box for '{name}'")));
        }
        let i = self.index_of(name)?;
        self.coords[i].lo = lo;
        self.coords[i].hi = hi;
        self.coords[i].period = None;
        Ok(self)
    }

    pub fn with_period(mut self, name: &str, period: f64) -> Result<Chart, FormsError> {
        if period.is_nan() || period <= 0.0 {
            return Err(FormsError::Chart(format!("non-positive period for '{name}'")));
        }
        let i = self.index_of(name)?;
        self.coords[i].period = Some(period);
        self.coords[i].lo = 0.0;
        self.coords[i].hi = period;
        Ok(self)
    }

    pub fn with_polar(mut self, r: &str, theta: &str) -> Result<Chart, FormsError> {
        let ir = self.index_of(r)?;
        let it = self.index_of(theta)?;
        self.polar = Some((ir, it));
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn names(&self) -> Vec<&str> {
        self.coords.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.coords[i].name
    }

    pub fn polar(&self) -> Option<(usize, usize)> {
        self.polar
    }

    pub fn index_of(&self, name: &str) -> Result<usize, FormsError> {
        self.coords
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| FormsError::Chart(format!("unknown coordinate '{name}'")))
    }

    fn axis_values(c: &Coord, n: usize) -> Vec<f64> {
        match c.period {
            Some(p) => (0..n).map(|i| p * i as f64 / n as f64).collect(),
            None if n == 1 => vec![0.5 * (c.lo + c.hi)],
            None => (0..n).map(|i| c.lo + (c.hi - c.lo) * i as f64 / (n - 1) as f64).collect(),
        }
    }

    /// Tensor grid with `n` points per axis: periodic axes uniform on
    /// `[0, period)`, others including both endpoints.
    pub fn grid(&self, n: usize) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = self.coords.iter().map(|c| Chart::axis_values(c, n)).collect();
        let mut out = vec![Vec::with_capacity(self.dim())];
        for axis in &axes {
            let mut next = Vec::with_capacity(out.len() * axis.len());
            for p in &out {
                for &v in axis {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }

    /// Uniform random points in the sampling box, reproducible from `seed`.
    pub fn random_samples(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| self.coords.iter().map(|c| if c.hi > c.lo { rng.gen_range(c.lo..c.hi) } else { c.lo }).collect())
            .collect()
    }
}
