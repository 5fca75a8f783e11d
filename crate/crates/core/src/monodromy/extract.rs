use num_complex::Complex64;
use serde::Serialize;

use crate::words::BraidWord;

use super::track::RootPaths;
use super::MonodromyError;

/// Relative tolerance for declaring two projected coordinates or two event
/// times equal.
const TIE_TOL: f64 = 1e-9;
pub const MAX_PERTURBATIONS: usize = 8;
const PERTURBATION_STEP: f64 = 0.0123;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossingEvent {
    pub theta: (f64, f64),
    /// 1-based left position of the exchanged pair.
    pub position: usize,
    pub strands: (usize, usize),
    pub positive: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Extraction {
    pub word: BraidWord,
    pub phi: f64,
    pub attempts: usize,
    pub events: Vec<CrossingEvent>,
    /// Strand labels ordered by projected coordinate at θ = 0.
    pub start_order: Vec<usize>,
}

fn project(z: Complex64, rot: Complex64) -> (f64, f64) {
    let w = z * rot;
    (w.re, w.im)
}

fn try_extract(paths: &RootPaths, phi: f64) -> Result<Extraction, String> {
    let n = paths.strands;
    let rot = Complex64::from_polar(1.0, -phi);
    let scale = paths.roots[0].iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);

    let mut order: Vec<usize> = (0..n).collect();
    let p0: Vec<f64> = paths.roots[0].iter().map(|&z| project(z, rot).0).collect();
    order.sort_by(|&a, &b| p0[a].total_cmp(&p0[b]));
    for w in order.windows(2) {
        if (p0[w[1]] - p0[w[0]]).abs() < TIE_TOL * scale {
            return Err(format!("projection tie at θ=0 between strands {} and {}", w[0], w[1]));
        }
    }
    let start_order = order.clone();
    let mut pos_of = vec![0usize; n];
    for (p, &s) in order.iter().enumerate() {
        pos_of[s] = p;
    }

    let mut letters = Vec::new();
    let mut events = Vec::new();
    for step in 0..paths.thetas.len() - 1 {
        let (a, b) = (&paths.roots[step], &paths.roots[step + 1]);
        let pa: Vec<(f64, f64)> = a.iter().map(|&z| project(z, rot)).collect();
        let pb: Vec<(f64, f64)> = b.iter().map(|&z| project(z, rot)).collect();
        let mut local: Vec<(f64, usize, usize)> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let d0 = pa[i].0 - pa[j].0;
                let d1 = pb[i].0 - pb[j].0;
                if d0 == 0.0 || d1 == 0.0 {
                    return Err(format!("exact projection tie at step {step}"));
                }
                if (d0 < 0.0) != (d1 < 0.0) {
                    local.push((d0 / (d0 - d1), i, j));
                }
            }
        }
        local.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in local.windows(2) {
            if (w[1].0 - w[0].0).abs() < TIE_TOL {
                return Err(format!("simultaneous crossings at step {step}"));
            }
        }
        for (t, i, j) in local {
            let (pi, pj) = (pos_of[i], pos_of[j]);
            if pi.abs_diff(pj) != 1 {
                return Err(format!("non-adjacent crossing of strands {i}, {j} at step {step}"));
            }
            let (left, right) = if pi < pj { (i, j) } else { (j, i) };
            let q = |s: usize| pa[s].1 + t * (pb[s].1 - pa[s].1);
            let (ql, qr) = (q(left), q(right));
            if (qr - ql).abs() < TIE_TOL * scale {
                return Err(format!("strands {i}, {j} collide in projection at step {step}"));
            }
            // the strand moving leftwards passes in front when it is higher
            let positive = qr > ql;
            let position = pi.min(pj) + 1;
            letters.push(if positive { position as i32 } else { -(position as i32) });
            events.push(CrossingEvent {
                theta: (paths.thetas[step], paths.thetas[step + 1]),
                position,
                strands: (left, right),
                positive,
            });
            order.swap(pi, pj);
            pos_of[left] = pj.max(pi);
            pos_of[right] = pi.min(pj);
        }
    }
    let word = BraidWord::new(n.max(2), letters).map_err(|e| e.to_string())?;
    Ok(Extraction { word, phi, attempts: 1, events, start_order })
}

/// Reads the braid off the crossings of the projection `Re(z e^{-iφ})`;
/// non-generic directions are perturbed up to [`MAX_PERTURBATIONS`] times.
pub fn extract_braid(paths: &RootPaths, phi: f64) -> Result<Extraction, MonodromyError> {
    let mut last = String::new();
    for attempt in 0..=MAX_PERTURBATIONS {
        let p = phi + PERTURBATION_STEP * attempt as f64;
        match try_extract(paths, p) {
            Ok(mut e) => {
                e.attempts = attempt + 1;
                return Ok(e);
            }
            Err(msg) => last = msg,
        }
    }
    Err(MonodromyError::NonGeneric(last))
}

/// Final position of each starting position, as read from the tracked paths.
pub fn path_permutation(paths: &RootPaths, ex: &Extraction) -> Vec<usize> {
    let close = paths.closing_permutation();
    let n = paths.strands;
    let mut pos_of = vec![0; n];
    for (p, &s) in ex.start_order.iter().enumerate() {
        pos_of[s] = p;
    }
    // strand s ends where strand close[s] started
    let mut out = vec![0; n];
    for s in 0..n {
        out[pos_of[s]] = pos_of[close[s]];
    }
    out
}
