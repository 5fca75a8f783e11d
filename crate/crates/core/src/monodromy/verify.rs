use serde::{Deserialize, Serialize};

use crate::report::Verdict;
use crate::words::{braid_stats, find_cyclic_match, BraidWord};

use super::extract::{extract_braid, path_permutation};
use super::track::{track, TrackConfig};
use super::{critical_value_polynomial, validate_mk, MonodromyError};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MonodromyConfig {
    pub eps: f64,
    pub phi: f64,
    /// Times `ε` may be halved when the discriminant touches the circle.
    pub max_halvings: usize,
    pub track: TrackConfig,
}

impl Default for MonodromyConfig {
    fn default() -> Self {
        MonodromyConfig { eps: 0.3, phi: 0.0, max_halvings: 6, track: TrackConfig::default() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MonodromyReport {
    pub m: usize,
    pub k: Vec<u32>,
    pub eps: f64,
    pub phi: f64,
    pub projection_attempts: usize,
    pub samples: usize,
    pub worst_step_ratio: f64,
    pub word: String,
    pub letters: Vec<i32>,
    pub expected: String,
    pub exponent_sum: i64,
    pub expected_exponent_sum: i64,
    pub permutation: Vec<usize>,
    pub expected_permutation: Vec<usize>,
    pub path_permutation: Vec<usize>,
    /// Rotation offset of the extracted word that equals the expected braid.
    pub rotation: Option<usize>,
    pub verdict: Verdict,
}

/// `(σ₁σ₂)⁶σ₁^{k₁}` for `m = 1`, `(σ₁σ₂σ₃)⁴σ₁^{k₁}σ₃^{k₂}` for `m = 2`.
pub fn expected_word(m: usize, k: &[u32]) -> Result<BraidWord, MonodromyError> {
    validate_mk(m, k)?;
    let mut letters = Vec::new();
    if m == 1 {
        for _ in 0..6 {
            letters.extend([1, 2]);
        }
        letters.extend(std::iter::repeat_n(1, k[0] as usize));
        Ok(BraidWord::new(3, letters).expect("valid indices"))
    } else {
        for _ in 0..4 {
            letters.extend([1, 2, 3]);
        }
        letters.extend(std::iter::repeat_n(1, k[0] as usize));
        letters.extend(std::iter::repeat_n(3, k[1] as usize));
        Ok(BraidWord::new(4, letters).expect("valid indices"))
    }
}

/// Tracks, extracts and compares the braid monodromy of `f_{m,k}`.
///
/// FAIL on exponent-sum or permutation mismatch, SOFT-FAIL when the stats
/// agree but no cyclic rotation is equal in the braid group.
pub fn verify_monodromy(m: usize, k: &[u32], cfg: &MonodromyConfig) -> Result<MonodromyReport, MonodromyError> {
    let p = critical_value_polynomial(m, k)?;
    let expected = expected_word(m, k)?;
    let mut eps = cfg.eps;
    let mut halvings = 0;
    let paths = loop {
        match track(&p, eps, &cfg.track) {
            Err(MonodromyError::DiscriminantOnCircle { .. }) if halvings < cfg.max_halvings => {
                eps /= 2.0;
                halvings += 1;
            }
            other => break other?,
        }
    };
    let ex = extract_braid(&paths, cfg.phi)?;
    let stats = braid_stats(&ex.word);
    let exp_stats = braid_stats(&expected);
    let path_perm = path_permutation(&paths, &ex);
    let stats_ok = stats == exp_stats && path_perm == stats.permutation;
    let rotation = if stats_ok {
        find_cyclic_match(&ex.word, &expected).map_err(|e| MonodromyError::NonGeneric(e.to_string()))?
    } else {
        None
    };
    let verdict = match (stats_ok, rotation) {
        (false, _) => Verdict::Fail,
        (true, Some(_)) => Verdict::Pass,
        (true, None) => Verdict::SoftFail,
    };
    Ok(MonodromyReport {
        m,
        k: k.to_vec(),
        eps,
        phi: ex.phi,
        projection_attempts: ex.attempts,
        samples: paths.thetas.len(),
        worst_step_ratio: paths.worst_ratio,
        word: ex.word.factored(),
        letters: ex.word.letters().to_vec(),
        expected: expected.factored(),
        exponent_sum: stats.exponent_sum,
        expected_exponent_sum: exp_stats.exponent_sum,
        permutation: stats.permutation,
        expected_permutation: exp_stats.permutation,
        path_permutation: path_perm,
        rotation,
        verdict,
    })
}
