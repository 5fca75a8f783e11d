//! Machine-readable verdict reports shared by all checks.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    /// A necessary condition holds but the exact identification was not found.
    #[serde(rename = "SOFT-FAIL")]
    SoftFail,
    #[serde(rename = "SKIP")]
    Skip,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::SoftFail => "SOFT-FAIL",
            Verdict::Skip => "SKIP",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    /// Signed distance to the failure threshold where one exists.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    /// Where the margin was attained (sample point, parameter, root).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, verdict: Verdict) -> Check {
        Check { name: name.into(), verdict, margin: None, location: None, detail: None }
    }

    pub fn pass_if(name: impl Into<String>, ok: bool) -> Check {
        Check::new(name, Verdict::from_bool(ok))
    }

    pub fn margin(mut self, m: f64) -> Check {
        self.margin = Some(m);
        self
    }

    pub fn location(mut self, loc: impl Into<String>) -> Check {
        self.location = Some(loc.into());
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Check {
        self.detail = Some(d.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: serde_json::Value,
    pub config_digest: String,
    pub checks: Vec<Check>,
    /// Extra structured output (words, counts, digests).
    #[serde(default)]
    pub data: serde_json::Value,
    pub wall_time_s: f64,
}

impl Report {
    pub fn new(command: impl Into<String>, inputs: serde_json::Value, config: &impl Serialize) -> Report {
        Report {
            command: command.into(),
            inputs,
            config_digest: config_digest(config),
            checks: Vec::new(),
            data: serde_json::Value::Null,
            wall_time_s: 0.0,
        }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn all_pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.verdict == Verdict::Pass)
    }

    /// Worst verdict, ordered FAIL > SOFT-FAIL > SKIP > PASS.
    pub fn overall(&self) -> Verdict {
        let rank = |v: Verdict| match v {
            Verdict::Fail => 3,
            Verdict::SoftFail => 2,
            Verdict::Skip => 1,
            Verdict::Pass => 0,
        };
        self.checks.iter().map(|c| c.verdict).max_by_key(|&v| rank(v)).unwrap_or(Verdict::Skip)
    }
}

/// SHA-256 of the compact JSON serialization.
pub fn config_digest(config: &impl Serialize) -> String {
    let bytes = serde_json::to_vec(config).expect("config serializes");
    hex::encode(Sha256::digest(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_serde_names() {
        assert_eq!(serde_json::to_string(&Verdict::SoftFail).unwrap(), "\"SOFT-FAIL\"");
        let v: Verdict = serde_json::from_str("\"PASS\"").unwrap();
        assert_eq!(v, Verdict::Pass);
    }

    #[test]
    fn overall_is_worst() {
        let mut r = Report::new("x", serde_json::json!({}), &1);
        assert_eq!(r.overall(), Verdict::Skip);
        assert!(!r.all_pass());
        r.push(Check::pass_if("a", true));
        assert!(r.all_pass());
        r.push(Check::new("b", Verdict::SoftFail));
        r.push(Check::new("c", Verdict::Skip));
        assert_eq!(r.overall(), Verdict::SoftFail);
        assert!(!r.all_pass());
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(config_digest(&serde_json::json!({"a": 1})), config_digest(&serde_json::json!({"a": 1})));
        assert_ne!(config_digest(&1), config_digest(&2));
    }
}
