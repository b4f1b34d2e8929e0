//! Check reports: deterministic structured text. Timing is opt-in so that
//! default reports are byte-identical across runs and schedules.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn from_bool(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub micros: Option<u64>,
}

impl CheckResult {
    pub fn new(check: impl Into<String>, verdict: Verdict) -> Self {
        Self {
            check: check.into(),
            verdict,
            witnesses: Vec::new(),
            micros: None,
        }
    }

    pub fn with_witnesses(mut self, witnesses: Vec<String>) -> Self {
        self.witnesses = witnesses;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub scenario_hash: String,
    pub results: Vec<CheckResult>,
}

impl Report {
    pub fn new(scenario: &Scenario, results: Vec<CheckResult>) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            scenario_hash: scenario_hash(scenario),
            results,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.verdict == Verdict::Pass)
    }

    pub fn any_failed(&self) -> bool {
        self.results.iter().any(|r| r.verdict == Verdict::Fail)
    }

    /// 0 when nothing failed, 1 when some check failed.
    pub fn exit_code(&self) -> i32 {
        if self.any_failed() {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}

/// A stable fingerprint of the scenario content.
pub fn scenario_hash(scenario: &Scenario) -> String {
    let canonical = scenario.to_json();
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let scenario = Scenario::from_json(r#"{"atoms": 1}"#).unwrap();
        let pass = Report::new(&scenario, vec![CheckResult::new("a", Verdict::Pass)]);
        assert_eq!(pass.exit_code(), 0);
        let inconclusive = Report::new(
            &scenario,
            vec![
                CheckResult::new("a", Verdict::Pass),
                CheckResult::new("b", Verdict::Inconclusive),
            ],
        );
        assert_eq!(inconclusive.exit_code(), 0);
        let fail = Report::new(&scenario, vec![CheckResult::new("a", Verdict::Fail)]);
        assert_eq!(fail.exit_code(), 1);
    }

    #[test]
    fn hash_tracks_content() {
        let a = Scenario::from_json(r#"{"atoms": 1}"#).unwrap();
        let b = Scenario::from_json(r#"{"atoms": 2}"#).unwrap();
        assert_ne!(scenario_hash(&a), scenario_hash(&b));
        assert_eq!(scenario_hash(&a), scenario_hash(&a));
    }
}
