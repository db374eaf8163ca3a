//! Verification reports.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

/// One checked case: the two sides of an identity (when it has them), the
/// residual and the threshold it was held to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseRecord {
    pub suite: String,
    pub name: String,
    pub inputs: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<f64>,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Wall-clock time; kept out of the serialized report so reruns are
    /// byte-identical.
    #[serde(skip)]
    pub runtime_ms: f64,
}

impl CaseRecord {
    pub fn new(suite: &str, name: impl Into<String>, tolerance: f64) -> Self {
        CaseRecord {
            suite: suite.to_string(),
            name: name.into(),
            inputs: BTreeMap::new(),
            lhs: None,
            rhs: None,
            residual: None,
            tolerance,
            pass: false,
            error: None,
            runtime_ms: 0.0,
        }
    }

    pub fn input(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    /// Records both sides and passes when `|lhs − rhs| ≤ tolerance`.
    pub fn compare(mut self, lhs: f64, rhs: f64) -> Self {
        let residual = (lhs - rhs).abs();
        self.lhs = Some(lhs);
        self.rhs = Some(rhs);
        self.residual = Some(residual);
        self.pass = residual <= self.tolerance;
        self
    }

    /// Records a residual that is checked against the tolerance on its own.
    pub fn residual(mut self, residual: f64) -> Self {
        self.residual = Some(residual);
        self.pass = residual <= self.tolerance;
        self
    }

    /// Adds an extra requirement on top of the tolerance check.
    pub fn require(mut self, condition: bool, why: &str) -> Self {
        if !condition {
            self.pass = false;
            self.error.get_or_insert_with(|| why.to_string());
        }
        self
    }

    pub fn failed(mut self, error: impl std::fmt::Display) -> Self {
        self.pass = false;
        self.error = Some(error.to_string());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub suite: String,
    pub seed: u64,
    pub total: usize,
    pub failed: usize,
    pub pass: bool,
    pub cases: Vec<CaseRecord>,
}

impl RunReport {
    pub fn new(suite: &str, seed: u64, cases: Vec<CaseRecord>) -> Self {
        let failed = cases.iter().filter(|c| !c.pass).count();
        RunReport { suite: suite.to_string(), seed, total: cases.len(), failed, pass: failed == 0, cases }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

/// True when each residual is below the one before it, treating anything at
/// or under `floor` as already converged.
pub fn decreasing(residuals: &[f64], floor: f64) -> bool {
    residuals.windows(2).all(|w| w[1] < w[0] || w[1] <= floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregate_pass_needs_every_case() {
        let ok = CaseRecord::new("s", "a", 1e-3).compare(1.0, 1.0005);
        let bad = CaseRecord::new("s", "b", 1e-3).compare(1.0, 1.1);
        assert!(ok.pass && !bad.pass);
        assert!(RunReport::new("s", 1, vec![ok.clone()]).pass);
        let r = RunReport::new("s", 1, vec![ok, bad]);
        assert!(!r.pass);
        assert_eq!(r.failed, 1);
    }

    #[test]
    fn extra_requirements_and_errors_fail_a_case() {
        let c = CaseRecord::new("s", "a", 1.0).residual(0.5).require(false, "not decreasing");
        assert!(!c.pass);
        assert_eq!(c.error.as_deref(), Some("not decreasing"));
        assert!(!CaseRecord::new("s", "a", 1.0).failed("boom").pass);
    }

    #[test]
    fn runtime_is_not_serialized() {
        let mut c = CaseRecord::new("s", "a", 1.0).residual(0.0);
        c.runtime_ms = 12.5;
        let json = RunReport::new("s", 1, vec![c]).to_json();
        assert!(!json.contains("runtime"));
    }

    #[test]
    fn decreasing_with_floor() {
        assert!(decreasing(&[1e-1, 1e-2, 1e-3], 1e-10));
        assert!(!decreasing(&[1e-1, 1e-2, 1e-2], 1e-10));
        assert!(decreasing(&[1e-16, 3e-16, 2e-15], 1e-10));
    }
}
