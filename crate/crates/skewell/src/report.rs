//! Validation report records shared by the generator checks and the probe
//! suite.

use serde::{Deserialize, Serialize};

/// Relative floor used when the analytic target is (near) zero.
pub const REPORT_FLOOR: f64 = 1e-12;

/// One analytic-vs-numeric comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub check_name: String,
    pub analytic: f64,
    pub estimate: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<u64>,
    #[serde(default)]
    pub notes: String,
}

impl ValidationReport {
    /// Build a report; `passed` is derived from
    /// `|estimate - analytic| <= tolerance * max(|analytic|, floor)`.
    pub fn evaluate(
        check_name: impl Into<String>,
        analytic: f64,
        estimate: f64,
        tolerance: f64,
        notes: impl Into<String>,
    ) -> Self {
        let passed = (estimate - analytic).abs() <= tolerance * analytic.abs().max(REPORT_FLOOR);
        Self {
            check_name: check_name.into(),
            analytic,
            estimate,
            tolerance,
            passed,
            seed: None,
            n: None,
            notes: notes.into(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_n(mut self, n: u64) -> Self {
        self.n = Some(n);
        self
    }

    /// Mark failed regardless of the numeric comparison (e.g. a broken
    /// convergence trend), appending the reason to the notes.
    pub fn force_fail(mut self, reason: &str) -> Self {
        self.passed = false;
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(reason);
        self
    }
}
