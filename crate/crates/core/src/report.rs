//! Serializable report types shared by the library and the batch front-end.

use serde::Serialize;

/// One named check with its worst observed value against a bound.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    /// Bound the quantity is compared against.
    pub bound: f64,
    pub detail: String,
}

impl CheckResult {
    /// Check that `worst` stays below `bound`.
    pub fn below(name: &str, worst: f64, bound: f64, detail: &str) -> Self {
        Self {
            name: name.to_string(),
            pass: worst <= bound,
            worst,
            bound,
            detail: detail.to_string(),
        }
    }

    /// Check that `worst` stays above `bound`.
    pub fn above(name: &str, worst: f64, bound: f64, detail: &str) -> Self {
        Self {
            name: name.to_string(),
            pass: worst >= bound,
            worst,
            bound,
            detail: detail.to_string(),
        }
    }
}

/// A verification suite report.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn new(suite: &str, seed: u64, checks: Vec<CheckResult>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            suite: suite.to_string(),
            seed,
            pass,
            checks,
        }
    }
}
