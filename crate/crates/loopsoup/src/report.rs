//! Structured verification reports: one record per checked quantity pair.

use alloc::string::String;
use alloc::vec::Vec;

/// A single comparison: two quantities, the allowed bound, and the outcome.
#[derive(Debug, Clone)]
pub struct Check {
    pub label: String,
    pub lhs: String,
    pub rhs: String,
    pub discrepancy: f64,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    pub fn compare(label: String, lhs: String, rhs: String, discrepancy: f64, bound: f64) -> Self {
        Check { label, lhs, rhs, discrepancy, bound, passed: discrepancy <= bound }
    }

    /// A check that either holds exactly or fails outright.
    pub fn exact(label: String, lhs: String, rhs: String, equal: bool) -> Self {
        Check {
            label,
            lhs,
            rhs,
            discrepancy: if equal { 0.0 } else { f64::INFINITY },
            bound: 0.0,
            passed: equal,
        }
    }
}

/// A named suite of checks with its parameters spelled out.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub suite: String,
    pub params: String,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(suite: String, params: String) -> Self {
        VerificationReport { suite, params, checks: Vec::new() }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn max_discrepancy(&self) -> f64 {
        self.checks.iter().map(|c| c.discrepancy).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}
