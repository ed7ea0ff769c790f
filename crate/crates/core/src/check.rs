//! Named pass/fail outcomes produced by the verification routines.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Self { name: name.into(), passed: true, witness: None }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        Self { name: name.into(), passed: false, witness: Some(witness.into()) }
    }

    /// Passes iff `lhs == rhs`; the witness shows both sides otherwise.
    pub fn equal<T: PartialEq + std::fmt::Display>(name: impl Into<String>, lhs: &T, rhs: &T) -> Self {
        if lhs == rhs {
            Self::pass(name)
        } else {
            Self::fail(name, format!("lhs = {lhs}; rhs = {rhs}"))
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}
