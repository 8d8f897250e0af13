//! Outcomes of machine-checked statements.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    /// A hypothesis of the statement failed on this instance, so nothing is
    /// asserted about its conclusion.
    HypothesisViolation,
    Inconclusive,
    Fail,
}

impl Outcome {
    /// `0` pass, `1` fail, `2` anything else.
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::HypothesisViolation | Outcome::Inconclusive => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::HypothesisViolation => "hypothesis-violation",
            Outcome::Inconclusive => "inconclusive",
            Outcome::Fail => "fail",
        }
    }

    /// The worse of two outcomes.
    pub fn combine(self, other: Outcome) -> Outcome {
        self.max(other)
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub outcome: Outcome,
    pub details: Vec<String>,
}

impl Verdict {
    pub fn new(check: impl Into<String>, outcome: Outcome) -> Self {
        Verdict { check: check.into(), outcome, details: Vec::new() }
    }

    pub fn pass(check: impl Into<String>) -> Self {
        Self::new(check, Outcome::Pass)
    }

    pub fn fail(check: impl Into<String>, why: impl Into<String>) -> Self {
        Self::new(check, Outcome::Fail).note(why)
    }

    pub fn violation(check: impl Into<String>, why: impl Into<String>) -> Self {
        Self::new(check, Outcome::HypothesisViolation).note(why)
    }

    pub fn inconclusive(check: impl Into<String>, why: impl Into<String>) -> Self {
        Self::new(check, Outcome::Inconclusive).note(why)
    }

    pub fn note(mut self, line: impl Into<String>) -> Self {
        self.details.push(line.into());
        self
    }

    pub fn is_pass(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    /// Turns a budget error into an inconclusive verdict; other errors pass
    /// through.
    pub fn or_inconclusive(check: &str, r: Result<Verdict>) -> Result<Verdict> {
        match r {
            Err(Error::BudgetExceeded(msg)) => Ok(Verdict::inconclusive(check, msg)),
            other => other,
        }
    }

    /// Aggregates sub-verdicts; the outcome is the worst one.
    pub fn all(check: impl Into<String>, parts: &[Verdict]) -> Self {
        let outcome = parts.iter().map(|v| v.outcome).fold(Outcome::Pass, Outcome::combine);
        let mut v = Verdict::new(check, outcome);
        for p in parts {
            v.details.push(format!("{}: {}", p.check, p.outcome));
            v.details.extend(p.details.iter().map(|d| format!("  {d}")));
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregation_is_worst_case() {
        let a = Verdict::pass("a");
        let b = Verdict::inconclusive("b", "budget");
        assert_eq!(Verdict::all("x", &[a.clone(), b.clone()]).outcome, Outcome::Inconclusive);
        assert_eq!(Verdict::all("x", &[b, a, Verdict::fail("c", "no")]).outcome, Outcome::Fail);
        assert_eq!(Verdict::all("x", &[]).outcome, Outcome::Pass);
    }

    #[test]
    fn budget_errors_become_inconclusive() {
        let v = Verdict::or_inconclusive("c", Err(Error::BudgetExceeded("t".into()))).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
        assert!(Verdict::or_inconclusive("c", Err(Error::InvalidInput("t".into()))).is_err());
    }
}
