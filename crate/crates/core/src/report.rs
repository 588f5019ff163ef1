use std::fmt;

use serde::Serialize;

/// One failed check instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub check: String,
    pub witness: String,
    pub defect: String,
}

/// Outcome of a verifier: empty iff every check passed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(
        &mut self,
        check: impl Into<String>,
        witness: impl Into<String>,
        defect: impl fmt::Display,
    ) {
        self.violations.push(Violation {
            check: check.into(),
            witness: witness.into(),
            defect: defect.to_string(),
        });
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.violations.extend(other.violations);
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    /// Violations of a single named check.
    pub fn of_check<'a>(&'a self, check: &'a str) -> impl Iterator<Item = &'a Violation> + 'a {
        self.violations.iter().filter(move |v| v.check == check)
    }

    pub fn has(&self, check: &str, witness: &str) -> bool {
        self.violations
            .iter()
            .any(|v| v.check == check && v.witness == witness)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "ok: no violations");
        }
        writeln!(f, "{} violation(s)", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {} at {}: defect {}", v.check, v.witness, v.defect)?;
        }
        Ok(())
    }
}
