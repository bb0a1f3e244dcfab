//! Structured verdicts shared by the property checkers.

use std::fmt;

use serde::Serialize;

/// Outcome of a bounded property check. Non-inconclusive verdicts carry a
/// machine-checkable witness description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Holds { witness: String },
    Fails { witness: String },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }
    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails { .. })
    }
    pub fn inconclusive(&self) -> bool {
        matches!(self, Verdict::Inconclusive { .. })
    }

    /// Process exit status: holds 0, fails 1, inconclusive 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Holds { .. } => 0,
            Verdict::Fails { .. } => 1,
            Verdict::Inconclusive { .. } => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds { witness } => write!(f, "holds: {witness}"),
            Verdict::Fails { witness } => write!(f, "fails: {witness}"),
            Verdict::Inconclusive { reason } => write!(f, "inconclusive: {reason}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub verdict: Verdict,
    pub bound: usize,
    /// Frame/morphism texts backing the verdict, keyed by name.
    pub witness_files: Vec<(String, String)>,
}

impl PropertyReport {
    pub fn new(property: impl Into<String>, verdict: Verdict, bound: usize) -> PropertyReport {
        PropertyReport {
            property: property.into(),
            verdict,
            bound,
            witness_files: Vec::new(),
        }
    }

    pub fn with_witness_file(
        mut self,
        name: impl Into<String>,
        contents: impl Into<String>,
    ) -> PropertyReport {
        self.witness_files.push((name.into(), contents.into()));
        self
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} (bound {})",
            self.property, self.verdict, self.bound
        )
    }
}
