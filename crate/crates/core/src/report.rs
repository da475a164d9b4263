//! Verification reports.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Max-abs residual split between entries strictly inside the boundary shell
/// and entries that touch it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualSplit {
    pub interior: f64,
    pub shell: f64,
}

impl ResidualSplit {
    pub fn max(&self) -> f64 {
        self.interior.max(self.shell)
    }
}

/// Which part of a residual decides pass/fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    /// Every matrix element.
    Full,
    /// Only elements between states strictly inside the shell.
    Interior,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub scope: Scope,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<ResidualSplit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckEntry {
    /// Plain residual compared against the tolerance.
    pub fn full(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            max_residual: residual,
            tolerance,
            scope: Scope::Full,
            pass: residual < tolerance,
            split: None,
            note: None,
        }
    }

    /// Split residual that must be within tolerance everywhere.
    pub fn split_full(name: impl Into<String>, split: ResidualSplit, tolerance: f64) -> Self {
        Self {
            split: Some(split),
            ..Self::full(name, split.max(), tolerance)
        }
    }

    /// Split residual where only the interior is required to vanish; the shell
    /// part is reported but not judged.
    pub fn split_interior(name: impl Into<String>, split: ResidualSplit, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            max_residual: split.interior,
            tolerance,
            scope: Scope::Interior,
            pass: split.interior < tolerance,
            split: Some(split),
            note: None,
        }
    }

    /// Boolean property; residual is 0 on success and 1 on failure.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self {
            pass: ok,
            ..Self::full(name, if ok { 0.0 } else { 1.0 }, 0.5)
        }
    }

    /// Negative control: passes when the residual is at or above the tolerance.
    pub fn expect_failure(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            pass: residual >= tolerance,
            note: Some("negative control: residual must exceed tolerance".into()),
            ..Self::full(name, residual, tolerance)
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Ordered list of checks; `overall` is the conjunction of all `pass` flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub entries: Vec<CheckEntry>,
    pub overall: bool,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self {
            entries: Vec::new(),
            overall: true,
        }
    }

    pub fn push(&mut self, entry: CheckEntry) {
        self.overall &= entry.pass;
        self.entries.push(entry);
    }

    /// Appends every entry of `other`, prefixing names with `prefix/`.
    pub fn extend_prefixed(&mut self, prefix: &str, other: VerificationReport) {
        for mut e in other.entries {
            e.name = format!("{prefix}/{}", e.name);
            self.push(e);
        }
    }

    pub fn get(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let status = if e.pass { "PASS" } else { "FAIL" };
            write!(f, "{status}  {:<52} {:.3e}", e.name, e.max_residual)?;
            if let Some(s) = e.split {
                write!(f, "  (interior {:.3e}, shell {:.3e})", s.interior, s.shell)?;
            }
            writeln!(f)?;
        }
        write!(
            f,
            "{} checks, overall {}",
            self.entries.len(),
            if self.overall { "PASS" } else { "FAIL" }
        )
    }
}
