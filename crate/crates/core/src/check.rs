//! Structured results for verification runs.
//!
//! Every `verify_*` entry point returns a [`CheckReport`]: a flat list of
//! named checks, each passed, failed with a human-readable witness, or
//! skipped with a reason.  Reports also carry *flags* — notes that a check
//! family ran under a known restriction (for example, a sum truncated to a
//! finite index window) without any individual check failing.

use std::fmt;

/// Outcome of a single named check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckStatus::Pass => write!(f, "pass"),
            CheckStatus::Fail => write!(f, "FAIL"),
            CheckStatus::Skip => write!(f, "skip"),
        }
    }
}

/// A single named check with its outcome.
///
/// `detail` holds a failure witness (the concrete inputs and the nonzero
/// residual) for failures, or the reason for a skip.
#[derive(Debug, Clone)]
pub struct CheckItem {
    pub name: String,
    pub status: CheckStatus,
    pub detail: Option<String>,
}

/// Aggregated outcome of a verification run.
#[derive(Debug, Clone, Default)]
pub struct CheckReport {
    pub items: Vec<CheckItem>,
    pub flags: Vec<String>,
}

impl CheckReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.items.push(CheckItem {
            name: name.into(),
            status: CheckStatus::Pass,
            detail: None,
        });
    }

    pub fn fail(&mut self, name: impl Into<String>, witness: impl Into<String>) {
        self.items.push(CheckItem {
            name: name.into(),
            status: CheckStatus::Fail,
            detail: Some(witness.into()),
        });
    }

    pub fn skip(&mut self, name: impl Into<String>, reason: impl Into<String>) {
        self.items.push(CheckItem {
            name: name.into(),
            status: CheckStatus::Skip,
            detail: Some(reason.into()),
        });
    }

    /// Records that `name` holds iff `ok`, with `witness()` evaluated lazily
    /// on failure.
    pub fn require(&mut self, name: impl Into<String>, ok: bool, witness: impl FnOnce() -> String) {
        if ok {
            self.pass(name);
        } else {
            self.fail(name, witness());
        }
    }

    /// Notes a known restriction the run operated under.
    pub fn flag(&mut self, note: impl Into<String>) {
        let note = note.into();
        if !self.flags.contains(&note) {
            self.flags.push(note);
        }
    }

    /// Appends all items and flags of `other`, prefixing item names with
    /// `prefix` (use `""` for none).
    pub fn absorb(&mut self, prefix: &str, other: CheckReport) {
        for mut item in other.items {
            if !prefix.is_empty() {
                item.name = format!("{prefix}{}", item.name);
            }
            self.items.push(item);
        }
        for f in other.flags {
            self.flag(f);
        }
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.status != CheckStatus::Fail)
    }

    pub fn count(&self, status: CheckStatus) -> usize {
        self.items.iter().filter(|i| i.status == status).count()
    }

    /// First failing item, if any — the canonical witness of the report.
    pub fn first_failure(&self) -> Option<&CheckItem> {
        self.items.iter().find(|i| i.status == CheckStatus::Fail)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} checks: {} passed, {} failed, {} skipped",
            self.items.len(),
            self.count(CheckStatus::Pass),
            self.count(CheckStatus::Fail),
            self.count(CheckStatus::Skip),
        )?;
        for item in &self.items {
            match (&item.status, &item.detail) {
                (CheckStatus::Pass, _) => writeln!(f, "  pass  {}", item.name)?,
                (status, Some(d)) => writeln!(f, "  {status}  {}: {d}", item.name)?,
                (status, None) => writeln!(f, "  {status}  {}", item.name)?,
            }
        }
        for flag in &self.flags {
            writeln!(f, "  note  {flag}")?;
        }
        Ok(())
    }
}
