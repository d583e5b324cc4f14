//! Machine-readable reports.
//!
//! Every command emits a human summary on stdout and, when asked, a JSON
//! report.  The JSON is deterministic: for a fixed input file and seed the
//! bytes are identical run to run, so reports can be committed and diffed.
//! Wall-clock timings are therefore printed on stdout only and never enter
//! the JSON.

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::Duration;
use superpair_core::{CheckReport, CheckStatus};

/// Name of the environment variable holding a default report directory.
/// When set and `--report` is absent, every command writes its JSON report
/// to `$SUPERPAIR_REPORT_DIR/<input stem>.report.json`.
pub const REPORT_DIR_ENV: &str = "SUPERPAIR_REPORT_DIR";

#[derive(Debug, Serialize)]
pub struct ReportCheck {
    pub name: String,
    pub status: String,
    /// Failure witness or skip reason.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct ReportSummary {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

/// The complete result of one command invocation.
#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub document: Option<String>,
    /// SHA-256 of the input file bytes.
    pub digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub checks: Vec<ReportCheck>,
    pub flags: Vec<String>,
    pub summary: ReportSummary,
    pub status: String,
}

impl Report {
    pub fn new(
        command: &str,
        kind: &str,
        document: Option<String>,
        input_bytes: &[u8],
        seed: Option<u64>,
        checks: &CheckReport,
    ) -> Self {
        let status_str = |s: CheckStatus| match s {
            CheckStatus::Pass => "pass".to_string(),
            CheckStatus::Fail => "fail".to_string(),
            CheckStatus::Skip => "skip".to_string(),
        };
        let items: Vec<ReportCheck> = checks
            .items
            .iter()
            .map(|it| ReportCheck {
                name: it.name.clone(),
                status: status_str(it.status),
                witness: it.detail.clone(),
            })
            .collect();
        let summary = ReportSummary {
            passed: checks.count(CheckStatus::Pass),
            failed: checks.count(CheckStatus::Fail),
            skipped: checks.count(CheckStatus::Skip),
        };
        Report {
            tool: "superpair",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            kind: kind.to_string(),
            document,
            digest: sha256_hex(input_bytes),
            seed,
            checks: items,
            flags: checks.flags.clone(),
            summary,
            status: if checks.passed() { "pass" } else { "fail" }.to_string(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }

    /// Serializes the report; the encoding is stable field order with `\n`
    /// line ends, so identical runs produce identical bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Prints the human-readable summary.  `elapsed` appears here and only
    /// here; the JSON report carries no timing.
    pub fn print_human(&self, elapsed: Duration) {
        let doc = self.document.as_deref().unwrap_or("(unnamed)");
        println!("{} {} — {} [{}]", self.tool, self.command, doc, self.kind);
        println!("input sha256 {}", self.digest);
        if let Some(seed) = self.seed {
            println!("seed {seed}");
        }
        for c in &self.checks {
            match &c.witness {
                None => println!("  {:<4} {}", c.status, c.name),
                Some(w) => {
                    // Keep witnesses to one terminal-friendly line each.
                    let mut w = w.replace('\n', " ");
                    if w.len() > 220 {
                        let cut = (0..=220).rev().find(|i| w.is_char_boundary(*i)).unwrap_or(0);
                        w.truncate(cut);
                        w.push('…');
                    }
                    println!("  {:<4} {} — {}", c.status, c.name, w);
                }
            }
        }
        for f in &self.flags {
            println!("  note {f}");
        }
        println!(
            "{}: {} passed, {} failed, {} skipped in {:.2}s",
            self.status,
            self.summary.passed,
            self.summary.failed,
            self.summary.skipped,
            elapsed.as_secs_f64()
        );
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Where the machine report goes: the explicit `--report` path when given,
/// otherwise `$SUPERPAIR_REPORT_DIR/<input stem>.report.json` when the
/// environment variable is set, otherwise nowhere.
pub fn machine_path(explicit: Option<&Path>, input: &Path) -> Option<PathBuf> {
    if let Some(p) = explicit {
        return Some(p.to_path_buf());
    }
    let dir = std::env::var_os(REPORT_DIR_ENV)?;
    let stem = input.file_stem().unwrap_or_default().to_string_lossy();
    Some(PathBuf::from(dir).join(format!("{stem}.report.json")))
}

/// Writes the JSON report, creating parent directories as needed.
pub fn write_machine(report: &Report, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("cannot create {}", parent.display()))?;
        }
    }
    std::fs::write(path, report.to_json())
        .with_context(|| format!("cannot write {}", path.display()))
}
