//! Fixed-schema verification report.
//!
//! The JSON layout is stable across releases: a version string, the suite
//! names that ran, one result row per check with an empty residual on pass,
//! and a pass/fail summary. Free-text notes are part of the text rendering
//! only, never of the JSON.

use crate::check::Check;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Schema version of the JSON report.
pub const REPORT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub suites: Vec<String>,
    pub results: Vec<CheckRow>,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRow {
    pub check_id: String,
    pub paper_anchor: String,
    /// "pass" or "fail".
    pub status: String,
    /// Display form of the nonzero residual; empty when the check passes.
    pub residual: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
}

impl Report {
    pub fn from_checks(suites: Vec<String>, checks: &[Check]) -> Report {
        let mut results = Vec::with_capacity(checks.len());
        let mut pass = 0;
        let mut fail = 0;
        for c in checks {
            if c.pass {
                pass += 1;
            } else {
                fail += 1;
            }
            results.push(CheckRow {
                check_id: c.id.clone(),
                paper_anchor: c.anchor.clone(),
                status: if c.pass { "pass" } else { "fail" }.to_string(),
                residual: if c.pass {
                    String::new()
                } else {
                    c.residual.clone()
                },
            });
        }
        Report {
            version: REPORT_VERSION.to_string(),
            suites,
            results,
            summary: Summary { pass, fail },
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Report, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Human-readable rendering; `notes` are appended before the summary.
    pub fn to_text(&self, notes: &[String]) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "suites: {}", self.suites.join(", "));
        for row in &self.results {
            if row.status == "pass" {
                let _ = writeln!(out, "PASS {}", row.check_id);
            } else {
                let _ = writeln!(out, "FAIL {}", row.check_id);
                let _ = writeln!(out, "     identity: {}", row.paper_anchor);
                let _ = writeln!(out, "     residual: {}", row.residual);
            }
        }
        for note in notes {
            let _ = writeln!(out, "note: {note}");
        }
        let _ = writeln!(
            out,
            "summary: {} passed, {} failed",
            self.summary.pass, self.summary.fail
        );
        out
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let checks = vec![
            Check::new("suite/good", "a = a", true, "0"),
            Check::new("suite/bad", "b = 0", false, "b"),
        ];
        Report::from_checks(vec!["suite".to_string()], &checks)
    }

    #[test]
    fn rows_blank_the_residual_on_pass() {
        let r = sample();
        assert_eq!(r.results[0].status, "pass");
        assert_eq!(r.results[0].residual, "");
        assert_eq!(r.results[1].status, "fail");
        assert_eq!(r.results[1].residual, "b");
        assert_eq!(r.summary, Summary { pass: 1, fail: 1 });
        assert!(!r.all_pass());
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn json_is_deterministic() {
        assert_eq!(sample().to_json(), sample().to_json());
    }

    #[test]
    fn text_shows_failures_and_notes() {
        let r = sample();
        let text = r.to_text(&["extra observation".to_string()]);
        assert!(text.contains("PASS suite/good"));
        assert!(text.contains("FAIL suite/bad"));
        assert!(text.contains("residual: b"));
        assert!(text.contains("note: extra observation"));
        assert!(text.contains("summary: 1 passed, 1 failed"));
    }
}
