//! The JSON verification report.

use haantjes::Residual;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// An open reading that did not hold; reported, never fatal.
    Finding,
}

/// Run parameters echoed into the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub c: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub tol_exact: f64,
    pub tol_deriv: f64,
    pub points: usize,
}

/// One sampled identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub description: String,
    /// The identity being tested, in formula form.
    #[serde(rename = "paper_ref")]
    pub identity: String,
    pub status: Status,
    /// `None` when evaluation itself failed; see `note`.
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub points_sampled: usize,
    /// Residuals are pointwise `r/(1 + s)` with `s` the size of the terms.
    pub scale_aware: bool,
    /// The reading that holds, or why evaluation stopped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Outcome of a single check before classification.
#[derive(Clone, Debug, PartialEq)]
pub struct Measured {
    pub residual: f64,
    pub points: usize,
    pub scale_aware: bool,
    pub note: Option<String>,
}

impl Measured {
    pub fn absolute(r: Residual) -> Self {
        Measured { residual: r.max, points: r.points, scale_aware: false, note: None }
    }

    pub fn relative(r: Residual) -> Self {
        Measured { residual: r.relative, points: r.points, scale_aware: true, note: None }
    }

    pub fn value(residual: f64, points: usize, scale_aware: bool) -> Self {
        Measured { residual, points, scale_aware, note: None }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub params: ReportParams,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    /// No check failed; findings are allowed.
    pub fn passed(&self) -> bool {
        self.count(Status::Fail) == 0
    }

    /// Pretty JSON with a trailing newline. Field order is fixed and the
    /// report carries no timestamps, so equal runs give equal bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is plain data");
        s.push('\n');
        s
    }

    /// One line per check.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Finding => "finding",
            };
            let r = c.max_residual.map_or_else(|| "error".to_string(), |r| format!("{r:.3e}"));
            out.push_str(&format!("{status:>7}  {:<44} {r:>10} / {:.0e}\n", c.id, c.tolerance));
        }
        out.push_str(&format!(
            "{} checks: {} pass, {} fail, {} finding\n",
            self.checks.len(),
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Finding)
        ));
        out
    }
}
