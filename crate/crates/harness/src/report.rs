use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::record::{RunRecord, Verdict, RECORD_SCHEMA};

pub const REPORT_SCHEMA: &str = "lqgsim.report.v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    pub criterion: u8,
    pub claim: String,
    pub target: f64,
    pub estimate: Option<f64>,
    pub tolerance: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub overall: Verdict,
    pub rows: Vec<ReportRow>,
}

/// One row per check across all records.
pub fn report(records: &[RunRecord]) -> Result<Report> {
    if records.is_empty() {
        return Err(HarnessError::EmptyReport);
    }
    if let Some(r) = records.iter().find(|r| r.schema != RECORD_SCHEMA) {
        return Err(HarnessError::SchemaMismatch {
            context: format!("record for `{}`", r.config.id),
            expected: RECORD_SCHEMA.into(),
            found: r.schema.clone(),
        });
    }
    let mut rows = Vec::new();
    for r in records {
        if r.checks.is_empty() {
            rows.push(ReportRow {
                experiment: r.config.id.clone(),
                criterion: r.criterion,
                claim: r.claim.clone(),
                target: f64::NAN,
                estimate: None,
                tolerance: "-".into(),
                verdict: Verdict::Inconclusive,
                detail: Some("the run produced no checks".into()),
            });
        }
        for c in &r.checks {
            rows.push(ReportRow {
                experiment: r.config.id.clone(),
                criterion: r.criterion,
                claim: c.claim.clone(),
                target: c.target,
                estimate: c.estimate,
                tolerance: c.tolerance.to_string(),
                verdict: c.verdict,
                detail: c.detail.clone(),
            });
        }
    }
    Ok(Report {
        schema: REPORT_SCHEMA.to_string(),
        overall: Verdict::combine(rows.iter().map(|r| r.verdict)),
        rows,
    })
}

fn number(x: f64) -> String {
    if x == 0.0 || (1e-3..1e5).contains(&x.abs()) {
        format!("{x:.6}")
    } else {
        format!("{x:.4e}")
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("a report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            let estimate = r.estimate.map_or("-".to_string(), number);
            let _ = writeln!(
                s,
                "{:<12} {:>2} {:<22} {} | target {} | estimate {} | {}",
                r.verdict.to_string(),
                r.criterion,
                r.experiment,
                r.claim,
                number(r.target),
                estimate,
                r.tolerance
            );
            if let Some(d) = &r.detail {
                let _ = writeln!(s, "{:39}{d}", "");
            }
        }
        let _ = writeln!(s, "overall: {}", self.overall);
        s
    }

    /// Write `report.json` and `report.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        for (name, text) in [("report.json", self.to_json()), ("report.txt", self.to_text())] {
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(|source| HarnessError::Io { path, source })?;
        }
        Ok(())
    }
}
