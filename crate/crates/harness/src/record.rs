use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

pub const RECORD_SCHEMA: &str = "lqgsim.run.v1";
pub const ROWS_SCHEMA: &str = "lqgsim.rows.v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// PASS only when every verdict passes; INCONCLUSIVE only when none is
    /// decided; any other mixture is a FAIL.
    pub fn combine(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let (mut pass, mut fail, mut open) = (0, 0, 0);
        for v in verdicts {
            match v {
                Verdict::Pass => pass += 1,
                Verdict::Fail => fail += 1,
                Verdict::Inconclusive => open += 1,
            }
        }
        if fail == 0 && open == 0 && pass > 0 {
            Verdict::Pass
        } else if fail == 0 && pass == 0 {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// How an estimate is compared with its target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Tolerance {
    /// `|estimate - target| ≤ k · std_error`.
    StdErrors { k: f64, std_error: f64 },
    /// `|estimate / target - 1| ≤ rel`.
    Relative { rel: f64 },
    /// `|estimate - target| ≤ abs`.
    Absolute { abs: f64 },
    /// `estimate < target`.
    Below,
    /// `estimate > target`.
    Above,
    /// `estimate == target`.
    Exact,
}

impl Tolerance {
    pub fn accepts(&self, target: f64, estimate: f64) -> bool {
        match *self {
            Tolerance::StdErrors { k, std_error } => (estimate - target).abs() <= k * std_error,
            Tolerance::Relative { rel } => (estimate / target - 1.0).abs() <= rel,
            Tolerance::Absolute { abs } => (estimate - target).abs() <= abs,
            Tolerance::Below => estimate < target,
            Tolerance::Above => estimate > target,
            Tolerance::Exact => estimate == target,
        }
    }
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Tolerance::StdErrors { k, std_error } => write!(f, "±{k} SE (SE {std_error:.3e})"),
            Tolerance::Relative { rel } => write!(f, "±{}%", rel * 100.0),
            Tolerance::Absolute { abs } => write!(f, "±{abs:e}"),
            Tolerance::Below => f.write_str("below target"),
            Tolerance::Above => f.write_str("above target"),
            Tolerance::Exact => f.write_str("exact"),
        }
    }
}

/// One compared quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub claim: String,
    pub target: f64,
    /// `None` when the run produced nothing to compare.
    pub estimate: Option<f64>,
    pub tolerance: Tolerance,
    /// Part of the estimate rests on paths that never finished.
    pub censored: bool,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn new(claim: impl Into<String>, target: f64, estimate: Option<f64>, tolerance: Tolerance) -> Self {
        let verdict = match estimate {
            Some(e) if e.is_finite() => {
                if tolerance.accepts(target, e) {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                }
            }
            _ => Verdict::Inconclusive,
        };
        Check {
            claim: claim.into(),
            target,
            estimate,
            tolerance,
            censored: false,
            verdict,
            detail: None,
        }
    }

    /// Mark the estimate as censored; it can then never pass.
    pub fn censored(mut self, censored: bool) -> Self {
        self.censored = censored;
        if censored {
            self.verdict = Verdict::Inconclusive;
        }
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// Named summary statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub name: String,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
}

impl Estimate {
    pub fn new(name: impl Into<String>, value: f64, std_error: Option<f64>) -> Self {
        Estimate {
            name: name.into(),
            value,
            std_error,
        }
    }
}

/// Per-sample rows, written as CSV.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }
}

/// Builds a table row from displayable values.
#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$($x.to_string()),*] };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema: String,
    pub config: ExperimentConfig,
    pub criterion: u8,
    pub claim: String,
    pub code_version: String,
    pub wall_time_secs: f64,
    pub rows_file: String,
    pub n_rows: usize,
    pub summary: Vec<Estimate>,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    /// Kept in memory only; the CSV file holds them on disk.
    #[serde(skip)]
    pub rows: Table,
}

impl RunRecord {
    pub fn estimate(&self, name: &str) -> Option<&Estimate> {
        self.summary.iter().find(|e| e.name == name)
    }

    /// Read a record written by a run, refusing other schemas.
    pub fn load(path: &Path) -> Result<RunRecord> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|source| HarnessError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        let found = value.get("schema").and_then(|s| s.as_str()).unwrap_or("<none>");
        if found != RECORD_SCHEMA {
            return Err(HarnessError::SchemaMismatch {
                context: path.display().to_string(),
                expected: RECORD_SCHEMA.into(),
                found: found.into(),
            });
        }
        serde_json::from_value(value).map_err(|source| HarnessError::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combining_verdicts() {
        use Verdict::*;
        assert_eq!(Verdict::combine([Pass, Pass]), Pass);
        assert_eq!(Verdict::combine([Pass, Fail]), Fail);
        assert_eq!(Verdict::combine([Pass, Inconclusive]), Fail);
        assert_eq!(Verdict::combine([Inconclusive]), Inconclusive);
        assert_eq!(Verdict::combine([]), Inconclusive);
    }

    #[test]
    fn tolerances() {
        assert!(Tolerance::StdErrors { k: 3.0, std_error: 0.1 }.accepts(1.0, 1.3));
        assert!(!Tolerance::StdErrors { k: 3.0, std_error: 0.1 }.accepts(1.0, 1.31));
        assert!(Tolerance::Relative { rel: 0.05 }.accepts(2.0, 2.09));
        assert!(!Tolerance::Below.accepts(0.1, 0.1));
        assert!(Tolerance::Above.accepts(0.01, 0.5));
        assert!(Tolerance::Exact.accepts(0.0, 0.0));
    }

    #[test]
    fn missing_or_censored_estimates_never_pass() {
        assert_eq!(Check::new("x", 1.0, None, Tolerance::Exact).verdict, Verdict::Inconclusive);
        assert_eq!(Check::new("x", 1.0, Some(f64::NAN), Tolerance::Below).verdict, Verdict::Inconclusive);
        let c = Check::new("x", 1.0, Some(1.0), Tolerance::Exact).censored(true);
        assert_eq!(c.verdict, Verdict::Inconclusive);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn verdict() -> impl Strategy<Value = Verdict> {
            prop_oneof![Just(Verdict::Pass), Just(Verdict::Fail), Just(Verdict::Inconclusive)]
        }

        proptest! {
            #[test]
            fn combine_ignores_order(mut vs in prop::collection::vec(verdict(), 0..12)) {
                let a = Verdict::combine(vs.clone());
                vs.reverse();
                prop_assert_eq!(a, Verdict::combine(vs));
            }

            #[test]
            fn combine_is_associative(a in prop::collection::vec(verdict(), 0..8), b in prop::collection::vec(verdict(), 0..8)) {
                let whole = Verdict::combine(a.iter().chain(&b).copied());
                let parts: Vec<Verdict> = [&a, &b]
                    .into_iter()
                    .filter(|v| !v.is_empty())
                    .map(|v| Verdict::combine(v.iter().copied()))
                    .collect();
                prop_assert_eq!(whole, Verdict::combine(parts));
            }

            #[test]
            fn one_failure_fails_everything(vs in prop::collection::vec(verdict(), 0..12)) {
                prop_assert_eq!(Verdict::combine(vs.into_iter().chain([Verdict::Fail])), Verdict::Fail);
            }
        }
    }
}
