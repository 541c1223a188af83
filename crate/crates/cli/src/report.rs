//! Assertion records, run reports and plot series.

use crate::error::{CliError, Result};
use msl_core::serde_ext::dec17;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `measured <= bound`
    AtMost,
    /// `measured < bound`
    Below,
    /// `measured >= bound`
    AtLeast,
    /// `measured > bound`
    Above,
    /// `|measured - target| <= bound`
    AbsDeviation,
    /// `|measured - target| <= bound |target|`
    RelDeviation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    pub anchor: String,
    pub check: Check,
    #[serde(with = "dec17")]
    pub measured: f64,
    #[serde(default, with = "dec17::option", skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(with = "dec17")]
    pub bound: f64,
    /// Distance to failure in the units of the bound; negative on failure.
    #[serde(with = "dec17")]
    pub margin: f64,
    pub pass: bool,
}

impl Assertion {
    pub fn evaluate(
        name: &str,
        case: Option<String>,
        anchor: &str,
        check: Check,
        measured: f64,
        target: Option<f64>,
        bound: f64,
    ) -> Self {
        let t = target.unwrap_or(0.0);
        let (margin, pass) = match check {
            Check::AtMost => (bound - measured, measured <= bound),
            Check::Below => (bound - measured, measured < bound),
            Check::AtLeast => (measured - bound, measured >= bound),
            Check::Above => (measured - bound, measured > bound),
            Check::AbsDeviation => {
                let d = (measured - t).abs();
                (bound - d, d <= bound)
            }
            Check::RelDeviation => {
                let d = (measured - t).abs() / t.abs();
                (bound - d, d <= bound)
            }
        };
        Self {
            name: name.to_string(),
            case,
            anchor: anchor.to_string(),
            check,
            measured,
            target,
            bound,
            margin,
            pass: pass && margin.is_finite(),
        }
    }

    pub fn label(&self) -> String {
        match &self.case {
            Some(c) => format!("{}[{}]", self.name, c),
            None => self.name.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub scenario_id: String,
    pub suite: String,
    pub version: String,
    /// SHA-256 of the canonical scenario JSON after defaults are filled in.
    pub input_digest: String,
    #[serde(with = "dec17")]
    pub tolerance_scale: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub assertions: Vec<Assertion>,
    pub series: Vec<String>,
    /// The only field that differs between identical runs.
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn failed(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| dec17::format(*v)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}
