//! Scenario reports and their JSON/CSV forms.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Grid;
use crate::orders::Outcome;

/// What a check is supposed to find.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expected {
    Holds,
    Fails,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Premise,
    Conclusion,
}

/// How a scenario is judged: every premise and conclusion must come out as
/// expected. Counterexamples carry at least one check expected to fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Theorem,
    Counterexample,
    Identity,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Overall {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Overall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Overall::Pass => "pass",
            Overall::Fail => "fail",
            Overall::Inconclusive => "inconclusive",
        })
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Expectation::Theorem => "theorem",
            Expectation::Counterexample => "counterexample",
            Expectation::Identity => "identity",
            Expectation::MonteCarlo => "monte_carlo",
        })
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Outcome::Holds => "holds",
            Outcome::Fails => "fails",
            Outcome::Inconclusive => "inconclusive",
        })
    }
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Expected::Holds => "holds",
            Expected::Fails => "fails",
        })
    }
}

/// One premise or conclusion check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub expected: Expected,
    pub outcome: Outcome,
    pub witness: Option<Vec<f64>>,
    pub max_violation: f64,
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, expected: Expected, outcome: Outcome) -> Self {
        CheckRecord {
            name: name.into(),
            expected,
            outcome,
            witness: None,
            max_violation: 0.0,
            tol: 0.0,
            grid: None,
            detail: String::new(),
        }
    }

    /// A check that could not be evaluated.
    pub fn errored(name: impl Into<String>, expected: Expected, err: &Error) -> Self {
        let mut r = CheckRecord::new(name, expected, Outcome::Inconclusive);
        r.detail = err.to_string();
        r
    }

    /// `|err| <= tol`, recorded with the error as the violation.
    pub fn within(name: impl Into<String>, err: f64, tol: f64) -> Self {
        let outcome = if err <= tol { Outcome::Holds } else { Outcome::Fails };
        let mut r = CheckRecord::new(name, Expected::Holds, outcome);
        r.max_violation = if err.is_finite() { err } else { f64::MAX };
        r.tol = tol;
        r
    }

    pub fn with_witness(mut self, w: Option<Vec<f64>>) -> Self {
        self.witness = w;
        self
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }

    pub fn met(&self) -> bool {
        matches!(
            (self.expected, self.outcome),
            (Expected::Holds, Outcome::Holds) | (Expected::Fails, Outcome::Fails)
        )
    }

    /// Settled, but not the way it was expected to.
    pub fn contradicted(&self) -> bool {
        self.outcome != Outcome::Inconclusive && !self.met()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub id: String,
    pub title: String,
    pub expectation: Expectation,
    pub overall: Overall,
    pub premises: Vec<CheckRecord>,
    pub conclusions: Vec<CheckRecord>,
    /// Named numeric artifacts such as computed MRL values or KS statistics.
    pub values: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub seed: u64,
    pub elapsed_ms: f64,
}

/// A verdict row as written to CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub id: String,
    pub overall: Overall,
    pub phase: Phase,
    pub name: String,
    pub expected: Expected,
    pub outcome: Outcome,
    pub max_violation: f64,
    pub tol: f64,
    /// Witness coordinates joined by `;`.
    pub witness: String,
    pub detail: String,
}

/// The verdict fields recovered from a CSV report.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvReport {
    pub id: String,
    pub overall: Overall,
    pub premises: Vec<CheckRecord>,
    pub conclusions: Vec<CheckRecord>,
}

fn join_witness(w: &Option<Vec<f64>>) -> String {
    match w {
        None => String::new(),
        Some(v) => v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(";"),
    }
}

fn split_witness(s: &str) -> Result<Option<Vec<f64>>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.split(';')
        .map(|p| p.parse::<f64>().map_err(|e| Error::Parse(format!("witness `{p}`: {e}"))))
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

impl Report {
    pub(crate) fn assemble(
        id: &str,
        title: &str,
        expectation: Expectation,
        premises: Vec<CheckRecord>,
        conclusions: Vec<CheckRecord>,
    ) -> Self {
        let all = premises.iter().chain(&conclusions);
        let overall = if all.clone().any(CheckRecord::contradicted) {
            Overall::Fail
        } else if all.clone().all(CheckRecord::met) && !(premises.is_empty() && conclusions.is_empty()) {
            Overall::Pass
        } else {
            Overall::Inconclusive
        };
        Report {
            id: id.to_string(),
            title: title.to_string(),
            expectation,
            overall,
            premises,
            conclusions,
            values: BTreeMap::new(),
            notes: Vec::new(),
            seed: 0,
            elapsed_ms: 0.0,
        }
    }

    pub fn records(&self) -> impl Iterator<Item = (Phase, &CheckRecord)> {
        self.premises
            .iter()
            .map(|r| (Phase::Premise, r))
            .chain(self.conclusions.iter().map(|r| (Phase::Conclusion, r)))
    }

    pub fn record(&self, name: &str) -> Option<&CheckRecord> {
        self.records().map(|p| p.1).find(|r| r.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn csv_rows(&self) -> Vec<CsvRow> {
        self.records()
            .map(|(phase, r)| CsvRow {
                id: self.id.clone(),
                overall: self.overall,
                phase,
                name: r.name.clone(),
                expected: r.expected,
                outcome: r.outcome,
                max_violation: r.max_violation,
                tol: r.tol,
                witness: join_witness(&r.witness),
                detail: r.detail.clone(),
            })
            .collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        write_csv_rows(&self.csv_rows())
    }

    /// Text summary, one line per check.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} [{}] {}\n", self.id, self.overall, self.title);
        for (phase, r) in self.records() {
            let tag = match phase {
                Phase::Premise => "premise",
                Phase::Conclusion => "check",
            };
            let mark = if r.met() { "ok" } else { "!!" };
            out.push_str(&format!(
                "  {mark} {tag:<7} {:<44} expected {:<5} got {:<12} max_violation={:.3e}",
                r.name, r.expected, r.outcome, r.max_violation
            ));
            if let Some(w) = &r.witness {
                out.push_str(&format!(" witness={w:?}"));
            }
            if !r.detail.is_empty() {
                out.push_str(&format!(" ({})", r.detail));
            }
            out.push('\n');
        }
        for (k, v) in &self.values {
            out.push_str(&format!("  value {k} = {v:.9}\n"));
        }
        for n in &self.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
        out
    }
}

pub fn write_csv_rows(rows: &[CsvRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses CSV written by [`Report::to_csv`]; rows of several reports are
/// grouped by id in order of appearance.
pub fn parse_csv(s: &str) -> Result<Vec<CsvReport>> {
    let mut rdr = csv::Reader::from_reader(s.as_bytes());
    let mut out: Vec<CsvReport> = Vec::new();
    for row in rdr.deserialize::<CsvRow>() {
        let row = row.map_err(|e| Error::Parse(e.to_string()))?;
        let record = CheckRecord {
            name: row.name,
            expected: row.expected,
            outcome: row.outcome,
            witness: split_witness(&row.witness)?,
            max_violation: row.max_violation,
            tol: row.tol,
            grid: None,
            detail: row.detail,
        };
        let idx = match out.iter().position(|r| r.id == row.id) {
            Some(i) => i,
            None => {
                out.push(CsvReport {
                    id: row.id.clone(),
                    overall: row.overall,
                    premises: Vec::new(),
                    conclusions: Vec::new(),
                });
                out.len() - 1
            }
        };
        match row.phase {
            Phase::Premise => out[idx].premises.push(record),
            Phase::Conclusion => out[idx].conclusions.push(record),
        }
    }
    Ok(out)
}
