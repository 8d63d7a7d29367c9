use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{self, Write};

use serde::Serialize;

use crate::lang::{BranchId, CoverageTarget, TargetKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbortReason {
    StatementBudget,
    StringLength,
}

impl fmt::Display for AbortReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AbortReason::StatementBudget => "statement-budget",
            AbortReason::StringLength => "string-length",
        })
    }
}

/// What happened at one test statement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "kebab-case")]
pub enum Observation {
    /// Rendered value defined by the statement.
    Value(String),
    /// Method call returned normally: the rendered result (`None` for void
    /// methods) and the receiver's state afterwards.
    Returned {
        value: Option<String>,
        receiver: String,
    },
    Exception(String),
    /// A receiver or argument was unavailable.
    Skipped,
    /// A sandbox limit tripped during this statement.
    Aborted,
    /// Not attempted because an earlier statement aborted.
    NotRun,
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observation::Value(v) => f.write_str(v),
            Observation::Returned { value, receiver } => write!(
                f,
                "{} [this={receiver}]",
                value.as_deref().unwrap_or("void")
            ),
            Observation::Exception(tag) => write!(f, "exception({tag})"),
            Observation::Skipped => f.write_str("skipped"),
            Observation::Aborted => f.write_str("aborted"),
            Observation::NotRun => f.write_str("not-run"),
        }
    }
}

/// Coverage and distance record of one test execution.
#[derive(Clone, Debug, PartialEq)]
pub struct ExecutionTrace {
    pub(crate) lines: Vec<bool>,
    /// Minimum distance to the true/false outcome; infinite if never evaluated.
    pub(crate) dist_true: Vec<f64>,
    pub(crate) dist_false: Vec<f64>,
    pub(crate) entered: Vec<bool>,
    pub observations: Vec<Observation>,
    pub statements_executed: u64,
    pub aborted: Option<AbortReason>,
    /// Set when an infection probe observed a differing value.
    pub infected: bool,
}

impl ExecutionTrace {
    pub(crate) fn new(max_line: u32, branches: usize, callables: usize) -> Self {
        ExecutionTrace {
            lines: vec![false; max_line as usize + 1],
            dist_true: vec![f64::INFINITY; branches],
            dist_false: vec![f64::INFINITY; branches],
            entered: vec![false; callables],
            observations: Vec::new(),
            statements_executed: 0,
            aborted: None,
            infected: false,
        }
    }

    pub(crate) fn record_branch(&mut self, b: BranchId, dt: f64, df: f64) {
        let i = b.0 as usize;
        if dt < self.dist_true[i] {
            self.dist_true[i] = dt;
        }
        if df < self.dist_false[i] {
            self.dist_false[i] = df;
        }
    }

    pub fn covers_line(&self, line: u32) -> bool {
        self.lines.get(line as usize).copied().unwrap_or(false)
    }

    pub fn covered_lines(&self) -> BTreeSet<u32> {
        self.lines
            .iter()
            .enumerate()
            .filter(|(_, c)| **c)
            .map(|(l, _)| l as u32)
            .collect()
    }

    /// Minimum observed distance to `(b, outcome)`, if `b` was evaluated.
    pub fn distance(&self, b: BranchId, outcome: bool) -> Option<f64> {
        let d = if outcome {
            self.dist_true.get(b.0 as usize)
        } else {
            self.dist_false.get(b.0 as usize)
        }
        .copied()?;
        d.is_finite().then_some(d)
    }

    pub fn covers_branch(&self, b: BranchId, outcome: bool) -> bool {
        self.distance(b, outcome) == Some(0.0)
    }

    pub fn entered(&self, flat: usize) -> bool {
        self.entered.get(flat).copied().unwrap_or(false)
    }

    pub fn covers(&self, target: &CoverageTarget) -> bool {
        match target.kind {
            TargetKind::Branch { branch, outcome } => self.covers_branch(branch, outcome),
            TargetKind::Line { line } => self.covers_line(line),
        }
    }

    /// Outcomes taken per evaluated branch.
    pub fn branch_outcomes(&self) -> BTreeMap<BranchId, BTreeSet<bool>> {
        let mut out = BTreeMap::new();
        for i in 0..self.dist_true.len() {
            let b = BranchId(i as u32);
            let taken: BTreeSet<bool> = [true, false]
                .into_iter()
                .filter(|o| self.covers_branch(b, *o))
                .collect();
            if !taken.is_empty() {
                out.insert(b, taken);
            }
        }
        out
    }

    /// Minimum distances of every evaluated `(branch, outcome)`.
    pub fn branch_min_distance(&self) -> BTreeMap<(BranchId, bool), f64> {
        let mut out = BTreeMap::new();
        for i in 0..self.dist_true.len() {
            let b = BranchId(i as u32);
            for o in [true, false] {
                if let Some(d) = self.distance(b, o) {
                    out.insert((b, o), d);
                }
            }
        }
        out
    }

    /// Writes one JSON object per statement observation, followed by a
    /// summary record.
    pub fn write_jsonl(&self, rendered: &[String], out: &mut dyn Write) -> io::Result<()> {
        #[derive(Serialize)]
        struct StatementRecord<'a> {
            record: &'static str,
            index: usize,
            statement: Option<&'a str>,
            observation: &'a Observation,
        }
        #[derive(Serialize)]
        struct SummaryRecord {
            record: &'static str,
            statements_executed: u64,
            aborted: Option<AbortReason>,
            covered_lines: BTreeSet<u32>,
            branches: Vec<BranchRecord>,
        }
        #[derive(Serialize)]
        struct BranchRecord {
            branch: u32,
            outcome: bool,
            distance: f64,
        }
        for (index, observation) in self.observations.iter().enumerate() {
            let rec = StatementRecord {
                record: "statement",
                index,
                statement: rendered.get(index).map(String::as_str),
                observation,
            };
            serde_json::to_writer(&mut *out, &rec)?;
            out.write_all(b"\n")?;
        }
        let summary = SummaryRecord {
            record: "summary",
            statements_executed: self.statements_executed,
            aborted: self.aborted,
            covered_lines: self.covered_lines(),
            branches: self
                .branch_min_distance()
                .into_iter()
                .map(|((b, outcome), distance)| BranchRecord {
                    branch: b.0,
                    outcome,
                    distance,
                })
                .collect(),
        };
        serde_json::to_writer(&mut *out, &summary)?;
        out.write_all(b"\n")
    }
}
