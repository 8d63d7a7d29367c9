//! Many-objective evolutionary search over test cases with dynamically
//! activated branch and line targets.

mod archive;
mod evolve;
mod sort;
mod targets;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::encoding::TestCase;
use crate::operators::{CrossoverKind, OperatorConfig};
use crate::runtime::SandboxLimits;

pub use archive::Archive;
pub use evolve::{evolve, evolve_with_archive};
pub use sort::{crowding_distance, dominates, non_dominated_sort, preference_sort};
pub use targets::active_targets;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "amount")]
pub enum Budget {
    Evaluations(u64),
    Seconds(f64),
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::Evaluations(n) => write!(f, "{n}evals"),
            Budget::Seconds(s) => write!(f, "{s}s"),
        }
    }
}

impl FromStr for Budget {
    type Err = String;

    /// `5000`, `5000evals` or `120s`.
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let bad = || format!("bad budget `{s}` (expected e.g. 10000evals or 120s)");
        let b = if let Some(n) = s.strip_suffix("evals") {
            Budget::Evaluations(n.trim().parse().map_err(|_| bad())?)
        } else if let Some(n) = s.strip_suffix('s') {
            Budget::Seconds(n.trim().parse().map_err(|_| bad())?)
        } else {
            Budget::Evaluations(s.parse().map_err(|_| bad())?)
        };
        match b {
            Budget::Evaluations(0) => Err(bad()),
            Budget::Seconds(x) if !(x > 0.0 && x.is_finite()) => Err(bad()),
            b => Ok(b),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub population_size: usize,
    pub budget: Budget,
    pub operator: CrossoverKind,
    pub operator_config: OperatorConfig,
    pub seed: u64,
    pub max_test_length: usize,
    pub limits: SandboxLimits,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            population_size: 50,
            budget: Budget::Seconds(120.0),
            operator: CrossoverKind::Spx,
            operator_config: OperatorConfig::default(),
            seed: 0,
            max_test_length: 40,
            limits: SandboxLimits::default(),
        }
    }
}

/// Coverage after one generation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenerationPoint {
    pub generation: u64,
    pub evaluations: u64,
    pub branch_coverage: f64,
    pub line_coverage: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub subject: String,
    pub operator: CrossoverKind,
    pub seed: u64,
    #[serde(skip)]
    pub suite: Vec<TestCase>,
    /// Rendered suite tests.
    pub tests: Vec<String>,
    pub branch_targets: usize,
    pub line_targets: usize,
    pub covered_branch_targets: usize,
    pub covered_line_targets: usize,
    pub branch_coverage: f64,
    pub line_coverage: f64,
    pub evaluations_used: u64,
    pub generations: u64,
    pub series: Vec<GenerationPoint>,
    /// Re-running the suite covered exactly the archived targets.
    pub consistent: bool,
}

impl SearchResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

pub fn fraction(covered: usize, total: usize) -> f64 {
    if total == 0 {
        1.0
    } else {
        covered as f64 / total as f64
    }
}

#[cfg(test)]
mod tests;
