//! Experiment matrix: configuration, execution and report files.

mod config;
mod plan;

use std::fmt;
use std::path::PathBuf;

pub use config::{
    load_config, parse_config, parse_seeds, parse_subjects, ConfigError, DEFAULT_EXPERIMENT_BUDGET,
};
pub use plan::{
    load_subject_ref, read_runs_csv, run_one, run_plan, spot_check, write_report_files,
    HarnessError, PlanOutcome, RunOutput,
};

use crate::operators::CrossoverKind;
use crate::search::SearchConfig;

/// A bundled corpus subject or a subject file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubjectRef {
    Corpus(String),
    File(PathBuf),
}

impl fmt::Display for SubjectRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubjectRef::Corpus(n) => f.write_str(n),
            SubjectRef::File(p) => write!(f, "{}", p.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentPlan {
    pub subjects: Vec<SubjectRef>,
    pub operators: Vec<CrossoverKind>,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    /// Worker count; `None` uses every available core.
    pub threads: Option<usize>,
    /// Settings shared by every run; operator and seed are overridden per run.
    pub search: SearchConfig,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            subjects: crate::corpus::names(None)
                .into_iter()
                .map(|n| SubjectRef::Corpus(n.to_string()))
                .collect(),
            operators: vec![CrossoverKind::Spx, CrossoverKind::Hmx],
            seeds: (0..20).collect(),
            output_dir: PathBuf::from("results"),
            threads: None,
            search: SearchConfig {
                budget: DEFAULT_EXPERIMENT_BUDGET,
                ..Default::default()
            },
        }
    }
}
