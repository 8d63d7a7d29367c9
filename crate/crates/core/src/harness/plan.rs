use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{ExperimentPlan, SubjectRef};
use crate::analysis::{build_report, generate_mutants, render_markdown, score_suite, write_stats_csv, Mutant, RunRecord, StatReport};
use crate::corpus;
use crate::encoding::{parse_suite, render_suite};
use crate::lang::{load_subject, TypedUnit};
use crate::operators::{CrossoverKind, OperatorConfig};
use crate::runtime::{execute_with, ExecOptions, SandboxLimits};
use crate::search::{evolve, fraction, Budget, GenerationPoint, SearchConfig};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("cannot load subject {name}: {diagnostic}")]
    SubjectLoad { name: String, diagnostic: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("spot check failed for {run}: {message}")]
    SpotCheck { run: String, message: String },
    #[error("invariant violated in {run}: {message}")]
    Invariant { run: String, message: String },
    #[error("empty plan: {0}")]
    EmptyPlan(&'static str),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Loads and type checks a subject, returning its display name too.
pub fn load_subject_ref(r: &SubjectRef) -> Result<(String, TypedUnit), HarnessError> {
    match r {
        SubjectRef::Corpus(name) => match corpus::load(name) {
            Some(Ok(u)) => Ok((name.clone(), u)),
            Some(Err(e)) => Err(HarnessError::SubjectLoad {
                name: name.clone(),
                diagnostic: e.to_string(),
            }),
            None => Err(HarnessError::SubjectLoad {
                name: name.clone(),
                diagnostic: "no such corpus subject".into(),
            }),
        },
        SubjectRef::File(path) => {
            let name = path.display().to_string();
            let text = fs::read_to_string(path).map_err(|e| HarnessError::SubjectLoad {
                name: name.clone(),
                diagnostic: e.to_string(),
            })?;
            let unit = load_subject(&text).map_err(|e| HarnessError::SubjectLoad {
                name: name.clone(),
                diagnostic: e.to_string(),
            })?;
            let stem = path
                .file_stem()
                .map_or(name, |s| s.to_string_lossy().into_owned());
            Ok((stem, unit))
        }
    }
}

/// Per-run JSON record.
#[derive(Clone, Debug, Serialize)]
pub struct RunOutput {
    pub subject: String,
    pub operator: CrossoverKind,
    pub seed: u64,
    pub population_size: usize,
    pub budget: Budget,
    pub max_test_length: usize,
    pub operator_config: OperatorConfig,
    pub branch_cov: f64,
    pub line_cov: f64,
    pub weak_score: f64,
    pub strong_score: f64,
    pub mutants: usize,
    pub weak_killed: usize,
    pub strong_killed: usize,
    pub evaluations: u64,
    pub generations: u64,
    pub series: Vec<GenerationPoint>,
    pub tests: Vec<String>,
    #[serde(skip)]
    pub suite_text: String,
    #[serde(skip)]
    pub wall_ms: u128,
}

impl RunOutput {
    pub fn record(&self) -> RunRecord {
        RunRecord {
            subject: self.subject.clone(),
            operator: self.operator,
            seed: self.seed,
            branch_cov: self.branch_cov,
            line_cov: self.line_cov,
            weak_score: self.weak_score,
            strong_score: self.strong_score,
            evaluations: self.evaluations,
        }
    }

    fn label(&self) -> String {
        format!("{}/{}/{}", self.subject, self.operator, self.seed)
    }
}

/// One search plus mutation scoring.
pub fn run_one(
    subject: &str,
    unit: &TypedUnit,
    mutants: &[Mutant],
    cfg: &SearchConfig,
) -> Result<RunOutput, HarnessError> {
    let started = Instant::now();
    let result = evolve(unit, cfg);
    let label = format!("{subject}/{}/{}", cfg.operator, cfg.seed);
    if !result.consistent {
        return Err(HarnessError::Invariant {
            run: label,
            message: "suite replay does not cover the archived targets".into(),
        });
    }
    let mutation = score_suite(&result.suite, unit, mutants, cfg.limits);
    if !mutation.strong_killed.is_subset(&mutation.weak_killed) {
        return Err(HarnessError::Invariant {
            run: label,
            message: "strongly killed mutant not weakly killed".into(),
        });
    }
    Ok(RunOutput {
        subject: subject.to_string(),
        operator: cfg.operator,
        seed: cfg.seed,
        population_size: cfg.population_size,
        budget: cfg.budget,
        max_test_length: cfg.max_test_length,
        operator_config: cfg.operator_config.clone(),
        branch_cov: result.branch_coverage,
        line_cov: result.line_coverage,
        weak_score: mutation.weak_score,
        strong_score: mutation.strong_score,
        mutants: mutation.mutants,
        weak_killed: mutation.weak_killed.len(),
        strong_killed: mutation.strong_killed.len(),
        evaluations: result.evaluations_used,
        generations: result.generations,
        series: result.series,
        tests: result.tests,
        suite_text: render_suite(unit.name(), cfg.seed, &result.suite),
        wall_ms: started.elapsed().as_millis(),
    })
}

/// Re-executes a serialized suite and compares its coverage with the record.
pub fn spot_check(
    unit: &TypedUnit,
    suite_text: &str,
    record: &RunRecord,
    limits: SandboxLimits,
) -> Result<(), String> {
    let suite = parse_suite(suite_text, unit).map_err(|e| e.to_string())?;
    let mut covered = BTreeSet::new();
    for t in &suite.tests {
        let trace = execute_with(
            t,
            unit,
            limits,
            ExecOptions {
                observe: false,
                probe: None,
            },
        );
        covered.extend(unit.targets().iter().filter(|g| trace.covers(g)).copied());
    }
    let (mut b, mut l) = ((0, 0), (0, 0));
    for t in unit.targets() {
        let slot = if t.is_branch() { &mut b } else { &mut l };
        slot.1 += 1;
        if covered.contains(t) {
            slot.0 += 1;
        }
    }
    let (bc, lc) = (fraction(b.0, b.1), fraction(l.0, l.1));
    if bc != record.branch_cov || lc != record.line_cov {
        return Err(format!(
            "recorded ({}, {}) but replay gives ({bc}, {lc})",
            record.branch_cov, record.line_cov
        ));
    }
    Ok(())
}

#[derive(Debug)]
pub struct PlanOutcome {
    pub outputs: Vec<RunOutput>,
    pub records: Vec<RunRecord>,
    pub report: StatReport,
    /// Some runs failed; their errors are listed in `failures`.
    pub partial: bool,
    pub failures: Vec<String>,
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), HarnessError> {
    fs::write(path, contents).map_err(io_err(path))
}

/// Writes `runs.csv`, `stats.csv` and `summary.md` for `records` into `dir`.
pub fn write_report_files(dir: &Path, records: &[RunRecord]) -> Result<StatReport, HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let runs = dir.join("runs.csv");
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(|e| HarnessError::Csv {
            path: runs.clone(),
            message: e.to_string(),
        })?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Csv {
        path: runs.clone(),
        message: e.to_string(),
    })?;
    write_file(&runs, &bytes)?;
    let report = build_report(records);
    let stats = dir.join("stats.csv");
    let mut buf = Vec::new();
    write_stats_csv(&report, &mut buf).map_err(|e| HarnessError::Csv {
        path: stats.clone(),
        message: e.to_string(),
    })?;
    write_file(&stats, &buf)?;
    write_file(&dir.join("summary.md"), render_markdown(&report).as_bytes())?;
    Ok(report)
}

pub fn read_runs_csv(path: &Path) -> Result<Vec<RunRecord>, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| HarnessError::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    r.deserialize()
        .collect::<Result<Vec<RunRecord>, _>>()
        .map_err(|e| HarnessError::Csv {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
}

/// Runs every (subject, operator, seed) combination and writes the report
/// files into the plan's output directory.
pub fn run_plan(plan: &ExperimentPlan) -> Result<PlanOutcome, HarnessError> {
    if plan.subjects.is_empty() {
        return Err(HarnessError::EmptyPlan("no subjects"));
    }
    if plan.operators.is_empty() {
        return Err(HarnessError::EmptyPlan("no operators"));
    }
    if plan.seeds.is_empty() {
        return Err(HarnessError::EmptyPlan("no seeds"));
    }
    // Every subject must load before any search starts.
    let units: Vec<(String, TypedUnit)> = plan
        .subjects
        .iter()
        .map(load_subject_ref)
        .collect::<Result<_, _>>()?;
    let mutants: Vec<Vec<Mutant>> = units.iter().map(|(_, u)| generate_mutants(u)).collect();
    let mut jobs = Vec::new();
    for (s, _) in units.iter().enumerate() {
        for &op in &plan.operators {
            for &seed in &plan.seeds {
                jobs.push((s, op, seed));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.threads.unwrap_or(0))
        .build()
        .expect("thread pool");
    let results: Vec<Result<RunOutput, String>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(s, op, seed)| {
                let cfg = SearchConfig {
                    operator: op,
                    seed,
                    ..plan.search.clone()
                };
                let (name, unit) = &units[s];
                let label = format!("{name}/{op}/{seed}");
                match catch_unwind(AssertUnwindSafe(|| run_one(name, unit, &mutants[s], &cfg))) {
                    Ok(Ok(out)) => Ok(out),
                    Ok(Err(e)) => Err(e.to_string()),
                    Err(_) => Err(format!("{label}: run panicked")),
                }
            })
            .collect()
    });
    let mut outputs = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(o) => outputs.push(o),
            Err(e) => failures.push(e),
        }
    }
    let dir = &plan.output_dir;
    let suites = dir.join("suites");
    fs::create_dir_all(&suites).map_err(io_err(&suites))?;
    let mut jsonl = Vec::new();
    let mut timings = csv::Writer::from_writer(Vec::new());
    timings
        .write_record(["subject", "operator", "seed", "wall_ms"])
        .expect("in-memory write");
    for o in &outputs {
        serde_json::to_writer(&mut jsonl, o).expect("serializable");
        jsonl.push(b'\n');
        timings
            .write_record([
                o.subject.clone(),
                o.operator.to_string(),
                o.seed.to_string(),
                o.wall_ms.to_string(),
            ])
            .expect("in-memory write");
        let file = suites.join(format!("{}-{}-{}.tests", o.subject, o.operator, o.seed));
        write_file(&file, o.suite_text.as_bytes())?;
    }
    write_file(&dir.join("runs.jsonl"), &jsonl)?;
    let timings = timings.into_inner().expect("in-memory write");
    write_file(&dir.join("timings.csv"), &timings)?;
    let records: Vec<RunRecord> = outputs.iter().map(RunOutput::record).collect();
    let report = write_report_files(dir, &records)?;
    // Replay every tenth run from its written suite file.
    for (i, o) in outputs.iter().enumerate() {
        if i % 10 != 0 {
            continue;
        }
        let unit = &units
            .iter()
            .find(|(n, _)| *n == o.subject)
            .expect("loaded subject")
            .1;
        let file = suites.join(format!("{}-{}-{}.tests", o.subject, o.operator, o.seed));
        let text = fs::read_to_string(&file).map_err(io_err(&file))?;
        spot_check(unit, &text, &o.record(), plan.search.limits).map_err(|message| {
            HarnessError::SpotCheck {
                run: o.label(),
                message,
            }
        })?;
    }
    let mut log = io::stderr().lock();
    for f in &failures {
        let _ = writeln!(log, "run failed: {f}");
    }
    Ok(PlanOutcome {
        outputs,
        records,
        report,
        partial: !failures.is_empty(),
        failures,
    })
}
