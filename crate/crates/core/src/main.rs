use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hmxforge::analysis::generate_mutants;
use hmxforge::encoding::{parse_suite, render_lines, render_suite};
use hmxforge::harness::{
    load_config, load_subject_ref, read_runs_csv, run_plan, write_report_files, HarnessError,
    SubjectRef,
};
use hmxforge::lang::TypedUnit;
use hmxforge::operators::CrossoverKind;
use hmxforge::runtime::{execute_with, ExecOptions};
use hmxforge::search::{evolve, Budget, SearchConfig};

#[derive(Parser)]
#[command(name = "hmxforge", version, about = "Search-based unit test generation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a test suite for one subject.
    Generate {
        /// Subject file (`.subj`) or bundled corpus name.
        subject: String,
        #[arg(long)]
        operator: Option<CrossoverKind>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, conflicts_with = "budget_secs")]
        budget_evals: Option<u64>,
        #[arg(long)]
        budget_secs: Option<f64>,
        /// key=value configuration file applied before the flags.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the `.tests` suite here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the run summary as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run an experiment plan.
    Experiment {
        plan: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        /// Use 100 seeds instead of the plan's seeds.
        #[arg(long)]
        paper_scale: bool,
    },
    /// List the mutants of a subject.
    Mutants { subject: String },
    /// Recompute stats.csv and summary.md from a runs.csv.
    Stats {
        runs: PathBuf,
        /// Defaults to the directory holding the runs file.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Execute a saved suite and dump per-statement traces as JSON lines.
    Trace {
        subject: String,
        suite: PathBuf,
        /// Only this test.
        #[arg(long)]
        test: Option<usize>,
    },
}

enum Failure {
    /// Reader closed stdout early.
    Pipe,
    Config(String),
    Subject(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::SubjectLoad { .. } => Failure::Subject(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

fn subject_ref(arg: &str) -> SubjectRef {
    let p = Path::new(arg);
    if p.extension().is_some_and(|e| e == "subj") || p.exists() {
        SubjectRef::File(p.to_path_buf())
    } else {
        SubjectRef::Corpus(arg.to_string())
    }
}

fn load(arg: &str) -> Result<(String, TypedUnit), Failure> {
    Ok(load_subject_ref(&subject_ref(arg))?)
}

fn io_fail(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |e| {
        if e.kind() == io::ErrorKind::BrokenPipe {
            Failure::Pipe
        } else {
            Failure::Config(format!("{}: {e}", path.display()))
        }
    }
}

fn threads_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var("HMXFORGE_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Config(format!("HMXFORGE_THREADS: bad value `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    let mut stdout = io::stdout().lock();
    match cmd {
        Command::Generate {
            subject,
            operator,
            seed,
            budget_evals,
            budget_secs,
            config,
            out,
            json,
        } => {
            let mut cfg = match &config {
                Some(path) => {
                    let (search, _, _) =
                        load_config(path).map_err(|e| Failure::Config(e.to_string()))?;
                    search
                }
                None => SearchConfig::default(),
            };
            let (_, unit) = load(&subject)?;
            if let Some(op) = operator {
                cfg.operator = op;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            match (budget_evals, budget_secs) {
                (Some(0), _) => return Err(Failure::Config("--budget-evals must be positive".into())),
                (Some(n), _) => cfg.budget = Budget::Evaluations(n),
                (_, Some(s)) if !(s > 0.0 && s.is_finite()) => {
                    return Err(Failure::Config("--budget-secs must be positive".into()))
                }
                (_, Some(s)) => cfg.budget = Budget::Seconds(s),
                _ => {}
            }
            let result = evolve(&unit, &cfg);
            let text = render_suite(unit.name(), cfg.seed, &result.suite);
            match &out {
                Some(path) => fs::write(path, &text).map_err(io_fail(path))?,
                None if !json => stdout.write_all(text.as_bytes()).map_err(io_fail(Path::new("stdout")))?,
                None => {}
            }
            if json {
                writeln!(stdout, "{}", result.to_json()).map_err(io_fail(Path::new("stdout")))?;
            } else {
                eprintln!(
                    "{}: branch {:.3} line {:.3} in {} evaluations, {} tests",
                    result.subject,
                    result.branch_coverage,
                    result.line_coverage,
                    result.evaluations_used,
                    result.tests.len()
                );
            }
        }
        Command::Experiment {
            plan,
            threads,
            paper_scale,
        } => {
            let (_, _, mut p) = load_config(&plan).map_err(|e| Failure::Config(e.to_string()))?;
            if paper_scale {
                p.seeds = (0..100).collect();
            }
            if threads.is_some() {
                p.threads = threads;
            }
            if let Some(t) = threads_from_env()? {
                p.threads = Some(t);
            }
            let outcome = run_plan(&p)?;
            write!(stdout, "{}", hmxforge::analysis::render_markdown(&outcome.report))
                .map_err(io_fail(Path::new("stdout")))?;
            if outcome.partial {
                eprintln!(
                    "partial results: {} of {} runs failed",
                    outcome.failures.len(),
                    outcome.failures.len() + outcome.outputs.len()
                );
            }
        }
        Command::Mutants { subject } => {
            let (_, unit) = load(&subject)?;
            for m in generate_mutants(&unit) {
                writeln!(stdout, "{m}").map_err(io_fail(Path::new("stdout")))?;
            }
        }
        Command::Stats { runs, out_dir } => {
            let records = read_runs_csv(&runs)?;
            let dir = out_dir.unwrap_or_else(|| {
                runs.parent()
                    .filter(|p| !p.as_os_str().is_empty())
                    .map_or_else(|| PathBuf::from("."), Path::to_path_buf)
            });
            // Keep the source runs.csv intact when it lives in the output directory.
            let report = if dir.join("runs.csv") == runs {
                let r = hmxforge::analysis::build_report(&records);
                let mut buf = Vec::new();
                hmxforge::analysis::write_stats_csv(&r, &mut buf)
                    .map_err(|e| Failure::Config(e.to_string()))?;
                let stats = dir.join("stats.csv");
                fs::write(&stats, buf).map_err(io_fail(&stats))?;
                let summary = dir.join("summary.md");
                fs::write(&summary, hmxforge::analysis::render_markdown(&r))
                    .map_err(io_fail(&summary))?;
                r
            } else {
                write_report_files(&dir, &records)?
            };
            write!(stdout, "{}", hmxforge::analysis::render_markdown(&report))
                .map_err(io_fail(Path::new("stdout")))?;
        }
        Command::Trace {
            subject,
            suite,
            test,
        } => {
            let (_, unit) = load(&subject)?;
            let text = fs::read_to_string(&suite).map_err(io_fail(&suite))?;
            let parsed = parse_suite(&text, &unit).map_err(|e| Failure::Config(format!("{}: {e}", suite.display())))?;
            if let Some(i) = test {
                if i >= parsed.tests.len() {
                    return Err(Failure::Config(format!(
                        "--test {i}: suite has {} tests",
                        parsed.tests.len()
                    )));
                }
            }
            for (i, t) in parsed.tests.iter().enumerate() {
                if test.is_some_and(|j| j != i) {
                    continue;
                }
                let trace = execute_with(
                    t,
                    &unit,
                    Default::default(),
                    ExecOptions {
                        observe: true,
                        probe: None,
                    },
                );
                writeln!(stdout, "{}", serde_json::json!({"record": "test", "index": i}))
                    .map_err(io_fail(Path::new("stdout")))?;
                trace
                    .write_jsonl(&render_lines(t), &mut stdout)
                    .map_err(io_fail(Path::new("stdout")))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) | Err(Failure::Pipe) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Subject(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
