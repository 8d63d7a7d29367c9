//! `key = value` experiment configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Recognised keys:
//!
//! | key | value |
//! |---|---|
//! | `crossover` | `spx` or `hmx` (single runs) |
//! | `operators` | comma list of `spx`, `hmx` (experiments) |
//! | `population_size` | integer >= 2 |
//! | `budget` | `10000evals`, `10000` or `120s` |
//! | `seed` | integer |
//! | `seeds` | `0..19` (inclusive) or comma list |
//! | `paper_scale` | `true` for seeds `0..99` |
//! | `crossover_rate`, `data_crossover_rate` | probability |
//! | `eta_c` | positive real |
//! | `sbx_literal_mode` | boolean |
//! | `max_test_length` | integer >= 1 |
//! | `max_interpreted_statements`, `max_string_length` | integer >= 1 |
//! | `subjects` | comma list of corpus names, `numeric`, `string`, `all` or `.subj` paths |
//! | `output_dir` | path |
//! | `threads` | integer >= 1 |

use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::{ExperimentPlan, SubjectRef};
use crate::corpus::{self, Family};
use crate::operators::{CrossoverKind, OperatorConfig};
use crate::search::{Budget, SearchConfig};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value `{value}` for `{key}`: {reason}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
        reason: String,
    },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Budget used by experiments unless configured otherwise.
pub const DEFAULT_EXPERIMENT_BUDGET: Budget = Budget::Evaluations(10_000);

fn parse<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: ToString,
{
    value.parse::<T>().map_err(|e| ConfigError::BadValue {
        line,
        key: key.to_string(),
        value: value.to_string(),
        reason: e.to_string(),
    })
}

fn bad(line: usize, key: &str, value: &str, reason: &str) -> ConfigError {
    ConfigError::BadValue {
        line,
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.to_string(),
    }
}

fn probability(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    let p: f64 = parse(line, key, value)?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(bad(line, key, value, "must lie in [0, 1]"))
    }
}

fn at_least(line: usize, key: &str, value: &str, min: u64) -> Result<u64, ConfigError> {
    let n: u64 = parse(line, key, value)?;
    if n >= min {
        Ok(n)
    } else {
        Err(bad(line, key, value, &format!("must be at least {min}")))
    }
}

fn list(value: &str) -> Vec<&str> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

pub fn parse_seeds(value: &str) -> Result<Vec<u64>, String> {
    if let Some((a, b)) = value.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|e| format!("{e}"))?;
        let b: u64 = b.trim().parse().map_err(|e| format!("{e}"))?;
        if a > b {
            return Err("empty range".into());
        }
        return Ok((a..=b).collect());
    }
    let seeds: Vec<u64> = list(value)
        .into_iter()
        .map(|s| s.parse::<u64>().map_err(|e| format!("{e}")))
        .collect::<Result<_, _>>()?;
    if seeds.is_empty() {
        return Err("no seeds".into());
    }
    Ok(seeds)
}

pub fn parse_subjects(value: &str) -> Result<Vec<SubjectRef>, String> {
    let mut out = Vec::new();
    for item in list(value) {
        match item {
            "all" => out.extend(corpus::names(None).into_iter().map(|n| SubjectRef::Corpus(n.to_string()))),
            "numeric" => out.extend(
                corpus::names(Some(Family::Numeric))
                    .into_iter()
                    .map(|n| SubjectRef::Corpus(n.to_string())),
            ),
            "string" => out.extend(
                corpus::names(Some(Family::String))
                    .into_iter()
                    .map(|n| SubjectRef::Corpus(n.to_string())),
            ),
            other if other.ends_with(".subj") || other.contains('/') => {
                out.push(SubjectRef::File(PathBuf::from(other)))
            }
            other if corpus::entry(other).is_some() => out.push(SubjectRef::Corpus(other.to_string())),
            other => return Err(format!("`{other}` is neither a corpus subject nor a .subj path")),
        }
    }
    if out.is_empty() {
        return Err("no subjects".into());
    }
    Ok(out)
}

/// Parses configuration text. Relative subject paths resolve against
/// `base_dir`.
pub fn parse_config(
    text: &str,
    base_dir: &Path,
) -> Result<(SearchConfig, OperatorConfig, ExperimentPlan), ConfigError> {
    let mut search = SearchConfig {
        budget: DEFAULT_EXPERIMENT_BUDGET,
        ..Default::default()
    };
    let mut ops = OperatorConfig::default();
    let mut plan = ExperimentPlan::default();
    let mut paper_scale = false;
    let mut seeds_set = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ConfigError::Syntax { line });
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "crossover" => search.operator = parse(line, key, value)?,
            "operators" => {
                let mut v: Vec<CrossoverKind> = list(value)
                    .into_iter()
                    .map(|s| parse(line, key, s))
                    .collect::<Result<_, _>>()?;
                v.dedup();
                if v.is_empty() {
                    return Err(bad(line, key, value, "no operators"));
                }
                plan.operators = v;
            }
            "population_size" => search.population_size = at_least(line, key, value, 2)? as usize,
            "budget" => search.budget = parse(line, key, value)?,
            "seed" => search.seed = parse(line, key, value)?,
            "seeds" => {
                plan.seeds = parse_seeds(value).map_err(|r| bad(line, key, value, &r))?;
                seeds_set = true;
            }
            "paper_scale" => paper_scale = parse(line, key, value)?,
            "crossover_rate" => ops.crossover_rate = probability(line, key, value)?,
            "data_crossover_rate" => ops.data_crossover_rate = probability(line, key, value)?,
            "eta_c" => {
                let eta: f64 = parse(line, key, value)?;
                if !(eta > 0.0 && eta.is_finite()) {
                    return Err(bad(line, key, value, "must be positive"));
                }
                ops.eta_c = eta;
            }
            "sbx_literal_mode" => ops.sbx_literal_mode = parse(line, key, value)?,
            "max_test_length" => search.max_test_length = at_least(line, key, value, 1)? as usize,
            "max_interpreted_statements" => {
                search.limits.max_interpreted_statements = at_least(line, key, value, 1)?
            }
            "max_string_length" => {
                search.limits.max_string_length = at_least(line, key, value, 1)? as usize
            }
            "subjects" => {
                plan.subjects = parse_subjects(value)
                    .map_err(|r| bad(line, key, value, &r))?
                    .into_iter()
                    .map(|s| match s {
                        SubjectRef::File(p) if p.is_relative() => SubjectRef::File(base_dir.join(p)),
                        s => s,
                    })
                    .collect();
            }
            "output_dir" => plan.output_dir = base_dir.join(value),
            "threads" => plan.threads = Some(at_least(line, key, value, 1)? as usize),
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
    }
    if paper_scale && !seeds_set {
        plan.seeds = (0..100).collect();
    }
    search.operator_config = ops.clone();
    plan.search = search.clone();
    Ok((search, ops, plan))
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<(SearchConfig, OperatorConfig, ExperimentPlan), ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> Result<(SearchConfig, OperatorConfig, ExperimentPlan), ConfigError> {
        parse_config(text, Path::new("."))
    }

    #[test]
    fn empty_file_gives_defaults() {
        let (s, o, p) = cfg("").unwrap();
        assert_eq!(s.population_size, 50);
        assert_eq!(o, OperatorConfig::default());
        assert_eq!(o.crossover_rate, 0.75);
        assert_eq!(o.eta_c, 2.5);
        assert_eq!(o.data_crossover_rate, 1.0);
        assert_eq!(s.operator, CrossoverKind::Spx);
        assert_eq!(p.seeds, (0..20).collect::<Vec<u64>>());
        assert_eq!(p.operators, [CrossoverKind::Spx, CrossoverKind::Hmx]);
    }

    #[test]
    fn crossover_key() {
        let (s, o, _) = cfg("# comment\ncrossover = hmx\n").unwrap();
        assert_eq!(s.operator, CrossoverKind::Hmx);
        assert_eq!(o, OperatorConfig::default());
        assert_eq!(s.population_size, 50);
    }

    #[test]
    fn bad_value_reports_line() {
        match cfg("crossover = hmx\n\neta_c = banana\n") {
            Err(ConfigError::BadValue { line, key, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(key, "eta_c");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_reports_line() {
        match cfg("\nmutation_rate = 0.1\n") {
            Err(ConfigError::UnknownKey { line, key }) => assert_eq!((line, key.as_str()), (2, "mutation_rate")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn plan_keys() {
        let (s, _, p) = cfg("subjects = string, fraction\noperators = hmx\nseeds = 3..5\nbudget = 2000\nthreads = 2\n").unwrap();
        assert_eq!(p.subjects.len(), 5);
        assert_eq!(p.operators, [CrossoverKind::Hmx]);
        assert_eq!(p.seeds, [3, 4, 5]);
        assert_eq!(s.budget, Budget::Evaluations(2000));
        assert_eq!(p.threads, Some(2));
        assert!(cfg("crossover_rate = 1.5").is_err());
        assert!(cfg("subjects = nosuch").is_err());
        assert!(cfg("no equals sign").is_err());
    }

    #[test]
    fn paper_scale_seeds() {
        let (_, _, p) = cfg("paper_scale = true").unwrap();
        assert_eq!(p.seeds.len(), 100);
    }
}
