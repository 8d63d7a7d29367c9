//! Mutation analysis of generated suites and the statistics used to compare
//! operators.

mod mutants;
mod report;
mod score;
mod stats;

pub use mutants::{constant_replacements, generate_mutants, Mutant, MutantKind};
pub use report::{
    build_report, compare, render_markdown, write_stats_csv, Comparison, Metric, MetricStats,
    Outcome, RunRecord, StatReport, SubjectStats, Tally, ALPHA,
};
pub use score::{baseline, run_mutant, score_suite, MutationResult};
pub use stats::{
    a12, classify_effect, exact_p, median, midranks, normal_p, p_value, wilcoxon_rank_sum,
    EffectClass, StatsError, EXACT_LIMIT,
};

#[cfg(test)]
mod tests;
