//! Per-subject comparison of the two operators and the win/lose summary.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::io;

use serde::{Deserialize, Serialize};

use super::stats::{a12, classify_effect, median, p_value, EffectClass};
use crate::operators::CrossoverKind;

/// Significance level for win/lose decisions.
pub const ALPHA: f64 = 0.05;

/// One search run of the experiment matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub subject: String,
    pub operator: CrossoverKind,
    pub seed: u64,
    pub branch_cov: f64,
    pub line_cov: f64,
    pub weak_score: f64,
    pub strong_score: f64,
    pub evaluations: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    BranchCoverage,
    LineCoverage,
    WeakMutation,
    StrongMutation,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::BranchCoverage,
        Metric::LineCoverage,
        Metric::WeakMutation,
        Metric::StrongMutation,
    ];

    pub fn of(self, r: &RunRecord) -> f64 {
        match self {
            Metric::BranchCoverage => r.branch_cov,
            Metric::LineCoverage => r.line_cov,
            Metric::WeakMutation => r.weak_score,
            Metric::StrongMutation => r.strong_score,
        }
    }

    /// Column prefix in the stats CSV.
    pub fn short(self) -> &'static str {
        match self {
            Metric::BranchCoverage => "branch",
            Metric::LineCoverage => "line",
            Metric::WeakMutation => "weak",
            Metric::StrongMutation => "strong",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::BranchCoverage => "Branch coverage",
            Metric::LineCoverage => "Line coverage",
            Metric::WeakMutation => "Weak mutation score",
            Metric::StrongMutation => "Strong mutation score",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Win,
    Lose,
    NoDiff,
}

/// HMX against SPX on one metric of one subject.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub p_value: f64,
    /// Probability that an HMX run scores higher than an SPX run.
    pub a12: f64,
    pub effect: EffectClass,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricStats {
    pub metric: Metric,
    pub median: BTreeMap<CrossoverKind, f64>,
    pub comparison: Option<Comparison>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubjectStats {
    pub subject: String,
    pub runs: BTreeMap<CrossoverKind, usize>,
    pub metrics: Vec<MetricStats>,
}

/// Win and lose counts by effect class, in [`EffectClass::ALL`] order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub win: [usize; 4],
    pub lose: [usize; 4],
    pub no_diff: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatReport {
    pub subjects: Vec<SubjectStats>,
    pub operators: Vec<CrossoverKind>,
    /// Present only when both operators ran.
    pub summary: Option<BTreeMap<Metric, Tally>>,
}

fn effect_index(e: EffectClass) -> usize {
    EffectClass::ALL.iter().position(|c| *c == e).expect("listed")
}

pub fn compare(hmx: &[f64], spx: &[f64]) -> Comparison {
    let p = p_value(hmx, spx);
    let a = a12(hmx, spx);
    let outcome = if p < ALPHA && a > 0.5 {
        Outcome::Win
    } else if p < ALPHA && a < 0.5 {
        Outcome::Lose
    } else {
        Outcome::NoDiff
    };
    Comparison {
        p_value: p,
        a12: a,
        effect: classify_effect(a),
        outcome,
    }
}

/// Groups records by subject (in first-appearance order) and operator.
pub fn build_report(records: &[RunRecord]) -> StatReport {
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<(String, CrossoverKind), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        if !order.contains(&r.subject) {
            order.push(r.subject.clone());
        }
        groups.entry((r.subject.clone(), r.operator)).or_default().push(r);
    }
    let mut operators: Vec<CrossoverKind> = records.iter().map(|r| r.operator).collect();
    operators.sort();
    operators.dedup();
    let both = operators.len() == 2;
    let mut summary: BTreeMap<Metric, Tally> = Metric::ALL.iter().map(|m| (*m, Tally::default())).collect();
    let mut subjects = Vec::new();
    for subject in order {
        let get = |op: CrossoverKind| groups.get(&(subject.clone(), op));
        let runs = operators
            .iter()
            .map(|op| (*op, get(*op).map_or(0, Vec::len)))
            .collect();
        let mut metrics = Vec::new();
        for m in Metric::ALL {
            let sample = |op: CrossoverKind| -> Vec<f64> {
                get(op).map(|rs| rs.iter().map(|r| m.of(r)).collect()).unwrap_or_default()
            };
            let median = operators
                .iter()
                .filter_map(|op| {
                    let s = sample(*op);
                    (!s.is_empty()).then(|| (*op, median(&s)))
                })
                .collect();
            let (h, s) = (sample(CrossoverKind::Hmx), sample(CrossoverKind::Spx));
            let comparison = (both && !h.is_empty() && !s.is_empty()).then(|| compare(&h, &s));
            if let Some(c) = &comparison {
                let t = summary.get_mut(&m).expect("all metrics");
                match c.outcome {
                    Outcome::Win => t.win[effect_index(c.effect)] += 1,
                    Outcome::Lose => t.lose[effect_index(c.effect)] += 1,
                    Outcome::NoDiff => t.no_diff += 1,
                }
            }
            metrics.push(MetricStats {
                metric: m,
                median,
                comparison,
            });
        }
        subjects.push(SubjectStats {
            subject,
            runs,
            metrics,
        });
    }
    StatReport {
        subjects,
        operators,
        summary: both.then_some(summary),
    }
}

fn num(v: f64) -> String {
    format!("{v:.6}")
}

/// One row per subject; comparison columns only when both operators ran.
pub fn write_stats_csv(report: &StatReport, out: impl io::Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let both = report.summary.is_some();
    let mut header = vec!["subject".to_string()];
    for op in &report.operators {
        header.push(format!("runs_{op}"));
    }
    for m in Metric::ALL {
        for op in &report.operators {
            header.push(format!("{}_median_{op}", m.short()));
        }
        if both {
            for col in ["p_value", "a12", "effect", "outcome"] {
                header.push(format!("{}_{col}", m.short()));
            }
        }
    }
    w.write_record(&header)?;
    for s in &report.subjects {
        let mut row = vec![s.subject.clone()];
        for op in &report.operators {
            row.push(s.runs[op].to_string());
        }
        for ms in &s.metrics {
            for op in &report.operators {
                row.push(ms.median.get(op).map_or(String::new(), |v| num(*v)));
            }
            if both {
                match &ms.comparison {
                    Some(c) => {
                        row.push(num(c.p_value));
                        row.push(num(c.a12));
                        row.push(c.effect.to_string());
                        row.push(
                            match c.outcome {
                                Outcome::Win => "win",
                                Outcome::Lose => "lose",
                                Outcome::NoDiff => "no-diff",
                            }
                            .to_string(),
                        );
                    }
                    None => row.extend(std::iter::repeat_n(String::new(), 4)),
                }
            }
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn render_markdown(report: &StatReport) -> String {
    let mut out = String::from("# HMX vs SPX\n\n");
    let ops: Vec<String> = report.operators.iter().map(|o| o.to_string().to_uppercase()).collect();
    let both = report.summary.is_some();
    out.push_str("## Medians per subject\n\n| Subject | Metric |");
    for op in &ops {
        let _ = write!(out, " {op} |");
    }
    if both {
        out.push_str(" p | A12 | Effect |");
    }
    out.push_str("\n|---|---|");
    for _ in &ops {
        out.push_str("---:|");
    }
    if both {
        out.push_str("---:|---:|---|");
    }
    out.push('\n');
    for s in &report.subjects {
        for ms in &s.metrics {
            let _ = write!(out, "| {} | {} |", s.subject, ms.metric);
            for op in &report.operators {
                let v = ms.median.get(op).map_or(String::from("-"), |v| format!("{v:.3}"));
                let _ = write!(out, " {v} |");
            }
            if let Some(c) = &ms.comparison {
                let _ = write!(out, " {:.4} | {:.3} | {} |", c.p_value, c.a12, c.effect);
            } else if both {
                out.push_str(" - | - | - |");
            }
            out.push('\n');
        }
    }
    if let Some(summary) = &report.summary {
        out.push_str("\n## Win / lose summary\n\n");
        out.push_str("| Metric | #Win Negl. | #Win Small | #Win Medium | #Win Large | #Lose Negl. | #Lose Small | #Lose Medium | #Lose Large | #No diff. |\n");
        out.push_str("|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|\n");
        for (m, t) in summary {
            let _ = write!(out, "| {m} |");
            for v in t.win.iter().chain(&t.lose) {
                let _ = write!(out, " {v} |");
            }
            let _ = writeln!(out, " {} |", t.no_diff);
        }
    }
    out
}
