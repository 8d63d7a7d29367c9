//! Rank-sum test and effect size for two independent samples.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StatsError {
    #[error("empty sample")]
    EmptySample,
    /// Every observation in both samples is equal; the p-value is 1.
    #[error("all observations are identical")]
    DegenerateSample,
}

/// Largest combined size for which the exact null distribution is used.
pub const EXACT_LIMIT: usize = 20;

/// Midranks (1-based) of `values`.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn cross_ties(xs: &[f64], ys: &[f64]) -> bool {
    xs.iter().any(|x| ys.contains(x))
}

/// Two-sided p-value of the rank sum of `xs`, by counting subsets of the
/// pooled ranks (doubled to stay integral) with a sum at least as extreme.
pub fn exact_p(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let ranks = midranks(&pooled);
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    // ways[k][s]: subsets of size k with doubled rank sum s.
    let mut ways = vec![vec![0f64; total + 1]; n + 1];
    ways[0][0] = 1.0;
    for &r in &doubled {
        for k in (1..=n).rev() {
            for s in (r..=total).rev() {
                let add = ways[k - 1][s - r];
                if add != 0.0 {
                    ways[k][s] += add;
                }
            }
        }
    }
    let observed: usize = doubled[..n].iter().sum();
    // Mean of the doubled sum: n * (N + 1).
    let centre = n * (pooled.len() + 1);
    let dev = observed.abs_diff(centre);
    let all: f64 = ways[n].iter().sum();
    let extreme: f64 = ways[n]
        .iter()
        .enumerate()
        .filter(|(s, _)| s.abs_diff(centre) >= dev)
        .map(|(_, w)| w)
        .sum();
    (extreme / all).min(1.0)
}

/// Normal approximation with tie and continuity corrections.
pub fn normal_p(xs: &[f64], ys: &[f64]) -> f64 {
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let big_n = n + m;
    let ranks = midranks(&pooled);
    let w: f64 = ranks[..xs.len()].iter().sum();
    let mean = n * (big_n + 1.0) / 2.0;
    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let var = n * m / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((w - mean).abs() - 0.5).max(0.0) / var.sqrt();
    libm::erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

/// Unpaired two-sided Wilcoxon rank-sum test. Exact when the pooled sample
/// has at most [`EXACT_LIMIT`] values and no value occurs in both groups.
pub fn wilcoxon_rank_sum(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    if xs.is_empty() || ys.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let first = xs[0];
    if xs.iter().chain(ys).all(|v| *v == first) {
        return Err(StatsError::DegenerateSample);
    }
    if xs.len() + ys.len() <= EXACT_LIMIT && !cross_ties(xs, ys) {
        Ok(exact_p(xs, ys))
    } else {
        Ok(normal_p(xs, ys))
    }
}

/// p-value with degenerate samples reported as 1.
pub fn p_value(xs: &[f64], ys: &[f64]) -> f64 {
    wilcoxon_rank_sum(xs, ys).unwrap_or(1.0)
}

/// Vargha-Delaney A12: probability that a value from `xs` exceeds one from
/// `ys`, counting ties as one half.
pub fn a12(xs: &[f64], ys: &[f64]) -> f64 {
    if xs.is_empty() || ys.is_empty() {
        return 0.5;
    }
    let mut wins = 0.0;
    for x in xs {
        for y in ys {
            if x > y {
                wins += 1.0;
            } else if x == y {
                wins += 0.5;
            }
        }
    }
    wins / (xs.len() * ys.len()) as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EffectClass {
    Negligible,
    Small,
    Medium,
    Large,
}

impl EffectClass {
    pub const ALL: [EffectClass; 4] = [
        EffectClass::Negligible,
        EffectClass::Small,
        EffectClass::Medium,
        EffectClass::Large,
    ];
}

impl fmt::Display for EffectClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EffectClass::Negligible => "negligible",
            EffectClass::Small => "small",
            EffectClass::Medium => "medium",
            EffectClass::Large => "large",
        })
    }
}

pub fn classify_effect(a12: f64) -> EffectClass {
    let d = (a12 - 0.5).abs();
    if d < 0.056 {
        EffectClass::Negligible
    } else if d < 0.147 {
        EffectClass::Small
    } else if d < 0.217 {
        EffectClass::Medium
    } else {
        EffectClass::Large
    }
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    }
}
