//! Weak and strong mutation scores of a suite.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::mutants::Mutant;
use crate::encoding::TestCase;
use crate::lang::TypedUnit;
use crate::runtime::{execute_test, execute_with, ExecOptions, Observation, SandboxLimits};

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MutationResult {
    pub mutants: usize,
    pub weak_killed: BTreeSet<usize>,
    pub strong_killed: BTreeSet<usize>,
    pub weak_score: f64,
    pub strong_score: f64,
}

/// Per-statement observations of the original unit, one list per test.
pub fn baseline(suite: &[TestCase], unit: &TypedUnit, limits: SandboxLimits) -> Vec<Vec<Observation>> {
    suite
        .iter()
        .map(|t| execute_test(t, unit, limits).observations)
        .collect()
}

/// Runs the suite against one mutant: `(weak, strong)` kill flags.
pub fn run_mutant(
    suite: &[TestCase],
    base: &[Vec<Observation>],
    mutant: &Mutant,
    limits: SandboxLimits,
) -> (bool, bool) {
    let mut weak = false;
    let mut strong = false;
    for (test, expected) in suite.iter().zip(base) {
        let trace = execute_with(
            test,
            &mutant.unit,
            limits,
            ExecOptions {
                observe: true,
                probe: Some(&mutant.probe),
            },
        );
        weak |= trace.infected;
        strong |= &trace.observations != expected;
        if weak && strong {
            break;
        }
    }
    (weak, strong)
}

/// Weak kill: the mutated expression evaluated to a different value than the
/// original at least once. Strong kill: some statement observation differs
/// from the run on the original unit.
pub fn score_suite(
    suite: &[TestCase],
    unit: &TypedUnit,
    mutants: &[Mutant],
    limits: SandboxLimits,
) -> MutationResult {
    let base = baseline(suite, unit, limits);
    let kills: Vec<(usize, bool, bool)> = mutants
        .par_iter()
        .map(|m| {
            let (w, s) = run_mutant(suite, &base, m, limits);
            (m.id, w, s)
        })
        .collect();
    let weak_killed: BTreeSet<usize> = kills.iter().filter(|k| k.1).map(|k| k.0).collect();
    let strong_killed: BTreeSet<usize> = kills.iter().filter(|k| k.2).map(|k| k.0).collect();
    let n = mutants.len();
    let score = |k: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };
    MutationResult {
        mutants: n,
        weak_score: score(weak_killed.len()),
        strong_score: score(strong_killed.len()),
        weak_killed,
        strong_killed,
    }
}
