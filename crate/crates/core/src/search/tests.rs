use std::collections::BTreeSet;

use super::*;
use crate::corpus;
use crate::lang::{load_subject, ControlNode, CoverageTarget, TargetKind, TypedUnit};

fn fraction_unit() -> TypedUnit {
    corpus::load("fraction").unwrap().unwrap()
}

fn evals(n: u64, seed: u64, operator: CrossoverKind) -> SearchConfig {
    SearchConfig {
        budget: Budget::Evaluations(n),
        seed,
        operator,
        ..Default::default()
    }
}

#[test]
fn straight_line_is_covered_in_generation_zero() {
    let unit = load_subject(include_str!("../../tests/fixtures/straight.subj")).unwrap();
    let r = evolve(&unit, &evals(5000, 1, CrossoverKind::Hmx));
    assert_eq!(r.series[0].branch_coverage, 1.0);
    assert_eq!(r.series[0].line_coverage, 1.0);
    assert_eq!(r.generations, 0);
    assert!(r.consistent);
}

#[test]
fn fixed_seed_is_deterministic() {
    let unit = fraction_unit();
    let a = evolve(&unit, &evals(3000, 9, CrossoverKind::Spx));
    let b = evolve(&unit, &evals(3000, 9, CrossoverKind::Spx));
    assert_eq!(a.to_json(), b.to_json());
    assert!(a.evaluations_used <= 3000);
    assert!(a.consistent);
}

#[test]
fn coverage_series_is_monotone() {
    let unit = fraction_unit();
    let r = evolve(&unit, &evals(3000, 2, CrossoverKind::Hmx));
    for w in r.series.windows(2) {
        assert!(w[1].branch_coverage >= w[0].branch_coverage);
        assert!(w[1].line_coverage >= w[0].line_coverage);
    }
    assert!(r.branch_coverage > 0.5, "{}", r.branch_coverage);
}

#[test]
fn nothing_covered_activates_roots_only() {
    let unit = fraction_unit();
    let active = active_targets(&BTreeSet::new(), &unit, unit.targets());
    assert!(!active.is_empty());
    for t in &active {
        assert!(matches!(t.controller(&unit), ControlNode::Entry));
    }
    let all: BTreeSet<CoverageTarget> = unit.targets().iter().copied().collect();
    assert!(active_targets(&all, &unit, unit.targets()).is_empty());
}

#[test]
fn covering_an_outcome_activates_its_dependents() {
    let unit = fraction_unit();
    let targets = unit.targets();
    let nested = targets
        .iter()
        .find(|t| matches!(t.controller(&unit), ControlNode::Outcome { .. }))
        .copied()
        .unwrap();
    let ControlNode::Outcome { branch, outcome } = nested.controller(&unit) else {
        unreachable!()
    };
    let parent = CoverageTarget {
        callable: nested.callable,
        kind: TargetKind::Branch { branch, outcome },
    };
    assert!(!active_targets(&BTreeSet::new(), &unit, targets).contains(&nested));
    let covered: BTreeSet<_> = [parent].into();
    let active = active_targets(&covered, &unit, targets);
    assert!(active.contains(&nested));
    assert!(!active.contains(&parent));
}

#[test]
fn budget_parsing() {
    assert_eq!("5000".parse::<Budget>(), Ok(Budget::Evaluations(5000)));
    assert_eq!("10000evals".parse::<Budget>(), Ok(Budget::Evaluations(10000)));
    assert_eq!("120s".parse::<Budget>(), Ok(Budget::Seconds(120.0)));
    assert!("0".parse::<Budget>().is_err());
    assert!("soon".parse::<Budget>().is_err());
}
