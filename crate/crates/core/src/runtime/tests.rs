use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::corpus;
use crate::encoding::{parse_suite, random_test, TestCase};
use crate::lang::{load_subject, ControlNode, TypedUnit};

fn fraction() -> TypedUnit {
    corpus::load("fraction").unwrap().unwrap()
}

fn one_test(unit: &TypedUnit, body: &str) -> TestCase {
    let text = format!("subject {}\nseed 0\n\ntest 0 {{\n{body}\n}}\n", unit.name());
    parse_suite(&text, unit).unwrap().tests.remove(0)
}

#[test]
fn fraction_ctor_covers_its_lines() {
    let unit = fraction();
    let t = one_test(&unit, "Fraction v0 = new Fraction(2, 3);");
    let trace = execute_test(&t, &unit, SandboxLimits::default());
    assert_eq!(trace.observations.len(), 1);
    assert!(!matches!(trace.observations[0], Observation::Exception(_)));
    let lines = trace.covered_lines();
    for l in [7, 10, 14, 15] {
        assert!(lines.contains(&l), "{l} in {lines:?}");
    }
    for l in [8, 11, 12] {
        assert!(!lines.contains(&l), "{l}");
    }
}

#[test]
fn divide_by_zero_fraction_throws() {
    let unit = fraction();
    let t = one_test(
        &unit,
        "Fraction v0 = new Fraction(1, 2);
         Fraction v1 = new Fraction(0, 5);
         Fraction v2 = v0.divideBy(v1);
         boolean v3 = v2.isProper();",
    );
    let trace = execute_test(&t, &unit, SandboxLimits::default());
    assert_eq!(
        trace.observations[2],
        Observation::Exception("DivideByZero".into())
    );
    // The undefined result cannot be a receiver.
    assert_eq!(trace.observations[3], Observation::Skipped);
}

#[test]
fn endless_loop_hits_statement_budget() {
    let unit = load_subject(include_str!("../../tests/fixtures/spin.subj")).unwrap();
    let t = one_test(&unit, "Spinner v0 = new Spinner();\nv0.spin();");
    let trace = execute_test(&t, &unit, SandboxLimits::default());
    assert_eq!(trace.aborted, Some(AbortReason::StatementBudget));
    assert_eq!(trace.statements_executed, 100_000);
    assert_eq!(trace.observations[1], Observation::Aborted);
}

#[test]
fn returned_observation_includes_receiver() {
    let unit = load_subject(include_str!("../../tests/fixtures/straight.subj")).unwrap();
    let t = one_test(&unit, "Counter v0 = new Counter();\nint v1 = v0.bump(4);");
    let trace = execute_test(&t, &unit, SandboxLimits::default());
    match &trace.observations[1] {
        Observation::Returned { value, receiver } => {
            assert_eq!(value.as_deref(), Some("4"));
            assert!(receiver.contains("count=4"), "{receiver}");
        }
        other => panic!("{other:?}"),
    }
}

fn nested_unit() -> TypedUnit {
    load_subject(
        "subject N {
    field x: int;
    ctor() {}
    method m(a: int, b: int) {
        if (a == 5) {
            if (b == 2) {
                this.x = 1;
            }
        }
    }
}",
    )
    .unwrap()
}

fn fitness_of(unit: &TypedUnit, body: &str, branch: usize, outcome: bool) -> f64 {
    let t = one_test(unit, body);
    let trace = execute_test(&t, unit, SandboxLimits::default());
    let flat = unit.methods_of(0).next().unwrap();
    let cdg = unit.cdg(flat);
    let target = unit
        .targets()
        .iter()
        .find(|g| {
            g.as_node()
                == Some(ControlNode::Outcome {
                    branch: cdg.branches()[branch],
                    outcome,
                })
        })
        .unwrap();
    target_fitness(target, &trace, cdg)
}

#[test]
fn fitness_levels() {
    let unit = nested_unit();
    // Covered.
    assert_eq!(fitness_of(&unit, "N v0 = new N();\nv0.m(5, 2);", 0, true), 0.0);
    // Diverged at the target's own predicate with distance 1.
    assert_eq!(fitness_of(&unit, "N v0 = new N();\nv0.m(5, 3);", 1, true), 0.5);
    // Diverged one level above with distance 3.
    assert_eq!(fitness_of(&unit, "N v0 = new N();\nv0.m(2, 2);", 1, true), 1.75);
    // Method never called: chain length plus one.
    assert_eq!(fitness_of(&unit, "N v0 = new N();", 1, true), 3.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fitness_zero_iff_covered(seed in any::<u64>()) {
        for name in corpus::names(None) {
            let unit = corpus::load(name).unwrap().unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_test(&unit, &mut rng, 20).unwrap();
            let trace = execute_test(&t, &unit, SandboxLimits::default());
            for g in unit.targets() {
                let f = target_fitness(g, &trace, unit.cdg(g.callable));
                prop_assert!(f >= 0.0);
                prop_assert_eq!(f == 0.0, trace.covers(g), "{} {}", name, g);
            }
        }
    }

    #[test]
    fn normalize_is_monotone_and_bounded(a in 0.0f64..1e6, b in 0.0f64..1e6) {
        let (na, nb) = (normalize(a), normalize(b));
        prop_assert!((0.0..1.0).contains(&na));
        if a < b {
            prop_assert!(na <= nb);
        }
    }
}
