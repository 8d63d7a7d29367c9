use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::corpus;
use crate::lang::{load_subject, Literal, TypeTag, TypedUnit};

const PAIRED: &str = "subject Pair {
    field n: int;
    ctor(b: Box, n: int) {
        this.n = n;
    }
    method join(b: Box, p: Pair) {
        this.n = this.n + p.n;
    }
}

subject Box {
    ctor() {}
}
";

fn fraction() -> TypedUnit {
    corpus::load("fraction").unwrap().unwrap()
}

fn all_units() -> Vec<TypedUnit> {
    corpus::names(None)
        .into_iter()
        .map(|n| corpus::load(n).unwrap().unwrap())
        .collect()
}

fn sig(unit: &TypedUnit, key: &str) -> std::sync::Arc<crate::lang::CallableSig> {
    unit.signature_by_key(key).unwrap_or_else(|| panic!("{key}")).clone()
}

fn fraction_ctor(unit: &TypedUnit, n: i32, d: i32) -> Statement {
    Statement::Construct {
        callee: sig(unit, "Fraction|<init>(int, int)Fraction"),
        args: vec![Arg::Literal(Literal::Int(n)), Arg::Literal(Literal::Int(d))],
    }
}

#[test]
fn renders_statement_shapes() {
    let unit = fraction();
    let mut t = TestCase::default();
    t.push(fraction_ctor(&unit, 2, 3));
    t.push(Statement::Invoke {
        receiver: 0,
        callee: sig(&unit, "Fraction|pow(double)double"),
        args: vec![Arg::Literal(Literal::Double(2.0))],
    });
    assert_eq!(
        render_lines(&t),
        ["Fraction v0 = new Fraction(2, 3);", "double v1 = v0.pow(2.0);"]
    );
    let s = TestCase::new(vec![Statement::Primitive {
        ty: TypeTag::Str,
        value: Literal::Str("a\"b".into()),
    }]);
    assert_eq!(render(&s), "string v0 = \"a\\\"b\";\n");
}

#[test]
fn max_length_one_is_a_single_ctor() {
    let unit = fraction();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let t = random_test(&unit, &mut rng, 1).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t.statements()[0].is_ctor());
    }
}

#[test]
fn seeded_random_test_golden() {
    let unit = fraction();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let t = random_test(&unit, &mut rng, 6).unwrap();
    assert_eq!(render(&t), include_str!("../../tests/fixtures/fraction_seed42.txt"));
}

#[test]
fn prerequisite_ctor_comes_first() {
    let unit = load_subject(PAIRED).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let t = random_test(&unit, &mut rng, 8).unwrap();
        assert!(is_valid(&t));
        let first = t.statements()[0].callee().unwrap();
        assert_eq!(first.owner, "Box");
        assert_eq!(t.statements()[1].callee().unwrap().owner, "Pair");
    }
}

#[test]
fn validity_cases() {
    let unit = fraction();
    assert!(!is_valid(&TestCase::default()));
    let forward = TestCase::new(vec![
        Statement::Invoke {
            receiver: 1,
            callee: sig(&unit, "Fraction|isProper()boolean"),
            args: vec![],
        },
        fraction_ctor(&unit, 1, 2),
    ]);
    assert!(!is_valid(&forward));
}

#[test]
fn repair_inserts_missing_receiver() {
    let unit = fraction();
    let t = TestCase::new(vec![Statement::Invoke {
        receiver: DANGLING,
        callee: sig(&unit, "Fraction|isProper()boolean"),
        args: vec![],
    }]);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let r = repair(&t, &unit, &mut rng).unwrap();
    assert!(is_valid(&r));
    assert_eq!(r.len(), 2);
    assert!(r.statements()[0].is_ctor());
    assert_eq!(r.statements()[1].refs(), [0]);
}

#[test]
fn repair_fixes_two_dangling_types_in_order() {
    let unit = load_subject(PAIRED).unwrap();
    let box_ctor = sig(&unit, "Box|<init>()Box");
    let pair_ctor = sig(&unit, "Pair|<init>(Box, int)Pair");
    let join = sig(&unit, "Pair|join(Box, Pair)V");
    let t = TestCase::new(vec![
        Statement::Construct {
            callee: box_ctor,
            args: vec![],
        },
        Statement::Construct {
            callee: pair_ctor,
            args: vec![Arg::Ref(0), Arg::Literal(Literal::Int(4))],
        },
        Statement::Invoke {
            receiver: 1,
            callee: join,
            args: vec![Arg::Ref(DANGLING), Arg::Ref(7)],
        },
    ]);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let r = repair(&t, &unit, &mut rng).unwrap();
    assert!(is_valid(&r));
    let keys: Vec<&str> = r
        .statements()
        .iter()
        .map(|s| s.callee().unwrap().key.as_str())
        .collect();
    // The original three statements survive as a subsequence.
    let mut it = keys.iter();
    for k in ["Box|<init>()Box", "Pair|<init>(Box, int)Pair", "Pair|join(Box, Pair)V"] {
        assert!(it.any(|x| *x == k), "{keys:?}");
    }
    assert_eq!(repair(&r, &unit, &mut rng).unwrap(), r);
}

fn fraction_parents(unit: &TypedUnit) -> (TestCase, TestCase) {
    let text = "subject Fraction
seed 0

test 0 {
    Fraction v0 = new Fraction(2, 3);
    Fraction v1 = new Fraction(2, -1);
    Fraction v2 = v0.divideBy(v1);
    Fraction v3 = new Fraction(0, 1);
    v0.add(v3);
}

test 1 {
    Fraction v0 = new Fraction(3, 1);
    Fraction v1 = new Fraction(1, 3);
    v0.add(v1);
    double v2 = v0.pow(2.0);
}
";
    let s = parse_suite(text, unit).unwrap();
    (s.tests[0].clone(), s.tests[1].clone())
}

#[test]
fn compat_index_on_fraction_parents() {
    let unit = fraction();
    let (a, b) = fraction_parents(&unit);
    let (i1, i2) = build_compat_index(&a, &b);
    let ctor = "Fraction|<init>(int, int)Fraction";
    let add = "Fraction|add(Fraction)V";
    assert_eq!(i1.ctor_map.keys().collect::<Vec<_>>(), [ctor]);
    assert_eq!(i1.method_map.keys().collect::<Vec<_>>(), [add]);
    assert_eq!(i1.ctor_map[ctor], [0, 1, 3]);
    assert_eq!(i2.ctor_map[ctor], [0, 1]);
    assert_eq!(i1.method_map[add], [4]);
    assert_eq!(i2.method_map[add], [2]);
}

#[test]
fn compat_index_disjoint_and_counts() {
    let unit = fraction();
    let one = TestCase::new(vec![fraction_ctor(&unit, 1, 2)]);
    let two = TestCase::new(vec![fraction_ctor(&unit, 1, 2), fraction_ctor(&unit, 3, 4)]);
    let (i1, i2) = build_compat_index(&two, &one);
    let ctor = "Fraction|<init>(int, int)Fraction";
    assert_eq!(i1.ctor_map[ctor].len(), 2);
    assert_eq!(i2.ctor_map[ctor].len(), 1);
    let other = load_subject("subject Box { ctor() {} }").unwrap();
    let b = TestCase::new(vec![Statement::Construct {
        callee: sig(&other, "Box|<init>()Box"),
        args: vec![],
    }]);
    let (x, y) = build_compat_index(&one, &b);
    assert!(x.is_empty() && y.is_empty());
}

#[test]
fn suite_round_trip_with_escapes() {
    let unit = corpus::load("csv").unwrap().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut tests: Vec<TestCase> = (0..30).map(|_| random_test(&unit, &mut rng, 12).unwrap()).collect();
    tests.push(TestCase::new(vec![Statement::Primitive {
        ty: TypeTag::Str,
        value: Literal::Str("q\"\\\n\t'x".into()),
    }]));
    let text = render_suite(unit.name(), 5, &tests);
    let back = parse_suite(&text, &unit).unwrap();
    assert_eq!(back.subject, unit.name());
    assert_eq!(back.seed, 5);
    assert_eq!(back.tests, tests);
}

/// Every shared key, computed by comparing all statement pairs.
fn brute_force_keys(a: &TestCase, b: &TestCase, ctor: bool) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for s in a.statements() {
        for t in b.statements() {
            let (Some(x), Some(y)) = (s.callee(), t.callee()) else { continue };
            if s.is_ctor() == ctor && t.is_ctor() == ctor && x.key == y.key {
                out.insert(x.key.clone());
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_tests_are_valid_and_repair_is_identity(seed in any::<u64>(), max in 1usize..30) {
        for unit in all_units() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_test(&unit, &mut rng, max).unwrap();
            prop_assert!(is_valid(&t));
            prop_assert!(t.len() <= max);
            prop_assert_eq!(repair(&t, &unit, &mut rng).unwrap(), t);
        }
    }

    #[test]
    fn repair_after_deletion_is_valid_and_idempotent(seed in any::<u64>(), picks in prop::collection::vec(any::<prop::sample::Index>(), 1..4)) {
        for unit in all_units() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut t = random_test(&unit, &mut rng, 20).unwrap();
            for p in &picks {
                if t.len() > 1 {
                    t.remove(p.index(t.len()));
                }
            }
            let r = repair(&t, &unit, &mut rng).unwrap();
            prop_assert!(is_valid(&r));
            prop_assert_eq!(repair(&r, &unit, &mut rng).unwrap(), r.clone());
        }
    }

    #[test]
    fn compat_index_matches_brute_force(seed in any::<u64>()) {
        for unit in all_units() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_test(&unit, &mut rng, 15).unwrap();
            let b = random_test(&unit, &mut rng, 15).unwrap();
            let (i1, i2) = build_compat_index(&a, &b);
            for (ctor, m1, m2) in [(true, &i1.ctor_map, &i2.ctor_map), (false, &i1.method_map, &i2.method_map)] {
                let keys = brute_force_keys(&a, &b, ctor);
                prop_assert_eq!(m1.keys().cloned().collect::<BTreeSet<_>>(), keys.clone());
                prop_assert_eq!(m2.keys().cloned().collect::<BTreeSet<_>>(), keys);
                for (side, map) in [(&a, m1), (&b, m2)] {
                    for (k, positions) in map {
                        let expect: Vec<usize> = side.statements().iter().enumerate()
                            .filter(|(_, s)| s.is_ctor() == ctor && s.callee().is_some_and(|c| &c.key == k))
                            .map(|(i, _)| i)
                            .collect();
                        prop_assert_eq!(positions, &expect);
                    }
                }
            }
        }
    }

    #[test]
    fn render_parse_round_trip(seed in any::<u64>()) {
        for unit in all_units() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tests: Vec<TestCase> = (0..3).map(|_| random_test(&unit, &mut rng, 15).unwrap()).collect();
            let text = render_suite(unit.name(), seed, &tests);
            let back = parse_suite(&text, &unit).unwrap();
            prop_assert_eq!(back.tests, tests);
        }
    }
}
