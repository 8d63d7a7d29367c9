use super::*;
use crate::corpus;
use crate::encoding::{parse_suite, TestCase};
use crate::lang::{load_subject, Literal};
use crate::runtime::SandboxLimits;

const CALC: &str = "subject Calc {
    ctor() {
    }

    method sum(a: int, b: int) -> int {
        return a + b;
    }

    method less(a: int, b: int) -> boolean {
        if (a < b) {
            return true;
        }
        return false;
    }

    method two() -> int {
        return 2;
    }
}
";

fn count(ms: &[Mutant], callable: &str, kind: MutantKind) -> usize {
    ms.iter()
        .filter(|m| m.callable == callable && m.kind == kind)
        .count()
}

#[test]
fn mutant_counts() {
    let unit = load_subject(CALC).unwrap();
    let ms = generate_mutants(&unit);
    assert_eq!(count(&ms, "Calc.sum", MutantKind::Aor), 4);
    assert_eq!(count(&ms, "Calc.less", MutantKind::Ror), 5);
    assert_eq!(count(&ms, "Calc.less", MutantKind::NegateConditional), 1);
    let two: Vec<&str> = ms
        .iter()
        .filter(|m| m.callable == "Calc.two")
        .map(|m| m.replacement.as_str())
        .collect();
    assert_eq!(two, ["0", "1", "-1", "3"]);
    assert_eq!(ms.len(), 14);
    assert!(ms.iter().enumerate().all(|(i, m)| m.id == i));
}

#[test]
fn constant_sets() {
    assert_eq!(
        constant_replacements(&Literal::Int(0)),
        [Literal::Int(1), Literal::Int(-1)]
    );
    assert_eq!(
        constant_replacements(&Literal::Str("x".into())),
        [Literal::Str(String::new())]
    );
    assert!(constant_replacements(&Literal::Str(String::new())).is_empty());
    assert!(constant_replacements(&Literal::Bool(true)).is_empty());
}

#[test]
fn mutants_differ_at_one_node() {
    let unit = corpus::load("fraction").unwrap().unwrap();
    for m in generate_mutants(&unit) {
        assert_ne!(m.unit.unit(), unit.unit(), "{m}");
    }
}

fn calc_suite(unit: &crate::lang::TypedUnit, body: &str) -> Vec<TestCase> {
    let text = format!("subject Calc\nseed 0\n\ntest 0 {{\n{body}}}\n");
    parse_suite(&text, unit).unwrap().tests
}

#[test]
fn empty_suite_kills_nothing() {
    let unit = load_subject(CALC).unwrap();
    let ms = generate_mutants(&unit);
    let r = score_suite(&[], &unit, &ms, SandboxLimits::default());
    assert_eq!((r.weak_score, r.strong_score), (0.0, 0.0));
}

#[test]
fn unexecuted_method_survives() {
    let unit = load_subject(CALC).unwrap();
    let ms = generate_mutants(&unit);
    let suite = calc_suite(&unit, "    Calc v0 = new Calc();\n    int v1 = v0.sum(3, 4);\n");
    let r = score_suite(&suite, &unit, &ms, SandboxLimits::default());
    for m in &ms {
        if m.callable != "Calc.sum" {
            assert!(!r.weak_killed.contains(&m.id) && !r.strong_killed.contains(&m.id), "{m}");
        }
    }
    // 3 + 4 = 7 differs from 3 - 4, 3 * 4, 3 / 4 and 3 % 4.
    assert_eq!(r.strong_killed.len(), 4);
    assert!(r.strong_killed.is_subset(&r.weak_killed));
}

#[test]
fn weak_without_strong() {
    let unit = load_subject(CALC).unwrap();
    let ms = generate_mutants(&unit);
    // 2 < 5 and 2 <= 5 agree: infection needs a differing predicate value.
    let suite = calc_suite(&unit, "    Calc v0 = new Calc();\n    boolean v1 = v0.less(2, 5);\n");
    let r = score_suite(&suite, &unit, &ms, SandboxLimits::default());
    let le = ms.iter().find(|m| m.replacement == "<=").unwrap();
    assert!(!r.weak_killed.contains(&le.id));
    let neg = ms
        .iter()
        .find(|m| m.kind == MutantKind::NegateConditional)
        .unwrap();
    assert!(r.weak_killed.contains(&neg.id) && r.strong_killed.contains(&neg.id));
    assert!(r.strong_killed.is_subset(&r.weak_killed));
}
