use super::*;
use crate::corpus;

fn unit(src: &str) -> TypedUnit {
    load_subject(src).unwrap()
}

fn type_error(body: &str, ret: &str) -> LangError {
    let src = format!("subject A {{ field x: int; ctor() {{}} method m() -> {ret} {{ {body} }} }}");
    load_subject(&src).unwrap_err()
}

#[test]
fn minimal_subject() {
    let u = parse_subject("subject A { ctor() {} }").unwrap();
    assert_eq!(u.name(), "A");
    assert_eq!(u.cut().ctors.len(), 1);
    assert!(u.cut().methods.is_empty());
}

#[test]
fn unclosed_params_is_a_syntax_error_at_the_brace() {
    match parse_subject("subject A { ctor( }") {
        Err(LangError::Syntax { line, col, found, .. }) => {
            assert_eq!((line, col), (1, 19));
            assert!(found.contains('}'), "{found}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn fraction_shape() {
    let u = corpus::load("fraction").unwrap().unwrap();
    let cut = u.unit().cut();
    assert_eq!(cut.ctors.len(), 1);
    let ps: Vec<&TypeTag> = cut.ctors[0].params.iter().map(|p| &p.ty).collect();
    assert_eq!(ps, [&TypeTag::Int, &TypeTag::Int]);
    for m in ["add", "divideBy", "pow"] {
        assert!(cut.method(m).is_some(), "{m}");
    }
}

#[test]
fn typing_rules() {
    load_subject("subject A { ctor() {} method m() -> int { return 1 + 2; } }").unwrap();
    assert!(matches!(type_error("return \"a\" + 1;", "string"), LangError::TypeMismatch { .. }));
    let narrowing = load_subject("subject A { field x: int; ctor() { this.x = 1.5; } }");
    assert!(matches!(narrowing, Err(LangError::TypeMismatch { .. })));
    assert!(matches!(
        load_subject("subject A { method m() {} }"),
        Err(LangError::NoConstructor { .. })
    ));
    assert!(matches!(
        load_subject("subject A { ctor() {} method m() -> int { let y = 1; } }"),
        Err(LangError::MissingReturn { .. })
    ));
}

#[test]
fn straight_line_cdg_is_entry_only() {
    let u = unit("subject A { field x: int; ctor() { this.x = 1; this.x = 2; } }");
    let g = u.cdg(0);
    assert!(g.branches().is_empty());
    assert!(g.lines().values().all(|n| *n == ControlNode::Entry));
}

#[test]
fn nested_if_depends_on_outer_true() {
    let u = unit(
        "subject A { ctor() {}
         method m(a: int, b: int) -> int {
             if (a > 0) {
                 if (b > 0) {
                     return 1;
                 }
             }
             return 0;
         } }",
    );
    let flat = u.methods_of(0).next().unwrap();
    let g = u.cdg(flat);
    let (outer, inner) = (g.branches()[0], g.branches()[1]);
    assert_eq!(g.parent_of(outer), Some(ControlNode::Entry));
    assert_eq!(
        g.parent_of(inner),
        Some(ControlNode::Outcome {
            branch: outer,
            outcome: true
        })
    );
    assert_eq!(g.depth(inner), g.depth(outer) + 1);
}

#[test]
fn sequential_if_and_while_both_hang_off_entry() {
    let u = unit(
        "subject A { field x: int; ctor() {}
         method m(a: int) {
             if (a > 0) {
                 this.x = 1;
             }
             while (a > 0) {
                 a = a - 1;
             }
         } }",
    );
    let flat = u.methods_of(0).next().unwrap();
    let g = u.cdg(flat);
    assert_eq!(g.branches().len(), 2);
    for b in g.branches() {
        assert_eq!(g.parent_of(*b), Some(ControlNode::Entry));
    }
    // Loop body lines depend on the loop predicate being true.
    let body_line = 7;
    assert_eq!(
        g.line_controller(body_line),
        Some(ControlNode::Outcome {
            branch: g.branches()[1],
            outcome: true
        })
    );
}

#[test]
fn one_if_three_lines() {
    let u = unit(
        "subject A { field x: int;
ctor() {}
method m(a: int) {
if (a > 0) {
this.x = 1;
}
this.x = 2;
} }",
    );
    let flat = u.methods_of(0).next().unwrap();
    let ts: Vec<_> = u.targets().iter().filter(|t| t.callable == flat).collect();
    assert_eq!(ts.iter().filter(|t| t.is_branch()).count(), 2);
    assert_eq!(ts.iter().filter(|t| !t.is_branch()).count(), 3);
}

#[test]
fn branch_free_method_has_line_targets_only() {
    let u = unit("subject A { field x: int; ctor() {}\nmethod m() { this.x = 3; } }");
    let flat = u.methods_of(0).next().unwrap();
    let ts: Vec<_> = u.targets().iter().filter(|t| t.callable == flat).collect();
    assert_eq!(ts.len(), 1);
    assert!(!ts[0].is_branch());
}

#[test]
fn fraction_target_count_matches_hand_count() {
    // Predicates: ctor 2, add 3, divideBy 1, pow 2, compareTo 2, isProper 1.
    // Statement lines: ctor 7, add 16, divideBy 5, pow 9, compareTo 7, isProper 4.
    let u = corpus::load("fraction").unwrap().unwrap();
    let branches = u.targets().iter().filter(|t| t.is_branch()).count();
    let lines = u.targets().len() - branches;
    assert_eq!(branches, 22);
    assert_eq!(lines, 48);
    assert_eq!(enumerate_targets(&u), u.targets());
}

#[test]
fn signature_keys() {
    let u = corpus::load("fraction").unwrap().unwrap();
    let keys: Vec<&str> = u.signatures().iter().map(|s| s.key.as_str()).collect();
    assert!(keys.contains(&"Fraction|<init>(int, int)Fraction"));
    assert!(keys.contains(&"Fraction|add(Fraction)V"));
    assert!(keys.contains(&"Fraction|pow(double)double"));
    let c = unit("subject C { ctor() {} method m() -> int { return 1; } }");
    let m = c.methods_of(0).next().unwrap();
    assert_eq!(c.signature(m).key, "C|m()int");
}

#[test]
fn pretty_print_round_trips_corpus() {
    for name in corpus::names(None) {
        let parsed = parse_subject(corpus::entry(name).unwrap().source).unwrap();
        let printed = print_unit(&parsed);
        let again = parse_subject(&printed).unwrap_or_else(|e| panic!("{name}: {e}\n{printed}"));
        assert_eq!(parsed, again, "{name}");
    }
}

#[test]
fn corpus_typechecks() {
    for name in corpus::names(None) {
        corpus::load(name).unwrap().unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}
