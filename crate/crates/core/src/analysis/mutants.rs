//! First-order mutants of the unit under test.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::lang::ast::{BinaryOp, Expr, ExprKind, Span, StmtKind, UnaryOp};
use crate::lang::{typecheck, ExprId, Literal, SubjectUnit, TypedUnit};
use crate::runtime::{InfectionProbe, ProbeOrigin};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MutantKind {
    #[serde(rename = "AOR")]
    Aor,
    #[serde(rename = "ROR")]
    Ror,
    #[serde(rename = "constant-replace")]
    ConstantReplace,
    #[serde(rename = "negate-conditional")]
    NegateConditional,
}

impl fmt::Display for MutantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MutantKind::Aor => "AOR",
            MutantKind::Ror => "ROR",
            MutantKind::ConstantReplace => "constant-replace",
            MutantKind::NegateConditional => "negate-conditional",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Mutant {
    pub id: usize,
    pub kind: MutantKind,
    /// `Owner.method` (or `Owner.<init>`) containing the mutated node.
    pub callable: String,
    pub span: Span,
    /// Original and replacement, e.g. `+` and `-`.
    pub original: String,
    pub replacement: String,
    pub unit: Arc<TypedUnit>,
    pub probe: InfectionProbe,
}

impl fmt::Display for Mutant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "#{} {} {}:{}:{} {} -> {}",
            self.id,
            self.kind,
            self.callable,
            self.span.line,
            self.span.col,
            self.original,
            self.replacement
        )
    }
}

const ARITHMETIC: [BinaryOp; 5] = [
    BinaryOp::Add,
    BinaryOp::Sub,
    BinaryOp::Mul,
    BinaryOp::Div,
    BinaryOp::Rem,
];

const RELATIONAL: [BinaryOp; 6] = [
    BinaryOp::Lt,
    BinaryOp::Le,
    BinaryOp::Gt,
    BinaryOp::Ge,
    BinaryOp::Eq,
    BinaryOp::Ne,
];

/// A single-node edit, before type checking.
enum Edit {
    Op(BinaryOp),
    Lit(Literal),
    Negate,
}

struct Candidate {
    kind: MutantKind,
    callable: String,
    span: Span,
    site: ExprId,
    origin: ProbeOrigin,
    original: String,
    replacement: String,
    edit: Edit,
}

/// `{0, 1, -1, c + 1, c - 1}` without `c`, in that order, deduplicated.
pub fn constant_replacements(lit: &Literal) -> Vec<Literal> {
    let mut out: Vec<Literal> = Vec::new();
    let mut push = |l: Literal| {
        if &l != lit && !out.contains(&l) {
            out.push(l);
        }
    };
    match lit {
        Literal::Int(c) => {
            for v in [Some(0), Some(1), Some(-1), c.checked_add(1), c.checked_sub(1)]
                .into_iter()
                .flatten()
            {
                push(Literal::Int(v));
            }
        }
        Literal::Long(c) => {
            for v in [Some(0), Some(1), Some(-1), c.checked_add(1), c.checked_sub(1)]
                .into_iter()
                .flatten()
            {
                push(Literal::Long(v));
            }
        }
        Literal::Double(c) => {
            for v in [0.0, 1.0, -1.0, c + 1.0, c - 1.0] {
                if v.to_bits() != c.to_bits() && !out.contains(&Literal::Double(v)) {
                    out.push(Literal::Double(v));
                }
            }
        }
        Literal::Str(s) if !s.is_empty() => push(Literal::Str(String::new())),
        _ => {}
    }
    out
}

fn expr_candidates(e: &Expr, callable: &str, out: &mut Vec<Candidate>) {
    e.walk(&mut |e| match &e.kind {
        ExprKind::Binary { op, .. } if op.is_arithmetic() || op.is_relational() => {
            let (kind, pool): (MutantKind, &[BinaryOp]) = if op.is_arithmetic() {
                (MutantKind::Aor, &ARITHMETIC)
            } else {
                (MutantKind::Ror, &RELATIONAL)
            };
            for &r in pool.iter().filter(|r| *r != op) {
                out.push(Candidate {
                    kind,
                    callable: callable.to_string(),
                    span: e.span,
                    site: e.id,
                    origin: ProbeOrigin::Operator(*op),
                    original: op.symbol().to_string(),
                    replacement: r.symbol().to_string(),
                    edit: Edit::Op(r),
                });
            }
        }
        ExprKind::Literal(lit) => {
            for r in constant_replacements(lit) {
                out.push(Candidate {
                    kind: MutantKind::ConstantReplace,
                    callable: callable.to_string(),
                    span: e.span,
                    site: e.id,
                    origin: ProbeOrigin::Literal(lit.clone()),
                    original: lit.to_string(),
                    replacement: r.to_string(),
                    edit: Edit::Lit(r),
                });
            }
        }
        _ => {}
    });
}

fn apply(base: &SubjectUnit, c: &Candidate) -> (SubjectUnit, ExprId) {
    let mut unit = base.clone();
    let fresh = unit.fresh_expr_id();
    let mut site = c.site;
    let cut = &mut unit.subjects[0];
    for callable in cut.ctors.iter_mut().chain(cut.methods.iter_mut()) {
        callable.body.walk_mut(&mut |stmt| {
            if let (Edit::Negate, StmtKind::If { cond, .. } | StmtKind::While { cond, .. }) =
                (&c.edit, &mut stmt.kind)
            {
                if cond.id == c.site {
                    let inner = std::mem::replace(
                        cond,
                        Expr {
                            id: fresh,
                            span: cond.span,
                            kind: ExprKind::Literal(Literal::Null),
                        },
                    );
                    cond.kind = ExprKind::Unary {
                        op: UnaryOp::Not,
                        operand: Box::new(inner),
                    };
                    site = fresh;
                }
                return;
            }
            for e in stmt.exprs_mut() {
                e.walk_mut(&mut |e| {
                    if e.id != c.site {
                        return;
                    }
                    match (&c.edit, &mut e.kind) {
                        (Edit::Op(r), ExprKind::Binary { op, .. }) => *op = *r,
                        (Edit::Lit(r), ExprKind::Literal(l)) => *l = r.clone(),
                        _ => {}
                    }
                });
            }
        });
    }
    (unit, site)
}

/// AOR, ROR, constant replacement and predicate negation over every callable
/// of the unit under test, in source order. Mutants that fail to type check
/// are dropped; ids are consecutive.
pub fn generate_mutants(unit: &TypedUnit) -> Vec<Mutant> {
    let base = unit.unit();
    let cut = base.cut();
    let mut candidates = Vec::new();
    for callable in cut.ctors.iter().chain(&cut.methods) {
        let name = format!("{}.{}", cut.name, callable.name);
        callable.body.walk(&mut |stmt| {
            if let StmtKind::If { cond, .. } | StmtKind::While { cond, .. } = &stmt.kind {
                candidates.push(Candidate {
                    kind: MutantKind::NegateConditional,
                    callable: name.clone(),
                    span: cond.span,
                    site: cond.id,
                    origin: ProbeOrigin::Negation,
                    original: "cond".to_string(),
                    replacement: "!(cond)".to_string(),
                    edit: Edit::Negate,
                });
            }
            for e in stmt.exprs() {
                expr_candidates(e, &name, &mut candidates);
            }
        });
    }
    // Source order, negation after the operator mutants of the same predicate.
    candidates.sort_by_key(|c| (c.span.start, c.kind == MutantKind::NegateConditional));
    let mut out = Vec::new();
    for c in candidates {
        let (mutated, site) = apply(base, &c);
        let Ok(typed) = typecheck(mutated) else {
            continue;
        };
        out.push(Mutant {
            id: out.len(),
            kind: c.kind,
            callable: c.callable,
            span: c.span,
            original: c.original,
            replacement: c.replacement,
            unit: Arc::new(typed),
            probe: InfectionProbe {
                site,
                origin: c.origin,
            },
        });
    }
    out
}
