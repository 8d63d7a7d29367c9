use std::sync::Arc;

use crate::lang::{CallableSig, Literal, TypeTag};

/// Reference target used for arguments whose definition was removed.
pub const DANGLING: usize = usize::MAX;

/// A call argument: an inline primitive literal or a reference to the value
/// defined by an earlier statement (by position).
#[derive(Clone, Debug, PartialEq)]
pub enum Arg {
    Literal(Literal),
    Ref(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    /// `T vN = literal;`
    Primitive { ty: TypeTag, value: Literal },
    /// `S vN = new S(args);`
    Construct {
        callee: Arc<CallableSig>,
        args: Vec<Arg>,
    },
    /// `[T vN =] vR.m(args);`
    Invoke {
        receiver: usize,
        callee: Arc<CallableSig>,
        args: Vec<Arg>,
    },
}

impl Statement {
    /// Type of the value this statement defines, if any.
    pub fn value_type(&self) -> Option<TypeTag> {
        match self {
            Statement::Primitive { ty, .. } => Some(ty.clone()),
            Statement::Construct { callee, .. } | Statement::Invoke { callee, .. } => {
                callee.ret.clone()
            }
        }
    }

    pub fn callee(&self) -> Option<&Arc<CallableSig>> {
        match self {
            Statement::Primitive { .. } => None,
            Statement::Construct { callee, .. } | Statement::Invoke { callee, .. } => Some(callee),
        }
    }

    pub fn args(&self) -> &[Arg] {
        match self {
            Statement::Primitive { .. } => &[],
            Statement::Construct { args, .. } | Statement::Invoke { args, .. } => args,
        }
    }

    pub fn args_mut(&mut self) -> &mut [Arg] {
        match self {
            Statement::Primitive { .. } => &mut [],
            Statement::Construct { args, .. } | Statement::Invoke { args, .. } => args,
        }
    }

    pub fn is_ctor(&self) -> bool {
        matches!(self, Statement::Construct { .. })
    }

    pub fn is_method(&self) -> bool {
        matches!(self, Statement::Invoke { .. })
    }

    /// Visits every referenced position: the receiver first, then arguments.
    pub fn for_each_ref_mut(&mut self, mut f: impl FnMut(&mut usize)) {
        match self {
            Statement::Primitive { .. } => {}
            Statement::Construct { args, .. } => {
                for a in args {
                    if let Arg::Ref(p) = a {
                        f(p);
                    }
                }
            }
            Statement::Invoke { receiver, args, .. } => {
                f(receiver);
                for a in args {
                    if let Arg::Ref(p) = a {
                        f(p);
                    }
                }
            }
        }
    }

    pub fn refs(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.clone().for_each_ref_mut(|p| out.push(*p));
        out
    }
}

/// A unit test: a sequence of statements executed in order.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TestCase {
    statements: Vec<Statement>,
}

impl TestCase {
    pub fn new(statements: Vec<Statement>) -> Self {
        TestCase { statements }
    }

    pub fn statements(&self) -> &[Statement] {
        &self.statements
    }

    pub fn statements_mut(&mut self) -> &mut [Statement] {
        &mut self.statements
    }

    pub fn into_statements(self) -> Vec<Statement> {
        self.statements
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn push(&mut self, stmt: Statement) -> usize {
        self.statements.push(stmt);
        self.statements.len() - 1
    }

    /// Inserts `stmt` at `pos`, shifting references to later positions.
    pub fn insert(&mut self, pos: usize, stmt: Statement) {
        for s in &mut self.statements[pos..] {
            s.for_each_ref_mut(|p| {
                if *p != DANGLING && *p >= pos {
                    *p += 1;
                }
            });
        }
        self.statements.insert(pos, stmt);
    }

    /// Removes the statement at `pos`; references to it become dangling.
    pub fn remove(&mut self, pos: usize) -> Statement {
        let removed = self.statements.remove(pos);
        for s in &mut self.statements[pos..] {
            s.for_each_ref_mut(|p| {
                if *p == pos {
                    *p = DANGLING;
                } else if *p != DANGLING && *p > pos {
                    *p -= 1;
                }
            });
        }
        removed
    }

    pub fn truncate(&mut self, len: usize) {
        self.statements.truncate(len);
    }

    /// Positions before `before` that define a value assignable to `ty`.
    pub fn vars_of_type(&self, before: usize, ty: &TypeTag) -> Vec<usize> {
        self.statements[..before.min(self.len())]
            .iter()
            .enumerate()
            .filter(|(_, s)| s.value_type().is_some_and(|t| t.widens_to(ty)))
            .map(|(i, _)| i)
            .collect()
    }

    /// Number of literal values: primitive definitions plus literal arguments.
    pub fn literal_count(&self) -> usize {
        self.statements
            .iter()
            .map(|s| match s {
                Statement::Primitive { .. } => 1,
                _ => s
                    .args()
                    .iter()
                    .filter(|a| matches!(a, Arg::Literal(_)))
                    .count(),
            })
            .sum()
    }
}

fn literal_fits(lit: &Literal, ty: &TypeTag) -> bool {
    lit.type_tag().as_ref() == Some(ty)
}

/// Whether the slot `ty` at statement `at` is satisfied by `arg`.
pub(crate) fn arg_ok(test: &TestCase, at: usize, arg: &Arg, ty: &TypeTag) -> bool {
    match arg {
        Arg::Literal(lit) => ty.is_primitive() && literal_fits(lit, ty),
        Arg::Ref(p) => ref_ok(test, at, *p, ty),
    }
}

pub(crate) fn ref_ok(test: &TestCase, at: usize, pos: usize, ty: &TypeTag) -> bool {
    pos < at
        && test.statements[pos]
            .value_type()
            .is_some_and(|t| t.widens_to(ty))
}

/// True iff the test is non-empty, every reference points backwards to a
/// value of a compatible type, and every call matches its signature.
pub fn is_valid(test: &TestCase) -> bool {
    if test.is_empty() {
        return false;
    }
    test.statements.iter().enumerate().all(|(i, s)| match s {
        Statement::Primitive { ty, value } => ty.is_primitive() && literal_fits(value, ty),
        Statement::Construct { callee, args } => {
            callee.is_ctor
                && args.len() == callee.params.len()
                && args
                    .iter()
                    .zip(&callee.params)
                    .all(|(a, t)| arg_ok(test, i, a, t))
        }
        Statement::Invoke {
            receiver,
            callee,
            args,
        } => {
            !callee.is_ctor
                && ref_ok(test, i, *receiver, &TypeTag::Subject(callee.owner.clone()))
                && args.len() == callee.params.len()
                && args
                    .iter()
                    .zip(&callee.params)
                    .all(|(a, t)| arg_ok(test, i, a, t))
        }
    })
}
