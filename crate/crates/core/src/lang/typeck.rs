//! Static typing and name resolution.
//!
//! The checker annotates every expression id with its type and resolves
//! variables to frame slots, fields to field indices and calls to a flat
//! callable index. The interpreter relies on these tables exclusively.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::ast::*;
use super::cdg::{build_cdg, ControlDependencyGraph};
use super::signature::{signature_key, CallableSig};
use super::targets::{enumerate_targets, CoverageTarget};
use super::LangError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CallableKind {
    Ctor,
    Method,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CallableId {
    pub subject: usize,
    pub kind: CallableKind,
    pub index: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Resolution {
    #[default]
    None,
    Local(u32),
    Field(u32),
    Callable(u32),
}

#[derive(Clone, Debug, Default)]
pub struct ExprInfo {
    /// `None` for `null` and for calls to void methods.
    pub ty: Option<TypeTag>,
    pub res: Resolution,
    /// No calls or object creation anywhere below this expression.
    pub pure: bool,
}

#[derive(Clone, Debug)]
pub struct CallableInfo {
    pub id: CallableId,
    pub frame_size: usize,
    /// Line of the `ctor`/`method` keyword.
    pub line: u32,
}

/// A subject unit that passed type checking, with resolution tables,
/// control-dependency graphs and coverage targets for the unit under test.
#[derive(Clone, Debug)]
pub struct TypedUnit {
    unit: SubjectUnit,
    exprs: Vec<ExprInfo>,
    callables: Vec<CallableInfo>,
    signatures: Vec<Arc<CallableSig>>,
    cdgs: Vec<ControlDependencyGraph>,
    targets: Vec<CoverageTarget>,
    max_line: u32,
}

impl TypedUnit {
    pub fn unit(&self) -> &SubjectUnit {
        &self.unit
    }

    pub fn name(&self) -> &str {
        self.unit.name()
    }

    pub fn expr(&self, id: ExprId) -> &ExprInfo {
        &self.exprs[id.0 as usize]
    }

    pub fn callables(&self) -> &[CallableInfo] {
        &self.callables
    }

    pub fn callable_info(&self, flat: usize) -> &CallableInfo {
        &self.callables[flat]
    }

    pub fn callable(&self, flat: usize) -> &Callable {
        let id = self.callables[flat].id;
        let subject = &self.unit.subjects[id.subject];
        match id.kind {
            CallableKind::Ctor => &subject.ctors[id.index],
            CallableKind::Method => &subject.methods[id.index],
        }
    }

    pub fn flat_index(&self, id: CallableId) -> usize {
        self.callables
            .iter()
            .position(|c| c.id == id)
            .expect("callable id belongs to this unit")
    }

    pub fn signature(&self, flat: usize) -> &Arc<CallableSig> {
        &self.signatures[flat]
    }

    pub fn signatures(&self) -> &[Arc<CallableSig>] {
        &self.signatures
    }

    pub fn signature_by_key(&self, key: &str) -> Option<&Arc<CallableSig>> {
        self.signatures.iter().find(|s| s.key == key)
    }

    /// Flat indices of the constructors of subject `subject`.
    pub fn ctors_of(&self, subject: usize) -> impl Iterator<Item = usize> + '_ {
        self.callables.iter().enumerate().filter_map(move |(i, c)| {
            (c.id.subject == subject && c.id.kind == CallableKind::Ctor).then_some(i)
        })
    }

    pub fn methods_of(&self, subject: usize) -> impl Iterator<Item = usize> + '_ {
        self.callables.iter().enumerate().filter_map(move |(i, c)| {
            (c.id.subject == subject && c.id.kind == CallableKind::Method).then_some(i)
        })
    }

    /// Control-dependency graph of a callable (flat index).
    pub fn cdg(&self, flat: usize) -> &ControlDependencyGraph {
        &self.cdgs[flat]
    }

    /// Coverage targets of the unit under test, in stable order.
    pub fn targets(&self) -> &[CoverageTarget] {
        &self.targets
    }

    pub fn max_line(&self) -> u32 {
        self.max_line
    }

    pub fn branch_count(&self) -> usize {
        self.unit.branch_count as usize
    }

    /// Flat index of the callable that owns branch `b`.
    pub fn branch_owner(&self, b: BranchId) -> Option<usize> {
        self.cdgs.iter().position(|g| g.parent_of(b).is_some())
    }
}

struct Scope {
    frames: Vec<Vec<(String, u32, TypeTag)>>,
    next_slot: u32,
}

impl Scope {
    fn lookup(&self, name: &str) -> Option<(u32, &TypeTag)> {
        self.frames
            .iter()
            .rev()
            .flat_map(|f| f.iter().rev())
            .find(|(n, _, _)| n == name)
            .map(|(_, slot, ty)| (*slot, ty))
    }

    fn declare(&mut self, name: &str, ty: TypeTag, span: Span) -> Result<u32, LangError> {
        if self.lookup(name).is_some() {
            return Err(LangError::DuplicateName {
                name: name.to_string(),
                line: span.line,
                col: span.col,
            });
        }
        let slot = self.next_slot;
        self.next_slot += 1;
        self.frames
            .last_mut()
            .expect("scope has a frame")
            .push((name.to_string(), slot, ty));
        Ok(slot)
    }
}

struct Checker<'a> {
    unit: &'a SubjectUnit,
    subject_idx: BTreeMap<&'a str, usize>,
    /// (subject, kind, index) -> flat
    flat: BTreeMap<CallableId, u32>,
    exprs: Vec<ExprInfo>,
}

fn mismatch(span: Span, expected: impl ToString, found: impl ToString) -> LangError {
    LangError::TypeMismatch {
        line: span.line,
        col: span.col,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

fn show(ty: &Option<TypeTag>) -> String {
    ty.as_ref()
        .map(|t| t.to_string())
        .unwrap_or_else(|| "null".to_string())
}

impl<'a> Checker<'a> {
    fn record(&mut self, id: ExprId, ty: Option<TypeTag>, res: Resolution) -> Option<TypeTag> {
        self.exprs[id.0 as usize] = ExprInfo {
            ty: ty.clone(),
            res,
            pure: false,
        };
        ty
    }

    fn assignable(&self, found: &Option<TypeTag>, expected: &TypeTag) -> bool {
        match found {
            Some(t) => t.widens_to(expected),
            None => !expected.is_primitive(),
        }
    }

    fn check_assignable(
        &self,
        span: Span,
        found: &Option<TypeTag>,
        expected: &TypeTag,
    ) -> Result<(), LangError> {
        if self.assignable(found, expected) {
            Ok(())
        } else {
            Err(mismatch(span, expected, show(found)))
        }
    }

    fn subject(&self, name: &str, span: Span) -> Result<(usize, &'a SubjectDecl), LangError> {
        self.subject_idx
            .get(name)
            .map(|&i| (i, &self.unit.subjects[i]))
            .ok_or_else(|| LangError::UnresolvedType {
                name: name.to_string(),
                line: span.line,
                col: span.col,
            })
    }

    fn check_args(
        &mut self,
        scope: &Scope,
        this: usize,
        span: Span,
        args: &[Expr],
        params: &[Param],
    ) -> Result<(), LangError> {
        if args.len() != params.len() {
            return Err(mismatch(
                span,
                format!("{} argument(s)", params.len()),
                format!("{} argument(s)", args.len()),
            ));
        }
        for (arg, param) in args.iter().zip(params) {
            let ty = self.expr(scope, this, arg)?;
            self.check_assignable(arg.span, &ty, &param.ty)?;
        }
        Ok(())
    }

    /// Returns the static type of `e`; `None` means `null` (or void for calls).
    fn expr(&mut self, scope: &Scope, this: usize, e: &Expr) -> Result<Option<TypeTag>, LangError> {
        let span = e.span;
        match &e.kind {
            ExprKind::Literal(lit) => Ok(self.record(e.id, lit.type_tag(), Resolution::None)),
            ExprKind::Var(name) => {
                let (slot, ty) = scope.lookup(name).ok_or_else(|| LangError::UnknownName {
                    name: name.clone(),
                    line: span.line,
                    col: span.col,
                })?;
                let ty = ty.clone();
                Ok(self.record(e.id, Some(ty), Resolution::Local(slot)))
            }
            ExprKind::This => {
                let name = self.unit.subjects[this].name.clone();
                Ok(self.record(e.id, Some(TypeTag::Subject(name)), Resolution::None))
            }
            ExprKind::Field { object, field } => {
                let oty = self.expr(scope, this, object)?;
                let Some(TypeTag::Subject(sname)) = &oty else {
                    return Err(mismatch(object.span, "subject type", show(&oty)));
                };
                let (_, decl) = self.subject(sname, object.span)?;
                let idx = decl.field_index(field).ok_or_else(|| LangError::UnknownName {
                    name: format!("{sname}.{field}"),
                    line: span.line,
                    col: span.col,
                })?;
                let ty = decl.fields[idx].ty.clone();
                Ok(self.record(e.id, Some(ty), Resolution::Field(idx as u32)))
            }
            ExprKind::Unary { op, operand } => {
                let ty = self.expr(scope, this, operand)?;
                let ok = match op {
                    UnaryOp::Neg => ty.as_ref().is_some_and(|t| t.is_numeric()),
                    UnaryOp::Not => ty == Some(TypeTag::Boolean),
                };
                if !ok {
                    let want = if *op == UnaryOp::Neg {
                        "numeric"
                    } else {
                        "boolean"
                    };
                    return Err(mismatch(operand.span, want, show(&ty)));
                }
                Ok(self.record(e.id, ty, Resolution::None))
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let lt = self.expr(scope, this, lhs)?;
                let rt = self.expr(scope, this, rhs)?;
                let ty = self.binary(*op, span, &lt, &rt)?;
                Ok(self.record(e.id, Some(ty), Resolution::None))
            }
            ExprKind::Call {
                receiver,
                method,
                args,
            } => {
                let rty = self.expr(scope, this, receiver)?;
                let Some(TypeTag::Subject(sname)) = &rty else {
                    return Err(mismatch(receiver.span, "subject type", show(&rty)));
                };
                let (sidx, decl) = self.subject(sname, receiver.span)?;
                let (midx, callee) = decl.method(method).ok_or_else(|| LangError::UnknownName {
                    name: format!("{sname}.{method}"),
                    line: span.line,
                    col: span.col,
                })?;
                self.check_args(scope, this, span, args, &callee.params)?;
                let flat = self.flat[&CallableId {
                    subject: sidx,
                    kind: CallableKind::Method,
                    index: midx,
                }];
                Ok(self.record(e.id, callee.ret.clone(), Resolution::Callable(flat)))
            }
            ExprKind::New { subject, args } => {
                let (sidx, decl) = self.subject(subject, span)?;
                let Some(cidx) = decl.ctors.iter().position(|c| c.params.len() == args.len())
                else {
                    return Err(mismatch(
                        span,
                        format!("constructor of {subject} taking {} argument(s)", args.len()),
                        "none",
                    ));
                };
                let params = decl.ctors[cidx].params.clone();
                self.check_args(scope, this, span, args, &params)?;
                let flat = self.flat[&CallableId {
                    subject: sidx,
                    kind: CallableKind::Ctor,
                    index: cidx,
                }];
                let ty = TypeTag::Subject(subject.clone());
                Ok(self.record(e.id, Some(ty), Resolution::Callable(flat)))
            }
            ExprKind::Builtin { func, args } => {
                let (params, ret) = func.signature();
                if args.len() != params.len() {
                    return Err(mismatch(
                        span,
                        format!("{} argument(s) to {}", params.len(), func.name()),
                        args.len(),
                    ));
                }
                for (arg, p) in args.iter().zip(params) {
                    let ty = self.expr(scope, this, arg)?;
                    if ty.as_ref() != Some(p) {
                        return Err(mismatch(arg.span, p, show(&ty)));
                    }
                }
                Ok(self.record(e.id, Some(ret), Resolution::None))
            }
        }
    }

    fn binary(
        &self,
        op: BinaryOp,
        span: Span,
        lt: &Option<TypeTag>,
        rt: &Option<TypeTag>,
    ) -> Result<TypeTag, LangError> {
        let both = |t: TypeTag| lt.as_ref() == Some(&t) && rt.as_ref() == Some(&t);
        let join = match (lt, rt) {
            (Some(a), Some(b)) => a.numeric_join(b),
            _ => None,
        };
        let found = || format!("{} {} {}", show(lt), op.symbol(), show(rt));
        match op {
            BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => {
                join.ok_or_else(|| mismatch(span, "numeric operands", found()))
            }
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => {
                if join.is_some() || both(TypeTag::Char) {
                    Ok(TypeTag::Boolean)
                } else {
                    Err(mismatch(span, "numeric or char operands", found()))
                }
            }
            BinaryOp::Eq | BinaryOp::Ne => {
                let ok = join.is_some()
                    || (lt.is_some() && lt == rt)
                    || (lt.is_none() && rt.as_ref().is_none_or(|t| !t.is_primitive()))
                    || (rt.is_none() && lt.as_ref().is_some_and(|t| !t.is_primitive()));
                if ok {
                    Ok(TypeTag::Boolean)
                } else {
                    Err(mismatch(span, "comparable operands", found()))
                }
            }
            BinaryOp::And | BinaryOp::Or => {
                if both(TypeTag::Boolean) {
                    Ok(TypeTag::Boolean)
                } else {
                    Err(mismatch(span, "boolean operands", found()))
                }
            }
        }
    }

    fn block(
        &mut self,
        scope: &mut Scope,
        this: usize,
        ret: &Option<TypeTag>,
        block: &Block,
    ) -> Result<(), LangError> {
        scope.frames.push(Vec::new());
        for stmt in &block.stmts {
            self.stmt(scope, this, ret, stmt)?;
        }
        scope.frames.pop();
        Ok(())
    }

    fn stmt(
        &mut self,
        scope: &mut Scope,
        this: usize,
        ret: &Option<TypeTag>,
        stmt: &Stmt,
    ) -> Result<(), LangError> {
        match &stmt.kind {
            StmtKind::Let { id, name, ty, init } => {
                let found = self.expr(scope, this, init)?;
                let declared = match ty {
                    Some(t) => {
                        self.check_assignable(init.span, &found, t)?;
                        t.clone()
                    }
                    None => found.ok_or_else(|| {
                        mismatch(init.span, "expression with a type", "null or void")
                    })?,
                };
                let slot = scope.declare(name, declared.clone(), stmt.span)?;
                self.record(*id, Some(declared), Resolution::Local(slot));
            }
            StmtKind::Assign { target, value } => {
                let tt = self.expr(scope, this, target)?;
                let vt = self.expr(scope, this, value)?;
                let tt = tt.expect("assignment targets are typed");
                self.check_assignable(value.span, &vt, &tt)?;
            }
            StmtKind::If {
                cond,
                then_block,
                else_block,
                ..
            } => {
                let ct = self.expr(scope, this, cond)?;
                self.check_assignable(cond.span, &ct, &TypeTag::Boolean)?;
                self.block(scope, this, ret, then_block)?;
                if let Some(b) = else_block {
                    self.block(scope, this, ret, b)?;
                }
            }
            StmtKind::While { cond, body, .. } => {
                let ct = self.expr(scope, this, cond)?;
                self.check_assignable(cond.span, &ct, &TypeTag::Boolean)?;
                self.block(scope, this, ret, body)?;
            }
            StmtKind::Return(value) => match (value, ret) {
                (None, None) => {}
                (Some(v), Some(r)) => {
                    let vt = self.expr(scope, this, v)?;
                    self.check_assignable(v.span, &vt, r)?;
                }
                (None, Some(r)) => return Err(mismatch(stmt.span, r, "void")),
                (Some(v), None) => {
                    let vt = self.expr(scope, this, v)?;
                    return Err(mismatch(v.span, "void", show(&vt)));
                }
            },
            StmtKind::Throw(value) => {
                let vt = self.expr(scope, this, value)?;
                if vt != Some(TypeTag::Str) {
                    return Err(mismatch(value.span, "string", show(&vt)));
                }
            }
            StmtKind::Expr(e) => {
                self.expr(scope, this, e)?;
            }
        }
        Ok(())
    }
}

/// Whether every path through `block` ends in `return` or `throw`.
pub(crate) fn always_exits(block: &Block) -> bool {
    block.stmts.iter().any(|s| match &s.kind {
        StmtKind::Return(_) | StmtKind::Throw(_) => true,
        StmtKind::If {
            then_block,
            else_block: Some(else_block),
            ..
        } => always_exits(then_block) && always_exits(else_block),
        _ => false,
    })
}

pub fn typecheck(unit: SubjectUnit) -> Result<TypedUnit, LangError> {
    let mut callables = Vec::new();
    let mut flat = BTreeMap::new();
    for (s, decl) in unit.subjects.iter().enumerate() {
        let kinds = [
            (CallableKind::Ctor, &decl.ctors),
            (CallableKind::Method, &decl.methods),
        ];
        for (kind, list) in kinds {
            for (index, c) in list.iter().enumerate() {
                let id = CallableId {
                    subject: s,
                    kind,
                    index,
                };
                flat.insert(id, callables.len() as u32);
                callables.push(CallableInfo {
                    id,
                    frame_size: 0,
                    line: c.span.line,
                });
            }
        }
    }
    let subject_idx = unit
        .subjects
        .iter()
        .enumerate()
        .map(|(i, s)| (s.name.as_str(), i))
        .collect();
    let mut checker = Checker {
        unit: &unit,
        subject_idx,
        flat,
        exprs: vec![ExprInfo::default(); unit.next_expr_id as usize],
    };
    for info in callables.iter_mut() {
        let subject = &unit.subjects[info.id.subject];
        let c = match info.id.kind {
            CallableKind::Ctor => &subject.ctors[info.id.index],
            CallableKind::Method => &subject.methods[info.id.index],
        };
        let mut scope = Scope {
            frames: vec![Vec::new()],
            next_slot: 0,
        };
        for p in &c.params {
            scope.declare(&p.name, p.ty.clone(), c.span)?;
        }
        checker.block(&mut scope, info.id.subject, &c.ret, &c.body)?;
        if c.ret.is_some() && !always_exits(&c.body) {
            return Err(LangError::MissingReturn {
                callable: format!("{}.{}", subject.name, c.name),
                line: c.span.line,
            });
        }
        info.frame_size = scope.next_slot as usize;
    }
    let mut exprs = checker.exprs;
    for s in &unit.subjects {
        for c in s.ctors.iter().chain(&s.methods) {
            c.body.walk(&mut |stmt: &Stmt| {
                for e in stmt.exprs() {
                    e.walk(&mut |sub: &Expr| exprs[sub.id.0 as usize].pure = sub.is_pure());
                }
            });
        }
    }

    let signatures = callables
        .iter()
        .enumerate()
        .map(|(i, info)| {
            let owner = &unit.subjects[info.id.subject];
            let c = match info.id.kind {
                CallableKind::Ctor => &owner.ctors[info.id.index],
                CallableKind::Method => &owner.methods[info.id.index],
            };
            Arc::new(CallableSig {
                key: signature_key(c, owner),
                owner: owner.name.clone(),
                name: c.name.clone(),
                params: c.params.iter().map(|p| p.ty.clone()).collect(),
                ret: if c.is_ctor() {
                    Some(TypeTag::Subject(owner.name.clone()))
                } else {
                    c.ret.clone()
                },
                flat: i,
                is_ctor: c.is_ctor(),
            })
        })
        .collect();

    let mut max_line = 0;
    let cdgs = callables
        .iter()
        .enumerate()
        .map(|(i, info)| {
            let subject = &unit.subjects[info.id.subject];
            let c = match info.id.kind {
                CallableKind::Ctor => &subject.ctors[info.id.index],
                CallableKind::Method => &subject.methods[info.id.index],
            };
            max_line = max_line.max(c.span.line);
            c.body
                .walk(&mut |s: &Stmt| max_line = max_line.max(s.span.line));
            build_cdg(c, i)
        })
        .collect::<Vec<_>>();

    let mut typed = TypedUnit {
        unit,
        exprs,
        callables,
        signatures,
        cdgs,
        targets: Vec::new(),
        max_line,
    };
    typed.targets = enumerate_targets(&typed);
    Ok(typed)
}
