//! Tree-walking interpreter with coverage and branch-distance instrumentation.

use std::rc::Rc;

use super::distance::{compare, relational, sanitize, truth, K};
use super::trace::{AbortReason, ExecutionTrace, Observation};
use super::value::{render_value, Handle, Object, Value};
use crate::encoding::{Arg, Statement, TestCase};
use crate::lang::ast::{BinaryOp, Block, Builtin, Expr, ExprKind, Stmt, StmtKind, UnaryOp};
use crate::lang::typeck::Resolution;
use crate::lang::{CallableSig, ExprId, Literal, TypeTag, TypedUnit};

/// Maximum nesting of subject calls before `StackOverflow` is thrown.
pub const MAX_CALL_DEPTH: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SandboxLimits {
    pub max_interpreted_statements: u64,
    pub max_string_length: usize,
}

impl Default for SandboxLimits {
    fn default() -> Self {
        SandboxLimits {
            max_interpreted_statements: 100_000,
            max_string_length: 65_536,
        }
    }
}

/// What a mutated expression was before mutation.
#[derive(Clone, Debug, PartialEq)]
pub enum ProbeOrigin {
    Operator(BinaryOp),
    Literal(Literal),
    /// The site is a `!` wrapped around the original predicate.
    Negation,
}

/// Compares the value of the expression at `site` with what the original
/// program would have computed there, setting `ExecutionTrace::infected`.
#[derive(Clone, Debug, PartialEq)]
pub struct InfectionProbe {
    pub site: ExprId,
    pub origin: ProbeOrigin,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ExecOptions<'p> {
    /// Record per-statement observations (rendered values).
    pub observe: bool,
    pub probe: Option<&'p InfectionProbe>,
}

enum Fault {
    Throw(Rc<str>),
    Abort(AbortReason),
}

fn throw(tag: &str) -> Fault {
    Fault::Throw(Rc::from(tag))
}

enum Flow {
    Next,
    Return(Value),
}

struct Frame {
    slots: Vec<Value>,
    this: Option<Handle>,
}

struct Interp<'u> {
    unit: &'u TypedUnit,
    limits: SandboxLimits,
    probe: Option<&'u InfectionProbe>,
    heap: Vec<Object>,
    trace: ExecutionTrace,
    depth: u32,
    speculative: u32,
}

/// Runs `test` against `unit`, recording observations for every statement.
pub fn execute_test(test: &TestCase, unit: &TypedUnit, limits: SandboxLimits) -> ExecutionTrace {
    execute_with(
        test,
        unit,
        limits,
        ExecOptions {
            observe: true,
            probe: None,
        },
    )
}

pub fn execute_with(
    test: &TestCase,
    unit: &TypedUnit,
    limits: SandboxLimits,
    opts: ExecOptions<'_>,
) -> ExecutionTrace {
    let mut it = Interp {
        unit,
        limits,
        probe: opts.probe,
        heap: Vec::new(),
        trace: ExecutionTrace::new(
            unit.max_line(),
            unit.branch_count(),
            unit.callables().len(),
        ),
        depth: 0,
        speculative: 0,
    };
    let mut vars: Vec<Option<Value>> = Vec::with_capacity(test.len());
    for stmt in test.statements() {
        if it.trace.aborted.is_some() {
            vars.push(None);
            if opts.observe {
                it.trace.observations.push(Observation::NotRun);
            }
            continue;
        }
        let (value, obs) = it.run_statement(stmt, &vars, opts.observe);
        vars.push(value);
        if opts.observe {
            it.trace.observations.push(obs);
        }
    }
    it.trace
}

impl<'u> Interp<'u> {
    fn render(&self, v: &Value) -> String {
        render_value(v, &self.heap, self.unit.unit())
    }

    fn literal(&mut self, lit: &Literal, ty: &TypeTag) -> Result<Value, Fault> {
        if let Literal::Str(s) = lit {
            if s.chars().count() > self.limits.max_string_length {
                return Err(Fault::Abort(AbortReason::StringLength));
            }
        }
        Ok(Value::from_literal(lit).coerce(ty))
    }

    fn resolve_args(
        &mut self,
        vars: &[Option<Value>],
        callee: &CallableSig,
        args: &[Arg],
    ) -> Result<Option<Vec<Value>>, Fault> {
        let mut out = Vec::with_capacity(args.len());
        for (a, ty) in args.iter().zip(&callee.params) {
            match a {
                Arg::Literal(lit) => out.push(self.literal(lit, ty)?),
                Arg::Ref(p) => match vars.get(*p).cloned().flatten() {
                    Some(v) => out.push(v.coerce(ty)),
                    None => return Ok(None),
                },
            }
        }
        Ok(Some(out))
    }

    fn run_statement(
        &mut self,
        stmt: &Statement,
        vars: &[Option<Value>],
        observe: bool,
    ) -> (Option<Value>, Observation) {
        let result: Result<(Option<Value>, Observation), Fault> = (|| match stmt {
            Statement::Primitive { ty, value } => {
                let v = self.literal(value, ty)?;
                let obs = if observe {
                    Observation::Value(self.render(&v))
                } else {
                    Observation::Skipped
                };
                Ok((Some(v), obs))
            }
            Statement::Construct { callee, args } => {
                let Some(args) = self.resolve_args(vars, callee, args)? else {
                    return Ok((None, Observation::Skipped));
                };
                let v = self.invoke(callee.flat, None, args)?;
                let obs = if observe {
                    Observation::Value(self.render(&v))
                } else {
                    Observation::Skipped
                };
                Ok((Some(v), obs))
            }
            Statement::Invoke {
                receiver,
                callee,
                args,
            } => {
                let Some(recv) = vars.get(*receiver).cloned().flatten() else {
                    return Ok((None, Observation::Skipped));
                };
                let Some(args) = self.resolve_args(vars, callee, args)? else {
                    return Ok((None, Observation::Skipped));
                };
                let Value::Obj(h) = recv else {
                    return Err(throw("NullPointer"));
                };
                let v = self.invoke(callee.flat, Some(h), args)?;
                let obs = if observe {
                    Observation::Returned {
                        value: callee.ret.as_ref().map(|_| self.render(&v)),
                        receiver: self.render(&recv),
                    }
                } else {
                    Observation::Skipped
                };
                let value = callee.ret.as_ref().map(|_| v);
                Ok((value, obs))
            }
        })();
        match result {
            Ok(r) => r,
            Err(Fault::Throw(tag)) => (None, Observation::Exception(tag.to_string())),
            Err(Fault::Abort(reason)) => {
                self.trace.aborted = Some(reason);
                (None, Observation::Aborted)
            }
        }
    }

    fn tick(&mut self, line: u32) -> Result<(), Fault> {
        if self.trace.statements_executed >= self.limits.max_interpreted_statements {
            return Err(Fault::Abort(AbortReason::StatementBudget));
        }
        self.trace.statements_executed += 1;
        self.trace.lines[line as usize] = true;
        Ok(())
    }

    fn invoke(&mut self, flat: usize, this: Option<Handle>, args: Vec<Value>) -> Result<Value, Fault> {
        if self.depth >= MAX_CALL_DEPTH {
            return Err(throw("StackOverflow"));
        }
        let unit = self.unit;
        let info = unit.callable_info(flat);
        let callable = unit.callable(flat);
        self.trace.entered[flat] = true;
        self.trace.lines[info.line as usize] = true;
        let mut slots = vec![Value::Null; info.frame_size];
        for (i, (a, p)) in args.into_iter().zip(&callable.params).enumerate() {
            slots[i] = a.coerce(&p.ty);
        }
        let this = if callable.is_ctor() {
            let decl = &unit.unit().subjects[info.id.subject];
            let fields = decl.fields.iter().map(|f| Value::default_for(&f.ty)).collect();
            self.heap.push(Object {
                subject: info.id.subject as u32,
                fields,
            });
            Some((self.heap.len() - 1) as Handle)
        } else {
            this
        };
        let mut frame = Frame { slots, this };
        self.depth += 1;
        let flow = self.block(&mut frame, &callable.body);
        self.depth -= 1;
        let flow = flow?;
        if callable.is_ctor() {
            return Ok(Value::Obj(this.expect("constructor has a receiver")));
        }
        Ok(match (flow, &callable.ret) {
            (Flow::Return(v), Some(ty)) => v.coerce(ty),
            _ => Value::Null,
        })
    }

    fn block(&mut self, f: &mut Frame, block: &Block) -> Result<Flow, Fault> {
        for s in &block.stmts {
            if let Flow::Return(v) = self.stmt(f, s)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Next)
    }

    fn slot(&self, id: ExprId) -> usize {
        match self.unit.expr(id).res {
            Resolution::Local(s) | Resolution::Field(s) | Resolution::Callable(s) => s as usize,
            Resolution::None => unreachable!("unresolved expression {id:?}"),
        }
    }

    fn static_type(&self, id: ExprId) -> &'u TypeTag {
        self.unit
            .expr(id)
            .ty
            .as_ref()
            .expect("typed expression")
    }

    fn stmt(&mut self, f: &mut Frame, s: &Stmt) -> Result<Flow, Fault> {
        self.tick(s.span.line)?;
        match &s.kind {
            StmtKind::Let { id, init, .. } => {
                let v = self.eval(f, init)?;
                let ty = self.static_type(*id);
                let slot = self.slot(*id);
                f.slots[slot] = v.coerce(ty);
            }
            StmtKind::Assign { target, value } => match &target.kind {
                ExprKind::Field { object, .. } => {
                    let obj = self.eval(f, object)?;
                    let v = self.eval(f, value)?;
                    let Value::Obj(h) = obj else {
                        return Err(throw("NullPointer"));
                    };
                    let idx = self.slot(target.id);
                    let ty = self.static_type(target.id);
                    self.heap[h as usize].fields[idx] = v.coerce(ty);
                }
                _ => {
                    let v = self.eval(f, value)?;
                    let slot = self.slot(target.id);
                    let ty = self.static_type(target.id);
                    f.slots[slot] = v.coerce(ty);
                }
            },
            StmtKind::If {
                branch,
                cond,
                then_block,
                else_block,
            } => {
                let (v, dt, df) = self.cond(f, cond)?;
                self.trace.record_branch(*branch, dt, df);
                if v {
                    return self.block(f, then_block);
                } else if let Some(b) = else_block {
                    return self.block(f, b);
                }
            }
            StmtKind::While { branch, cond, body } => {
                let mut first = true;
                loop {
                    if !first {
                        self.tick(s.span.line)?;
                    }
                    first = false;
                    let (v, dt, df) = self.cond(f, cond)?;
                    self.trace.record_branch(*branch, dt, df);
                    if !v {
                        break;
                    }
                    if let Flow::Return(v) = self.block(f, body)? {
                        return Ok(Flow::Return(v));
                    }
                }
            }
            StmtKind::Return(e) => {
                let v = match e {
                    Some(e) => self.eval(f, e)?,
                    None => Value::Null,
                };
                return Ok(Flow::Return(v));
            }
            StmtKind::Throw(e) => {
                let v = self.eval(f, e)?;
                return Err(match v {
                    Value::Str(s) => Fault::Throw(s),
                    _ => throw("Throw"),
                });
            }
            StmtKind::Expr(e) => {
                self.eval(f, e)?;
            }
        }
        Ok(Flow::Next)
    }

    fn probing(&self, id: ExprId) -> Option<&'u ProbeOrigin> {
        match self.probe {
            Some(p) if p.site == id && self.speculative == 0 && !self.trace.infected => {
                Some(&p.origin)
            }
            _ => None,
        }
    }

    /// Evaluates a predicate returning its value and the distances to the
    /// true and false outcomes.
    fn cond(&mut self, f: &mut Frame, e: &Expr) -> Result<(bool, f64, f64), Fault> {
        match &e.kind {
            ExprKind::Binary {
                op: BinaryOp::And,
                lhs,
                rhs,
            } => {
                let (va, ta, fa) = self.cond(f, lhs)?;
                let (vb, tb, fb) = if va {
                    self.cond(f, rhs)?
                } else {
                    let (t, fl) = self.speculate(f, rhs);
                    (false, t, fl)
                };
                let v = va && vb;
                Ok((v, finite(ta + tb), fa.min(fb)))
            }
            ExprKind::Binary {
                op: BinaryOp::Or,
                lhs,
                rhs,
            } => {
                let (va, ta, fa) = self.cond(f, lhs)?;
                let (vb, tb, fb) = if va {
                    let (t, fl) = self.speculate(f, rhs);
                    (false, t, fl)
                } else {
                    self.cond(f, rhs)?
                };
                let v = va || vb;
                Ok((v, ta.min(tb), finite(fa + fb)))
            }
            ExprKind::Unary {
                op: UnaryOp::Not,
                operand,
            } => {
                let (v, t, fl) = self.cond(f, operand)?;
                if let Some(ProbeOrigin::Negation) = self.probing(e.id) {
                    self.trace.infected = true;
                }
                Ok((!v, fl, t))
            }
            ExprKind::Binary { op, lhs, rhs } if op.is_relational() => {
                let l = self.eval(f, lhs)?;
                let r = self.eval(f, rhs)?;
                let (v, dt, df) = relational(*op, &l, &r);
                if let Some(ProbeOrigin::Operator(orig)) = self.probing(e.id) {
                    if compare(*orig, &l, &r) != v {
                        self.trace.infected = true;
                    }
                }
                Ok((v, dt, df))
            }
            _ => {
                let v = self.eval(f, e)?.as_bool();
                let (t, fl) = truth(v);
                Ok((v, t, fl))
            }
        }
    }

    /// Distances of a short-circuited operand: evaluated for guidance only
    /// when it cannot have side effects.
    fn speculate(&mut self, f: &mut Frame, e: &Expr) -> (f64, f64) {
        if !self.unit.expr(e.id).pure {
            return (K, K);
        }
        self.speculative += 1;
        let r = self.cond(f, e);
        self.speculative -= 1;
        match r {
            Ok((_, t, fl)) => (t, fl),
            Err(_) => (K, K),
        }
    }

    fn eval(&mut self, f: &mut Frame, e: &Expr) -> Result<Value, Fault> {
        match &e.kind {
            ExprKind::Literal(lit) => {
                if let Some(ProbeOrigin::Literal(orig)) = self.probing(e.id) {
                    if orig != lit {
                        self.trace.infected = true;
                    }
                }
                Ok(Value::from_literal(lit))
            }
            ExprKind::Var(_) => Ok(f.slots[self.slot(e.id)].clone()),
            ExprKind::This => Ok(Value::Obj(f.this.expect("`this` inside a subject callable"))),
            ExprKind::Field { object, .. } => match self.eval(f, object)? {
                Value::Obj(h) => Ok(self.heap[h as usize].fields[self.slot(e.id)].clone()),
                _ => Err(throw("NullPointer")),
            },
            ExprKind::Unary { op, operand } => {
                let v = self.eval(f, operand)?;
                if let Some(ProbeOrigin::Negation) = self.probing(e.id) {
                    self.trace.infected = true;
                }
                Ok(match (op, v) {
                    (UnaryOp::Not, Value::Bool(b)) => Value::Bool(!b),
                    (UnaryOp::Neg, Value::Int(x)) => Value::Int(x.wrapping_neg()),
                    (UnaryOp::Neg, Value::Long(x)) => Value::Long(x.wrapping_neg()),
                    (UnaryOp::Neg, Value::Double(x)) => Value::Double(-x),
                    (_, v) => v,
                })
            }
            ExprKind::Binary {
                op: op @ (BinaryOp::And | BinaryOp::Or),
                lhs,
                rhs,
            } => {
                let a = self.eval(f, lhs)?.as_bool();
                let v = match op {
                    BinaryOp::And => a && self.eval(f, rhs)?.as_bool(),
                    _ => a || self.eval(f, rhs)?.as_bool(),
                };
                Ok(Value::Bool(v))
            }
            ExprKind::Binary { op, lhs, rhs } if op.is_relational() => {
                let l = self.eval(f, lhs)?;
                let r = self.eval(f, rhs)?;
                let v = compare(*op, &l, &r);
                if let Some(ProbeOrigin::Operator(orig)) = self.probing(e.id) {
                    if compare(*orig, &l, &r) != v {
                        self.trace.infected = true;
                    }
                }
                Ok(Value::Bool(v))
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let l = self.eval(f, lhs)?;
                let r = self.eval(f, rhs)?;
                let ty = self.static_type(e.id);
                let result = arithmetic(*op, ty, l.clone(), r.clone());
                if let Some(ProbeOrigin::Operator(orig)) = self.probing(e.id) {
                    let original = arithmetic(*orig, ty, l, r);
                    let differ = match (&result, &original) {
                        (Ok(a), Ok(b)) => !a.same(b),
                        (Err(_), Err(_)) => false,
                        _ => true,
                    };
                    if differ {
                        self.trace.infected = true;
                    }
                }
                result.map_err(throw)
            }
            ExprKind::Call { receiver, args, .. } => {
                let recv = self.eval(f, receiver)?;
                let args = self.eval_args(f, args)?;
                let Value::Obj(h) = recv else {
                    return Err(throw("NullPointer"));
                };
                self.invoke(self.slot(e.id), Some(h), args)
            }
            ExprKind::New { args, .. } => {
                let args = self.eval_args(f, args)?;
                self.invoke(self.slot(e.id), None, args)
            }
            ExprKind::Builtin { func, args } => {
                let args = self.eval_args(f, args)?;
                self.builtin(*func, &args)
            }
        }
    }

    fn eval_args(&mut self, f: &mut Frame, args: &[Expr]) -> Result<Vec<Value>, Fault> {
        args.iter().map(|a| self.eval(f, a)).collect()
    }

    fn builtin(&mut self, func: Builtin, args: &[Value]) -> Result<Value, Fault> {
        let s = |i: usize| match &args[i] {
            Value::Str(s) => s.clone(),
            _ => Rc::from(""),
        };
        match func {
            Builtin::Len => Ok(Value::Int(char_len(&s(0)) as i32)),
            Builtin::Concat => {
                let (a, b) = (s(0), s(1));
                if char_len(&a) + char_len(&b) > self.limits.max_string_length {
                    return Err(Fault::Abort(AbortReason::StringLength));
                }
                let mut out = String::with_capacity(a.len() + b.len());
                out.push_str(&a);
                out.push_str(&b);
                Ok(Value::Str(Rc::from(out)))
            }
            Builtin::Substring => {
                let text = s(0);
                let (start, end) = (args[1].as_int(), args[2].as_int());
                let len = char_len(&text) as i64;
                if start < 0 || (end as i64) > len || end < start {
                    return Err(throw("IndexOutOfBounds"));
                }
                let (start, end) = (start as usize, end as usize);
                let sub: Rc<str> = if text.is_ascii() {
                    Rc::from(&text[start..end])
                } else {
                    Rc::from(text.chars().skip(start).take(end - start).collect::<String>())
                };
                Ok(Value::Str(sub))
            }
            Builtin::CharAt => {
                let text = s(0);
                let i = args[1].as_int();
                if i < 0 {
                    return Err(throw("IndexOutOfBounds"));
                }
                let c = if text.is_ascii() {
                    text.as_bytes().get(i as usize).map(|b| *b as char)
                } else {
                    text.chars().nth(i as usize)
                };
                c.map(Value::Char).ok_or_else(|| throw("IndexOutOfBounds"))
            }
            Builtin::IndexOf => {
                let (text, needle) = (s(0), s(1));
                let idx = match text.find(&*needle) {
                    Some(b) => char_len(&text[..b]) as i32,
                    None => -1,
                };
                Ok(Value::Int(idx))
            }
        }
    }
}

fn finite(d: f64) -> f64 {
    if d.is_finite() {
        d
    } else {
        sanitize(d)
    }
}

fn char_len(s: &str) -> usize {
    if s.is_ascii() {
        s.len()
    } else {
        s.chars().count()
    }
}

/// Arithmetic at the static result type `ty`; errors carry the exception tag.
fn arithmetic(op: BinaryOp, ty: &TypeTag, l: Value, r: Value) -> Result<Value, &'static str> {
    const DIV0: &str = "DivideByZero";
    match (l.coerce(ty), r.coerce(ty)) {
        (Value::Int(a), Value::Int(b)) => Ok(Value::Int(match op {
            BinaryOp::Add => a.wrapping_add(b),
            BinaryOp::Sub => a.wrapping_sub(b),
            BinaryOp::Mul => a.wrapping_mul(b),
            BinaryOp::Div if b == 0 => return Err(DIV0),
            BinaryOp::Div => a.wrapping_div(b),
            BinaryOp::Rem if b == 0 => return Err(DIV0),
            BinaryOp::Rem => a.wrapping_rem(b),
            _ => unreachable!("non-arithmetic operator"),
        })),
        (Value::Long(a), Value::Long(b)) => Ok(Value::Long(match op {
            BinaryOp::Add => a.wrapping_add(b),
            BinaryOp::Sub => a.wrapping_sub(b),
            BinaryOp::Mul => a.wrapping_mul(b),
            BinaryOp::Div if b == 0 => return Err(DIV0),
            BinaryOp::Div => a.wrapping_div(b),
            BinaryOp::Rem if b == 0 => return Err(DIV0),
            BinaryOp::Rem => a.wrapping_rem(b),
            _ => unreachable!("non-arithmetic operator"),
        })),
        (Value::Double(a), Value::Double(b)) => Ok(Value::Double(match op {
            BinaryOp::Add => a + b,
            BinaryOp::Sub => a - b,
            BinaryOp::Mul => a * b,
            BinaryOp::Div | BinaryOp::Rem if b == 0.0 => return Err(DIV0),
            BinaryOp::Div => a / b,
            BinaryOp::Rem => a % b,
            _ => unreachable!("non-arithmetic operator"),
        })),
        _ => unreachable!("arithmetic on non-numeric operands"),
    }
}
