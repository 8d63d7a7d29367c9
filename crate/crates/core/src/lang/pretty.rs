//! Canonical source rendering. `parse(print(ast))` is structurally equal to `ast`.

use std::fmt::Write;

use super::ast::*;

pub fn print_unit(unit: &SubjectUnit) -> String {
    let mut out = String::new();
    for (i, s) in unit.subjects.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        print_subject(&mut out, s);
    }
    out
}

fn print_subject(out: &mut String, s: &SubjectDecl) {
    let _ = writeln!(out, "subject {} {{", s.name);
    for f in &s.fields {
        let _ = writeln!(out, "    field {}: {};", f.name, f.ty);
    }
    for c in s.ctors.iter().chain(&s.methods) {
        out.push('\n');
        print_callable(out, c);
    }
    out.push_str("}\n");
}

fn print_callable(out: &mut String, c: &Callable) {
    let params = c
        .params
        .iter()
        .map(|p| format!("{}: {}", p.name, p.ty))
        .collect::<Vec<_>>()
        .join(", ");
    if c.is_ctor() {
        let _ = write!(out, "    ctor({params}) ");
    } else {
        let _ = write!(out, "    method {}({params})", c.name);
        if let Some(ret) = &c.ret {
            let _ = write!(out, " -> {ret}");
        }
        out.push(' ');
    }
    print_block(out, &c.body, 1);
    out.push('\n');
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

fn print_block(out: &mut String, block: &Block, depth: usize) {
    if block.stmts.is_empty() {
        out.push_str("{}");
        return;
    }
    out.push_str("{\n");
    for stmt in &block.stmts {
        indent(out, depth + 1);
        print_stmt(out, stmt, depth + 1);
        out.push('\n');
    }
    indent(out, depth);
    out.push('}');
}

fn print_stmt(out: &mut String, stmt: &Stmt, depth: usize) {
    match &stmt.kind {
        StmtKind::Let { name, ty, init, .. } => {
            let _ = match ty {
                Some(ty) => write!(out, "let {name}: {ty} = {};", expr_to_string(init)),
                None => write!(out, "let {name} = {};", expr_to_string(init)),
            };
        }
        StmtKind::Assign { target, value } => {
            let _ = write!(
                out,
                "{} = {};",
                expr_to_string(target),
                expr_to_string(value)
            );
        }
        StmtKind::If {
            cond,
            then_block,
            else_block,
            ..
        } => {
            let _ = write!(out, "if ({}) ", expr_to_string(cond));
            print_block(out, then_block, depth);
            if let Some(else_block) = else_block {
                out.push_str(" else ");
                match else_block.stmts.as_slice() {
                    [nested @ Stmt {
                        kind: StmtKind::If { .. },
                        ..
                    }] => print_stmt(out, nested, depth),
                    _ => print_block(out, else_block, depth),
                }
            }
        }
        StmtKind::While { cond, body, .. } => {
            let _ = write!(out, "while ({}) ", expr_to_string(cond));
            print_block(out, body, depth);
        }
        StmtKind::Return(None) => out.push_str("return;"),
        StmtKind::Return(Some(e)) => {
            let _ = write!(out, "return {};", expr_to_string(e));
        }
        StmtKind::Throw(e) => {
            let _ = write!(out, "throw {};", expr_to_string(e));
        }
        StmtKind::Expr(e) => {
            let _ = write!(out, "{};", expr_to_string(e));
        }
    }
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut out = String::new();
    print_expr(&mut out, e);
    out
}

fn needs_parens_as_operand(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Binary { .. } | ExprKind::Unary { .. } => true,
        ExprKind::Literal(Literal::Int(v)) => *v < 0,
        ExprKind::Literal(Literal::Long(v)) => *v < 0,
        ExprKind::Literal(Literal::Double(v)) => v.is_sign_negative(),
        _ => false,
    }
}

fn print_operand(out: &mut String, e: &Expr) {
    if needs_parens_as_operand(e) {
        out.push('(');
        print_expr(out, e);
        out.push(')');
    } else {
        print_expr(out, e);
    }
}

fn print_args(out: &mut String, args: &[Expr]) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        print_expr(out, a);
    }
    out.push(')');
}

fn print_expr(out: &mut String, e: &Expr) {
    match &e.kind {
        ExprKind::Literal(lit) => {
            let _ = write!(out, "{lit}");
        }
        ExprKind::Var(name) => out.push_str(name),
        ExprKind::This => out.push_str("this"),
        ExprKind::Field { object, field } => {
            print_operand(out, object);
            let _ = write!(out, ".{field}");
        }
        ExprKind::Unary { op, operand } => {
            out.push_str(match op {
                UnaryOp::Neg => "-",
                UnaryOp::Not => "!",
            });
            // `-(5)` keeps a negated literal from folding on re-parse.
            let literal = matches!(operand.kind, ExprKind::Literal(_));
            if needs_parens_as_operand(operand) || (literal && *op == UnaryOp::Neg) {
                out.push('(');
                print_expr(out, operand);
                out.push(')');
            } else {
                print_expr(out, operand);
            }
        }
        ExprKind::Binary { op, lhs, rhs } => {
            print_operand(out, lhs);
            let _ = write!(out, " {} ", op.symbol());
            print_operand(out, rhs);
        }
        ExprKind::Call {
            receiver,
            method,
            args,
        } => {
            print_operand(out, receiver);
            let _ = write!(out, ".{method}");
            print_args(out, args);
        }
        ExprKind::New { subject, args } => {
            let _ = write!(out, "new {subject}");
            print_args(out, args);
        }
        ExprKind::Builtin { func, args } => {
            out.push_str(func.name());
            print_args(out, args);
        }
    }
}
