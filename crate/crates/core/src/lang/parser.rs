//! Recursive-descent parser for `.subj` files.
//!
//! ```text
//! file      := subject+
//! subject   := "subject" IDENT "{" member* "}"
//! member    := "field" IDENT ":" type ";"
//!            | "ctor" "(" params? ")" block
//!            | "method" IDENT "(" params? ")" ("->" type)? block
//! stmt      := "let" IDENT (":" type)? "=" expr ";"
//!            | "if" "(" expr ")" block ("else" (block | if-stmt))?
//!            | "while" "(" expr ")" block
//!            | "return" expr? ";" | "throw" expr ";"
//!            | expr ("=" expr)? ";"
//! ```

use std::collections::BTreeSet;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::LangError;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    next_expr: u32,
    next_branch: u32,
}

type PResult<T> = Result<T, LangError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        let idx = (self.pos + ahead).min(self.toks.len() - 1);
        &self.toks[idx].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> LangError {
        let t = &self.toks[self.pos];
        LangError::Syntax {
            line: t.span.line,
            col: t.span.col,
            expected: expected.to_string(),
            found: t.tok.describe(),
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<Span> {
        if self.is_punct(p) {
            Ok(self.advance().span)
        } else {
            Err(self.error(&format!("`{p}`")))
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<Span> {
        if self.is_word(w) {
            Ok(self.advance().span)
        } else {
            Err(self.error(&format!("`{w}`")))
        }
    }

    fn expect_ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(name) if !is_reserved(&name) => {
                let span = self.advance().span;
                Ok((name, span))
            }
            _ => Err(self.error("identifier")),
        }
    }

    fn expr_id(&mut self) -> ExprId {
        let id = ExprId(self.next_expr);
        self.next_expr += 1;
        id
    }

    fn branch_id(&mut self) -> BranchId {
        let id = BranchId(self.next_branch);
        self.next_branch += 1;
        id
    }

    fn parse_type(&mut self) -> PResult<TypeTag> {
        match self.peek().clone() {
            Tok::Ident(word) => {
                if let Some(t) = TypeTag::from_keyword(&word) {
                    self.advance();
                    Ok(t)
                } else if !is_reserved(&word) {
                    self.advance();
                    Ok(TypeTag::Subject(word))
                } else {
                    Err(self.error("type"))
                }
            }
            _ => Err(self.error("type")),
        }
    }

    fn parse_subject(&mut self) -> PResult<SubjectDecl> {
        let span = self.expect_word("subject")?;
        let (name, _) = self.expect_ident()?;
        self.expect_punct("{")?;
        let mut decl = SubjectDecl {
            name,
            fields: vec![],
            ctors: vec![],
            methods: vec![],
            span,
        };
        while !self.is_punct("}") {
            if self.is_word("field") {
                let span = self.advance().span;
                let (name, _) = self.expect_ident()?;
                self.expect_punct(":")?;
                let ty = self.parse_type()?;
                self.expect_punct(";")?;
                decl.fields.push(FieldDecl { name, ty, span });
            } else if self.is_word("ctor") {
                let span = self.advance().span;
                let params = self.parse_params()?;
                let body = self.parse_block()?;
                decl.ctors.push(Callable {
                    name: CTOR_NAME.to_string(),
                    params,
                    ret: None,
                    body,
                    span,
                });
            } else if self.is_word("method") {
                let span = self.advance().span;
                let (name, _) = self.expect_ident()?;
                let params = self.parse_params()?;
                let ret = if self.eat_punct("->") {
                    Some(self.parse_type()?)
                } else {
                    None
                };
                let body = self.parse_block()?;
                decl.methods.push(Callable {
                    name,
                    params,
                    ret,
                    body,
                    span,
                });
            } else {
                return Err(self.error("`field`, `ctor`, `method` or `}`"));
            }
        }
        self.expect_punct("}")?;
        Ok(decl)
    }

    fn parse_params(&mut self) -> PResult<Vec<Param>> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if self.eat_punct(")") {
            return Ok(params);
        }
        loop {
            let (name, _) = self.expect_ident()?;
            self.expect_punct(":")?;
            let ty = self.parse_type()?;
            params.push(Param { name, ty });
            if self.eat_punct(")") {
                return Ok(params);
            }
            self.expect_punct(",")?;
        }
    }

    fn parse_block(&mut self) -> PResult<Block> {
        self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.is_punct("}") {
            if matches!(self.peek(), Tok::Eof) {
                return Err(self.error("`}`"));
            }
            stmts.push(self.parse_stmt()?);
        }
        self.expect_punct("}")?;
        Ok(Block { stmts })
    }

    fn parse_stmt(&mut self) -> PResult<Stmt> {
        let span = self.span();
        let kind = if self.is_word("let") {
            self.advance();
            let (name, _) = self.expect_ident()?;
            let ty = if self.eat_punct(":") {
                Some(self.parse_type()?)
            } else {
                None
            };
            self.expect_punct("=")?;
            let init = self.parse_expr()?;
            self.expect_punct(";")?;
            let id = self.expr_id();
            StmtKind::Let { id, name, ty, init }
        } else if self.is_word("if") {
            return self.parse_if();
        } else if self.is_word("while") {
            self.advance();
            let branch = self.branch_id();
            self.expect_punct("(")?;
            let cond = self.parse_expr()?;
            self.expect_punct(")")?;
            let body = self.parse_block()?;
            StmtKind::While { branch, cond, body }
        } else if self.is_word("return") {
            self.advance();
            let value = if self.is_punct(";") {
                None
            } else {
                Some(self.parse_expr()?)
            };
            self.expect_punct(";")?;
            StmtKind::Return(value)
        } else if self.is_word("throw") {
            self.advance();
            let value = self.parse_expr()?;
            self.expect_punct(";")?;
            StmtKind::Throw(value)
        } else {
            let expr = self.parse_expr()?;
            if self.eat_punct("=") {
                if !matches!(expr.kind, ExprKind::Var(_) | ExprKind::Field { .. }) {
                    return Err(LangError::Syntax {
                        line: expr.span.line,
                        col: expr.span.col,
                        expected: "assignable expression".into(),
                        found: "expression".into(),
                    });
                }
                let value = self.parse_expr()?;
                self.expect_punct(";")?;
                StmtKind::Assign {
                    target: expr,
                    value,
                }
            } else {
                if !matches!(expr.kind, ExprKind::Call { .. } | ExprKind::New { .. }) {
                    return Err(LangError::Syntax {
                        line: expr.span.line,
                        col: expr.span.col,
                        expected: "call or assignment".into(),
                        found: "expression".into(),
                    });
                }
                self.expect_punct(";")?;
                StmtKind::Expr(expr)
            }
        };
        Ok(Stmt { span, kind })
    }

    fn parse_if(&mut self) -> PResult<Stmt> {
        let span = self.expect_word("if")?;
        let branch = self.branch_id();
        self.expect_punct("(")?;
        let cond = self.parse_expr()?;
        self.expect_punct(")")?;
        let then_block = self.parse_block()?;
        let else_block = if self.is_word("else") {
            self.advance();
            if self.is_word("if") {
                Some(Block {
                    stmts: vec![self.parse_if()?],
                })
            } else {
                Some(self.parse_block()?)
            }
        } else {
            None
        };
        Ok(Stmt {
            span,
            kind: StmtKind::If {
                branch,
                cond,
                then_block,
                else_block,
            },
        })
    }

    fn parse_expr(&mut self) -> PResult<Expr> {
        self.parse_binary(1)
    }

    fn peek_binop(&self) -> Option<BinaryOp> {
        let Tok::Punct(p) = self.peek() else {
            return None;
        };
        Some(match *p {
            "||" => BinaryOp::Or,
            "&&" => BinaryOp::And,
            "==" => BinaryOp::Eq,
            "!=" => BinaryOp::Ne,
            "<" => BinaryOp::Lt,
            "<=" => BinaryOp::Le,
            ">" => BinaryOp::Gt,
            ">=" => BinaryOp::Ge,
            "+" => BinaryOp::Add,
            "-" => BinaryOp::Sub,
            "*" => BinaryOp::Mul,
            "/" => BinaryOp::Div,
            "%" => BinaryOp::Rem,
            _ => return None,
        })
    }

    fn parse_binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.parse_unary()?;
        while let Some(op) = self.peek_binop() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.advance();
            let rhs = self.parse_binary(prec + 1)?;
            let span = lhs.span;
            lhs = Expr {
                id: self.expr_id(),
                span,
                kind: ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
            };
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> PResult<Expr> {
        let span = self.span();
        if self.eat_punct("!") {
            let operand = self.parse_unary()?;
            return Ok(Expr {
                id: self.expr_id(),
                span,
                kind: ExprKind::Unary {
                    op: UnaryOp::Not,
                    operand: Box::new(operand),
                },
            });
        }
        if self.eat_punct("-") {
            // A minus directly before a numeric literal folds into the literal.
            let folded = match *self.peek() {
                Tok::Int(v) => Some(self.negative_int(v, false)?),
                Tok::Long(v) => Some(self.negative_int(v, true)?),
                Tok::Double(v) => Some(Literal::Double(-v)),
                _ => None,
            };
            if let Some(lit) = folded {
                self.advance();
                let id = self.expr_id();
                return self.parse_postfix(Expr {
                    id,
                    span,
                    kind: ExprKind::Literal(lit),
                });
            }
            let operand = self.parse_unary()?;
            return Ok(Expr {
                id: self.expr_id(),
                span,
                kind: ExprKind::Unary {
                    op: UnaryOp::Neg,
                    operand: Box::new(operand),
                },
            });
        }
        let primary = self.parse_primary()?;
        self.parse_postfix(primary)
    }

    fn negative_int(&self, v: u64, long: bool) -> PResult<Literal> {
        let lit = if long {
            (v <= i64::MAX as u64 + 1).then(|| Literal::Long((v as i128).wrapping_neg() as i64))
        } else {
            (v <= i32::MAX as u64 + 1).then(|| Literal::Int((v as i64).wrapping_neg() as i32))
        };
        lit.ok_or_else(|| self.error("integer literal in range"))
    }

    fn parse_args(&mut self) -> PResult<Vec<Expr>> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if self.eat_punct(")") {
            return Ok(args);
        }
        loop {
            args.push(self.parse_expr()?);
            if self.eat_punct(")") {
                return Ok(args);
            }
            self.expect_punct(",")?;
        }
    }

    fn parse_primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        let kind = match self.peek().clone() {
            Tok::Int(v) => {
                self.advance();
                let v = i32::try_from(v).map_err(|_| LangError::Syntax {
                    line: span.line,
                    col: span.col,
                    expected: "int literal in range (use an `L` suffix for long)".into(),
                    found: v.to_string(),
                })?;
                ExprKind::Literal(Literal::Int(v))
            }
            Tok::Long(v) => {
                self.advance();
                let v = i64::try_from(v).map_err(|_| LangError::Syntax {
                    line: span.line,
                    col: span.col,
                    expected: "long literal in range".into(),
                    found: v.to_string(),
                })?;
                ExprKind::Literal(Literal::Long(v))
            }
            Tok::Double(v) => {
                self.advance();
                ExprKind::Literal(Literal::Double(v))
            }
            Tok::Char(c) => {
                self.advance();
                ExprKind::Literal(Literal::Char(c))
            }
            Tok::Str(s) => {
                self.advance();
                ExprKind::Literal(Literal::Str(s))
            }
            Tok::Punct("(") => {
                self.advance();
                let inner = self.parse_expr()?;
                self.expect_punct(")")?;
                return Ok(inner);
            }
            Tok::Ident(word) => match word.as_str() {
                "true" | "false" => {
                    self.advance();
                    ExprKind::Literal(Literal::Bool(word == "true"))
                }
                "null" => {
                    self.advance();
                    ExprKind::Literal(Literal::Null)
                }
                "this" => {
                    self.advance();
                    ExprKind::This
                }
                "new" => {
                    self.advance();
                    let (subject, _) = self.expect_ident()?;
                    let args = self.parse_args()?;
                    ExprKind::New { subject, args }
                }
                _ if matches!(self.peek_at(1), Tok::Punct("(")) => {
                    let Some(func) = Builtin::from_name(&word) else {
                        return Err(LangError::UnknownName {
                            name: word,
                            line: span.line,
                            col: span.col,
                        });
                    };
                    self.advance();
                    let args = self.parse_args()?;
                    ExprKind::Builtin { func, args }
                }
                _ => {
                    let (name, _) = self.expect_ident()?;
                    ExprKind::Var(name)
                }
            },
            _ => return Err(self.error("expression")),
        };
        Ok(Expr {
            id: self.expr_id(),
            span,
            kind,
        })
    }

    fn parse_postfix(&mut self, mut expr: Expr) -> PResult<Expr> {
        while self.eat_punct(".") {
            let (name, _) = self.expect_ident()?;
            let span = expr.span;
            let kind = if self.is_punct("(") {
                let args = self.parse_args()?;
                ExprKind::Call {
                    receiver: Box::new(expr),
                    method: name,
                    args,
                }
            } else {
                ExprKind::Field {
                    object: Box::new(expr),
                    field: name,
                }
            };
            expr = Expr {
                id: self.expr_id(),
                span,
                kind,
            };
        }
        Ok(expr)
    }
}

const RESERVED: [&str; 22] = [
    "subject", "field", "ctor", "method", "let", "if", "else", "while", "return", "throw", "new",
    "this", "true", "false", "null", "int", "long", "double", "boolean", "char", "string", "void",
];

fn is_reserved(word: &str) -> bool {
    RESERVED.contains(&word)
}

/// Parses a subject file and resolves declaration-level names.
pub fn parse_subject(source: &str) -> Result<SubjectUnit, LangError> {
    let toks = tokenize(source)?;
    let mut p = Parser {
        toks,
        pos: 0,
        next_expr: 0,
        next_branch: 0,
    };
    let mut subjects = vec![p.parse_subject()?];
    while !matches!(p.peek(), Tok::Eof) {
        subjects.push(p.parse_subject()?);
    }
    let unit = SubjectUnit {
        subjects,
        next_expr_id: p.next_expr,
        branch_count: p.next_branch,
    };
    check_declarations(&unit)?;
    Ok(unit)
}

fn dup(name: &str, span: Span) -> LangError {
    LangError::DuplicateName {
        name: name.to_string(),
        line: span.line,
        col: span.col,
    }
}

fn check_declarations(unit: &SubjectUnit) -> Result<(), LangError> {
    let mut names = BTreeSet::new();
    for s in &unit.subjects {
        if !names.insert(s.name.as_str()) {
            return Err(dup(&s.name, s.span));
        }
    }
    let resolve = |ty: &TypeTag, span: Span| -> Result<(), LangError> {
        match ty {
            TypeTag::Subject(name) if !names.contains(name.as_str()) => {
                Err(LangError::UnresolvedType {
                    name: name.clone(),
                    line: span.line,
                    col: span.col,
                })
            }
            _ => Ok(()),
        }
    };
    for s in &unit.subjects {
        if s.ctors.is_empty() {
            return Err(LangError::NoConstructor {
                subject: s.name.clone(),
            });
        }
        let mut fields = BTreeSet::new();
        for f in &s.fields {
            if !fields.insert(f.name.as_str()) {
                return Err(dup(&f.name, f.span));
            }
            resolve(&f.ty, f.span)?;
        }
        let mut methods = BTreeSet::new();
        for m in &s.methods {
            if !methods.insert(m.name.as_str()) {
                return Err(dup(&m.name, m.span));
            }
        }
        let mut arities = BTreeSet::new();
        for c in &s.ctors {
            if !arities.insert(c.params.len()) {
                return Err(dup(CTOR_NAME, c.span));
            }
        }
        for c in s.ctors.iter().chain(&s.methods) {
            let mut params = BTreeSet::new();
            for p in &c.params {
                if !params.insert(p.name.as_str()) {
                    return Err(dup(&p.name, c.span));
                }
                resolve(&p.ty, c.span)?;
            }
            if let Some(ret) = &c.ret {
                resolve(ret, c.span)?;
            }
            let mut err = None;
            c.body.walk(&mut |stmt| {
                if err.is_some() {
                    return;
                }
                if let StmtKind::Let { ty: Some(ty), .. } = &stmt.kind {
                    err = resolve(ty, stmt.span).err();
                }
                for e in stmt.exprs() {
                    e.walk(&mut |e| {
                        if let ExprKind::New { subject, .. } = &e.kind {
                            if err.is_none() {
                                err = resolve(&TypeTag::Subject(subject.clone()), e.span).err();
                            }
                        }
                    });
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
    }
    Ok(())
}
