//! Syntax tree for subject files.
//!
//! Node identity is carried by [`ExprId`] and [`BranchId`], both assigned in
//! parse order, so re-parsing a pretty-printed file reproduces the same ids.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Source position. Spans never participate in structural equality.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExprId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BranchId(pub u32);

impl fmt::Display for BranchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeTag {
    Int,
    Long,
    Double,
    Boolean,
    Char,
    Str,
    Subject(String),
}

impl TypeTag {
    pub fn is_numeric(&self) -> bool {
        matches!(self, TypeTag::Int | TypeTag::Long | TypeTag::Double)
    }

    /// Types recombined by SBX: the numeric types plus `boolean` and `char`.
    pub fn is_number_family(&self) -> bool {
        matches!(
            self,
            TypeTag::Int | TypeTag::Long | TypeTag::Double | TypeTag::Boolean | TypeTag::Char
        )
    }

    pub fn is_primitive(&self) -> bool {
        !matches!(self, TypeTag::Subject(_))
    }

    pub fn subject_name(&self) -> Option<&str> {
        match self {
            TypeTag::Subject(name) => Some(name),
            _ => None,
        }
    }

    fn numeric_rank(&self) -> Option<u8> {
        match self {
            TypeTag::Int => Some(0),
            TypeTag::Long => Some(1),
            TypeTag::Double => Some(2),
            _ => None,
        }
    }

    /// Implicit conversion: identity or int -> long -> double.
    pub fn widens_to(&self, target: &TypeTag) -> bool {
        if self == target {
            return true;
        }
        match (self.numeric_rank(), target.numeric_rank()) {
            (Some(a), Some(b)) => a <= b,
            _ => false,
        }
    }

    /// The wider of two numeric types, if both are numeric.
    pub fn numeric_join(&self, other: &TypeTag) -> Option<TypeTag> {
        let a = self.numeric_rank()?;
        let b = other.numeric_rank()?;
        Some(if a >= b { self.clone() } else { other.clone() })
    }

    pub fn from_keyword(word: &str) -> Option<TypeTag> {
        Some(match word {
            "int" => TypeTag::Int,
            "long" => TypeTag::Long,
            "double" => TypeTag::Double,
            "boolean" => TypeTag::Boolean,
            "char" => TypeTag::Char,
            "string" => TypeTag::Str,
            _ => return None,
        })
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeTag::Int => f.write_str("int"),
            TypeTag::Long => f.write_str("long"),
            TypeTag::Double => f.write_str("double"),
            TypeTag::Boolean => f.write_str("boolean"),
            TypeTag::Char => f.write_str("char"),
            TypeTag::Str => f.write_str("string"),
            TypeTag::Subject(name) => f.write_str(name),
        }
    }
}

/// A literal constant, shared by subject source and generated tests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Literal {
    Int(i32),
    Long(i64),
    Double(f64),
    Bool(bool),
    Char(char),
    Str(String),
    Null,
}

impl Literal {
    /// Static type of the literal; `None` for `null`.
    pub fn type_tag(&self) -> Option<TypeTag> {
        Some(match self {
            Literal::Int(_) => TypeTag::Int,
            Literal::Long(_) => TypeTag::Long,
            Literal::Double(_) => TypeTag::Double,
            Literal::Bool(_) => TypeTag::Boolean,
            Literal::Char(_) => TypeTag::Char,
            Literal::Str(_) => TypeTag::Str,
            Literal::Null => return None,
        })
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Int(v) => write!(f, "{v}"),
            Literal::Long(v) => write!(f, "{v}L"),
            Literal::Double(v) => write!(f, "{v:?}"),
            Literal::Bool(v) => write!(f, "{v}"),
            Literal::Char(c) => write!(f, "'{}'", escape_char(*c, '\'')),
            Literal::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    f.write_str(&escape_char(c, '"'))?;
                }
                f.write_str("\"")
            }
            Literal::Null => f.write_str("null"),
        }
    }
}

pub(crate) fn escape_char(c: char, quote: char) -> String {
    match c {
        '\\' => "\\\\".to_string(),
        '\n' => "\\n".to_string(),
        '\t' => "\\t".to_string(),
        '\r' => "\\r".to_string(),
        c if c == quote => format!("\\{c}"),
        c if (c as u32) < 0x20 || c == '\u{7f}' => format!("\\u{{{:x}}}", c as u32),
        c => c.to_string(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinaryOp {
    pub const ARITHMETIC: [BinaryOp; 5] = [
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Mul,
        BinaryOp::Div,
        BinaryOp::Rem,
    ];
    pub const RELATIONAL: [BinaryOp; 6] = [
        BinaryOp::Eq,
        BinaryOp::Ne,
        BinaryOp::Lt,
        BinaryOp::Le,
        BinaryOp::Gt,
        BinaryOp::Ge,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq | BinaryOp::Ne => 3,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 4,
            BinaryOp::Add | BinaryOp::Sub => 5,
            BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => 6,
        }
    }

    pub fn is_arithmetic(self) -> bool {
        Self::ARITHMETIC.contains(&self)
    }

    pub fn is_relational(self) -> bool {
        Self::RELATIONAL.contains(&self)
    }

    pub fn is_ordering(self) -> bool {
        matches!(
            self,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Builtin {
    Len,
    Concat,
    Substring,
    CharAt,
    IndexOf,
}

impl Builtin {
    pub fn from_name(name: &str) -> Option<Builtin> {
        Some(match name {
            "len" => Builtin::Len,
            "concat" => Builtin::Concat,
            "substring" => Builtin::Substring,
            "charAt" => Builtin::CharAt,
            "indexOf" => Builtin::IndexOf,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Len => "len",
            Builtin::Concat => "concat",
            Builtin::Substring => "substring",
            Builtin::CharAt => "charAt",
            Builtin::IndexOf => "indexOf",
        }
    }

    pub fn signature(self) -> (&'static [TypeTag], TypeTag) {
        const S: TypeTag = TypeTag::Str;
        const I: TypeTag = TypeTag::Int;
        match self {
            Builtin::Len => (&[S], I),
            Builtin::Concat => (&[S, S], S),
            Builtin::Substring => (&[S, I, I], S),
            Builtin::CharAt => (&[S, I], TypeTag::Char),
            Builtin::IndexOf => (&[S, S], I),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub id: ExprId,
    pub span: Span,
    pub kind: ExprKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Literal(Literal),
    Var(String),
    This,
    Field {
        object: Box<Expr>,
        field: String,
    },
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        receiver: Box<Expr>,
        method: String,
        args: Vec<Expr>,
    },
    New {
        subject: String,
        args: Vec<Expr>,
    },
    Builtin {
        func: Builtin,
        args: Vec<Expr>,
    },
}

impl Expr {
    /// Visits this expression and all sub-expressions in pre-order.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Literal(_) | ExprKind::Var(_) | ExprKind::This => {}
            ExprKind::Field { object, .. } => object.walk(f),
            ExprKind::Unary { operand, .. } => operand.walk(f),
            ExprKind::Binary { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
            ExprKind::Call { receiver, args, .. } => {
                receiver.walk(f);
                args.iter().for_each(|a| a.walk(f));
            }
            ExprKind::New { args, .. } | ExprKind::Builtin { args, .. } => {
                args.iter().for_each(|a| a.walk(f))
            }
        }
    }

    pub fn walk_mut(&mut self, f: &mut dyn FnMut(&mut Expr)) {
        f(self);
        match &mut self.kind {
            ExprKind::Literal(_) | ExprKind::Var(_) | ExprKind::This => {}
            ExprKind::Field { object, .. } => object.walk_mut(f),
            ExprKind::Unary { operand, .. } => operand.walk_mut(f),
            ExprKind::Binary { lhs, rhs, .. } => {
                lhs.walk_mut(f);
                rhs.walk_mut(f);
            }
            ExprKind::Call { receiver, args, .. } => {
                receiver.walk_mut(f);
                args.iter_mut().for_each(|a| a.walk_mut(f));
            }
            ExprKind::New { args, .. } | ExprKind::Builtin { args, .. } => {
                args.iter_mut().for_each(|a| a.walk_mut(f))
            }
        }
    }

    /// True when evaluation cannot mutate program state or call user code.
    pub fn is_pure(&self) -> bool {
        let mut pure = true;
        self.walk(&mut |e| {
            if matches!(e.kind, ExprKind::Call { .. } | ExprKind::New { .. }) {
                pure = false;
            }
        });
        pure
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stmt {
    pub span: Span,
    pub kind: StmtKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    Let {
        id: ExprId,
        name: String,
        ty: Option<TypeTag>,
        init: Expr,
    },
    Assign {
        target: Expr,
        value: Expr,
    },
    If {
        branch: BranchId,
        cond: Expr,
        then_block: Block,
        else_block: Option<Block>,
    },
    While {
        branch: BranchId,
        cond: Expr,
        body: Block,
    },
    Return(Option<Expr>),
    Throw(Expr),
    Expr(Expr),
}

impl Stmt {
    /// Expressions owned directly by this statement (not by nested blocks).
    pub fn exprs(&self) -> Vec<&Expr> {
        match &self.kind {
            StmtKind::Let { init, .. } => vec![init],
            StmtKind::Assign { target, value } => vec![target, value],
            StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => vec![cond],
            StmtKind::Return(Some(e)) | StmtKind::Throw(e) | StmtKind::Expr(e) => vec![e],
            StmtKind::Return(None) => vec![],
        }
    }

    pub fn exprs_mut(&mut self) -> Vec<&mut Expr> {
        match &mut self.kind {
            StmtKind::Let { init, .. } => vec![init],
            StmtKind::Assign { target, value } => vec![target, value],
            StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => vec![cond],
            StmtKind::Return(Some(e)) | StmtKind::Throw(e) | StmtKind::Expr(e) => vec![e],
            StmtKind::Return(None) => vec![],
        }
    }

    pub fn blocks(&self) -> Vec<&Block> {
        match &self.kind {
            StmtKind::If {
                then_block,
                else_block,
                ..
            } => std::iter::once(then_block).chain(else_block.iter()).collect(),
            StmtKind::While { body, .. } => vec![body],
            _ => vec![],
        }
    }

    pub fn blocks_mut(&mut self) -> Vec<&mut Block> {
        match &mut self.kind {
            StmtKind::If {
                then_block,
                else_block,
                ..
            } => std::iter::once(then_block)
                .chain(else_block.iter_mut())
                .collect(),
            StmtKind::While { body, .. } => vec![body],
            _ => vec![],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Block {
    pub stmts: Vec<Stmt>,
}

impl Block {
    /// Visits every statement in the block, recursively, in source order.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        for stmt in &self.stmts {
            f(stmt);
            for block in stmt.blocks() {
                block.walk(f);
            }
        }
    }

    pub fn walk_mut(&mut self, f: &mut dyn FnMut(&mut Stmt)) {
        for stmt in &mut self.stmts {
            f(stmt);
            for block in stmt.blocks_mut() {
                block.walk_mut(f);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub ty: TypeTag,
}

/// Reserved name used for constructors.
pub const CTOR_NAME: &str = "<init>";

#[derive(Clone, Debug, PartialEq)]
pub struct Callable {
    pub name: String,
    pub params: Vec<Param>,
    pub ret: Option<TypeTag>,
    pub body: Block,
    pub span: Span,
}

impl Callable {
    pub fn is_ctor(&self) -> bool {
        self.name == CTOR_NAME
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldDecl {
    pub name: String,
    pub ty: TypeTag,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubjectDecl {
    pub name: String,
    pub fields: Vec<FieldDecl>,
    pub ctors: Vec<Callable>,
    pub methods: Vec<Callable>,
    pub span: Span,
}

impl SubjectDecl {
    pub fn method(&self, name: &str) -> Option<(usize, &Callable)> {
        self.methods.iter().enumerate().find(|(_, m)| m.name == name)
    }

    pub fn field_index(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|f| f.name == name)
    }
}

/// A parsed subject file. The first subject is the unit under test; any
/// further subjects are helper types it depends on.
#[derive(Clone, Debug, PartialEq)]
pub struct SubjectUnit {
    pub subjects: Vec<SubjectDecl>,
    /// Next unused expression id; mutation operators allocate from here.
    pub next_expr_id: u32,
    pub branch_count: u32,
}

impl SubjectUnit {
    pub fn cut(&self) -> &SubjectDecl {
        &self.subjects[0]
    }

    pub fn name(&self) -> &str {
        &self.cut().name
    }

    pub fn subject_index(&self, name: &str) -> Option<usize> {
        self.subjects.iter().position(|s| s.name == name)
    }

    pub fn fresh_expr_id(&mut self) -> ExprId {
        let id = ExprId(self.next_expr_id);
        self.next_expr_id += 1;
        id
    }
}
