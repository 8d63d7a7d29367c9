//! The subject mini-language: parsing, type checking and the structural
//! analyses (control dependencies, coverage targets) the search relies on.

pub mod ast;
pub mod cdg;
pub(crate) mod lexer;
pub mod parser;
pub mod pretty;
pub mod signature;
pub mod targets;
pub mod typeck;

use thiserror::Error;

#[cfg(test)]
mod tests;

pub use ast::{BranchId, Callable, ExprId, Literal, SubjectDecl, SubjectUnit, TypeTag};
pub use cdg::{build_cdg, ControlDependencyGraph, ControlNode};
pub use parser::parse_subject;
pub use pretty::print_unit;
pub use signature::{signature_key, CallableSig};
pub use targets::{enumerate_targets, CoverageTarget, TargetKind};
pub use typeck::{typecheck, CallableId, CallableKind, TypedUnit};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LangError {
    #[error("{line}:{col}: syntax error: expected {expected}, found {found}")]
    Syntax {
        line: u32,
        col: u32,
        expected: String,
        found: String,
    },
    #[error("{line}:{col}: duplicate name `{name}`")]
    DuplicateName { name: String, line: u32, col: u32 },
    #[error("{line}:{col}: unresolved type `{name}`")]
    UnresolvedType { name: String, line: u32, col: u32 },
    #[error("{line}:{col}: unknown name `{name}`")]
    UnknownName { name: String, line: u32, col: u32 },
    #[error("subject `{subject}` declares no constructor")]
    NoConstructor { subject: String },
    #[error("{line}:{col}: type mismatch: expected {expected}, found {found}")]
    TypeMismatch {
        line: u32,
        col: u32,
        expected: String,
        found: String,
    },
    #[error("{line}: `{callable}` does not return on every path")]
    MissingReturn { callable: String, line: u32 },
}

/// Parses and type checks a subject file in one step.
pub fn load_subject(source: &str) -> Result<TypedUnit, LangError> {
    typecheck(parse_subject(source)?)
}
