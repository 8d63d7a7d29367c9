//! Test cases as statement sequences: construction, validity, repair,
//! rendering and the signature index used by data-level crossover.

pub mod compat;
pub mod generate;
pub mod render;
pub mod testcase;

use thiserror::Error;

#[cfg(test)]
mod tests;

pub use compat::{build_compat_index, CompatibilityIndex};
pub use generate::{random_literal, random_string, random_test, repair};
pub use render::{parse_suite, render, render_lines, render_suite, Suite};
pub use testcase::{is_valid, Arg, Statement, TestCase, DANGLING};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EncodingError {
    #[error("no constructor chain can produce a value of type `{ty}`")]
    RepairImpossible { ty: String },
    #[error("line {line}: {message}")]
    Parse { line: u32, message: String },
}
