//! Search-based unit test generation for subjects written in a small
//! object-based language, with single-point and hybrid multi-level
//! crossover operators and an experiment harness comparing them.

pub mod analysis;
pub mod corpus;
pub mod encoding;
pub mod harness;
pub mod lang;
pub mod operators;
pub mod runtime;
pub mod search;
