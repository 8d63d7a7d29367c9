//! Test execution: interpreter, branch distances and fitness.

pub mod distance;
pub mod fitness;
pub mod interp;
pub mod trace;
pub mod value;

#[cfg(test)]
mod tests;

pub use distance::{branch_distance, normalize, K};
pub use fitness::target_fitness;
pub use interp::{
    execute_test, execute_with, ExecOptions, InfectionProbe, ProbeOrigin, SandboxLimits,
};
pub use trace::{AbortReason, ExecutionTrace, Observation};
pub use value::Value;
