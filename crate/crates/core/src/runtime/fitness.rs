//! Approach level plus normalized branch distance.

use super::distance::normalize;
use super::trace::ExecutionTrace;
use crate::lang::{BranchId, ControlDependencyGraph, ControlNode, CoverageTarget, TargetKind};

/// Fitness of `target` (lower is better, 0 iff covered).
pub fn target_fitness(
    target: &CoverageTarget,
    trace: &ExecutionTrace,
    cdg: &ControlDependencyGraph,
) -> f64 {
    match target.kind {
        TargetKind::Branch { branch, outcome } => branch_fitness(branch, outcome, trace, cdg),
        TargetKind::Line { line } => {
            if trace.covers_line(line) {
                return 0.0;
            }
            match cdg.line_controller(line) {
                Some(ControlNode::Outcome { branch, outcome }) => {
                    let f = branch_fitness(branch, outcome, trace, cdg);
                    // The controlling outcome was taken but the line was not
                    // reached (an earlier exception or return).
                    if f > 0.0 {
                        f
                    } else {
                        0.5
                    }
                }
                _ => {
                    if trace.entered(cdg.callable) {
                        0.5
                    } else {
                        1.0
                    }
                }
            }
        }
    }
}

fn branch_fitness(
    branch: BranchId,
    outcome: bool,
    trace: &ExecutionTrace,
    cdg: &ControlDependencyGraph,
) -> f64 {
    if trace.covers_branch(branch, outcome) {
        return 0.0;
    }
    let chain = cdg.chain(ControlNode::Outcome { branch, outcome });
    for (level, (b, o)) in chain.iter().enumerate() {
        if let Some(d) = trace.distance(*b, *o) {
            return level as f64 + normalize(d);
        }
    }
    // No predicate on the path was evaluated.
    let n = chain.len() as f64;
    if trace.entered(cdg.callable) {
        n
    } else {
        n + 1.0
    }
}
