use std::collections::BTreeSet;

use crate::lang::{ControlNode, CoverageTarget, TargetKind, TypedUnit};

/// Uncovered targets whose controlling node is the callable entry or an
/// already covered branch outcome.
pub fn active_targets(
    covered: &BTreeSet<CoverageTarget>,
    unit: &TypedUnit,
    all: &[CoverageTarget],
) -> BTreeSet<CoverageTarget> {
    all.iter()
        .filter(|t| !covered.contains(t))
        .filter(|t| match t.controller(unit) {
            ControlNode::Outcome { branch, outcome } => covered.contains(&CoverageTarget {
                callable: t.callable,
                kind: TargetKind::Branch { branch, outcome },
            }),
            _ => true,
        })
        .copied()
        .collect()
}
