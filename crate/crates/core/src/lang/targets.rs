use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::BranchId;
use super::cdg::ControlNode;
use super::typeck::TypedUnit;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TargetKind {
    Branch { branch: BranchId, outcome: bool },
    Line { line: u32 },
}

/// A branch outcome or an executable line of the unit under test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoverageTarget {
    /// Flat callable index.
    pub callable: usize,
    pub kind: TargetKind,
}

impl CoverageTarget {
    pub fn is_branch(&self) -> bool {
        matches!(self.kind, TargetKind::Branch { .. })
    }

    /// The control node this target is directly dependent on.
    pub fn controller(&self, unit: &TypedUnit) -> ControlNode {
        let cdg = unit.cdg(self.callable);
        match self.kind {
            TargetKind::Branch { branch, .. } => cdg.parent_of(branch).expect("branch in cdg"),
            TargetKind::Line { line } => cdg.line_controller(line).expect("line in cdg"),
        }
    }

    /// The node that covering this target corresponds to, if any.
    pub fn as_node(&self) -> Option<ControlNode> {
        match self.kind {
            TargetKind::Branch { branch, outcome } => Some(ControlNode::Outcome { branch, outcome }),
            TargetKind::Line { .. } => None,
        }
    }
}

impl fmt::Display for CoverageTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TargetKind::Branch { branch, outcome } => {
                write!(f, "c{}:{}{}", self.callable, branch, if outcome { "T" } else { "F" })
            }
            TargetKind::Line { line } => write!(f, "c{}:L{}", self.callable, line),
        }
    }
}

/// Branch and line targets of the unit under test: per callable, branch
/// outcomes in source order (true before false), then lines ascending.
/// A line shared by two callables is attributed to the first.
pub fn enumerate_targets(unit: &TypedUnit) -> Vec<CoverageTarget> {
    let mut out = Vec::new();
    let mut seen_lines = BTreeSet::new();
    for (flat, info) in unit.callables().iter().enumerate() {
        if info.id.subject != 0 {
            continue;
        }
        let cdg = unit.cdg(flat);
        for &branch in cdg.branches() {
            for outcome in [true, false] {
                out.push(CoverageTarget {
                    callable: flat,
                    kind: TargetKind::Branch { branch, outcome },
                });
            }
        }
        for &line in cdg.lines().keys() {
            if seen_lines.insert(line) {
                out.push(CoverageTarget {
                    callable: flat,
                    kind: TargetKind::Line { line },
                });
            }
        }
    }
    out
}
