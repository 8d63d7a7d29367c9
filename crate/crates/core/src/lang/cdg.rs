//! Syntactic control dependencies for structured callables.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ast::{Block, BranchId, Callable, StmtKind};

/// A node that controls execution: the callable entry or one branch outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ControlNode {
    Entry,
    Outcome { branch: BranchId, outcome: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlDependencyGraph {
    pub callable: usize,
    branches: Vec<BranchId>,
    parents: BTreeMap<BranchId, ControlNode>,
    lines: BTreeMap<u32, ControlNode>,
}

impl ControlDependencyGraph {
    /// Branch predicates of the callable in source order.
    pub fn branches(&self) -> &[BranchId] {
        &self.branches
    }

    /// The node the predicate of `b` is control dependent on.
    pub fn parent_of(&self, b: BranchId) -> Option<ControlNode> {
        self.parents.get(&b).copied()
    }

    /// Executable lines and the node each is control dependent on.
    pub fn lines(&self) -> &BTreeMap<u32, ControlNode> {
        &self.lines
    }

    pub fn line_controller(&self, line: u32) -> Option<ControlNode> {
        self.lines.get(&line).copied()
    }

    /// Edges `(controller, dependent branch)` in source order of dependents.
    pub fn edges(&self) -> Vec<(ControlNode, BranchId)> {
        self.branches
            .iter()
            .map(|b| (self.parents[b], *b))
            .collect()
    }

    pub fn dependents(&self, node: ControlNode) -> Vec<BranchId> {
        self.branches
            .iter()
            .copied()
            .filter(|b| self.parents[b] == node)
            .collect()
    }

    /// Number of predicates from `b` up to the entry, counting `b` itself.
    pub fn depth(&self, b: BranchId) -> usize {
        let mut depth = 1;
        let mut node = self.parents[&b];
        while let ControlNode::Outcome { branch, .. } = node {
            depth += 1;
            node = self.parents[&branch];
        }
        depth
    }

    /// Controlling outcomes from `node` (inclusive) up to the entry.
    pub fn chain(&self, node: ControlNode) -> Vec<(BranchId, bool)> {
        let mut out = Vec::new();
        let mut node = node;
        while let ControlNode::Outcome { branch, outcome } = node {
            out.push((branch, outcome));
            node = self.parents[&branch];
        }
        out
    }
}

pub fn build_cdg(callable: &Callable, flat: usize) -> ControlDependencyGraph {
    let mut graph = ControlDependencyGraph {
        callable: flat,
        branches: Vec::new(),
        parents: BTreeMap::new(),
        lines: BTreeMap::new(),
    };
    if callable.body.stmts.is_empty() {
        graph.lines.insert(callable.span.line, ControlNode::Entry);
    }
    visit(&mut graph, &callable.body, ControlNode::Entry);
    graph
}

fn visit(graph: &mut ControlDependencyGraph, block: &Block, ctrl: ControlNode) {
    for stmt in &block.stmts {
        graph.lines.entry(stmt.span.line).or_insert(ctrl);
        match &stmt.kind {
            StmtKind::If {
                branch,
                then_block,
                else_block,
                ..
            } => {
                graph.branches.push(*branch);
                graph.parents.insert(*branch, ctrl);
                let on = |outcome| ControlNode::Outcome {
                    branch: *branch,
                    outcome,
                };
                visit(graph, then_block, on(true));
                if let Some(b) = else_block {
                    visit(graph, b, on(false));
                }
            }
            StmtKind::While { branch, body, .. } => {
                graph.branches.push(*branch);
                graph.parents.insert(*branch, ctrl);
                visit(
                    graph,
                    body,
                    ControlNode::Outcome {
                        branch: *branch,
                        outcome: true,
                    },
                );
            }
            _ => {}
        }
    }
}
