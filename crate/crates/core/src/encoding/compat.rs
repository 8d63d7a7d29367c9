use std::collections::{BTreeMap, BTreeSet};

use super::testcase::{Statement, TestCase};

/// Positions of constructor and method calls grouped by signature key.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompatibilityIndex {
    pub ctor_map: BTreeMap<String, Vec<usize>>,
    pub method_map: BTreeMap<String, Vec<usize>>,
}

impl CompatibilityIndex {
    pub fn is_empty(&self) -> bool {
        self.ctor_map.is_empty() && self.method_map.is_empty()
    }
}

fn keys(test: &TestCase, ctor: bool) -> BTreeSet<&str> {
    test.statements()
        .iter()
        .filter(|s| if ctor { s.is_ctor() } else { s.is_method() })
        .filter_map(|s| s.callee().map(|c| c.key.as_str()))
        .collect()
}

fn index_side(test: &TestCase, shared_ctor: &BTreeSet<&str>, shared_method: &BTreeSet<&str>) -> CompatibilityIndex {
    let mut idx = CompatibilityIndex::default();
    for (pos, s) in test.statements().iter().enumerate() {
        let Some(callee) = s.callee() else { continue };
        let (shared, map) = match s {
            Statement::Construct { .. } => (shared_ctor, &mut idx.ctor_map),
            _ => (shared_method, &mut idx.method_map),
        };
        if shared.contains(callee.key.as_str()) {
            map.entry(callee.key.clone()).or_default().push(pos);
        }
    }
    idx
}

/// Indexes the calls whose signature occurs in both tests. Each statement is
/// listed at most once under its key, in statement order.
pub fn build_compat_index(o1: &TestCase, o2: &TestCase) -> (CompatibilityIndex, CompatibilityIndex) {
    let shared_ctor: BTreeSet<&str> = keys(o1, true).intersection(&keys(o2, true)).copied().collect();
    let shared_method: BTreeSet<&str> = keys(o1, false)
        .intersection(&keys(o2, false))
        .copied()
        .collect();
    (
        index_side(o1, &shared_ctor, &shared_method),
        index_side(o2, &shared_ctor, &shared_method),
    )
}
