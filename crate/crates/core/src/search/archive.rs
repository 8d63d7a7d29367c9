use std::collections::BTreeMap;

use crate::encoding::TestCase;
use crate::lang::CoverageTarget;
use crate::runtime::ExecutionTrace;

/// Shortest known covering test per target.
#[derive(Clone, Debug, Default)]
pub struct Archive {
    entries: BTreeMap<CoverageTarget, TestCase>,
}

impl Archive {
    pub fn new() -> Self {
        Archive::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, target: &CoverageTarget) -> bool {
        self.entries.contains_key(target)
    }

    pub fn get(&self, target: &CoverageTarget) -> Option<&TestCase> {
        self.entries.get(target)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CoverageTarget, &TestCase)> {
        self.entries.iter()
    }

    /// Records `test` for every target it covers, replacing an entry only
    /// with a strictly shorter test. Returns the number of newly covered
    /// targets.
    pub fn update(&mut self, targets: &[CoverageTarget], test: &TestCase, trace: &ExecutionTrace) -> usize {
        let mut fresh = 0;
        for t in targets {
            if !trace.covers(t) {
                continue;
            }
            match self.entries.get(t) {
                Some(old) if old.len() <= test.len() => {}
                Some(_) => {
                    self.entries.insert(*t, test.clone());
                }
                None => {
                    self.entries.insert(*t, test.clone());
                    fresh += 1;
                }
            }
        }
        fresh
    }

    /// Distinct archived tests, ordered by the first target each covers.
    pub fn suite(&self) -> Vec<TestCase> {
        let mut out: Vec<TestCase> = Vec::new();
        for test in self.entries.values() {
            if !out.contains(test) {
                out.push(test.clone());
            }
        }
        out
    }
}
