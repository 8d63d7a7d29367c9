//! Bundled benchmark subjects.

use crate::lang::{load_subject, LangError, TypedUnit};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Numeric,
    String,
}

pub struct CorpusEntry {
    pub name: &'static str,
    pub family: Family,
    pub source: &'static str,
}

pub const CORPUS: &[CorpusEntry] = &[
    CorpusEntry {
        name: "fraction",
        family: Family::Numeric,
        source: include_str!("../corpus/fraction.subj"),
    },
    CorpusEntry {
        name: "complex",
        family: Family::Numeric,
        source: include_str!("../corpus/complex.subj"),
    },
    CorpusEntry {
        name: "interval",
        family: Family::Numeric,
        source: include_str!("../corpus/interval.subj"),
    },
    CorpusEntry {
        name: "quadratic",
        family: Family::Numeric,
        source: include_str!("../corpus/quadratic.subj"),
    },
    CorpusEntry {
        name: "stemmer",
        family: Family::String,
        source: include_str!("../corpus/stemmer.subj"),
    },
    CorpusEntry {
        name: "csv",
        family: Family::String,
        source: include_str!("../corpus/csv.subj"),
    },
    CorpusEntry {
        name: "roman",
        family: Family::String,
        source: include_str!("../corpus/roman.subj"),
    },
    CorpusEntry {
        name: "template",
        family: Family::String,
        source: include_str!("../corpus/template.subj"),
    },
];

pub fn entry(name: &str) -> Option<&'static CorpusEntry> {
    CORPUS.iter().find(|e| e.name == name)
}

/// Parses and type checks a bundled subject.
pub fn load(name: &str) -> Option<Result<TypedUnit, LangError>> {
    entry(name).map(|e| load_subject(e.source))
}

pub fn names(family: Option<Family>) -> Vec<&'static str> {
    CORPUS
        .iter()
        .filter(|e| family.is_none_or(|f| e.family == f))
        .map(|e| e.name)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_subject_loads() {
        for e in CORPUS {
            let unit = load_subject(e.source).unwrap_or_else(|err| panic!("{}: {err}", e.name));
            assert!(!unit.targets().is_empty(), "{}", e.name);
        }
    }
}
