//! Test-level single-point crossover and the hybrid multi-level composition.

use serde::Serialize;

use super::choices::CrossoverChoices;
use super::sbx::sbx_typed;
use super::splice::string_splice;
use super::OperatorConfig;
use crate::encoding::generate::Builder;
use crate::encoding::{build_compat_index, Arg, EncodingError, Statement, TestCase, DANGLING};
use crate::lang::{Literal, TypeTag, TypedUnit};

/// `head[..alpha]` followed by `tail[beta..]`. References from the tail into
/// its dropped prefix become dangling.
fn splice_tests(head: &TestCase, alpha: usize, tail: &TestCase, beta: usize) -> TestCase {
    let mut out: Vec<Statement> = head.statements()[..alpha].to_vec();
    for s in &tail.statements()[beta..] {
        let mut s = s.clone();
        s.for_each_ref_mut(|r| {
            *r = if *r != DANGLING && *r >= beta {
                *r - beta + alpha
            } else {
                DANGLING
            };
        });
        out.push(s);
    }
    TestCase::new(out)
}

/// Single-point crossover before reference repair. Parents shorter than two
/// statements are copied.
pub fn spx_raw(
    p1: &TestCase,
    p2: &TestCase,
    choices: &mut dyn CrossoverChoices,
) -> (TestCase, TestCase) {
    if p1.len() < 2 || p2.len() < 2 {
        return (p1.clone(), p2.clone());
    }
    let (alpha, beta) = choices.cut_points(p1.len(), p2.len());
    (
        splice_tests(p1, alpha, p2, beta),
        splice_tests(p2, beta, p1, alpha),
    )
}

pub(crate) fn spx_with(
    builder: &Builder<'_>,
    p1: &TestCase,
    p2: &TestCase,
    choices: &mut dyn CrossoverChoices,
) -> Result<(TestCase, TestCase), EncodingError> {
    let (o1, o2) = spx_raw(p1, p2, choices);
    let o1 = builder.repair(&o1, choices.rng())?;
    let o2 = builder.repair(&o2, choices.rng())?;
    Ok((o1, o2))
}

/// Single-point crossover with repaired offspring.
pub fn spx(
    p1: &TestCase,
    p2: &TestCase,
    choices: &mut dyn CrossoverChoices,
    unit: &TypedUnit,
) -> Result<(TestCase, TestCase), EncodingError> {
    spx_with(&Builder::new(unit), p1, p2, choices)
}

/// One matched pair of calls picked for data-level crossover.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DataSite {
    pub key: String,
    pub ctor: bool,
    pub pos1: usize,
    pub pos2: usize,
    pub applied: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    Sbx,
    Splice,
}

/// One recombined parameter pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamPair {
    pub site: usize,
    pub slot: usize,
    pub kind: PairKind,
    pub parents: (Literal, Literal),
    pub children: (Literal, Literal),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DataCrossoverLog {
    pub sites: Vec<DataSite>,
    pub pairs: Vec<ParamPair>,
}

fn recombine_args(
    o1: &mut TestCase,
    pos1: usize,
    o2: &mut TestCase,
    pos2: usize,
    site: usize,
    choices: &mut dyn CrossoverChoices,
    cfg: &OperatorConfig,
    log: &mut DataCrossoverLog,
) {
    let Some(callee) = o1.statements()[pos1].callee().cloned() else {
        return;
    };
    for (slot, ty) in callee.params.iter().enumerate() {
        let a = o1.statements()[pos1].args().get(slot).cloned();
        let b = o2.statements()[pos2].args().get(slot).cloned();
        let (Some(Arg::Literal(x)), Some(Arg::Literal(y))) = (a, b) else {
            continue;
        };
        if x.type_tag().as_ref() != Some(ty) || y.type_tag().as_ref() != Some(ty) {
            continue;
        }
        let (kind, children) = if ty.is_number_family() {
            let draw = choices.sbx_draw(cfg.eta_c);
            (PairKind::Sbx, sbx_typed(&x, &y, &draw, ty, cfg.sbx_literal_mode))
        } else if *ty == TypeTag::Str {
            let (Literal::Str(sx), Literal::Str(sy)) = (&x, &y) else {
                continue;
            };
            let (lx, ly) = (sx.chars().count(), sy.chars().count());
            if lx == 0 || ly == 0 {
                continue;
            }
            let draw = choices.splice_draw(lx, ly);
            let (cx, cy) = string_splice(sx, sy, &draw);
            (PairKind::Splice, (Literal::Str(cx), Literal::Str(cy)))
        } else {
            continue;
        };
        o1.statements_mut()[pos1].args_mut()[slot] = Arg::Literal(children.0.clone());
        o2.statements_mut()[pos2].args_mut()[slot] = Arg::Literal(children.1.clone());
        log.pairs.push(ParamPair {
            site,
            slot,
            kind,
            parents: (x, y),
            children,
        });
    }
}

/// Data-level stage: for every signature called in both tests (constructors
/// first, then methods, each in key order) one instance per side is picked
/// and its literal parameters recombined in place.
pub fn data_crossover(
    o1: &mut TestCase,
    o2: &mut TestCase,
    choices: &mut dyn CrossoverChoices,
    cfg: &OperatorConfig,
) -> DataCrossoverLog {
    let (i1, i2) = build_compat_index(o1, o2);
    let mut log = DataCrossoverLog::default();
    for (ctor, m1, m2) in [
        (true, &i1.ctor_map, &i2.ctor_map),
        (false, &i1.method_map, &i2.method_map),
    ] {
        for (key, pos1s) in m1 {
            let pos2s = &m2[key];
            let pos1 = pos1s[choices.pick_instance(pos1s.len())];
            let pos2 = pos2s[choices.pick_instance(pos2s.len())];
            let applied = choices.apply_data_crossover(cfg.data_crossover_rate);
            let site = log.sites.len();
            log.sites.push(DataSite {
                key: key.clone(),
                ctor,
                pos1,
                pos2,
                applied,
            });
            if applied {
                recombine_args(o1, pos1, o2, pos2, site, choices, cfg, &mut log);
            }
        }
    }
    log
}

pub(crate) fn hmx_with(
    builder: &Builder<'_>,
    p1: &TestCase,
    p2: &TestCase,
    choices: &mut dyn CrossoverChoices,
    cfg: &OperatorConfig,
) -> Result<(TestCase, TestCase, DataCrossoverLog), EncodingError> {
    let (mut o1, mut o2) = spx_with(builder, p1, p2, choices)?;
    if cfg.data_crossover_rate <= 0.0 {
        return Ok((o1, o2, DataCrossoverLog::default()));
    }
    // Only literals change here, so the offspring stay valid.
    let log = data_crossover(&mut o1, &mut o2, choices, cfg);
    Ok((o1, o2, log))
}

/// Single-point crossover followed by data-level crossover on the matched
/// calls of the offspring.
pub fn hmx(
    p1: &TestCase,
    p2: &TestCase,
    choices: &mut dyn CrossoverChoices,
    cfg: &OperatorConfig,
    unit: &TypedUnit,
) -> Result<(TestCase, TestCase), EncodingError> {
    hmx_logged(p1, p2, choices, cfg, unit).map(|(a, b, _)| (a, b))
}

pub fn hmx_logged(
    p1: &TestCase,
    p2: &TestCase,
    choices: &mut dyn CrossoverChoices,
    cfg: &OperatorConfig,
    unit: &TypedUnit,
) -> Result<(TestCase, TestCase, DataCrossoverLog), EncodingError> {
    hmx_with(&Builder::new(unit), p1, p2, choices, cfg)
}
