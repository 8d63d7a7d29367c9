//! Statement-level mutation with per-statement probability `1/n`.

use rand::seq::IndexedRandom;
use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal};

use super::sbx::project;
use crate::encoding::generate::Builder;
use crate::encoding::{Arg, EncodingError, Statement, TestCase};
use crate::lang::{Literal, TypeTag, TypedUnit};

/// What one mutation call did.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MutationStats {
    /// Statements selected for mutation.
    pub mutated: usize,
    pub inserted: bool,
}

fn perturb_string(s: &str, rng: &mut dyn RngCore) -> String {
    let mut chars: Vec<char> = s.chars().collect();
    let fresh = rng.random_range(0x20u8..=0x7e) as char;
    let op = if chars.is_empty() { 0 } else { rng.random_range(0..3) };
    match op {
        0 => {
            let at = rng.random_range(0..=chars.len());
            chars.insert(at, fresh);
        }
        1 => {
            let at = rng.random_range(0..chars.len());
            chars.remove(at);
        }
        _ => {
            let at = rng.random_range(0..chars.len());
            chars[at] = fresh;
        }
    }
    chars.into_iter().collect()
}

/// Gaussian step with `sigma = max(1, |v| / 10)` for the number family,
/// single-character edit for strings.
pub fn perturb_literal(lit: &Literal, rng: &mut dyn RngCore) -> Literal {
    let step = |v: f64, rng: &mut dyn RngCore| {
        let sigma = (v.abs() * 0.1).max(1.0);
        v + Normal::new(0.0, sigma).expect("positive sigma").sample(rng)
    };
    match lit {
        Literal::Bool(b) => Literal::Bool(!b),
        Literal::Str(s) => Literal::Str(perturb_string(s, rng)),
        Literal::Int(v) => project(step(*v as f64, rng), &TypeTag::Int, lit),
        Literal::Long(v) => project(step(*v as f64, rng), &TypeTag::Long, lit),
        Literal::Char(c) => project(step(*c as u32 as f64, rng), &TypeTag::Char, lit),
        Literal::Double(v) => {
            let v = if v.is_finite() { *v } else { 0.0 };
            Literal::Double(step(v, rng))
        }
        Literal::Null => Literal::Null,
    }
}

#[derive(Clone, Copy)]
enum Edit {
    Perturb,
    Replace,
    Delete,
}

fn alternatives(unit: &TypedUnit, stmt: &Statement) -> Vec<usize> {
    let Some(callee) = stmt.callee() else {
        return Vec::new();
    };
    let Some(owner) = unit.unit().subject_index(&callee.owner) else {
        return Vec::new();
    };
    let pool: Vec<usize> = if callee.is_ctor {
        unit.ctors_of(owner).collect()
    } else {
        unit.methods_of(owner).collect()
    };
    pool.into_iter()
        .filter(|&f| {
            let s = unit.signature(f);
            s.flat != callee.flat && s.params.len() == callee.params.len()
        })
        .collect()
}

fn edit_statement(
    unit: &TypedUnit,
    t: &mut TestCase,
    i: usize,
    rng: &mut dyn RngCore,
) {
    let stmt = &t.statements()[i];
    let literal_slots: Vec<usize> = stmt
        .args()
        .iter()
        .enumerate()
        .filter(|(_, a)| matches!(a, Arg::Literal(_)))
        .map(|(k, _)| k)
        .collect();
    let alts = alternatives(unit, stmt);
    let mut edits = Vec::with_capacity(3);
    if matches!(stmt, Statement::Primitive { .. }) || !literal_slots.is_empty() {
        edits.push(Edit::Perturb);
    }
    if !alts.is_empty() {
        edits.push(Edit::Replace);
    }
    if t.len() > 1 {
        edits.push(Edit::Delete);
    }
    let Some(edit) = edits.choose(rng).copied() else {
        return;
    };
    match edit {
        Edit::Perturb => match &mut t.statements_mut()[i] {
            Statement::Primitive { value, .. } => *value = perturb_literal(value, rng),
            s => {
                let slot = *literal_slots.choose(rng).expect("non-empty");
                if let Arg::Literal(l) = &s.args()[slot] {
                    let l = perturb_literal(l, rng);
                    s.args_mut()[slot] = Arg::Literal(l);
                }
            }
        },
        Edit::Replace => {
            let flat = *alts.choose(rng).expect("non-empty");
            let sig = unit.signature(flat).clone();
            match &mut t.statements_mut()[i] {
                Statement::Construct { callee, .. } | Statement::Invoke { callee, .. } => {
                    *callee = sig
                }
                Statement::Primitive { .. } => {}
            }
        }
        Edit::Delete => {
            t.remove(i);
        }
    }
}

pub(crate) fn mutate_with(
    builder: &Builder<'_>,
    test: &TestCase,
    rng: &mut dyn RngCore,
) -> Result<(TestCase, MutationStats), EncodingError> {
    let n = test.len().max(1);
    let p = 1.0 / n as f64;
    let mut t = test.clone();
    let mut stats = MutationStats::default();
    // Back to front so deletions leave unvisited positions in place.
    for i in (0..test.len()).rev() {
        if rng.random_bool(p) {
            stats.mutated += 1;
            edit_statement(builder.unit, &mut t, i, rng);
        }
    }
    if rng.random_bool(p) {
        let callables = builder.cut_callables();
        let flat = *callables.choose(rng).expect("unit has callables");
        let pos = rng.random_range(0..=t.len());
        // Repair first so the insertion sees resolved variables.
        t = builder.repair(&t, rng)?;
        let pos = pos.min(t.len());
        builder.insert_call(&mut t, pos, flat, rng)?;
        stats.inserted = true;
    }
    if stats.mutated == 0 && !stats.inserted {
        return Ok((t, stats));
    }
    Ok((builder.repair(&t, rng)?, stats))
}

pub fn mutate_with_stats(
    test: &TestCase,
    unit: &TypedUnit,
    rng: &mut dyn RngCore,
) -> Result<(TestCase, MutationStats), EncodingError> {
    mutate_with(&Builder::new(unit), test, rng)
}

/// Mutates each statement with probability `1/n` (perturb a literal, swap
/// the callee for one of equal arity, or delete), inserts a random call with
/// probability `1/n`, and repairs the result.
pub fn mutate(
    test: &TestCase,
    unit: &TypedUnit,
    rng: &mut dyn RngCore,
) -> Result<TestCase, EncodingError> {
    mutate_with_stats(test, unit, rng).map(|(t, _)| t)
}
