//! Random test construction and reference repair.

use rand::seq::IndexedRandom;
use rand::{Rng, RngCore};
use rand_distr::{Distribution, Geometric};

use super::testcase::{arg_ok, ref_ok, Arg, Statement, TestCase, DANGLING};
use super::EncodingError;
use crate::lang::{Literal, TypeTag, TypedUnit};

/// Printable ASCII range used for random characters and strings.
const PRINTABLE: std::ops::RangeInclusive<u8> = 0x20..=0x7e;

/// Probability of reusing an existing variable for an object argument.
const REUSE_PROB: f64 = 0.8;

pub fn random_string(rng: &mut dyn RngCore) -> String {
    // Failures before the first success with p = 1/9: mean length 8.
    let len = Geometric::new(1.0 / 9.0)
        .expect("valid probability")
        .sample(rng) as usize;
    (0..len)
        .map(|_| rng.random_range(PRINTABLE) as char)
        .collect()
}

pub fn random_literal(ty: &TypeTag, rng: &mut dyn RngCore) -> Literal {
    match ty {
        TypeTag::Int => Literal::Int(rng.random_range(-100..=100)),
        TypeTag::Long => Literal::Long(rng.random_range(-100..=100)),
        TypeTag::Double => Literal::Double(rng.random_range(-100.0..=100.0)),
        TypeTag::Boolean => Literal::Bool(rng.random_bool(0.5)),
        TypeTag::Char => Literal::Char(rng.random_range(PRINTABLE) as char),
        TypeTag::Str => Literal::Str(random_string(rng)),
        TypeTag::Subject(_) => Literal::Null,
    }
}

/// Minimal number of statements needed to construct each subject, and the
/// constructor achieving it. `None` when no finite chain exists.
pub(crate) fn ctor_plan(unit: &TypedUnit) -> Vec<Option<(usize, usize)>> {
    let subjects = unit.unit().subjects.len();
    let mut plan: Vec<Option<(usize, usize)>> = vec![None; subjects];
    loop {
        let mut changed = false;
        for s in 0..subjects {
            for flat in unit.ctors_of(s) {
                let sig = unit.signature(flat);
                let mut cost = Some(1usize);
                for p in &sig.params {
                    if let TypeTag::Subject(name) = p {
                        let idx = unit.unit().subject_index(name).expect("resolved type");
                        cost = cost.zip(plan[idx].map(|(c, _)| c)).map(|(a, b)| a + b);
                    }
                }
                if let Some(c) = cost {
                    if plan[s].is_none_or(|(best, _)| c < best) {
                        plan[s] = Some((c, flat));
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return plan;
        }
    }
}

/// Builds tests for one unit; holds the constructor plan.
pub(crate) struct Builder<'u> {
    pub unit: &'u TypedUnit,
    plan: Vec<Option<(usize, usize)>>,
}

impl<'u> Builder<'u> {
    pub fn new(unit: &'u TypedUnit) -> Self {
        Builder {
            unit,
            plan: ctor_plan(unit),
        }
    }

    fn subject_index(&self, name: &str) -> usize {
        self.unit
            .unit()
            .subject_index(name)
            .expect("subject types resolve")
    }

    /// Inserts at `*pos` fresh statements producing a value of type `ty` and
    /// returns the position of that value; `*pos` ends after the insertion.
    pub fn insert_minimal(
        &self,
        test: &mut TestCase,
        pos: &mut usize,
        ty: &TypeTag,
        rng: &mut dyn RngCore,
    ) -> Result<usize, EncodingError> {
        let stmt = match ty {
            TypeTag::Subject(name) => {
                let s = self.subject_index(name);
                let (_, flat) = self.plan[s].ok_or_else(|| EncodingError::RepairImpossible {
                    ty: name.clone(),
                })?;
                let callee = self.unit.signature(flat).clone();
                let mut args = Vec::with_capacity(callee.params.len());
                for p in &callee.params {
                    args.push(if p.is_primitive() {
                        Arg::Literal(random_literal(p, rng))
                    } else {
                        Arg::Ref(self.insert_minimal(test, pos, p, rng)?)
                    });
                }
                Statement::Construct { callee, args }
            }
            _ => Statement::Primitive {
                ty: ty.clone(),
                value: random_literal(ty, rng),
            },
        };
        test.insert(*pos, stmt);
        *pos += 1;
        Ok(*pos - 1)
    }

    /// A value of type `ty` visible at `*pos`: an existing variable (with
    /// probability `reuse`) or a fresh minimal definition.
    fn obtain(
        &self,
        test: &mut TestCase,
        pos: &mut usize,
        ty: &TypeTag,
        reuse: f64,
        rng: &mut dyn RngCore,
    ) -> Result<usize, EncodingError> {
        let existing = test.vars_of_type(*pos, ty);
        if !existing.is_empty() && rng.random_bool(reuse) {
            return Ok(*existing.choose(rng).expect("non-empty"));
        }
        self.insert_minimal(test, pos, ty, rng)
    }

    /// Inserts a call to callable `flat` at `pos` (plus any prerequisites
    /// before it). Returns the position after the call.
    pub fn insert_call(
        &self,
        test: &mut TestCase,
        pos: usize,
        flat: usize,
        rng: &mut dyn RngCore,
    ) -> Result<usize, EncodingError> {
        let callee = self.unit.signature(flat).clone();
        let mut pos = pos;
        let receiver = if callee.is_ctor {
            None
        } else {
            let owner = TypeTag::Subject(callee.owner.clone());
            Some(self.obtain(test, &mut pos, &owner, 0.9, rng)?)
        };
        let mut args = Vec::with_capacity(callee.params.len());
        for p in &callee.params {
            args.push(if p.is_primitive() {
                Arg::Literal(random_literal(p, rng))
            } else {
                Arg::Ref(self.obtain(test, &mut pos, p, REUSE_PROB, rng)?)
            });
        }
        let stmt = match receiver {
            None => Statement::Construct { callee, args },
            Some(receiver) => Statement::Invoke {
                receiver,
                callee,
                args,
            },
        };
        test.insert(pos, stmt);
        Ok(pos + 1)
    }

    /// Callables of the unit under test, for random call selection.
    pub fn cut_callables(&self) -> Vec<usize> {
        self.unit
            .ctors_of(0)
            .chain(self.unit.methods_of(0))
            .collect()
    }

    pub fn random_test(
        &self,
        rng: &mut dyn RngCore,
        max_length: usize,
    ) -> Result<TestCase, EncodingError> {
        let max_length = max_length.max(1);
        let ctors: Vec<usize> = self.unit.ctors_of(0).collect();
        let methods: Vec<usize> = self.unit.methods_of(0).collect();
        let mut test = TestCase::default();
        let first = *ctors.choose(rng).expect("unit has a constructor");
        self.insert_call(&mut test, 0, first, rng)?;
        let target = rng.random_range(1..=max_length);
        let callables = self.cut_callables();
        while test.len() < target {
            // Methods are the interesting part; constructors stay available.
            let flat = if !methods.is_empty() && rng.random_bool(0.8) {
                *methods.choose(rng).expect("non-empty")
            } else {
                *callables.choose(rng).expect("non-empty")
            };
            let mut candidate = test.clone();
            let end = candidate.len();
            self.insert_call(&mut candidate, end, flat, rng)?;
            if candidate.len() > max_length {
                break;
            }
            test = candidate;
        }
        Ok(test)
    }

    pub fn repair(&self, test: &TestCase, rng: &mut dyn RngCore) -> Result<TestCase, EncodingError> {
        let mut t = test.clone();
        if t.is_empty() {
            let mut pos = 0;
            self.insert_minimal(&mut t, &mut pos, &TypeTag::Subject(self.unit.name().to_string()), rng)?;
            return Ok(t);
        }
        let mut i = 0;
        while i < t.len() {
            let mut stmt = t.statements()[i].clone();
            let mut pos = i;
            let mut changed = false;
            match &mut stmt {
                Statement::Primitive { ty, value } => {
                    if value.type_tag().as_ref() != Some(ty) {
                        *value = random_literal(ty, rng);
                        changed = true;
                    }
                }
                Statement::Construct { callee, args } | Statement::Invoke { callee, args, .. } => {
                    let callee = callee.clone();
                    if args.len() != callee.params.len() {
                        *args = vec![Arg::Ref(DANGLING); callee.params.len()];
                        changed = true;
                    }
                    for (slot, p) in callee.params.iter().enumerate() {
                        let a = args[slot].clone();
                        if !arg_ok(&t, pos, &a, p) {
                            args[slot] = if p.is_primitive() && !matches!(a, Arg::Ref(_)) {
                                Arg::Literal(random_literal(p, rng))
                            } else {
                                Arg::Ref(self.insert_minimal(&mut t, &mut pos, p, rng)?)
                            };
                            changed = true;
                        }
                    }
                }
            }
            if let Statement::Invoke {
                receiver, callee, ..
            } = &mut stmt
            {
                let owner = TypeTag::Subject(callee.owner.clone());
                if !ref_ok(&t, pos, *receiver, &owner) {
                    *receiver = self.insert_minimal(&mut t, &mut pos, &owner, rng)?;
                    changed = true;
                }
            }
            if changed {
                t.statements_mut()[pos] = stmt;
            }
            i = pos + 1;
        }
        Ok(t)
    }
}

pub fn random_test(
    unit: &TypedUnit,
    rng: &mut dyn RngCore,
    max_length: usize,
) -> Result<TestCase, EncodingError> {
    Builder::new(unit).random_test(rng, max_length)
}

/// Fixes every unresolved or ill-typed reference by inserting a fresh
/// definition immediately before its first use. Valid tests are returned
/// unchanged.
pub fn repair(
    test: &TestCase,
    unit: &TypedUnit,
    rng: &mut dyn RngCore,
) -> Result<TestCase, EncodingError> {
    Builder::new(unit).repair(test, rng)
}
