use std::collections::BTreeSet;
use std::io::Write;
use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use hmxforge::analysis::{
    a12, build_report, exact_p, generate_mutants, median, normal_p, score_suite, EffectClass,
    Metric, RunRecord,
};
use hmxforge::corpus::{self, Family};
use hmxforge::encoding::{parse_suite, random_test, render_suite, TestCase};
use hmxforge::lang::{load_subject, Literal, TypedUnit};
use hmxforge::operators::{
    data_crossover, hmx, sbx_pair, spx, string_splice, CrossoverKind, OperatorConfig, PairKind,
    RngChoices, SbxDraw, ScriptedChoices, SpliceDraw,
};
use hmxforge::runtime::{execute_test, execute_with, target_fitness, ExecOptions, SandboxLimits};
use hmxforge::search::{evolve, Budget, SearchConfig};

/// Writes straight to the process stdout so the line survives test capture.
fn report(n: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {n}: {verdict} - {detail}");
}

fn fraction() -> TypedUnit {
    corpus::load("fraction").unwrap().unwrap()
}

fn all_units() -> Vec<(&'static str, TypedUnit)> {
    corpus::names(None)
        .into_iter()
        .map(|n| (n, corpus::load(n).unwrap().unwrap()))
        .collect()
}

const PARENTS: &str = "subject Fraction
seed 0

test 0 {
    Fraction v0 = new Fraction(2, 3);
    Fraction v1 = new Fraction(2, -1);
    Fraction v2 = v0.divideBy(v1);
    Fraction v3 = new Fraction(0, 1);
    v0.add(v3);
}

test 1 {
    Fraction v0 = new Fraction(3, 1);
    Fraction v1 = new Fraction(1, 3);
    v0.add(v1);
    double v2 = v0.pow(2.0);
}
";

#[test]
fn criterion_1_sbx_regimes() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut bad = 0;
    for _ in 0..100_000 {
        let v1: f64 = rng.random_range(-1e3..1e3);
        let v2: f64 = if rng.random_bool(0.05) { v1 } else { rng.random_range(-1e3..1e3) };
        let d = SbxDraw::sample(&mut rng, 2.5);
        let (c1, c2) = sbx_pair(v1, v2, &d);
        let (lo, hi) = (v1.min(v2), v1.max(v2));
        let scale = (v1.abs() + v2.abs()).max(f64::MIN_POSITIVE);
        let sum_ok = ((c1 + c2) - (v1 + v2)).abs() <= 1e-9 * scale;
        let regime_ok = if d.u < 0.5 {
            [c1, c2].iter().all(|c| *c >= lo && *c <= hi)
        } else if d.u > 0.5 && v1 != v2 {
            c1.min(c2) < lo && c1.max(c2) > hi
        } else {
            true
        };
        if !(sum_ok && regime_ok) {
            bad += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = bad == 0 && secs < 5.0;
    report(1, pass, &format!("10^5 SBX draws, {bad} violations, {secs:.2}s"));
    assert!(pass);
}

#[test]
fn criterion_2_worked_examples() {
    let unit = fraction();
    let keys: Vec<&str> = unit.signatures().iter().map(|s| s.key.as_str()).collect();
    let keys_ok = keys.contains(&"Fraction|<init>(int, int)Fraction")
        && keys.contains(&"Fraction|add(Fraction)V");
    let splice_ok = string_splice("lorem", "ipsum", &SpliceDraw { x_i: 1, y_i: 3 })
        == ("lom".to_string(), "ipsurem".to_string());

    let suite = parse_suite(PARENTS, &unit).unwrap();
    let (mut o1, mut o2) = (suite.tests[0].clone(), suite.tests[1].clone());
    let mut ch = ScriptedChoices::new(0);
    // Ctor site: first instance of parent 1, second of parent 2. Add site: the only ones.
    ch.picks.extend([0, 1, 0, 0]);
    let log = data_crossover(&mut o1, &mut o2, &mut ch, &OperatorConfig::default());
    let sites: Vec<&str> = log.sites.iter().map(|s| s.key.as_str()).collect();
    let pairs: Vec<(Literal, Literal)> = log.pairs.iter().map(|p| p.parents.clone()).collect();
    let hmx_ok = sites == ["Fraction|<init>(int, int)Fraction", "Fraction|add(Fraction)V"]
        && pairs
            == [
                (Literal::Int(2), Literal::Int(1)),
                (Literal::Int(3), Literal::Int(3)),
            ]
        && log.pairs.iter().all(|p| p.kind == PairKind::Sbx);
    let pass = keys_ok && splice_ok && hmx_ok;
    report(
        2,
        pass,
        &format!("keys {keys_ok}, splice {splice_ok}, sites {sites:?} pairs {pairs:?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_3_rate_zero_is_spx() {
    let units = all_units();
    let cfg = OperatorConfig {
        data_crossover_rate: 0.0,
        ..Default::default()
    };
    let mut gen = ChaCha8Rng::seed_from_u64(3);
    let mut mismatches = 0;
    for i in 0..10_000u64 {
        let unit = &units[i as usize % units.len()].1;
        let p1 = random_test(unit, &mut gen, 25).unwrap();
        let p2 = random_test(unit, &mut gen, 25).unwrap();
        let seed = gen.next_u64();
        let mut r1 = ChaCha8Rng::seed_from_u64(seed);
        let a = spx(&p1, &p2, &mut RngChoices(&mut r1), unit).unwrap();
        let mut r2 = ChaCha8Rng::seed_from_u64(seed);
        let b = hmx(&p1, &p2, &mut RngChoices(&mut r2), &cfg, unit).unwrap();
        let same = a == b
            && render_suite("x", 0, &[a.0.clone(), a.1.clone()])
                == render_suite("x", 0, &[b.0.clone(), b.1.clone()])
            && r1.next_u64() == r2.next_u64();
        if !same {
            mismatches += 1;
        }
    }
    let pass = mismatches == 0;
    report(3, pass, &format!("10^4 parent pairs, {mismatches} mismatches"));
    assert!(pass);
}

/// Ranks by counting: smaller values plus half of the other equal values.
fn brute_ranks(pooled: &[f64]) -> Vec<f64> {
    pooled
        .iter()
        .map(|v| {
            let less = pooled.iter().filter(|w| *w < v).count() as f64;
            let equal = pooled.iter().filter(|w| *w == v).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

fn brute_p(xs: &[f64], ys: &[f64]) -> f64 {
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let ranks = brute_ranks(&pooled);
    let (n, total) = (xs.len(), pooled.len());
    let centre = n as f64 * (total as f64 + 1.0) / 2.0;
    let obs: f64 = ranks[..n].iter().sum();
    let dev = (obs - centre).abs();
    let (mut hits, mut all) = (0u64, 0u64);
    for mask in 0u32..(1 << total) {
        if mask.count_ones() as usize != n {
            continue;
        }
        all += 1;
        let s: f64 = (0..total).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if (s - centre).abs() >= dev - 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / all as f64
}

fn brute_a12(xs: &[f64], ys: &[f64]) -> f64 {
    let mut score = 0.0;
    for x in xs {
        for y in ys {
            score += match x.partial_cmp(y).unwrap() {
                std::cmp::Ordering::Greater => 1.0,
                std::cmp::Ordering::Equal => 0.5,
                std::cmp::Ordering::Less => 0.0,
            };
        }
    }
    score / (xs.len() * ys.len()) as f64
}

#[test]
fn criterion_4_statistics_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut exact_bad = 0;
    let mut a12_bad = 0;
    for _ in 0..500 {
        let n = rng.random_range(1..=11);
        let m = rng.random_range(1..=12 - n);
        let draw = |rng: &mut ChaCha8Rng, k: usize| -> Vec<f64> {
            (0..k).map(|_| f64::from(rng.random_range(0..6u8))).collect()
        };
        let xs = draw(&mut rng, n);
        let ys = draw(&mut rng, m);
        if (exact_p(&xs, &ys) - brute_p(&xs, &ys)).abs() > 1e-12 {
            exact_bad += 1;
        }
        if (a12(&xs, &ys) - brute_a12(&xs, &ys)).abs() > 1e-12 {
            a12_bad += 1;
        }
    }
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let xs: Vec<f64> = (0..10).map(|_| rng.random::<f64>()).collect();
        let shift = rng.random_range(0.0..0.6);
        let ys: Vec<f64> = (0..10).map(|_| rng.random::<f64>() + shift).collect();
        worst = worst.max((normal_p(&xs, &ys) - exact_p(&xs, &ys)).abs());
    }
    let pass = exact_bad == 0 && a12_bad == 0 && worst <= 0.02;
    report(
        4,
        pass,
        &format!(
            "500 pairs: exact p mismatches {exact_bad}, a12 mismatches {a12_bad}; normal vs exact max gap {worst:.4}"
        ),
    );
    assert!(pass);
}

const FULL_FRACTION: &str = "subject Fraction
seed 0

test 0 {
    Fraction v0 = new Fraction(1, 0);
}

test 1 {
    Fraction v0 = new Fraction(1, -2);
    Fraction v1 = new Fraction(1, 2);
    v0.add(v1);
    boolean v2 = v0.isProper();
}

test 2 {
    Fraction v0 = new Fraction(-1, 2);
    Fraction v1 = new Fraction(-1, 3);
    v0.add(v1);
    boolean v2 = v0.isProper();
    Fraction v3 = new Fraction(7, 3);
    boolean v4 = v3.isProper();
}

test 3 {
    Fraction v0 = new Fraction(1, 2);
    Fraction v1 = new Fraction(1, 4);
    Fraction v2 = v0.divideBy(v1);
    Fraction v3 = new Fraction(1, 3);
    Fraction v4 = v0.divideBy(v3);
}

test 4 {
    Fraction v0 = new Fraction(3, 2);
    double v1 = v0.pow(3.0);
    double v2 = v0.pow(100.0);
}

test 5 {
    Fraction v0 = new Fraction(1, 2);
    Fraction v1 = new Fraction(2, 3);
    int v2 = v0.compareTo(v1);
    int v3 = v1.compareTo(v0);
    int v4 = v0.compareTo(v0);
    v0.add(v1);
}
";

/// Mutants whose observations differ from the original on some test,
/// computed by direct re-execution.
fn observation_oracle(
    suite: &[TestCase],
    unit: &TypedUnit,
    mutants: &[hmxforge::analysis::Mutant],
) -> BTreeSet<usize> {
    let opts = ExecOptions {
        observe: true,
        probe: None,
    };
    let limits = SandboxLimits::default();
    let original: Vec<_> = suite
        .iter()
        .map(|t| execute_with(t, unit, limits, opts).observations)
        .collect();
    mutants
        .iter()
        .filter(|m| {
            suite
                .iter()
                .zip(&original)
                .any(|(t, o)| execute_with(t, &m.unit, limits, opts).observations != *o)
        })
        .map(|m| m.id)
        .collect()
}

#[test]
fn criterion_5_mutation_consistency() {
    let unit = fraction();
    let suite = parse_suite(FULL_FRACTION, &unit).unwrap().tests;
    let covered: BTreeSet<_> = suite
        .iter()
        .flat_map(|t| {
            let trace = execute_test(t, &unit, SandboxLimits::default());
            unit.targets()
                .iter()
                .filter(|g| trace.covers(g))
                .copied()
                .collect::<Vec<_>>()
        })
        .collect();
    let full = covered.len() == unit.targets().len();
    let mutants = generate_mutants(&unit);
    let res = score_suite(&suite, &unit, &mutants, SandboxLimits::default());
    let oracle = observation_oracle(&suite, &unit, &mutants);
    let oracle_score = oracle.len() as f64 / mutants.len() as f64;
    let oracle_ok = res.strong_killed == oracle && res.strong_score == oracle_score;
    let mut subset_ok = res.strong_killed.is_subset(&res.weak_killed);

    // Strong kills must be weak kills on every search run as well.
    let runs: Vec<(&str, TypedUnit, CrossoverKind)> = all_units()
        .into_iter()
        .flat_map(|(n, u)| [CrossoverKind::Spx, CrossoverKind::Hmx].map(|k| (n, u.clone(), k)))
        .collect();
    let checked: Vec<bool> = runs
        .par_iter()
        .map(|(_, u, op)| {
            let cfg = SearchConfig {
                operator: *op,
                budget: Budget::Evaluations(1000),
                seed: 5,
                ..Default::default()
            };
            let r = evolve(u, &cfg);
            let ms = generate_mutants(u);
            let m = score_suite(&r.suite, u, &ms, cfg.limits);
            m.strong_killed.is_subset(&m.weak_killed)
        })
        .collect();
    subset_ok &= checked.iter().all(|b| *b);
    let pass = full && oracle_ok && subset_ok;
    report(
        5,
        pass,
        &format!(
            "full coverage {full}; strong {:.4} vs oracle {oracle_score:.4} ({} mutants); strong within weak on {} runs: {subset_ok}",
            res.strong_score,
            mutants.len(),
            checked.len() + 1
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_6_determinism_and_straight_line() {
    let mut same = true;
    for name in ["fraction", "stemmer", "template"] {
        let unit = corpus::load(name).unwrap().unwrap();
        for op in [CrossoverKind::Spx, CrossoverKind::Hmx] {
            let cfg = SearchConfig {
                operator: op,
                seed: 11,
                budget: Budget::Evaluations(3000),
                ..Default::default()
            };
            same &= evolve(&unit, &cfg).to_json() == evolve(&unit, &cfg).to_json();
        }
    }
    let straight = load_subject(include_str!("fixtures/straight.subj")).unwrap();
    let r = evolve(
        &straight,
        &SearchConfig {
            budget: Budget::Evaluations(5000),
            ..Default::default()
        },
    );
    let gen0 = r.generations == 0 && r.branch_coverage == 1.0 && r.line_coverage == 1.0;
    let pass = same && gen0;
    report(
        6,
        pass,
        &format!(
            "repeat runs identical {same}; straight-line coverage {}/{} after {} generations",
            r.branch_coverage, r.line_coverage, r.generations
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_7_string_subjects_direction() {
    let start = Instant::now();
    let subjects = corpus::names(Some(Family::String));
    let mut jobs = Vec::new();
    for s in &subjects {
        for op in [CrossoverKind::Spx, CrossoverKind::Hmx] {
            for seed in 0..20u64 {
                jobs.push((*s, op, seed));
            }
        }
    }
    let records: Vec<RunRecord> = jobs
        .par_iter()
        .map(|&(s, op, seed)| {
            let unit = corpus::load(s).unwrap().unwrap();
            let r = evolve(
                &unit,
                &SearchConfig {
                    operator: op,
                    seed,
                    budget: Budget::Evaluations(10_000),
                    ..Default::default()
                },
            );
            RunRecord {
                subject: s.to_string(),
                operator: op,
                seed,
                branch_cov: r.branch_coverage,
                line_cov: r.line_coverage,
                // Mutation scores are not part of this check.
                weak_score: 0.0,
                strong_score: 0.0,
                evaluations: r.evaluations_used,
            }
        })
        .collect();
    let mut holds = 0;
    let mut lines = Vec::new();
    for s in &subjects {
        let med = |op| {
            let v: Vec<f64> = records
                .iter()
                .filter(|r| r.subject == *s && r.operator == op)
                .map(|r| r.branch_cov)
                .collect();
            median(&v)
        };
        let (h, p) = (med(CrossoverKind::Hmx), med(CrossoverKind::Spx));
        if h >= p {
            holds += 1;
        }
        lines.push(format!("{s} hmx {h:.3} spx {p:.3}"));
    }
    let rep = build_report(&records);
    let tally = &rep.summary.as_ref().unwrap()[&Metric::BranchCoverage];
    let large = EffectClass::ALL
        .iter()
        .position(|c| *c == EffectClass::Large)
        .unwrap();
    let lose_large = tally.lose[large];
    let share = holds as f64 / subjects.len() as f64;
    let pass = share >= 0.75 && lose_large == 0;
    report(
        7,
        pass,
        &format!(
            "median HMX >= SPX on {holds}/{} string subjects [{}]; branch #Lose Large = {lose_large}; {:.0}s",
            subjects.len(),
            lines.join(", "),
            start.elapsed().as_secs_f64()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_8_fitness_zero_iff_covered() {
    let start = Instant::now();
    let units = all_units();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0usize;
    let mut bad = 0usize;
    for _ in 0..1000 {
        for (_, unit) in &units {
            let t = random_test(unit, &mut rng, 30).unwrap();
            let trace = execute_test(&t, unit, SandboxLimits::default());
            for g in unit.targets() {
                let f = target_fitness(g, &trace, unit.cdg(g.callable));
                checked += 1;
                if (f == 0.0) != trace.covers(g) || f < 0.0 {
                    bad += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = bad == 0 && secs < 60.0;
    report(
        8,
        pass,
        &format!("{checked} target evaluations over 1000 tests x {} subjects, {bad} violations, {secs:.1}s", units.len()),
    );
    assert!(pass);
}
