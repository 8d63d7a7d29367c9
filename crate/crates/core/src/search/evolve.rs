use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::archive::Archive;
use super::sort::{crowding_distance, preference_sort};
use super::targets::active_targets;
use super::{fraction, Budget, GenerationPoint, SearchConfig, SearchResult};
use crate::encoding::generate::Builder;
use crate::encoding::{render, TestCase};
use crate::lang::{CoverageTarget, TypedUnit};
use crate::operators::{hmx_with, mutate_with, spx_with, CrossoverKind, RngChoices};
use crate::runtime::{execute_with, target_fitness, ExecOptions, ExecutionTrace};

struct Individual {
    test: TestCase,
    trace: ExecutionTrace,
}

struct Run<'u> {
    unit: &'u TypedUnit,
    cfg: &'u SearchConfig,
    builder: Builder<'u>,
    rng: ChaCha8Rng,
    archive: Archive,
    evaluations: u64,
    started: Instant,
}

impl<'u> Run<'u> {
    fn exhausted(&self) -> bool {
        match self.cfg.budget {
            Budget::Evaluations(n) => self.evaluations >= n,
            Budget::Seconds(s) => self.started.elapsed().as_secs_f64() >= s,
        }
    }

    fn evaluate(&mut self, test: TestCase) -> Individual {
        let trace = execute_with(
            &test,
            self.unit,
            self.cfg.limits,
            ExecOptions {
                observe: false,
                probe: None,
            },
        );
        self.evaluations += 1;
        self.archive.update(self.unit.targets(), &test, &trace);
        Individual { test, trace }
    }

    fn covered(&self) -> BTreeSet<CoverageTarget> {
        self.archive.iter().map(|(t, _)| *t).collect()
    }

    fn all_covered(&self) -> bool {
        self.archive.len() == self.unit.targets().len()
    }

    fn point(&self, generation: u64) -> GenerationPoint {
        let (b, l) = split_counts(self.unit.targets(), &self.covered());
        GenerationPoint {
            generation,
            evaluations: self.evaluations,
            branch_coverage: fraction(b.0, b.1),
            line_coverage: fraction(l.0, l.1),
        }
    }

    fn shrink(&self, mut t: TestCase) -> TestCase {
        if t.len() > self.cfg.max_test_length {
            t.truncate(self.cfg.max_test_length);
        }
        t
    }

    fn offspring(&mut self, a: &TestCase, b: &TestCase) -> (TestCase, TestCase) {
        let op = &self.cfg.operator_config;
        let (o1, o2) = if self.rng.random_bool(op.crossover_rate.clamp(0.0, 1.0)) {
            let mut ch = RngChoices(&mut self.rng);
            let r = match self.cfg.operator {
                CrossoverKind::Spx => spx_with(&self.builder, a, b, &mut ch),
                CrossoverKind::Hmx => hmx_with(&self.builder, a, b, &mut ch, op).map(|(x, y, _)| (x, y)),
            };
            r.unwrap_or_else(|_| (a.clone(), b.clone()))
        } else {
            (a.clone(), b.clone())
        };
        let o1 = mutate_with(&self.builder, &o1, &mut self.rng).map_or(o1, |(t, _)| t);
        let o2 = mutate_with(&self.builder, &o2, &mut self.rng).map_or(o2, |(t, _)| t);
        (self.shrink(o1), self.shrink(o2))
    }
}

fn split_counts(
    targets: &[CoverageTarget],
    covered: &BTreeSet<CoverageTarget>,
) -> ((usize, usize), (usize, usize)) {
    let mut b = (0, 0);
    let mut l = (0, 0);
    for t in targets {
        let slot = if t.is_branch() { &mut b } else { &mut l };
        slot.1 += 1;
        if covered.contains(t) {
            slot.0 += 1;
        }
    }
    (b, l)
}

/// Rank and crowding distance per individual after preference sorting on the
/// active targets.
fn rank(unit: &TypedUnit, pop: &[Individual], active: &BTreeSet<CoverageTarget>) -> (Vec<Vec<usize>>, Vec<usize>, Vec<f64>) {
    let fitness: Vec<Vec<f64>> = pop
        .iter()
        .map(|ind| {
            active
                .iter()
                .map(|t| target_fitness(t, &ind.trace, unit.cdg(t.callable)))
                .collect()
        })
        .collect();
    let lengths: Vec<usize> = pop.iter().map(|i| i.test.len()).collect();
    let fronts = preference_sort(&fitness, &lengths);
    let mut ranks = vec![0; pop.len()];
    let mut crowd = vec![0.0; pop.len()];
    for (r, front) in fronts.iter().enumerate() {
        let d = crowding_distance(&fitness, front);
        for (k, &i) in front.iter().enumerate() {
            ranks[i] = r;
            crowd[i] = d[k];
        }
    }
    (fronts, ranks, crowd)
}

fn tournament(rng: &mut ChaCha8Rng, ranks: &[usize], crowd: &[f64]) -> usize {
    let a = rng.random_range(0..ranks.len());
    let b = rng.random_range(0..ranks.len());
    if ranks[b] < ranks[a] || (ranks[b] == ranks[a] && crowd[b] > crowd[a]) {
        b
    } else {
        a
    }
}

/// Keeps whole fronts while they fit, then the most isolated members of the
/// next one.
fn select(fronts: &[Vec<usize>], crowd: &[f64], size: usize) -> Vec<usize> {
    let mut keep = Vec::with_capacity(size);
    for front in fronts {
        if keep.len() + front.len() <= size {
            keep.extend_from_slice(front);
        } else {
            let mut f = front.clone();
            f.sort_by(|&a, &b| crowd[b].total_cmp(&crowd[a]).then(a.cmp(&b)));
            keep.extend(f.into_iter().take(size - keep.len()));
        }
        if keep.len() >= size {
            break;
        }
    }
    keep
}

/// Runs the search and returns the archived suite with its coverage.
pub fn evolve(unit: &TypedUnit, cfg: &SearchConfig) -> SearchResult {
    evolve_with_archive(unit, cfg).0
}

pub fn evolve_with_archive(unit: &TypedUnit, cfg: &SearchConfig) -> (SearchResult, Archive) {
    let mut run = Run {
        unit,
        cfg,
        builder: Builder::new(unit),
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        archive: Archive::new(),
        evaluations: 0,
        started: Instant::now(),
    };
    let size = cfg.population_size.max(2);
    let mut pop: Vec<Individual> = Vec::with_capacity(size);
    while pop.len() < size && !(!pop.is_empty() && run.exhausted()) {
        let test = match run.builder.random_test(&mut run.rng, cfg.max_test_length) {
            Ok(t) => t,
            Err(_) => break,
        };
        let ind = run.evaluate(test);
        pop.push(ind);
    }
    let mut series = vec![run.point(0)];
    let mut generation = 0;
    while !run.exhausted() && !run.all_covered() && !pop.is_empty() {
        generation += 1;
        let active = active_targets(&run.covered(), unit, unit.targets());
        let (_, ranks, crowd) = rank(unit, &pop, &active);
        let mut children: Vec<Individual> = Vec::with_capacity(size);
        while children.len() < size && !run.exhausted() {
            let a = tournament(&mut run.rng, &ranks, &crowd);
            let b = tournament(&mut run.rng, &ranks, &crowd);
            let (o1, o2) = run.offspring(&pop[a].test, &pop[b].test);
            for o in [o1, o2] {
                if children.len() < size && !run.exhausted() {
                    let ind = run.evaluate(o);
                    children.push(ind);
                }
            }
        }
        pop.extend(children);
        let active = active_targets(&run.covered(), unit, unit.targets());
        let (fronts, _, crowd) = rank(unit, &pop, &active);
        let keep = select(&fronts, &crowd, size);
        let mut slots: Vec<Option<Individual>> = pop.into_iter().map(Some).collect();
        pop = keep.into_iter().filter_map(|i| slots[i].take()).collect();
        series.push(run.point(generation));
    }
    let result = finish(&run, generation, series);
    (result, run.archive)
}

fn finish(run: &Run<'_>, generations: u64, series: Vec<GenerationPoint>) -> SearchResult {
    let unit = run.unit;
    let suite = run.archive.suite();
    let mut replay: BTreeSet<CoverageTarget> = BTreeSet::new();
    for t in &suite {
        let trace = execute_with(
            t,
            unit,
            run.cfg.limits,
            ExecOptions {
                observe: false,
                probe: None,
            },
        );
        replay.extend(unit.targets().iter().filter(|g| trace.covers(g)));
    }
    let archived = run.covered();
    let (b, l) = split_counts(unit.targets(), &replay);
    SearchResult {
        subject: unit.name().to_string(),
        operator: run.cfg.operator,
        seed: run.cfg.seed,
        tests: suite.iter().map(render).collect(),
        suite,
        branch_targets: b.1,
        line_targets: l.1,
        covered_branch_targets: b.0,
        covered_line_targets: l.0,
        branch_coverage: fraction(b.0, b.1),
        line_coverage: fraction(l.0, l.1),
        evaluations_used: run.evaluations,
        generations,
        series,
        consistent: replay == archived,
    }
}
