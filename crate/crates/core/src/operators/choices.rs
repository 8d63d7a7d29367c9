//! Random decisions taken by the crossover operators, behind a trait so that
//! tests can script them.

use std::collections::VecDeque;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sbx::SbxDraw;
use super::splice::SpliceDraw;

pub trait CrossoverChoices {
    /// Cut points `(alpha, beta)` with `1 <= alpha < n1`, `1 <= beta < n2`.
    fn cut_points(&mut self, n1: usize, n2: usize) -> (usize, usize);
    /// Index of the instance picked among `count` matches.
    fn pick_instance(&mut self, count: usize) -> usize;
    /// Whether data-level crossover runs for one matched callable.
    fn apply_data_crossover(&mut self, rate: f64) -> bool;
    fn sbx_draw(&mut self, eta_c: f64) -> SbxDraw;
    fn splice_draw(&mut self, x_len: usize, y_len: usize) -> SpliceDraw;
    /// Randomness for reference repair.
    fn rng(&mut self) -> &mut dyn RngCore;
}

/// Draws every decision from one generator.
pub struct RngChoices<'r>(pub &'r mut dyn RngCore);

impl CrossoverChoices for RngChoices<'_> {
    fn cut_points(&mut self, n1: usize, n2: usize) -> (usize, usize) {
        (self.0.random_range(1..n1), self.0.random_range(1..n2))
    }

    fn pick_instance(&mut self, count: usize) -> usize {
        self.0.random_range(0..count)
    }

    fn apply_data_crossover(&mut self, rate: f64) -> bool {
        self.0.random_bool(rate.clamp(0.0, 1.0))
    }

    fn sbx_draw(&mut self, eta_c: f64) -> SbxDraw {
        SbxDraw::sample(self.0, eta_c)
    }

    fn splice_draw(&mut self, x_len: usize, y_len: usize) -> SpliceDraw {
        SpliceDraw::sample(self.0, x_len, y_len)
    }

    fn rng(&mut self) -> &mut dyn RngCore {
        self.0
    }
}

/// Replays queued decisions; an exhausted queue falls back to the first
/// option (cut at 1, instance 0, apply, `u = 0.5`, cut at 0).
pub struct ScriptedChoices {
    pub cuts: VecDeque<(usize, usize)>,
    pub picks: VecDeque<usize>,
    pub applies: VecDeque<bool>,
    pub sbx: VecDeque<(f64, bool)>,
    pub splices: VecDeque<(usize, usize)>,
    repair_rng: ChaCha8Rng,
}

impl ScriptedChoices {
    pub fn new(repair_seed: u64) -> Self {
        ScriptedChoices {
            cuts: VecDeque::new(),
            picks: VecDeque::new(),
            applies: VecDeque::new(),
            sbx: VecDeque::new(),
            splices: VecDeque::new(),
            repair_rng: ChaCha8Rng::seed_from_u64(repair_seed),
        }
    }
}

impl CrossoverChoices for ScriptedChoices {
    fn cut_points(&mut self, n1: usize, n2: usize) -> (usize, usize) {
        let (a, b) = self.cuts.pop_front().unwrap_or((1, 1));
        (a.clamp(1, n1 - 1), b.clamp(1, n2 - 1))
    }

    fn pick_instance(&mut self, count: usize) -> usize {
        self.picks.pop_front().unwrap_or(0).min(count - 1)
    }

    fn apply_data_crossover(&mut self, _rate: f64) -> bool {
        self.applies.pop_front().unwrap_or(true)
    }

    fn sbx_draw(&mut self, eta_c: f64) -> SbxDraw {
        let (u, b) = self.sbx.pop_front().unwrap_or((0.5, false));
        SbxDraw::new(u, b, eta_c)
    }

    fn splice_draw(&mut self, x_len: usize, y_len: usize) -> SpliceDraw {
        let (x_i, y_i) = self.splices.pop_front().unwrap_or((0, 0));
        SpliceDraw {
            x_i: x_i.min(x_len - 1),
            y_i: y_i.min(y_len - 1),
        }
    }

    fn rng(&mut self) -> &mut dyn RngCore {
        &mut self.repair_rng
    }
}
