//! Genetic operators: crossover at test and data level, and mutation.

mod choices;
mod crossover;
mod mutate;
mod sbx;
mod splice;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use choices::{CrossoverChoices, RngChoices, ScriptedChoices};
pub use crossover::{
    data_crossover, hmx, hmx_logged, spx, spx_raw, DataCrossoverLog, DataSite, PairKind,
    ParamPair,
};
pub(crate) use crossover::{hmx_with, spx_with};
pub use mutate::{mutate, mutate_with_stats, perturb_literal, MutationStats};
pub(crate) use mutate::mutate_with;
pub use sbx::{sbx_pair, sbx_pair_literal, sbx_typed, spread_factor, SbxDraw};
pub use splice::{string_splice, SpliceDraw};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossoverKind {
    Spx,
    Hmx,
}

impl fmt::Display for CrossoverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CrossoverKind::Spx => "spx",
            CrossoverKind::Hmx => "hmx",
        })
    }
}

impl FromStr for CrossoverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "spx" => Ok(CrossoverKind::Spx),
            "hmx" => Ok(CrossoverKind::Hmx),
            other => Err(format!("unknown operator `{other}` (expected spx or hmx)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorConfig {
    pub crossover_rate: f64,
    pub data_crossover_rate: f64,
    pub eta_c: f64,
    pub sbx_literal_mode: bool,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        OperatorConfig {
            crossover_rate: 0.75,
            data_crossover_rate: 1.0,
            eta_c: 2.5,
            sbx_literal_mode: false,
        }
    }
}
