//! Datasets: the shapes-and-colors synthetic generator, CSV ingestion with
//! group rules, and round ordering.

mod ingest;
mod order;
pub mod presets;
mod synthetic;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use ingest::{ingest_csv, ingest_reader, GroupRule, PreprocessSpec, Rule, Scaler};
pub use order::{order_rounds, OrderMode};
pub use synthetic::{
    aggregate_labels, gen_synthetic, Aggregation, SyntheticData, SyntheticRow, SyntheticSpec,
    COLORS, DEFAULT_PERMUTATION, SHAPES, SYNTHETIC_GROUPS,
};

use crate::types::Round;

/// Name of the subsequence that is active on every round.
pub const ALWAYS_ON: &str = "always_on";

/// A value a dataset can be sorted by.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SortKey {
    Num(f64),
    Text(String),
}

/// Rounds ready for a run, with group names (the last is always
/// [`ALWAYS_ON`]) and the original column values kept for sorting.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub group_names: Vec<String>,
    pub feature_names: Vec<String>,
    pub rounds: Vec<Round>,
    pub sort_keys: BTreeMap<String, Vec<SortKey>>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn num_groups(&self) -> usize {
        self.group_names.len()
    }

    /// Reorders rounds and sort keys by `perm` (new position -> old index).
    pub fn permute(&mut self, perm: &[usize]) {
        debug_assert_eq!(perm.len(), self.rounds.len());
        self.rounds = perm.iter().map(|&i| self.rounds[i].clone()).collect();
        for keys in self.sort_keys.values_mut() {
            *keys = perm.iter().map(|&i| keys[i].clone()).collect();
        }
    }
}
