//! Experiment configuration: JSON, unknown keys rejected.

use std::path::{Path, PathBuf};

use groupwise_core::data::{PreprocessSpec, SyntheticSpec};
use groupwise_core::PlayMode;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Regression,
    Linopt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    MedicalCost,
    AdultIncome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvSource {
    /// Relative paths are resolved against the config file's directory.
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preprocess: Option<PreprocessSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleConfig {
    Hypercube { dim: usize },
    /// Edge list as `[src, dst]` pairs; node 0 is the source, the largest the sink.
    Dag { edges: Vec<(usize, usize)> },
    /// File of `src dst` lines.
    DagFile { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinoptSpec {
    pub oracle: OracleConfig,
    pub rounds: usize,
    /// Probability of each group; every round belongs to exactly one.
    pub group_probs: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    Synthetic(SyntheticSpec),
    Csv(CsvSource),
    LinoptSynthetic(LinoptSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SortSpec {
    pub column: String,
    #[serde(default = "yes")]
    pub ascending: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerParams {
    /// Ridge penalty for the forecasters and the baseline.
    #[serde(default = "one")]
    pub lambda: f64,
    /// FTPL perturbation scale; tuned from the horizon when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// FTPL horizon; defaults to the number of rounds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

fn one() -> f64 {
    1.0
}

impl Default for LearnerParams {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            epsilon: None,
            horizon: None,
        }
    }
}

fn default_curve_points() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    pub data: DataSource,
    /// Each seed shuffles the rounds; a sort, if given, is applied after
    /// the shuffle and is stable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sort_by: Option<SortSpec>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub hedge_mode: PlayMode,
    #[serde(default)]
    pub learner: LearnerParams,
    #[serde(default = "default_curve_points")]
    pub curve_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// Reads and parses; relative data paths are resolved against the file's directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        match &mut cfg.data {
            DataSource::Csv(c) => resolve(&mut c.path),
            DataSource::LinoptSynthetic(LinoptSpec {
                oracle: OracleConfig::DagFile { path },
                ..
            }) => resolve(path),
            _ => {}
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if self.curve_points == 0 {
            return bad("curve_points must be at least 1".into());
        }
        if !(self.learner.lambda > 0.0 && self.learner.lambda.is_finite()) {
            return bad(format!("lambda must be > 0, got {}", self.learner.lambda));
        }
        if let Some(e) = self.learner.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                return bad(format!("epsilon must be > 0, got {e}"));
            }
        }
        match (&self.task, &self.data) {
            (Task::Regression, DataSource::Synthetic(s)) => s.validate().map_err(|e| CliError::Config(e.to_string()))?,
            (Task::Regression, DataSource::Csv(c)) => {
                if c.preset.is_some() == c.preprocess.is_some() {
                    return bad("csv source needs exactly one of `preset` or `preprocess`".into());
                }
            }
            (Task::Linopt, DataSource::LinoptSynthetic(l)) => {
                if l.rounds == 0 {
                    return bad("rounds must be at least 1".into());
                }
                let total: f64 = l.group_probs.iter().sum();
                if l.group_probs.is_empty()
                    || l.group_probs.iter().any(|p| !(*p >= 0.0))
                    || (total - 1.0).abs() > 1e-9
                {
                    return bad(format!("group_probs must be a probability vector, got {:?}", l.group_probs));
                }
                if self.sort_by.is_some() {
                    return bad("sort_by is only supported for regression".into());
                }
            }
            (task, _) => return bad(format!("data source does not match task {task:?}")),
        }
        Ok(())
    }

    /// The config that determines outputs: everything except `out_dir`.
    pub fn hashed_view(&self) -> Self {
        Self {
            out_dir: None,
            ..self.clone()
        }
    }

    /// SHA-256 over the canonical JSON of [`Self::hashed_view`].
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.hashed_view()).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"task":"regression","data":{"synthetic":{"rounds":10}},"seeds":[0]}"#;

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::from_json(MINIMAL).unwrap();
        c.validate().unwrap();
        assert_eq!(c.curve_points, 200);
        assert_eq!(c.learner.lambda, 1.0);
        assert_eq!(c.hedge_mode, PlayMode::Sample);
        let DataSource::Synthetic(s) = &c.data else { panic!() };
        assert_eq!(s.dim, 20);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("\"seeds\"", "\"sedes\":1,\"seeds\"");
        assert!(matches!(ExperimentConfig::from_json(&text), Err(CliError::Config(_))));
        let nested = MINIMAL.replace("\"rounds\":10", "\"rounds\":10,\"rouds\":3");
        assert!(ExperimentConfig::from_json(&nested).is_err());
    }

    #[test]
    fn round_trip_and_hash() {
        let c = ExperimentConfig::from_json(MINIMAL).unwrap();
        let back = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, back);
        assert_eq!(c.hash(), back.hash());
        let moved = ExperimentConfig {
            out_dir: Some("elsewhere".into()),
            ..c.clone()
        };
        assert_eq!(c.hash(), moved.hash());
        let reseeded = ExperimentConfig {
            seeds: vec![1],
            ..c.clone()
        };
        assert_ne!(c.hash(), reseeded.hash());
    }

    #[test]
    fn zero_rounds_is_a_config_error() {
        let c = ExperimentConfig::from_json(&MINIMAL.replace("10", "0")).unwrap();
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
    }

    #[test]
    fn task_and_source_must_agree() {
        let c = ExperimentConfig::from_json(&MINIMAL.replace("regression", "linopt")).unwrap();
        assert!(c.validate().is_err());
    }
}
