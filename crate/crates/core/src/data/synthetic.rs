use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Dataset, SortKey, ALWAYS_ON};
use crate::error::{Error, Result};
use crate::types::{ActivityVector, Context, Round};

pub const SHAPES: [&str; 3] = ["circle", "square", "triangle"];
pub const COLORS: [&str; 2] = ["green", "red"];
/// Group order used for activity vectors: shapes, then colors.
pub const SYNTHETIC_GROUPS: [&str; 5] = ["circle", "square", "triangle", "green", "red"];
pub const DEFAULT_PERMUTATION: [&str; 5] = ["green", "square", "red", "triangle", "circle"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    Mean,
    Min,
    Max,
    Permutation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticSpec {
    pub dim: usize,
    pub rounds: usize,
    pub p_shape: [f64; 3],
    pub p_color: [f64; 2],
    pub aggregation: Aggregation,
    /// Group names, highest priority first; used by [`Aggregation::Permutation`].
    pub permutation: Vec<String>,
    pub seed: u64,
    /// Append the five group indicators to the features.
    pub group_indicators: bool,
    /// Append a constant-1 feature.
    pub intercept: bool,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            dim: 20,
            rounds: 100_000,
            p_shape: [0.5, 0.3, 0.2],
            p_color: [0.6, 0.4],
            aggregation: Aggregation::Mean,
            permutation: DEFAULT_PERMUTATION.iter().map(|s| s.to_string()).collect(),
            seed: 0,
            group_indicators: true,
            intercept: true,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.rounds == 0 {
            return bad("synthetic rounds must be >= 1".into());
        }
        if self.dim == 0 {
            return bad("synthetic dim must be >= 1".into());
        }
        for (name, p) in [("p_shape", &self.p_shape[..]), ("p_color", &self.p_color[..])] {
            if p.iter().any(|v| !(*v >= 0.0)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return bad(format!("{name} must be a probability vector, got {p:?}"));
            }
        }
        self.permutation_indices()?;
        Ok(())
    }

    /// The permutation as group indices in [`SYNTHETIC_GROUPS`] order.
    pub fn permutation_indices(&self) -> Result<Vec<usize>> {
        let idx = self
            .permutation
            .iter()
            .map(|name| {
                SYNTHETIC_GROUPS
                    .iter()
                    .position(|g| g == name)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown group `{name}` in permutation")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        if sorted != (0..SYNTHETIC_GROUPS.len()).collect::<Vec<_>>() {
            return Err(Error::InvalidArgument(format!(
                "permutation must list each of {SYNTHETIC_GROUPS:?} once, got {:?}",
                self.permutation
            )));
        }
        Ok(idx)
    }
}

/// Combines an individual's two intermediary labels.
///
/// `shape` indexes [`SHAPES`], `color` indexes [`COLORS`], and `permutation`
/// lists group indices in [`SYNTHETIC_GROUPS`] order, highest priority first.
pub fn aggregate_labels(
    mode: Aggregation,
    shape_label: f64,
    color_label: f64,
    shape: usize,
    color: usize,
    permutation: &[usize],
) -> f64 {
    match mode {
        Aggregation::Mean => 0.5 * (shape_label + color_label),
        Aggregation::Min => shape_label.min(color_label),
        Aggregation::Max => shape_label.max(color_label),
        Aggregation::Permutation => {
            let color_group = SHAPES.len() + color;
            match permutation.iter().find(|&&g| g == shape || g == color_group) {
                Some(&g) if g == shape => shape_label,
                _ => color_label,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticRow {
    pub features: Vec<f64>,
    pub shape: usize,
    pub color: usize,
    pub label: f64,
}

/// Raw synthetic draw plus the per-group weight vectors behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticData {
    pub spec: SyntheticSpec,
    /// `w_g` for each group in [`SYNTHETIC_GROUPS`] order.
    pub group_weights: Vec<Vec<f64>>,
    pub rows: Vec<SyntheticRow>,
}

/// Draws features uniformly from `[0,1]^d`, one shape and one color per
/// individual, a weight vector `w_g ~ U[0,1]^d` per group, intermediary labels
/// `<w_g, x> / d`, and the final label by the aggregation rule.
pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let perm = spec.permutation_indices()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let d = spec.dim;
    let group_weights: Vec<Vec<f64>> = (0..SYNTHETIC_GROUPS.len())
        .map(|_| (0..d).map(|_| rng.random::<f64>()).collect())
        .collect();
    let shape_dist = WeightedIndex::new(spec.p_shape).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let color_dist = WeightedIndex::new(spec.p_color).map_err(|e| Error::InvalidArgument(e.to_string()))?;

    let mut rows = Vec::with_capacity(spec.rounds);
    for _ in 0..spec.rounds {
        let features: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let shape = shape_dist.sample(&mut rng);
        let color = color_dist.sample(&mut rng);
        let inter = |g: usize| -> f64 {
            let s: f64 = group_weights[g].iter().zip(&features).map(|(w, x)| w * x).sum();
            (s / d as f64).clamp(0.0, 1.0)
        };
        let label = aggregate_labels(
            spec.aggregation,
            inter(shape),
            inter(SHAPES.len() + color),
            shape,
            color,
            &perm,
        );
        rows.push(SyntheticRow {
            features,
            shape,
            color,
            label,
        });
    }
    Ok(SyntheticData {
        spec: spec.clone(),
        group_weights,
        rows,
    })
}

impl SyntheticData {
    pub fn group_names() -> Vec<String> {
        SYNTHETIC_GROUPS
            .iter()
            .copied()
            .chain([ALWAYS_ON])
            .map(String::from)
            .collect()
    }

    /// Rounds with the configured extra features and activity
    /// `(3 shape indicators, 2 color indicators, always-on)`.
    pub fn to_dataset(&self) -> Result<Dataset> {
        let d = self.spec.dim;
        let mut feature_names: Vec<String> = (0..d).map(|i| format!("f{i}")).collect();
        if self.spec.group_indicators {
            feature_names.extend(SYNTHETIC_GROUPS.iter().map(|g| format!("is_{g}")));
        }
        if self.spec.intercept {
            feature_names.push("intercept".into());
        }

        let mut rounds = Vec::with_capacity(self.rows.len());
        let mut shape_keys = Vec::with_capacity(self.rows.len());
        let mut color_keys = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut flags = [false; 6];
            flags[row.shape] = true;
            flags[SHAPES.len() + row.color] = true;
            flags[5] = true;
            let mut x = row.features.clone();
            if self.spec.group_indicators {
                x.extend(flags[..5].iter().map(|&f| if f { 1.0 } else { 0.0 }));
            }
            if self.spec.intercept {
                x.push(1.0);
            }
            rounds.push(Round::new(
                Context::new(x)?,
                ActivityVector::from_flags(&flags),
                row.label,
            ));
            shape_keys.push(SortKey::Text(SHAPES[row.shape].into()));
            color_keys.push(SortKey::Text(COLORS[row.color].into()));
        }
        let mut sort_keys = BTreeMap::new();
        sort_keys.insert("shape".to_string(), shape_keys);
        sort_keys.insert("color".to_string(), color_keys);
        Ok(Dataset {
            group_names: Self::group_names(),
            feature_names,
            rounds,
            sort_keys,
        })
    }

    /// Writes `f0..f{d-1},shape,color,label`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (0..self.spec.dim).map(|i| format!("f{i}")).collect();
        header.extend(["shape", "color", "label"].map(String::from));
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec: Vec<String> = row.features.iter().map(|v| v.to_string()).collect();
            rec.push(SHAPES[row.shape].into());
            rec.push(COLORS[row.color].into());
            rec.push(row.label.to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}
