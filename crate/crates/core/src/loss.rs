//! Bounded losses and the two prediction problems built on them.

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, check_unit, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Squared,
    Linear,
}

/// Which loss is in play and the scale that maps it into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    pub kind: LossKind,
    pub normalization: f64,
}

/// A realized loss. `normalized` is in `[0, 1]` and drives the hedge layer;
/// `raw` is what regret is accounted in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossValue {
    pub raw: f64,
    pub normalized: f64,
}

pub fn clip_unit(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite {
            what: "prediction",
            value: x,
        });
    }
    Ok(x.clamp(0.0, 1.0))
}

pub fn squared_loss(prediction: f64, label: f64) -> Result<f64> {
    check_unit("prediction", prediction)?;
    check_unit("label", label)?;
    let diff = prediction - label;
    Ok(diff * diff)
}

pub fn linear_loss(action: &[f64], cost: &[f64], normalization: f64) -> Result<LossValue> {
    check_dim("cost vector", action.len(), cost.len())?;
    if !(normalization > 0.0 && normalization.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "normalization must be positive, got {normalization}"
        )));
    }
    let raw: f64 = action.iter().zip(cost).map(|(a, c)| a * c).sum();
    let normalized = (raw + normalization) / (2.0 * normalization);
    if !(-1e-12..=1.0 + 1e-12).contains(&normalized) {
        return Err(Error::OutOfRange {
            what: "inner product",
            value: raw,
            lo: -normalization,
            hi: normalization,
        });
    }
    Ok(LossValue {
        raw,
        normalized: normalized.clamp(0.0, 1.0),
    })
}

/// A prediction problem: how proposals are finalized, scored and mixed.
pub trait Problem {
    type Action: Clone + Debug;
    type Outcome: Clone + Debug;

    /// Maps a learner's raw proposal onto the playable range.
    fn finalize(&self, proposal: &Self::Action) -> Result<Self::Action>;

    fn loss(&self, action: &Self::Action, outcome: &Self::Outcome) -> Result<LossValue>;

    /// Probability-weighted combination of finalized actions.
    fn mix(&self, actions: &[Self::Action], probabilities: &[f64]) -> Result<Self::Action>;

    fn loss_spec(&self) -> LossSpec;
}

/// Online regression with squared loss; predictions are clipped to `[0, 1]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Regression;

impl Problem for Regression {
    type Action = f64;
    type Outcome = f64;

    fn finalize(&self, proposal: &f64) -> Result<f64> {
        clip_unit(*proposal)
    }

    fn loss(&self, action: &f64, outcome: &f64) -> Result<LossValue> {
        let v = squared_loss(*action, *outcome)?;
        Ok(LossValue {
            raw: v,
            normalized: v,
        })
    }

    fn mix(&self, actions: &[f64], probabilities: &[f64]) -> Result<f64> {
        check_dim("mixture weights", actions.len(), probabilities.len())?;
        let avg: f64 = actions.iter().zip(probabilities).map(|(a, p)| a * p).sum();
        clip_unit(avg)
    }

    fn loss_spec(&self) -> LossSpec {
        LossSpec {
            kind: LossKind::Squared,
            normalization: 1.0,
        }
    }
}

/// Online linear optimization with loss `<a, c>`, affinely rescaled into
/// `[0, 1]` by `normalization >= max |<a, c>|`.
#[derive(Debug, Clone, Copy)]
pub struct LinearOptimization {
    pub normalization: f64,
}

impl LinearOptimization {
    /// Scale from the action-set and cost-set bounds: `|<a, c>| <= max|a|_inf * max|c|_1`.
    pub fn from_bounds(max_action_entry: f64, bound_c: f64) -> Self {
        Self {
            normalization: (max_action_entry * bound_c).max(f64::MIN_POSITIVE),
        }
    }
}

impl Problem for LinearOptimization {
    type Action = Vec<f64>;
    type Outcome = Vec<f64>;

    fn finalize(&self, proposal: &Vec<f64>) -> Result<Vec<f64>> {
        Ok(proposal.clone())
    }

    fn loss(&self, action: &Vec<f64>, outcome: &Vec<f64>) -> Result<LossValue> {
        linear_loss(action, outcome, self.normalization)
    }

    /// A point in the convex hull; its linear loss equals the expected loss
    /// of sampling.
    fn mix(&self, actions: &[Vec<f64>], probabilities: &[f64]) -> Result<Vec<f64>> {
        check_dim("mixture weights", actions.len(), probabilities.len())?;
        let d = actions.first().map_or(0, Vec::len);
        let mut out = vec![0.0; d];
        for (a, &p) in actions.iter().zip(probabilities) {
            check_dim("action", d, a.len())?;
            for (o, v) in out.iter_mut().zip(a) {
                *o += p * v;
            }
        }
        Ok(out)
    }

    fn loss_spec(&self) -> LossSpec {
        LossSpec {
            kind: LossKind::Linear,
            normalization: self.normalization,
        }
    }
}
