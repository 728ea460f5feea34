//! Value types shared by every learner: contexts, subsequence activity and rounds.

use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};

/// A dense feature vector revealed at the start of a round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Context(Vec<f64>);

impl Context {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(&value) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "context entry",
                value,
            });
        }
        Ok(Self(values))
    }

    /// The context of a round in a problem without side information.
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Context {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Per-round weights of the time-selection functions, one entry per subsequence.
///
/// Entries lie in `[0, 1]`; binary activity uses exactly 0 or 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActivityVector(Vec<f64>);

impl ActivityVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        for &w in &weights {
            check_unit("activity weight", w)?;
        }
        Ok(Self(weights))
    }

    pub fn from_flags(flags: &[bool]) -> Self {
        Self(flags.iter().map(|&f| if f { 1.0 } else { 0.0 }).collect())
    }

    /// All `k` subsequences active.
    pub fn all(k: usize) -> Self {
        Self(vec![1.0; k])
    }

    /// Only subsequence `index` active, out of `k`.
    pub fn single(k: usize, index: usize) -> Self {
        let mut w = vec![0.0; k];
        w[index] = 1.0;
        Self(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.0[i] > 0.0
    }

    pub fn any_active(&self) -> bool {
        self.0.iter().any(|&w| w > 0.0)
    }

    pub fn is_binary(&self) -> bool {
        self.0.iter().all(|&w| w == 0.0 || w == 1.0)
    }
}

/// One time step: context, subsequence membership and the revealed outcome.
///
/// `Y` is `f64` for regression (a label in `[0, 1]`) and `Vec<f64>` for
/// linear optimization (a cost vector).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Round<Y = f64> {
    pub context: Context,
    pub activity: ActivityVector,
    pub outcome: Y,
}

impl<Y> Round<Y> {
    pub fn new(context: Context, activity: ActivityVector, outcome: Y) -> Self {
        Self {
            context,
            activity,
            outcome,
        }
    }
}

/// Checks that every round has the same context dimension and activity length.
pub fn check_rounds<Y>(rounds: &[Round<Y>]) -> Result<(usize, usize)> {
    let Some(first) = rounds.first() else {
        return Ok((0, 0));
    };
    let (d, k) = (first.context.dim(), first.activity.len());
    for (t, r) in rounds.iter().enumerate() {
        crate::error::check_dim("context", d, r.context.dim()).map_err(|e| e.at_round(t))?;
        crate::error::check_dim("activity vector", k, r.activity.len())
            .map_err(|e| e.at_round(t))?;
    }
    Ok((d, k))
}
