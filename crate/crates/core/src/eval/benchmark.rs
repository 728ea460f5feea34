use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::experts::LinearOracle;
use crate::linalg::{dot, NormalEquations};
use crate::loss::clip_unit;
use crate::types::Round;

/// The best fixed policy on a subsequence and its cumulative loss there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkModel {
    /// Linear coefficients (regression) or a fixed action (linear optimization).
    pub policy: Vec<f64>,
    pub loss: f64,
}

/// Unregularized least squares over the rounds active in `subsequence`,
/// weighted by activity, scored with unclipped `<theta, x>`.
pub fn best_linear_hindsight(rounds: &[Round], subsequence: usize) -> Result<BenchmarkModel> {
    let dim = rounds.first().map_or(0, |r| r.context.dim());
    let mut ne = NormalEquations::new(dim);
    for r in rounds {
        let w = activity_of(r, subsequence)?;
        if w > 0.0 {
            ne.add(r.context.values(), r.outcome, w)?;
        }
    }
    let theta: Vec<f64> = ne.solve(0.0)?.iter().copied().collect();
    let loss = linear_policy_loss(rounds, subsequence, &theta)?;
    Ok(BenchmarkModel { policy: theta, loss })
}

fn activity_of<Y>(r: &Round<Y>, subsequence: usize) -> Result<f64> {
    r.activity.weights().get(subsequence).copied().ok_or_else(|| {
        Error::InvalidArgument(format!(
            "subsequence {subsequence} out of range for {} time-selection functions",
            r.activity.len()
        ))
    })
}

/// `sum_t I(t) (<theta, x_t> - y_t)^2` without clipping.
pub fn linear_policy_loss(rounds: &[Round], subsequence: usize, theta: &[f64]) -> Result<f64> {
    Ok(linear_policy_loss_series(rounds, subsequence, theta)?
        .last()
        .copied()
        .unwrap_or(0.0))
}

/// Cumulative per-round version of [`linear_policy_loss`].
pub fn linear_policy_loss_series(
    rounds: &[Round],
    subsequence: usize,
    theta: &[f64],
) -> Result<Vec<f64>> {
    let mut cum = 0.0;
    let mut out = Vec::with_capacity(rounds.len());
    for r in rounds {
        let w = activity_of(r, subsequence)?;
        if w > 0.0 {
            check_dim("context", theta.len(), r.context.dim())?;
            let e = dot(theta, r.context.values()) - r.outcome;
            cum += w * e * e;
        }
        out.push(cum);
    }
    Ok(out)
}

/// Oracle applied to the activity-weighted sum of cost vectors.
pub fn best_action_hindsight(
    rounds: &[Round<Vec<f64>>],
    subsequence: usize,
    oracle: &LinearOracle,
) -> Result<BenchmarkModel> {
    let d = oracle.dim();
    let mut total = vec![0.0; d];
    for r in rounds {
        let w = activity_of(r, subsequence)?;
        check_dim("cost vector", d, r.outcome.len())?;
        if w > 0.0 {
            for (s, c) in total.iter_mut().zip(&r.outcome) {
                *s += w * c;
            }
        }
    }
    let action = oracle.minimize(&total)?;
    let loss = dot(&action, &total);
    Ok(BenchmarkModel { policy: action, loss })
}

/// An explicit, small policy class for brute-force checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinitePolicySet {
    policies: Vec<Vec<f64>>,
}

impl FinitePolicySet {
    pub fn new(policies: Vec<Vec<f64>>) -> Result<Self> {
        if policies.is_empty() {
            return Err(Error::InvalidArgument("policy set must be nonempty".into()));
        }
        Ok(Self { policies })
    }

    pub fn policies(&self) -> &[Vec<f64>] {
        &self.policies
    }

    /// Loss of each linear policy on `subsequence`; predictions are clipped
    /// to `[0, 1]` when `clip` is set.
    pub fn regression_losses(&self, rounds: &[Round], subsequence: usize, clip: bool) -> Result<Vec<f64>> {
        let mut losses = vec![0.0; self.policies.len()];
        for r in rounds {
            let w = activity_of(r, subsequence)?;
            if w == 0.0 {
                continue;
            }
            for (l, theta) in losses.iter_mut().zip(&self.policies) {
                check_dim("context", theta.len(), r.context.dim())?;
                let raw = dot(theta, r.context.values());
                let p = if clip { clip_unit(raw)? } else { raw };
                *l += w * (p - r.outcome) * (p - r.outcome);
            }
        }
        Ok(losses)
    }

    /// The policy with least regression loss on `subsequence` (first on ties).
    pub fn best_regression(&self, rounds: &[Round], subsequence: usize, clip: bool) -> Result<BenchmarkModel> {
        let losses = self.regression_losses(rounds, subsequence, clip)?;
        let (j, &loss) = losses
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        Ok(BenchmarkModel {
            policy: self.policies[j].clone(),
            loss,
        })
    }

    /// The fixed action with least cumulative linear loss on `subsequence`.
    pub fn best_action(&self, rounds: &[Round<Vec<f64>>], subsequence: usize) -> Result<BenchmarkModel> {
        let mut best: Option<BenchmarkModel> = None;
        for a in &self.policies {
            let mut loss = 0.0;
            for r in rounds {
                let w = activity_of(r, subsequence)?;
                check_dim("cost vector", a.len(), r.outcome.len())?;
                loss += w * dot(a, &r.outcome);
            }
            if best.as_ref().is_none_or(|b| loss < b.loss) {
                best = Some(BenchmarkModel {
                    policy: a.clone(),
                    loss,
                });
            }
        }
        Ok(best.expect("nonempty"))
    }
}
