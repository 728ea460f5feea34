use super::Learner;
use crate::error::{check_dim, check_unit, Error, Result};
use crate::linalg::dot;
use crate::loss::{clip_unit, squared_loss};
use crate::types::Context;

/// Exponential weights over a finite class of linear regression policies.
///
/// Each policy predicts `clip(<theta, x>)`; the learner plays the weighted
/// average of those predictions.
#[derive(Debug, Clone)]
pub struct ExpWeights {
    policies: Vec<Vec<f64>>,
    eta: f64,
    log_weights: Vec<f64>,
}

impl ExpWeights {
    pub fn new(policies: Vec<Vec<f64>>, eta: f64) -> Result<Self> {
        if policies.is_empty() {
            return Err(Error::InvalidArgument("empty policy class".into()));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidArgument(format!("eta must be > 0, got {eta}")));
        }
        let d = policies[0].len();
        for p in &policies {
            check_dim("policy", d, p.len())?;
        }
        let n = policies.len();
        Ok(Self {
            policies,
            eta,
            log_weights: vec![0.0; n],
        })
    }

    /// Learning rate `sqrt(8 ln N / T)` for a horizon `T`.
    pub fn tuned(policies: Vec<Vec<f64>>, horizon: usize) -> Result<Self> {
        let n = policies.len().max(1) as f64;
        let eta = (8.0 * n.ln().max(f64::MIN_POSITIVE) / horizon.max(1) as f64).sqrt();
        Self::new(policies, eta)
    }

    pub fn policy_prediction(&self, j: usize, x: &[f64]) -> Result<f64> {
        check_dim("context", self.policies[j].len(), x.len())?;
        clip_unit(dot(&self.policies[j], x))
    }

    pub fn weights(&self) -> Vec<f64> {
        let max = self.log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = self.log_weights.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|v| v / total).collect()
    }
}

impl Learner for ExpWeights {
    type Action = f64;
    type Outcome = f64;

    fn predict(&mut self, context: &Context) -> Result<f64> {
        let w = self.weights();
        let mut p = 0.0;
        for (j, wj) in w.iter().enumerate() {
            p += wj * self.policy_prediction(j, context.values())?;
        }
        clip_unit(p)
    }

    fn update(&mut self, context: &Context, outcome: &f64, weight: f64) -> Result<()> {
        check_unit("label", *outcome)?;
        for j in 0..self.policies.len() {
            let loss = squared_loss(self.policy_prediction(j, context.values())?, *outcome)?;
            self.log_weights[j] -= self.eta * weight * loss;
        }
        Ok(())
    }
}
