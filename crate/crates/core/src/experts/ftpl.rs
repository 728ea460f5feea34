use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{LinearOracle, Learner};
use crate::error::{check_dim, Error, Result};
use crate::types::Context;

/// Follow-the-Perturbed-Leader state for online linear optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct FtplState {
    cum_cost: Vec<f64>,
    epsilon: f64,
    bound_a: f64,
    bound_c: f64,
    oracle: LinearOracle,
}

impl FtplState {
    pub fn new(oracle: LinearOracle, epsilon: f64, bound_a: f64, bound_c: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("epsilon must be > 0, got {epsilon}")));
        }
        if !(bound_a > 0.0 && bound_c > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "bounds must be positive, got A={bound_a}, C={bound_c}"
            )));
        }
        Ok(Self {
            cum_cost: vec![0.0; oracle.dim()],
            epsilon,
            bound_a,
            bound_c,
            oracle,
        })
    }

    /// Perturbation scale `sqrt(A / (C^2 T))` for a known horizon `T`.
    pub fn tuned_epsilon(bound_a: f64, bound_c: f64, horizon: usize) -> f64 {
        (bound_a / (bound_c * bound_c * horizon.max(1) as f64)).sqrt()
    }

    /// Uses the oracle's action diameter (at least 1) for `A` and the tuned epsilon.
    pub fn tuned(oracle: LinearOracle, bound_c: f64, horizon: usize) -> Result<Self> {
        // a single-action set has diameter 0; any positive scale works there
        let bound_a = oracle.action_diameter().max(1.0);
        Self::new(oracle, Self::tuned_epsilon(bound_a, bound_c, horizon), bound_a, bound_c)
    }

    pub fn cum_cost(&self) -> &[f64] {
        &self.cum_cost
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn bound_a(&self) -> f64 {
        self.bound_a
    }

    pub fn bound_c(&self) -> f64 {
        self.bound_c
    }

    pub fn oracle(&self) -> &LinearOracle {
        &self.oracle
    }

    /// `oracle(cum_cost - p)` with `p` uniform on `[0, 1/epsilon]^d`.
    pub fn predict<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        let scale = 1.0 / self.epsilon;
        let perturbed: Vec<f64> = self
            .cum_cost
            .iter()
            .map(|&c| c - scale * rng.random::<f64>())
            .collect();
        self.oracle.minimize(&perturbed)
    }

    pub fn update(&mut self, cost: &[f64], weight: f64) -> Result<()> {
        check_dim("cost vector", self.cum_cost.len(), cost.len())?;
        let norm: f64 = cost.iter().map(|c| c.abs()).sum();
        if !norm.is_finite() || norm > self.bound_c * (1.0 + 1e-12) {
            return Err(Error::CostNormExceeded {
                norm,
                bound: self.bound_c,
            });
        }
        for (s, c) in self.cum_cost.iter_mut().zip(cost) {
            *s += weight * c;
        }
        Ok(())
    }
}

/// FTPL with its own seeded randomness, usable as a meta-expert.
#[derive(Debug, Clone)]
pub struct FtplLearner {
    state: FtplState,
    rng: ChaCha8Rng,
}

impl FtplLearner {
    pub fn new(state: FtplState, seed: u64) -> Self {
        Self {
            state,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn state(&self) -> &FtplState {
        &self.state
    }
}

impl Learner for FtplLearner {
    type Action = Vec<f64>;
    type Outcome = Vec<f64>;

    fn predict(&mut self, _context: &Context) -> Result<Vec<f64>> {
        self.state.predict(&mut self.rng)
    }

    fn update(&mut self, _context: &Context, outcome: &Vec<f64>, weight: f64) -> Result<()> {
        self.state.update(outcome, weight)
    }
}
