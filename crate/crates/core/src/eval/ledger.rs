use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::hedge::PlayMode;
use crate::types::ActivityVector;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub seed: u64,
    pub mode: PlayMode,
    pub config_hash: String,
}

/// Per-subsequence accounting for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupLedger {
    pub name: String,
    /// `T_I = sum_t I(t)`.
    pub mass: f64,
    /// Rounds with `I(t) > 0`.
    pub active_rounds: usize,
    /// Cumulative `sum_{s<=t} I(s) * loss(p_s)`, one entry per round.
    pub alg: Vec<f64>,
    /// Cumulative loss of this meta-expert's own proposals on its rounds.
    pub own_loss: f64,
    /// Cumulative baseline loss series, once attached.
    pub baseline: Option<Vec<f64>>,
    /// Best-in-hindsight loss, once finalized.
    pub benchmark: Option<f64>,
}

impl GroupLedger {
    pub fn final_alg_loss(&self) -> f64 {
        self.alg.last().copied().unwrap_or(0.0)
    }

    pub fn final_baseline_loss(&self) -> Option<f64> {
        self.baseline.as_ref().map(|b| b.last().copied().unwrap_or(0.0))
    }

    /// Algorithm loss minus benchmark loss.
    pub fn alg_regret(&self) -> Option<f64> {
        self.benchmark.map(|b| self.final_alg_loss() - b)
    }

    pub fn baseline_regret(&self) -> Option<f64> {
        Some(self.final_baseline_loss()? - self.benchmark?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretLedger {
    groups: Vec<GroupLedger>,
    rounds: usize,
    pub meta: RunMetadata,
}

impl RegretLedger {
    pub fn new(k: usize, capacity: usize, seed: u64, mode: PlayMode) -> Self {
        let groups = (0..k)
            .map(|i| GroupLedger {
                name: i.to_string(),
                mass: 0.0,
                active_rounds: 0,
                alg: Vec::with_capacity(capacity),
                own_loss: 0.0,
                baseline: None,
                benchmark: None,
            })
            .collect();
        Self {
            groups,
            rounds: 0,
            meta: RunMetadata {
                seed,
                mode,
                config_hash: String::new(),
            },
        }
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn num_rounds(&self) -> usize {
        self.rounds
    }

    pub fn groups(&self) -> &[GroupLedger] {
        &self.groups
    }

    pub fn group(&self, i: usize) -> &GroupLedger {
        &self.groups[i]
    }

    pub fn record_round(&mut self, activity: &ActivityVector, incurred: f64, own_losses: &[f64]) {
        for (i, g) in self.groups.iter_mut().enumerate() {
            let w = activity.get(i);
            let prev = g.alg.last().copied().unwrap_or(0.0);
            if w > 0.0 {
                g.mass += w;
                g.active_rounds += 1;
                g.own_loss += w * own_losses[i];
                g.alg.push(prev + w * incurred);
            } else {
                g.alg.push(prev);
            }
        }
        self.rounds += 1;
    }

    pub fn set_names<S: AsRef<str>>(&mut self, names: &[S]) -> Result<()> {
        check_dim("group names", self.groups.len(), names.len())?;
        for (g, n) in self.groups.iter_mut().zip(names) {
            g.name = n.as_ref().to_string();
        }
        Ok(())
    }

    pub fn set_config_hash(&mut self, hash: impl Into<String>) {
        self.meta.config_hash = hash.into();
    }

    /// Attaches per-subsequence cumulative baseline series.
    pub fn attach_baseline(&mut self, series: Vec<Vec<f64>>) -> Result<()> {
        check_dim("baseline groups", self.groups.len(), series.len())?;
        for s in &series {
            check_dim("baseline series", self.rounds, s.len())?;
        }
        for (g, s) in self.groups.iter_mut().zip(series) {
            g.baseline = Some(s);
        }
        Ok(())
    }

    pub fn set_benchmark(&mut self, i: usize, loss: f64) -> Result<()> {
        if !loss.is_finite() {
            return Err(Error::NonFinite {
                what: "benchmark loss",
                value: loss,
            });
        }
        self.groups
            .get_mut(i)
            .ok_or_else(|| Error::InvalidArgument(format!("no subsequence {i}")))?
            .benchmark = Some(loss);
        Ok(())
    }

    /// Checks that every series is nondecreasing and as long as the run.
    pub fn validate(&self) -> Result<()> {
        for g in &self.groups {
            for series in std::iter::once(&g.alg).chain(g.baseline.as_ref()) {
                check_dim("loss series", self.rounds, series.len())?;
                if let Some(t) = series.windows(2).position(|w| w[1] < w[0]) {
                    return Err(Error::Invariant(format!(
                        "cumulative loss of `{}` decreases at round {}",
                        g.name,
                        t + 1
                    )));
                }
            }
        }
        Ok(())
    }
}
