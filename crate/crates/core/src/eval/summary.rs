use serde::{Deserialize, Serialize};

use super::ledger::{RegretLedger, RunMetadata};
use crate::error::{Error, Result};

/// Final per-group numbers of one finished run; what `report` re-aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerSummary {
    pub meta: RunMetadata,
    pub groups: Vec<GroupSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub name: String,
    pub size: f64,
    pub alg_loss: f64,
    pub baseline_loss: f64,
    pub benchmark_loss: f64,
}

impl GroupSummary {
    pub fn alg_regret(&self) -> f64 {
        self.alg_loss - self.benchmark_loss
    }

    pub fn baseline_regret(&self) -> f64 {
        self.baseline_loss - self.benchmark_loss
    }
}

impl LedgerSummary {
    /// Requires the baseline and every benchmark to be attached.
    pub fn from_ledger(ledger: &RegretLedger) -> Result<Self> {
        let groups = ledger
            .groups()
            .iter()
            .map(|g| {
                let missing = |what: &str| {
                    Error::InvalidArgument(format!("group `{}` has no {what}", g.name))
                };
                Ok(GroupSummary {
                    name: g.name.clone(),
                    size: g.mass,
                    alg_loss: g.final_alg_loss(),
                    baseline_loss: g.final_baseline_loss().ok_or_else(|| missing("baseline"))?,
                    benchmark_loss: g.benchmark.ok_or_else(|| missing("benchmark"))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            meta: ledger.meta.clone(),
            groups,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub group: String,
    pub size: f64,
    pub baseline_regret_mean: f64,
    pub baseline_regret_std: f64,
    pub alg_regret_mean: f64,
    pub alg_regret_std: f64,
    pub benchmark_loss: f64,
}

/// Mean and sample (n-1) standard deviation; the deviation of one value is 0.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Relative tolerance for "same benchmark across seeds": shuffling only
/// changes floating-point summation order.
const BENCHMARK_RTOL: f64 = 1e-6;

/// Aggregates runs over seeds into one row per group.
pub fn summary_table(ledgers: &[LedgerSummary]) -> Result<Vec<SummaryRow>> {
    let first = ledgers
        .first()
        .ok_or_else(|| Error::InvalidArgument("no ledgers to summarize".into()))?;
    let names: Vec<&str> = first.groups.iter().map(|g| g.name.as_str()).collect();
    for l in ledgers {
        let other: Vec<&str> = l.groups.iter().map(|g| g.name.as_str()).collect();
        if other != names {
            return Err(Error::Data(format!(
                "inconsistent group sets across ledgers: {names:?} vs {other:?} (seed {})",
                l.meta.seed
            )));
        }
    }

    let mut rows = Vec::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        let col: Vec<&GroupSummary> = ledgers.iter().map(|l| &l.groups[i]).collect();
        let bench = col[0].benchmark_loss;
        if let Some(g) = col
            .iter()
            .find(|g| (g.benchmark_loss - bench).abs() > BENCHMARK_RTOL * bench.abs().max(1.0))
        {
            return Err(Error::Data(format!(
                "benchmark loss for `{name}` differs across runs: {bench} vs {}",
                g.benchmark_loss
            )));
        }
        let (b_mean, b_std) = mean_std(&col.iter().map(|g| g.baseline_regret()).collect::<Vec<_>>());
        let (a_mean, a_std) = mean_std(&col.iter().map(|g| g.alg_regret()).collect::<Vec<_>>());
        rows.push(SummaryRow {
            group: name.to_string(),
            size: col[0].size,
            baseline_regret_mean: b_mean,
            baseline_regret_std: b_std,
            alg_regret_mean: a_mean,
            alg_regret_std: a_std,
            benchmark_loss: bench,
        });
    }
    Ok(rows)
}
