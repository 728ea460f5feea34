//! Benchmarks, the whole-history ridge baseline, regret ledgers and summaries.

mod baseline;
mod benchmark;
mod curve;
mod ledger;
mod summary;

pub use baseline::baseline_run;
pub use benchmark::{
    best_action_hindsight, best_linear_hindsight, linear_policy_loss, linear_policy_loss_series,
    BenchmarkModel, FinitePolicySet,
};
pub use curve::{regret_curve, CurvePoint};
pub use ledger::{GroupLedger, RegretLedger, RunMetadata};
pub use summary::{mean_std, summary_table, GroupSummary, LedgerSummary, SummaryRow};
