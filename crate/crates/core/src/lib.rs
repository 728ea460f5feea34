//! Online prediction with regret guarantees on every subsequence at once.
//!
//! [`groupwise::GroupwiseLearner`] runs one external-regret learner per
//! time-selection function (for example one per demographic group, plus an
//! always-on subsequence) and aggregates their proposals with
//! [`hedge::AdaNormalHedge`]. Learners for online linear regression
//! ([`experts::VawState`]) and online linear optimization
//! ([`experts::FtplLearner`]) are provided, together with the benchmarks,
//! baseline and datasets used to evaluate groupwise regret.

pub mod data;
pub mod error;
pub mod eval;
pub mod experts;
pub mod groupwise;
pub mod hedge;
pub mod linalg;
pub mod loss;
pub mod types;

pub use error::{Error, Result};
pub use experts::Learner;
pub use groupwise::{run_sequence, GroupwiseLearner, RoundTrace};
pub use hedge::{AdaNormalHedge, PlayMode};
pub use loss::{clip_unit, linear_loss, squared_loss, LinearOptimization, Problem, Regression};
pub use types::{ActivityVector, Context, Round};
