//! External-regret learners that serve as meta-experts.

mod exp_weights;
mod ftpl;
mod oracle;
mod vaw;

pub use exp_weights::ExpWeights;
pub use ftpl::{FtplLearner, FtplState};
pub use oracle::{dag_shortest_path, Dag, LinearOracle};
pub use vaw::{ridge_batch, VawState};

use crate::error::Result;
use crate::types::Context;

/// An online learner: proposes an action for a context, then learns from the
/// revealed outcome.
///
/// `weight` is the round's importance: 1 for ordinary updates, the activity
/// value under fractional time selection.
pub trait Learner {
    type Action;
    type Outcome;

    fn predict(&mut self, context: &Context) -> Result<Self::Action>;

    fn update(&mut self, context: &Context, outcome: &Self::Outcome, weight: f64) -> Result<()>;
}

impl<L: Learner + ?Sized> Learner for Box<L> {
    type Action = L::Action;
    type Outcome = L::Outcome;

    fn predict(&mut self, context: &Context) -> Result<Self::Action> {
        (**self).predict(context)
    }

    fn update(&mut self, context: &Context, outcome: &Self::Outcome, weight: f64) -> Result<()> {
        (**self).update(context, outcome, weight)
    }
}
