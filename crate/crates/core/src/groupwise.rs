//! The subsequence-regret reduction: one external-regret learner per
//! time-selection function, aggregated by AdaNormalHedge.
//!
//! Every round all `K` sub-learners propose (their losses feed the hedge
//! update even when asleep), the hedge distribution is formed over the
//! active ones, and either one proposal is sampled or the mixture is played.
//! After the outcome is revealed the hedge records move by
//! `activity[i] * (incurred - loss_i)` and only active sub-learners learn.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::eval::RegretLedger;
use crate::experts::Learner;
use crate::hedge::{AdaNormalHedge, HedgeDistribution, PlayMode, PotentialRecord};
use crate::loss::{LossValue, Problem};
use crate::types::{check_rounds, ActivityVector, Context, Round};

/// Everything decided in one round, completed by [`GroupwiseLearner::update`].
#[derive(Debug, Clone)]
pub struct RoundTrace<A> {
    pub round: usize,
    pub activity: ActivityVector,
    /// Raw proposals `z_t^I(x_t)` as returned by the sub-learners.
    pub raw_proposals: Vec<A>,
    /// Proposals after [`Problem::finalize`] (clipped for regression).
    pub proposals: Vec<A>,
    pub distribution: HedgeDistribution,
    /// The sampled meta-expert; `None` in mix mode.
    pub chosen: Option<usize>,
    pub prediction: A,
    /// Loss of each finalized proposal; empty until the outcome is revealed.
    pub expert_losses: Vec<LossValue>,
    pub incurred: Option<LossValue>,
}

pub struct GroupwiseLearner<P, L>
where
    P: Problem,
    L: Learner<Action = P::Action, Outcome = P::Outcome>,
{
    problem: P,
    learners: Vec<L>,
    hedge: AdaNormalHedge,
    mode: PlayMode,
    rng: ChaCha8Rng,
    seed: u64,
    round: usize,
    pending: bool,
}

impl<P, L> GroupwiseLearner<P, L>
where
    P: Problem,
    L: Learner<Action = P::Action, Outcome = P::Outcome>,
{
    /// One sub-learner per time-selection function, uniform priors.
    pub fn new(problem: P, learners: Vec<L>, mode: PlayMode, seed: u64) -> Result<Self> {
        if learners.is_empty() {
            return Err(Error::InvalidArgument("at least one sub-learner is required".into()));
        }
        let hedge = AdaNormalHedge::new(learners.len());
        Ok(Self {
            problem,
            learners,
            hedge,
            mode,
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
            round: 0,
            pending: false,
        })
    }

    pub fn num_subsequences(&self) -> usize {
        self.learners.len()
    }

    pub fn mode(&self) -> PlayMode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn problem(&self) -> &P {
        &self.problem
    }

    pub fn learners(&self) -> &[L] {
        &self.learners
    }

    pub fn hedge(&self) -> &AdaNormalHedge {
        &self.hedge
    }

    /// Overwrites the hedge records, e.g. to resume from a known state.
    pub fn set_hedge_records(&mut self, records: Vec<PotentialRecord>) -> Result<()> {
        self.hedge.set_records(records)
    }

    pub fn into_learners(self) -> Vec<L> {
        self.learners
    }

    /// Queries every sub-learner, forms the activity-gated hedge distribution
    /// and plays according to the mode. The played action is `trace.prediction`.
    pub fn predict(&mut self, x: &Context, activity: &ActivityVector) -> Result<RoundTrace<P::Action>> {
        if self.pending {
            return Err(Error::Protocol(format!(
                "predict called twice for round {} without an update",
                self.round
            )));
        }
        check_dim("activity vector", self.learners.len(), activity.len())?;
        if !activity.any_active() {
            return Err(Error::NoActiveExpert);
        }

        let mut raw_proposals = Vec::with_capacity(self.learners.len());
        let mut proposals = Vec::with_capacity(self.learners.len());
        for l in &mut self.learners {
            let raw = l.predict(x)?;
            proposals.push(self.problem.finalize(&raw)?);
            raw_proposals.push(raw);
        }

        let distribution = self.hedge.distribution(activity)?;
        let (chosen, prediction) = match self.mode {
            PlayMode::Sample => {
                let i = distribution.sample(&mut self.rng);
                (Some(i), proposals[i].clone())
            }
            PlayMode::Mix => {
                let mixed = self.problem.mix(&proposals, distribution.probabilities())?;
                (None, self.problem.finalize(&mixed)?)
            }
        };

        self.pending = true;
        Ok(RoundTrace {
            round: self.round,
            activity: activity.clone(),
            raw_proposals,
            proposals,
            distribution,
            chosen,
            prediction,
            expert_losses: Vec::new(),
            incurred: None,
        })
    }

    /// Scores the round, updates the hedge with every meta-expert's loss and
    /// trains the active sub-learners. Returns the completed trace.
    pub fn update(
        &mut self,
        mut trace: RoundTrace<P::Action>,
        x: &Context,
        outcome: &P::Outcome,
    ) -> Result<RoundTrace<P::Action>> {
        if !self.pending || trace.round != self.round {
            return Err(Error::Protocol(format!(
                "update for round {} but the learner is at round {} ({})",
                trace.round,
                self.round,
                if self.pending { "awaiting update" } else { "no prediction made" }
            )));
        }
        check_dim("trace proposals", self.learners.len(), trace.proposals.len())?;

        let expert_losses = trace
            .proposals
            .iter()
            .map(|p| self.problem.loss(p, outcome))
            .collect::<Result<Vec<_>>>()?;
        let incurred = self.problem.loss(&trace.prediction, outcome)?;
        let normalized: Vec<f64> = expert_losses.iter().map(|l| l.normalized).collect();
        self.hedge
            .update(&trace.activity, &normalized, incurred.normalized)?;

        for (i, l) in self.learners.iter_mut().enumerate() {
            let w = trace.activity.get(i);
            if w > 0.0 {
                l.update(x, outcome, w)?;
            }
        }

        self.pending = false;
        self.round += 1;
        trace.expert_losses = expert_losses;
        trace.incurred = Some(incurred);
        Ok(trace)
    }

    /// One full predict/update step.
    pub fn step(&mut self, round: &Round<P::Outcome>) -> Result<RoundTrace<P::Action>> {
        let trace = self.predict(&round.context, &round.activity)?;
        self.update(trace, &round.context, &round.outcome)
    }
}

/// Drives the learner over `rounds`, accumulating per-subsequence losses.
pub fn run_sequence<P, L>(
    learner: &mut GroupwiseLearner<P, L>,
    rounds: &[Round<P::Outcome>],
) -> Result<RegretLedger>
where
    P: Problem,
    L: Learner<Action = P::Action, Outcome = P::Outcome>,
{
    drive(learner, rounds, |_| {})
}

/// As [`run_sequence`], also returning every completed round trace.
pub fn run_sequence_traced<P, L>(
    learner: &mut GroupwiseLearner<P, L>,
    rounds: &[Round<P::Outcome>],
) -> Result<(RegretLedger, Vec<RoundTrace<P::Action>>)>
where
    P: Problem,
    L: Learner<Action = P::Action, Outcome = P::Outcome>,
{
    let mut traces = Vec::with_capacity(rounds.len());
    let ledger = drive(learner, rounds, |t| traces.push(t))?;
    Ok((ledger, traces))
}

fn drive<P, L>(
    learner: &mut GroupwiseLearner<P, L>,
    rounds: &[Round<P::Outcome>],
    mut sink: impl FnMut(RoundTrace<P::Action>),
) -> Result<RegretLedger>
where
    P: Problem,
    L: Learner<Action = P::Action, Outcome = P::Outcome>,
{
    check_rounds(rounds)?;
    let k = learner.num_subsequences();
    let mut ledger = RegretLedger::new(k, rounds.len(), learner.seed(), learner.mode());
    for (t, round) in rounds.iter().enumerate() {
        let trace = learner.step(round).map_err(|e| e.at_round(t))?;
        let incurred = trace.incurred.expect("completed trace").raw;
        let own: Vec<f64> = trace.expert_losses.iter().map(|l| l.raw).collect();
        ledger.record_round(&round.activity, incurred, &own);
        sink(trace);
    }
    Ok(ledger)
}
