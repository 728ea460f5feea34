use groupwise_core::data::{gen_synthetic, SyntheticSpec};
use groupwise_core::eval::FinitePolicySet;
use groupwise_core::experts::{ExpWeights, VawState};
use groupwise_core::groupwise::run_sequence_traced;
use groupwise_core::{run_sequence, ActivityVector, Context, GroupwiseLearner, Learner, PlayMode, Regression, Round};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn synthetic_rounds(rounds: usize, seed: u64) -> Vec<Round> {
    let spec = SyntheticSpec {
        rounds,
        seed,
        ..SyntheticSpec::default()
    };
    gen_synthetic(&spec).unwrap().to_dataset().unwrap().rounds
}

fn vaw_learners(k: usize, d: usize) -> Vec<VawState> {
    (0..k).map(|_| VawState::new(d, 1.0).unwrap()).collect()
}

#[test]
fn sub_learners_only_see_their_own_rounds() {
    let rounds = synthetic_rounds(3000, 1);
    let d = rounds[0].context.dim();
    for mode in [PlayMode::Sample, PlayMode::Mix] {
        let mut g = GroupwiseLearner::new(Regression, vaw_learners(6, d), mode, 3).unwrap();
        run_sequence(&mut g, &rounds).unwrap();
        for (i, learned) in g.learners().iter().enumerate() {
            let mut alone = VawState::new(d, 1.0).unwrap();
            for r in rounds.iter().filter(|r| r.activity.get(i) > 0.0) {
                Learner::predict(&mut alone, &r.context).unwrap();
                Learner::update(&mut alone, &r.context, &r.outcome, 1.0).unwrap();
            }
            assert_eq!(learned.a_inv(), alone.a_inv(), "group {i}");
            assert_eq!(learned.b(), alone.b(), "group {i}");
        }
    }
}

#[test]
fn identical_seeds_give_identical_runs() {
    let rounds = synthetic_rounds(2000, 2);
    let d = rounds[0].context.dim();
    let run = |seed| {
        let mut g = GroupwiseLearner::new(Regression, vaw_learners(6, d), PlayMode::Sample, seed).unwrap();
        run_sequence_traced(&mut g, &rounds).unwrap()
    };
    let (a, ta) = run(7);
    let (b, tb) = run(7);
    assert_eq!(a, b);
    assert_eq!(
        ta.iter().map(|t| t.prediction.to_bits()).collect::<Vec<_>>(),
        tb.iter().map(|t| t.prediction.to_bits()).collect::<Vec<_>>()
    );
    let (c, _) = run(8);
    assert_ne!(a, c);
}

#[test]
fn hedge_half_of_the_decomposition_holds() {
    for seed in 0..5 {
        let rounds = synthetic_rounds(4000, 10 + seed);
        let d = rounds[0].context.dim();
        for mode in [PlayMode::Sample, PlayMode::Mix] {
            let k = 6;
            let mut g = GroupwiseLearner::new(Regression, vaw_learners(k, d), mode, seed).unwrap();
            let ledger = run_sequence(&mut g, &rounds).unwrap();
            for grp in ledger.groups() {
                let gap = grp.final_alg_loss() - grp.own_loss;
                let bound = 5.0 * (grp.mass * (1.0 + (k as f64).ln())).sqrt();
                assert!(gap <= bound, "seed {seed} {mode:?} group {}: {gap} > {bound}", grp.name);
            }
        }
    }
}

#[test]
fn fractional_activity_weights_the_ledger() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rounds: Vec<Round> = (0..500)
        .map(|_| {
            let x = vec![rng.random::<f64>(), 1.0];
            let w = rng.random::<f64>();
            Round::new(Context::new(x).unwrap(), ActivityVector::new(vec![w, 1.0]).unwrap(), rng.random())
        })
        .collect();
    let mut g = GroupwiseLearner::new(Regression, vaw_learners(2, 2), PlayMode::Mix, 0).unwrap();
    let (ledger, traces) = run_sequence_traced(&mut g, &rounds).unwrap();
    let expect: f64 = traces
        .iter()
        .map(|t| t.activity.get(0) * t.incurred.unwrap().raw)
        .sum();
    assert!((ledger.group(0).final_alg_loss() - expect).abs() < 1e-9);
    let mass: f64 = rounds.iter().map(|r| r.activity.get(0)).sum();
    assert!((ledger.group(0).mass - mass).abs() < 1e-9);
}

#[test]
fn finite_class_regret_splits_into_learner_and_hedge_terms() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let d = 3;
    let policies: Vec<Vec<f64>> = (0..5).map(|_| (0..d).map(|_| rng.random::<f64>() / d as f64).collect()).collect();
    let set = FinitePolicySet::new(policies.clone()).unwrap();
    let t = 5000;
    let rounds: Vec<Round> = (0..t)
        .map(|_| {
            let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            let g = rng.random_range(0..2);
            let y = if g == 0 { x[0] } else { 0.5 * x[1] + 0.1 };
            Round::new(
                Context::new(x).unwrap(),
                ActivityVector::from_flags(&[g == 0, g == 1, true]),
                y.clamp(0.0, 1.0),
            )
        })
        .collect();
    let learners: Vec<ExpWeights> = (0..3).map(|_| ExpWeights::tuned(policies.clone(), t).unwrap()).collect();
    let mut g = GroupwiseLearner::new(Regression, learners, PlayMode::Sample, 1).unwrap();
    let ledger = run_sequence(&mut g, &rounds).unwrap();
    for (i, grp) in ledger.groups().iter().enumerate() {
        let best = set.best_regression(&rounds, i, true).unwrap().loss;
        let alpha = grp.own_loss - best;
        let regret = grp.final_alg_loss() - best;
        let bound = alpha + 5.0 * (grp.mass * 3f64.ln()).sqrt();
        assert!(regret <= bound, "group {i}: {regret} > {bound}");
    }
}
