use groupwise_core::data::{
    gen_synthetic, ingest_reader, order_rounds, Aggregation, GroupRule, OrderMode, PreprocessSpec, SyntheticSpec,
};
use groupwise_core::eval::{best_linear_hindsight, linear_policy_loss, FinitePolicySet};
use groupwise_core::{ActivityVector, Context, Round};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn group_frequencies_match_the_categorical_parameters() {
    let data = gen_synthetic(&SyntheticSpec::default()).unwrap();
    let n = data.rows.len() as f64;
    let mut shapes = [0.0; 3];
    let mut colors = [0.0; 2];
    for r in &data.rows {
        shapes[r.shape] += 1.0;
        colors[r.color] += 1.0;
    }
    for (c, p) in shapes.iter().zip([0.5, 0.3, 0.2]) {
        assert!((c / n - p).abs() < 0.01, "{} vs {p}", c / n);
    }
    for (c, p) in colors.iter().zip([0.6, 0.4]) {
        assert!((c / n - p).abs() < 0.01, "{} vs {p}", c / n);
    }
}

#[test]
fn every_synthetic_round_is_well_formed() {
    for agg in [Aggregation::Mean, Aggregation::Min, Aggregation::Max, Aggregation::Permutation] {
        let spec = SyntheticSpec {
            rounds: 5000,
            aggregation: agg,
            seed: 3,
            ..SyntheticSpec::default()
        };
        let ds = gen_synthetic(&spec).unwrap().to_dataset().unwrap();
        assert_eq!(ds.group_names.len(), 6);
        for r in &ds.rounds {
            assert_eq!(r.context.dim(), 26);
            assert!(r.context.values().iter().all(|v| (0.0..=1.0).contains(v)));
            assert!((0.0..=1.0).contains(&r.outcome));
            assert_eq!(r.activity.len(), 6);
            assert_eq!(r.activity.get(5), 1.0);
            assert_eq!(r.activity.weights()[..3].iter().sum::<f64>(), 1.0);
            assert_eq!(r.activity.weights()[3..5].iter().sum::<f64>(), 1.0);
        }
    }
}

#[test]
fn sorted_by_color_puts_red_first() {
    let spec = SyntheticSpec {
        rounds: 2000,
        ..SyntheticSpec::default()
    };
    let mut ds = gen_synthetic(&spec).unwrap().to_dataset().unwrap();
    order_rounds(&mut ds, &OrderMode::Shuffle { seed: 1 }).unwrap();
    order_rounds(
        &mut ds,
        &OrderMode::SortBy {
            column: "color".into(),
            ascending: false,
        },
    )
    .unwrap();
    let first_green = ds.rounds.iter().position(|r| r.activity.get(3) == 1.0).unwrap();
    assert!(ds.rounds[..first_green].iter().all(|r| r.activity.get(4) == 1.0));
    assert!(ds.rounds[first_green..].iter().all(|r| r.activity.get(3) == 1.0));
}

fn rounds_with(rng: &mut ChaCha8Rng, n: usize, d: usize, label: impl Fn(&[f64]) -> f64) -> Vec<Round> {
    (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            let y = label(&x);
            let act = ActivityVector::from_flags(&[rng.random::<f64>() < 0.4, true]);
            Round::new(Context::new(x).unwrap(), act, y)
        })
        .collect()
}

#[test]
fn benchmark_recovers_exact_linear_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let theta = [0.2, -0.1, 0.4, 0.3];
    let rounds = rounds_with(&mut rng, 400, 4, |x| x.iter().zip(&theta).map(|(a, b)| a * b).sum());
    for s in 0..2 {
        let m = best_linear_hindsight(&rounds, s).unwrap();
        assert!(m.loss < 1e-20, "{}", m.loss);
        for (a, b) in m.policy.iter().zip(theta) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn benchmark_beats_random_probes() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rounds = rounds_with(&mut rng, 1000, 5, |x| (x[0] * x[1] + 0.3 * x[4]).min(1.0));
    for s in 0..2 {
        let m = best_linear_hindsight(&rounds, s).unwrap();
        for _ in 0..100 {
            let probe: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
            assert!(m.loss <= linear_policy_loss(&rounds, s, &probe).unwrap() + 1e-9);
        }
        // enumeration over H ∪ {theta_hat} keeps theta_hat
        let mut h: Vec<Vec<f64>> = (0..20).map(|_| (0..5).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        h.push(m.policy.clone());
        let best = FinitePolicySet::new(h).unwrap().best_regression(&rounds, s, false).unwrap();
        assert_eq!(best.policy, m.policy);
    }
}

#[test]
fn rank_deficient_benchmark_is_min_norm() {
    // duplicated column: min-norm solution splits the weight evenly
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rounds: Vec<Round> = (0..100)
        .map(|_| {
            let v = rng.random::<f64>();
            Round::new(Context::new(vec![v, v]).unwrap(), ActivityVector::all(1), 0.6 * v)
        })
        .collect();
    let m = best_linear_hindsight(&rounds, 0).unwrap();
    assert!((m.policy[0] - 0.3).abs() < 1e-9 && (m.policy[1] - 0.3).abs() < 1e-9);
}

fn three_level_spec() -> PreprocessSpec {
    PreprocessSpec {
        numeric: vec!["n".into()],
        categorical: vec!["c".into()],
        label: "y".into(),
        intercept: true,
        groups: vec![GroupRule::threshold("low", "n", None, Some(5.0))],
        append_group_indicators: true,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_hot_round_trips(rows in prop::collection::vec((0.0f64..10.0, 0usize..3, 0.0f64..100.0), 2..40)) {
        let levels = ["alpha", "beta", "gamma"];
        let mut csv = String::from("n,c,y\n");
        for (n, c, y) in &rows {
            csv.push_str(&format!("{n},{},{y}\n", levels[*c]));
        }
        // a constant label is rejected; make sure the label varies
        csv.push_str("0,alpha,1000\n");
        let (ds, scaler) = ingest_reader(csv.as_bytes(), &three_level_spec()).unwrap();
        for (r, (_, c, _)) in ds.rounds.iter().zip(&rows) {
            prop_assert_eq!(scaler.decode_category(r.context.values(), "c"), Some(levels[*c]));
            let hot: f64 = r.context.values()[1..1 + scaler.categorical[0].1.len()].iter().sum();
            prop_assert_eq!(hot, 1.0);
            prop_assert_eq!(r.activity.len(), 2);
            prop_assert_eq!(r.activity.get(1), 1.0);
            prop_assert!(r.context.values().iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }
}
