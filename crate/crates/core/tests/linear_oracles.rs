//! Incremental ridge machinery against from-scratch dense solves.

use groupwise_core::eval::baseline_run;
use groupwise_core::experts::{ridge_batch, VawState};
use groupwise_core::types::{ActivityVector, Context, Round};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Solves `(lambda I + sum x x^T [+ x_now x_now^T]) theta = sum y x` by LU and
/// returns `<theta, x_now>`.
fn dense_prediction(history: &[(Vec<f64>, f64)], x_now: &[f64], lambda: f64, fold_current: bool) -> f64 {
    let d = x_now.len();
    let mut a = DMatrix::<f64>::identity(d, d) * lambda;
    let mut b = DVector::<f64>::zeros(d);
    for (x, y) in history {
        for i in 0..d {
            b[i] += y * x[i];
            for j in 0..d {
                a[(i, j)] += x[i] * x[j];
            }
        }
    }
    if fold_current {
        for i in 0..d {
            for j in 0..d {
                a[(i, j)] += x_now[i] * x_now[j];
            }
        }
    }
    let theta = a.lu().solve(&b).expect("regularized system is nonsingular");
    theta.iter().zip(x_now).map(|(t, x)| t * x).sum()
}

fn random_instance(rng: &mut ChaCha8Rng, d: usize, t: usize) -> Vec<(Vec<f64>, f64)> {
    (0..t)
        .map(|_| ((0..d).map(|_| rng.random::<f64>()).collect(), rng.random::<f64>()))
        .collect()
}

#[test]
fn vaw_predictions_match_dense_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let d = rng.random_range(1..=10);
        let t = rng.random_range(1..=300);
        let data = random_instance(&mut rng, d, t);
        let mut state = VawState::new(d, 1.0).unwrap();
        for (s, (x, y)) in data.iter().enumerate() {
            let fast = state.predict(x).unwrap();
            let slow = dense_prediction(&data[..s], x, 1.0, true);
            assert!((fast - slow).abs() < 1e-8, "d={d} s={s}: {fast} vs {slow}");
            state.update(x, *y, 1.0).unwrap();
        }
    }
}

#[test]
fn inverse_tracks_reconstructed_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let d = 6;
    let data = random_instance(&mut rng, d, 500);
    let mut state = VawState::new(d, 1.0).unwrap();
    let mut a = DMatrix::<f64>::identity(d, d);
    for (x, y) in &data {
        state.update(x, *y, 1.0).unwrap();
        let v = DVector::from_column_slice(x);
        a += &v * v.transpose();
    }
    let prod = state.a_inv() * &a;
    assert!((prod - DMatrix::<f64>::identity(d, d)).amax() < 1e-8);
    let asym = (state.a_inv() - state.a_inv().transpose()).amax();
    assert!(asym < 1e-9, "asymmetry {asym}");
    // positive definite
    assert!(state.a_inv().clone().cholesky().is_some());
}

#[test]
fn ridge_batch_matches_normal_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let d = rng.random_range(1..=8);
        let n = rng.random_range(0..=60);
        let data = random_instance(&mut rng, d, n);
        let xs: Vec<Vec<f64>> = data.iter().map(|(x, _)| x.clone()).collect();
        let ys: Vec<f64> = data.iter().map(|(_, y)| *y).collect();
        let theta = ridge_batch(d, &xs, &ys, 1.0).unwrap();

        let xm = DMatrix::from_fn(n, d, |i, j| xs[i][j]);
        let yv = DVector::from_column_slice(&ys);
        let a = xm.transpose() * &xm + DMatrix::<f64>::identity(d, d);
        let expect = a.lu().solve(&(xm.transpose() * yv)).unwrap();
        for j in 0..d {
            assert!((theta[j] - expect[j]).abs() < 1e-8);
        }
    }
}

#[test]
fn baseline_matches_per_round_refit() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let d = 5;
    let data = random_instance(&mut rng, d, 200);
    let rounds: Vec<Round> = data
        .iter()
        .map(|(x, y)| Round::new(Context::new(x.clone()).unwrap(), ActivityVector::all(1), *y))
        .collect();
    let series = baseline_run(&rounds, 1.0).unwrap();
    let mut cum = 0.0;
    for (t, (x, y)) in data.iter().enumerate() {
        let p = dense_prediction(&data[..t], x, 1.0, false).clamp(0.0, 1.0);
        cum += (p - y) * (p - y);
        assert!((series[0][t] - cum).abs() < 1e-8, "t={t}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn vaw_equivalence_random(seed in any::<u64>(), d in 1usize..=10, t in 1usize..=60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = random_instance(&mut rng, d, t);
        let mut state = VawState::new(d, 1.0).unwrap();
        for (s, (x, y)) in data.iter().enumerate() {
            let slow = dense_prediction(&data[..s], x, 1.0, true);
            prop_assert!((state.predict(x).unwrap() - slow).abs() < 1e-8);
            state.update(x, *y, 1.0).unwrap();
        }
    }

    #[test]
    fn fractional_weight_scales_the_rank_one_term(seed in any::<u64>(), w in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = 3;
        let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let y = rng.random::<f64>();
        let mut s = VawState::new(d, 1.0).unwrap();
        s.update(&x, y, w).unwrap();
        let v = DVector::from_column_slice(&x);
        let a = DMatrix::<f64>::identity(d, d) + (&v * v.transpose()) * w;
        let prod = s.a_inv() * a;
        prop_assert!((prod - DMatrix::<f64>::identity(d, d)).amax() < 1e-12);
        prop_assert!((s.b() - v * (w * y)).amax() < 1e-15);
    }
}
