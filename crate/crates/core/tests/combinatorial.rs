use groupwise_core::eval::{best_action_hindsight, FinitePolicySet};
use groupwise_core::experts::{dag_shortest_path, Dag, FtplState, LinearOracle};
use groupwise_core::{ActivityVector, Context, Round};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_dag(rng: &mut ChaCha8Rng) -> Dag {
    loop {
        let nodes = rng.random_range(2..=7);
        let mut edges = Vec::new();
        for a in 0..nodes {
            for b in a + 1..nodes {
                if rng.random::<f64>() < 0.5 {
                    edges.push((a, b));
                    // occasional parallel edge
                    if rng.random::<f64>() < 0.1 {
                        edges.push((a, b));
                    }
                }
            }
        }
        if edges.is_empty() || edges.len() > 12 {
            continue;
        }
        if let Ok(g) = Dag::new(edges) {
            return g;
        }
    }
}

fn indicator(path: &[usize], m: usize) -> Vec<f64> {
    let mut v = vec![0.0; m];
    for &e in path {
        v[e] = 1.0;
    }
    v
}

fn path_cost(a: &[f64], c: &[f64]) -> f64 {
    a.iter().zip(c).map(|(x, y)| x * y).sum()
}

#[test]
fn shortest_path_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..300 {
        let g = random_dag(&mut rng);
        let m = g.num_edges();
        let cost: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let got = dag_shortest_path(&g, &cost).unwrap();
        let best = g
            .enumerate_paths(usize::MAX)
            .iter()
            .map(|p| path_cost(&indicator(p, m), &cost))
            .fold(f64::INFINITY, f64::min);
        assert!((path_cost(&got, &cost) - best).abs() < 1e-12);
        // the answer is itself a source-sink path
        assert!(g.enumerate_paths(usize::MAX).iter().any(|p| indicator(p, m) == got));
    }
}

#[test]
fn hypercube_best_action_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let d = 4;
    let oracle = LinearOracle::Hypercube { dim: d };
    let all: Vec<Vec<f64>> = (0..1 << d)
        .map(|mask: usize| (0..d).map(|i| ((mask >> i) & 1) as f64).collect())
        .collect();
    let set = FinitePolicySet::new(all).unwrap();
    for _ in 0..50 {
        let rounds: Vec<Round<Vec<f64>>> = (0..40)
            .map(|_| {
                let c: Vec<f64> = (0..d).map(|_| rng.random_range(-0.25..0.25)).collect();
                let act = ActivityVector::from_flags(&[rng.random::<bool>(), true]);
                Round::new(Context::empty(), act, c)
            })
            .collect();
        for s in 0..2 {
            let fast = best_action_hindsight(&rounds, s, &oracle).unwrap();
            let slow = set.best_action(&rounds, s).unwrap();
            assert!((fast.loss - slow.loss).abs() < 1e-12);
        }
    }
}

#[test]
fn dag_best_action_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..50 {
        let g = random_dag(&mut rng);
        let m = g.num_edges();
        let paths: Vec<Vec<f64>> = g.enumerate_paths(usize::MAX).iter().map(|p| indicator(p, m)).collect();
        let set = FinitePolicySet::new(paths).unwrap();
        let oracle = LinearOracle::DagShortestPath(g);
        let rounds: Vec<Round<Vec<f64>>> = (0..30)
            .map(|_| {
                let c: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0) / m as f64).collect();
                Round::new(Context::empty(), ActivityVector::all(1), c)
            })
            .collect();
        let fast = best_action_hindsight(&rounds, 0, &oracle).unwrap();
        let slow = set.best_action(&rounds, 0).unwrap();
        assert!((fast.loss - slow.loss).abs() < 1e-12);
    }
}

#[test]
fn ftpl_perturbation_hits_half_probability() {
    // cumulative cost 0.5 with epsilon 1: coordinate is chosen iff p > 0.5
    let mut s = FtplState::new(LinearOracle::Hypercube { dim: 1 }, 1.0, 1.0, 1.0).unwrap();
    s.update(&[0.5], 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 100_000;
    let hits = (0..n).filter(|_| s.predict(&mut rng).unwrap()[0] == 1.0).count();
    let f = hits as f64 / n as f64;
    assert!((f - 0.5).abs() < 0.01, "{f}");
}

#[test]
fn ftpl_rejects_costs_outside_the_ball() {
    let mut s = FtplState::new(LinearOracle::Hypercube { dim: 2 }, 0.1, 2.0, 1.0).unwrap();
    assert!(s.update(&[0.7, -0.7], 1.0).is_err());
    assert!(s.update(&[0.5, -0.5], 1.0).is_ok());
}
