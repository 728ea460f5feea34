//! Data preparation and the per-seed experiment: order, run the groupwise
//! learner and the baseline, score against the hindsight benchmarks.

use groupwise_core::data::{
    gen_synthetic, ingest_csv, order_rounds, presets, Dataset, OrderMode, Scaler, ALWAYS_ON,
};
use groupwise_core::eval::{
    baseline_run, best_action_hindsight, best_linear_hindsight, linear_policy_loss_series, regret_curve,
    BenchmarkModel, CurvePoint, LedgerSummary,
};
use groupwise_core::experts::{Dag, FtplLearner, FtplState, LinearOracle, VawState};
use groupwise_core::linalg::dot;
use groupwise_core::{
    run_sequence, ActivityVector, Context, GroupwiseLearner, LinearOptimization, Regression, Round,
};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{CsvSource, DataSource, ExperimentConfig, LinoptSpec, OracleConfig, Preset};
use crate::error::{CliError, CliResult};

/// Linear-optimization rounds: empty contexts, cost vectors as outcomes.
#[derive(Debug, Clone)]
pub struct LinoptData {
    pub group_names: Vec<String>,
    pub rounds: Vec<Round<Vec<f64>>>,
    pub oracle: LinearOracle,
    /// Bound on `|c|_1` for every cost vector.
    pub bound_c: f64,
}

#[derive(Debug, Clone)]
pub enum Prepared {
    Regression {
        data: Dataset,
        scaler: Option<Scaler>,
        benchmarks: Vec<BenchmarkModel>,
    },
    Linopt {
        data: LinoptData,
        benchmarks: Vec<BenchmarkModel>,
    },
}

impl Prepared {
    pub fn group_names(&self) -> &[String] {
        match self {
            Prepared::Regression { data, .. } => &data.group_names,
            Prepared::Linopt { data, .. } => &data.group_names,
        }
    }

    pub fn benchmarks(&self) -> &[BenchmarkModel] {
        match self {
            Prepared::Regression { benchmarks, .. } | Prepared::Linopt { benchmarks, .. } => benchmarks,
        }
    }

    pub fn num_rounds(&self) -> usize {
        match self {
            Prepared::Regression { data, .. } => data.len(),
            Prepared::Linopt { data, .. } => data.rounds.len(),
        }
    }
}

/// Loads or generates the data and fits the benchmarks on the unordered rounds.
pub fn prepare(cfg: &ExperimentConfig) -> CliResult<Prepared> {
    cfg.validate()?;
    match &cfg.data {
        DataSource::Synthetic(spec) => {
            let data = gen_synthetic(spec)?.to_dataset()?;
            regression(data, None)
        }
        DataSource::Csv(src) => {
            let (data, scaler) = load_csv(src)?;
            regression(data, Some(scaler))
        }
        DataSource::LinoptSynthetic(spec) => {
            let data = gen_linopt(spec)?;
            let benchmarks = (0..data.group_names.len())
                .map(|i| best_action_hindsight(&data.rounds, i, &data.oracle))
                .collect::<groupwise_core::Result<Vec<_>>>()?;
            Ok(Prepared::Linopt { data, benchmarks })
        }
    }
}

fn load_csv(src: &CsvSource) -> CliResult<(Dataset, Scaler)> {
    let spec = match (src.preset, &src.preprocess) {
        (Some(Preset::MedicalCost), None) => presets::medical_cost(),
        (Some(Preset::AdultIncome), None) => presets::adult_income(),
        (None, Some(p)) => p.clone(),
        _ => return Err(CliError::Config("csv source needs exactly one of `preset` or `preprocess`".into())),
    };
    Ok(ingest_csv(&src.path, &spec)?)
}

fn regression(data: Dataset, scaler: Option<Scaler>) -> CliResult<Prepared> {
    if data.is_empty() {
        return Err(CliError::Data("dataset has no rows".into()));
    }
    let benchmarks = (0..data.num_groups())
        .map(|i| best_linear_hindsight(&data.rounds, i))
        .collect::<groupwise_core::Result<Vec<_>>>()?;
    Ok(Prepared::Regression {
        data,
        scaler,
        benchmarks,
    })
}

pub fn build_oracle(cfg: &OracleConfig) -> CliResult<LinearOracle> {
    Ok(match cfg {
        OracleConfig::Hypercube { dim } => {
            if *dim == 0 {
                return Err(CliError::Config("hypercube dimension must be positive".into()));
            }
            LinearOracle::Hypercube { dim: *dim }
        }
        OracleConfig::Dag { edges } => {
            LinearOracle::DagShortestPath(Dag::new(edges.clone()).map_err(|e| CliError::Config(e.to_string()))?)
        }
        OracleConfig::DagFile { path } => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            LinearOracle::DagShortestPath(Dag::parse(&text)?)
        }
    })
}

/// Each group `g` has a fixed drift `b_g ~ U[-1,1]^d`; a round of group `g`
/// costs `(b_g + u) / (2d)` with fresh `u ~ U[-1,1]^d`, so `|c|_1 <= 1`.
pub fn gen_linopt(spec: &LinoptSpec) -> CliResult<LinoptData> {
    let oracle = build_oracle(&spec.oracle)?;
    let d = oracle.dim();
    let k = spec.group_probs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let drift: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect();
    let pick = WeightedIndex::new(&spec.group_probs).map_err(|e| CliError::Config(e.to_string()))?;
    let scale = 1.0 / (2.0 * d as f64);
    let rounds = (0..spec.rounds)
        .map(|_| {
            let g = pick.sample(&mut rng);
            let cost: Vec<f64> = drift[g]
                .iter()
                .map(|b| (b + rng.random_range(-1.0..=1.0)) * scale)
                .collect();
            let mut flags = vec![false; k + 1];
            flags[g] = true;
            flags[k] = true;
            Round::new(Context::empty(), ActivityVector::from_flags(&flags), cost)
        })
        .collect();
    let mut group_names: Vec<String> = (0..k).map(|g| format!("g{g}")).collect();
    group_names.push(ALWAYS_ON.into());
    Ok(LinoptData {
        group_names,
        rounds,
        oracle,
        bound_c: 1.0,
    })
}

/// Outputs of one seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedRun {
    pub seed: u64,
    pub summary: LedgerSummary,
    pub curves: Vec<(String, Vec<CurvePoint>)>,
}

pub fn run_seed(cfg: &ExperimentConfig, prepared: &Prepared, seed: u64, hash: &str) -> CliResult<SeedRun> {
    match prepared {
        Prepared::Regression { data, benchmarks, .. } => run_regression(cfg, data, benchmarks, seed, hash),
        Prepared::Linopt { data, benchmarks } => run_linopt(cfg, data, benchmarks, seed, hash),
    }
}

/// Runs every configured seed, on `jobs` threads if given; results are in seed order.
pub fn run_all(cfg: &ExperimentConfig, prepared: &Prepared, hash: &str, jobs: Option<usize>) -> CliResult<Vec<SeedRun>> {
    let work = || -> CliResult<Vec<SeedRun>> {
        cfg.seeds
            .par_iter()
            .map(|&s| {
                log::info!("seed {s}: running {} rounds", prepared.num_rounds());
                run_seed(cfg, prepared, s, hash)
            })
            .collect()
    };
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {n} workers: {e}")))?
            .install(work),
        None => work(),
    }
}

fn run_regression(
    cfg: &ExperimentConfig,
    base: &Dataset,
    benchmarks: &[BenchmarkModel],
    seed: u64,
    hash: &str,
) -> CliResult<SeedRun> {
    let mut data = base.clone();
    order_rounds(&mut data, &OrderMode::Shuffle { seed })?;
    if let Some(sort) = &cfg.sort_by {
        order_rounds(
            &mut data,
            &OrderMode::SortBy {
                column: sort.column.clone(),
                ascending: sort.ascending,
            },
        )
        .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let k = data.num_groups();
    let d = data.rounds[0].context.dim();
    let learners = (0..k)
        .map(|_| VawState::new(d, cfg.learner.lambda))
        .collect::<groupwise_core::Result<Vec<_>>>()?;
    let mut learner = GroupwiseLearner::new(Regression, learners, cfg.hedge_mode, seed)?;
    let mut ledger = run_sequence(&mut learner, &data.rounds)?;
    ledger.attach_baseline(baseline_run(&data.rounds, cfg.learner.lambda)?)?;
    let mut bench_series = Vec::with_capacity(k);
    for (i, b) in benchmarks.iter().enumerate() {
        ledger.set_benchmark(i, b.loss)?;
        bench_series.push(linear_policy_loss_series(&data.rounds, i, &b.policy)?);
    }
    finish(cfg, ledger, &data.group_names, &data.rounds, bench_series, seed, hash, true)
}

fn sub_seed(seed: u64, stream: u64) -> u64 {
    seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn run_linopt(
    cfg: &ExperimentConfig,
    base: &LinoptData,
    benchmarks: &[BenchmarkModel],
    seed: u64,
    hash: &str,
) -> CliResult<SeedRun> {
    let mut rounds = base.rounds.clone();
    {
        use rand::seq::SliceRandom;
        rounds.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let k = base.group_names.len();
    let horizon = cfg.learner.horizon.unwrap_or(rounds.len());
    let make_state = || match cfg.learner.epsilon {
        Some(eps) => FtplState::new(
            base.oracle.clone(),
            eps,
            base.oracle.action_diameter().max(1.0),
            base.bound_c,
        ),
        None => FtplState::tuned(base.oracle.clone(), base.bound_c, horizon),
    };
    let learners = (0..k)
        .map(|i| Ok(FtplLearner::new(make_state()?, sub_seed(seed, i as u64))))
        .collect::<groupwise_core::Result<Vec<_>>>()?;
    let problem = LinearOptimization::from_bounds(1.0, base.bound_c);
    let mut learner = GroupwiseLearner::new(problem, learners, cfg.hedge_mode, seed)?;
    let mut ledger = run_sequence(&mut learner, &rounds)?;

    // one FTPL over the whole sequence, ignoring groups
    let mut baseline = make_state()?;
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, u64::MAX - 1));
    let mut cum = vec![0.0; k];
    let mut series: Vec<Vec<f64>> = vec![Vec::with_capacity(rounds.len()); k];
    for (t, r) in rounds.iter().enumerate() {
        let a = baseline.predict(&mut rng).map_err(|e| e.at_round(t))?;
        let loss = dot(&a, &r.outcome);
        for i in 0..k {
            cum[i] += r.activity.get(i) * loss;
            series[i].push(cum[i]);
        }
        baseline.update(&r.outcome, 1.0).map_err(|e| e.at_round(t))?;
    }
    ledger.attach_baseline(series)?;

    let mut bench_series = Vec::with_capacity(k);
    for (i, b) in benchmarks.iter().enumerate() {
        ledger.set_benchmark(i, b.loss)?;
        let mut c = 0.0;
        bench_series.push(
            rounds
                .iter()
                .map(|r| {
                    c += r.activity.get(i) * dot(&b.policy, &r.outcome);
                    c
                })
                .collect(),
        );
    }
    // linear losses can be negative, so cumulative series need not be monotone
    finish(cfg, ledger, &base.group_names, &rounds, bench_series, seed, hash, false)
}

#[allow(clippy::too_many_arguments)]
fn finish<Y>(
    cfg: &ExperimentConfig,
    mut ledger: groupwise_core::eval::RegretLedger,
    names: &[String],
    rounds: &[Round<Y>],
    bench_series: Vec<Vec<f64>>,
    seed: u64,
    hash: &str,
    monotone: bool,
) -> CliResult<SeedRun> {
    ledger.set_names(names)?;
    ledger.set_config_hash(hash);
    if monotone {
        ledger.validate()?;
    }
    let mut curves = Vec::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        let g = ledger.group(i);
        let active: Vec<bool> = rounds.iter().map(|r| r.activity.get(i) > 0.0).collect();
        let baseline = g.baseline.as_ref().expect("baseline attached");
        let points = regret_curve(&active, &g.alg, baseline, &bench_series[i], cfg.curve_points)?;
        curves.push((name.clone(), points));
    }
    Ok(SeedRun {
        seed,
        summary: LedgerSummary::from_ledger(&ledger)?,
        curves,
    })
}
