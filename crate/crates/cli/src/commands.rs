use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use groupwise_core::data::{gen_synthetic, Scaler};
use groupwise_core::eval::{BenchmarkModel, CurvePoint, SummaryRow};
use serde::Serialize;

use crate::config::{DataSource, ExperimentConfig, Task};
use crate::error::{CliError, CliResult};
use crate::output::{
    curve_csv, ensure_dir, file_stem, read_curve, rebuild_summary, seed_dir, write_file, write_json,
};
use crate::pipeline::{prepare, run_all, Prepared};
use crate::plot::{line_chart, Series};

#[derive(Debug, Parser)]
#[command(name = "groupwise", version, about = "Groupwise-regret online learning experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic dataset as CSV.
    Gen(ConfigArgs),
    /// Run every seed and write curves, ledgers and the summary table.
    Run(RunArgs),
    /// Rebuild summary.csv from the per-seed ledgers of a run directory.
    Report(DirArgs),
    /// Render one SVG per group from a run directory's curve files.
    Plot(DirArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `out_dir` in the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: ConfigArgs,
    /// Use seeds 0..N instead of the configured list.
    #[arg(long)]
    pub seeds: Option<u64>,
    /// Worker threads for running seeds in parallel.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DirArgs {
    /// Run directory produced by `run`.
    #[arg(long = "out", value_name = "DIR")]
    pub dir: PathBuf,
}

pub fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen(a) => cmd_gen(&a).map(|_| ()),
        Command::Run(a) => cmd_run(&a).map(|_| ()),
        Command::Report(a) => cmd_report(&a.dir).map(|_| ()),
        Command::Plot(a) => cmd_plot(&a.dir).map(|_| ()),
    }
}

fn load(args: &ConfigArgs) -> CliResult<(ExperimentConfig, PathBuf)> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(out) = &args.out {
        cfg.out_dir = Some(out.clone());
    }
    let out = cfg
        .out_dir
        .clone()
        .ok_or_else(|| CliError::Config("no output directory: pass --out or set out_dir".into()))?;
    Ok((cfg, out))
}

#[derive(Serialize)]
struct GenMetadata<'a> {
    config_hash: String,
    seed: u64,
    rounds: usize,
    spec: &'a groupwise_core::data::SyntheticSpec,
    group_names: Vec<String>,
    group_weights: &'a [Vec<f64>],
}

/// Writes `data.csv` and `data_meta.json`; returns the CSV path.
pub fn cmd_gen(args: &ConfigArgs) -> CliResult<PathBuf> {
    let (cfg, out) = load(args)?;
    let DataSource::Synthetic(spec) = &cfg.data else {
        return Err(CliError::Config("`gen` needs a synthetic data source".into()));
    };
    spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
    ensure_dir(&out)?;
    let data = gen_synthetic(spec)?;
    let hash = cfg.hash();
    let mut bytes = format!("# config_hash={hash} seed={}\n", spec.seed).into_bytes();
    data.write_csv(&mut bytes)?;
    let path = out.join("data.csv");
    write_file(&path, &bytes)?;
    write_json(
        &out.join("data_meta.json"),
        &GenMetadata {
            config_hash: hash,
            seed: spec.seed,
            rounds: spec.rounds,
            spec,
            group_names: groupwise_core::data::SyntheticData::group_names(),
            group_weights: &data.group_weights,
        },
    )?;
    log::info!("wrote {} rows to {}", data.rows.len(), path.display());
    Ok(path)
}

#[derive(Serialize)]
struct GroupMeta<'a> {
    name: &'a str,
    benchmark: &'a BenchmarkModel,
}

#[derive(Serialize)]
struct RunMetadataFile<'a> {
    config_hash: String,
    version: &'static str,
    task: Task,
    seeds: &'a [u64],
    rounds: usize,
    groups: Vec<GroupMeta<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    feature_names: Option<&'a [String]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scaler: Option<&'a Scaler>,
    #[serde(skip_serializing_if = "Option::is_none")]
    preset_cutoffs: Option<BTreeMap<&'static str, Vec<f64>>>,
}

/// Runs the experiment; returns the run directory and the summary rows.
pub fn cmd_run(args: &RunArgs) -> CliResult<(PathBuf, Vec<SummaryRow>)> {
    let (mut cfg, out) = load(&args.common)?;
    if let Some(n) = args.seeds {
        cfg.seeds = (0..n).collect();
    }
    if args.jobs == Some(0) {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    cfg.validate()?;
    ensure_dir(&out)?;
    let hash = cfg.hash();
    let prepared = prepare(&cfg)?;
    write_json(&out.join("config.json"), &cfg.hashed_view())?;
    write_json(&out.join("metadata.json"), &metadata(&cfg, &prepared, &hash))?;

    let runs = run_all(&cfg, &prepared, &hash, args.jobs)?;
    for run in &runs {
        let dir = seed_dir(&out, run.seed);
        ensure_dir(&dir)?;
        write_json(&dir.join("ledger.json"), &run.summary)?;
        for (group, points) in &run.curves {
            let path = dir.join(format!("curve_{}.csv", file_stem(group)));
            write_file(&path, &curve_csv(&hash, run.seed, group, points)?)?;
        }
    }
    let rows = rebuild_summary(&out)?;
    log::info!("summary written to {}", out.join("summary.csv").display());
    Ok((out, rows))
}

fn metadata<'a>(cfg: &'a ExperimentConfig, prepared: &'a Prepared, hash: &str) -> RunMetadataFile<'a> {
    let groups = prepared
        .group_names()
        .iter()
        .zip(prepared.benchmarks())
        .map(|(name, benchmark)| GroupMeta { name, benchmark })
        .collect();
    let (feature_names, scaler) = match prepared {
        Prepared::Regression { data, scaler, .. } => (Some(data.feature_names.as_slice()), scaler.as_ref()),
        Prepared::Linopt { .. } => (None, None),
    };
    let preset_cutoffs = match &cfg.data {
        DataSource::Csv(c) if c.preset.is_some() => {
            use groupwise_core::data::presets::{AGE_CUTOFFS, BMI_CUTOFFS};
            let mut m = BTreeMap::new();
            m.insert("age", vec![AGE_CUTOFFS.0, AGE_CUTOFFS.1]);
            m.insert("bmi", vec![BMI_CUTOFFS.0, BMI_CUTOFFS.1, BMI_CUTOFFS.2]);
            Some(m)
        }
        _ => None,
    };
    RunMetadataFile {
        config_hash: hash.to_string(),
        version: env!("CARGO_PKG_VERSION"),
        task: cfg.task,
        seeds: &cfg.seeds,
        rounds: prepared.num_rounds(),
        groups,
        feature_names,
        scaler,
        preset_cutoffs,
    }
}

pub fn cmd_report(dir: &Path) -> CliResult<Vec<SummaryRow>> {
    let rows = rebuild_summary(dir)?;
    let mut stdout = std::io::stdout().lock();
    for r in &rows {
        let _ = writeln!(
            stdout,
            "{:<22} size {:>9} baseline {:>12.4} ± {:<10.4} alg {:>12.4} ± {:<10.4} benchmark {:.4}",
            r.group,
            r.size,
            r.baseline_regret_mean,
            r.baseline_regret_std,
            r.alg_regret_mean,
            r.alg_regret_std,
            r.benchmark_loss
        );
    }
    Ok(rows)
}

/// Averages each group's curves over seeds and writes `plots/<group>.svg`.
pub fn cmd_plot(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let seeds = crate::output::ledger_seeds(dir)?;
    let mut curve_files = Vec::new();
    for &s in &seeds {
        let sd = seed_dir(dir, s);
        let entries = std::fs::read_dir(&sd).map_err(|e| CliError::io(&sd, e))?;
        let mut names: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with("curve_") && n.ends_with(".csv"))
            })
            .collect();
        names.sort();
        curve_files.extend(names);
    }
    if curve_files.is_empty() {
        return Err(CliError::Data(format!("no curve files under {}", dir.display())));
    }

    let mut by_group: BTreeMap<String, Vec<Vec<CurvePoint>>> = BTreeMap::new();
    for path in &curve_files {
        let (group, points) = read_curve(path)?;
        by_group.entry(group).or_default().push(points);
    }
    let plots = dir.join("plots");
    ensure_dir(&plots)?;
    let mut written = Vec::new();
    for (group, curves) in &by_group {
        let n = curves[0].len();
        if curves.iter().any(|c| c.len() != n) {
            return Err(CliError::Data(format!("curves of `{group}` have different lengths across seeds")));
        }
        let m = curves.len() as f64;
        let avg = |f: fn(&CurvePoint) -> f64| -> Vec<(f64, f64)> {
            (0..n)
                .map(|j| {
                    let x = curves[0][j].frac_of_group_seen;
                    (x, curves.iter().map(|c| f(&c[j])).sum::<f64>() / m)
                })
                .collect()
        };
        let svg = line_chart(
            &format!("{group} (mean over {} seeds)", curves.len()),
            "frac_of_group_seen",
            "regret",
            &[
                Series {
                    label: "alg_regret",
                    color: "#1f77b4",
                    points: avg(|p| p.alg_regret),
                },
                Series {
                    label: "baseline_regret",
                    color: "#ff7f0e",
                    points: avg(|p| p.baseline_regret),
                },
            ],
        );
        let path = plots.join(format!("{}.svg", file_stem(group)));
        write_file(&path, svg.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}
