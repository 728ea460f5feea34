//! Run-directory layout:
//!
//! ```text
//! <run>/config.json            effective config
//! <run>/metadata.json          hash, seeds, groups, benchmarks, scaler
//! <run>/summary.csv            one row per group, mean/std over seeds
//! <run>/seed_<s>/ledger.json   final per-group losses of one seed
//! <run>/seed_<s>/curve_<g>.csv regret curve of one group
//! <run>/plots/<g>.svg          written by `plot`
//! ```
//!
//! Every CSV starts with a `# config_hash=... seed(s)=...` line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use groupwise_core::eval::{summary_table, CurvePoint, LedgerSummary, SummaryRow};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SUMMARY_HEADER: [&str; 7] = [
    "group",
    "size",
    "baseline_regret_mean",
    "baseline_regret_std",
    "alg_regret_mean",
    "alg_regret_std",
    "benchmark_loss",
];

pub const CURVE_HEADER: [&str; 5] = ["round", "group", "frac_of_group_seen", "alg_regret", "baseline_regret"];

/// Group name made safe for a file name.
pub fn file_stem(group: &str) -> String {
    group
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

pub fn seed_dir(run: &Path, seed: u64) -> PathBuf {
    run.join(format!("seed_{seed}"))
}

/// Creates `dir`; failing to do so is a configuration problem (bad `--out`).
pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::io(path, e))?;
    bytes.push(b'\n');
    write_file(path, &bytes)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::io(path, e))
}

fn csv_bytes(comment: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    writeln!(buf, "# {comment}").expect("write to memory");
    let mut w = csv::Writer::from_writer(buf);
    let err = |e: csv::Error| CliError::Data(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Data(e.to_string()))
}

pub fn curve_csv(hash: &str, seed: u64, group: &str, points: &[CurvePoint]) -> CliResult<Vec<u8>> {
    csv_bytes(
        &format!("config_hash={hash} seed={seed}"),
        &CURVE_HEADER,
        points.iter().map(|p| {
            vec![
                p.round.to_string(),
                group.to_string(),
                p.frac_of_group_seen.to_string(),
                p.alg_regret.to_string(),
                p.baseline_regret.to_string(),
            ]
        }),
    )
}

pub fn summary_csv(hash: &str, seeds: &[u64], rows: &[SummaryRow]) -> CliResult<Vec<u8>> {
    let seeds: Vec<String> = seeds.iter().map(u64::to_string).collect();
    csv_bytes(
        &format!("config_hash={hash} seeds={}", seeds.join(",")),
        &SUMMARY_HEADER,
        rows.iter().map(|r| {
            vec![
                r.group.clone(),
                r.size.to_string(),
                r.baseline_regret_mean.to_string(),
                r.baseline_regret_std.to_string(),
                r.alg_regret_mean.to_string(),
                r.alg_regret_std.to_string(),
                r.benchmark_loss.to_string(),
            ]
        }),
    )
}

/// Seeds with a `seed_<s>/ledger.json`, ascending.
pub fn ledger_seeds(run: &Path) -> CliResult<Vec<u64>> {
    let entries = fs::read_dir(run).map_err(|e| CliError::io(run, e))?;
    let mut seeds = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| CliError::io(run, e))?;
        let name = entry.file_name();
        let Some(s) = name.to_str().and_then(|n| n.strip_prefix("seed_")).and_then(|s| s.parse().ok()) else {
            continue;
        };
        if entry.path().join("ledger.json").is_file() {
            seeds.push(s);
        }
    }
    seeds.sort_unstable();
    Ok(seeds)
}

/// Re-aggregates `summary.csv` from the per-seed ledgers.
pub fn rebuild_summary(run: &Path) -> CliResult<Vec<SummaryRow>> {
    let seeds = ledger_seeds(run)?;
    if seeds.is_empty() {
        return Err(CliError::Data(format!("no seed_*/ledger.json under {}", run.display())));
    }
    let ledgers: Vec<LedgerSummary> = seeds
        .iter()
        .map(|&s| read_json(&seed_dir(run, s).join("ledger.json")))
        .collect::<CliResult<_>>()?;
    let hash = ledgers[0].meta.config_hash.clone();
    if let Some(l) = ledgers.iter().find(|l| l.meta.config_hash != hash) {
        return Err(CliError::Data(format!(
            "ledger for seed {} has config hash {}, expected {hash}",
            l.meta.seed, l.meta.config_hash
        )));
    }
    let rows = summary_table(&ledgers)?;
    write_file(&run.join("summary.csv"), &summary_csv(&hash, &seeds, &rows)?)?;
    Ok(rows)
}

/// Reads a curve CSV; an empty or malformed file is a data error.
pub fn read_curve(path: &Path) -> CliResult<(String, Vec<CurvePoint>)> {
    let bad = |m: String| CliError::Data(format!("{}: {m}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != CURVE_HEADER {
        return Err(bad(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut group = None;
    let mut points = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |j: usize| -> CliResult<f64> {
            rec[j]
                .parse::<f64>()
                .map_err(|_| bad(format!("row {i}: bad value `{}` in `{}`", &rec[j], CURVE_HEADER[j])))
        };
        let round = rec[0].parse::<usize>().map_err(|_| bad(format!("row {i}: bad round `{}`", &rec[0])))?;
        if group.get_or_insert_with(|| rec[1].to_string()) != &rec[1] {
            return Err(bad(format!("row {i}: mixed groups")));
        }
        points.push(CurvePoint {
            round,
            frac_of_group_seen: num(2)?,
            alg_regret: num(3)?,
            baseline_regret: num(4)?,
        });
    }
    let group = group.ok_or_else(|| bad("curve file has no rows".into()))?;
    Ok((group, points))
}
