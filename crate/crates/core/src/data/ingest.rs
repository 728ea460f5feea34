use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Dataset, SortKey, ALWAYS_ON};
use crate::error::{Error, Result};
use crate::types::{ActivityVector, Context, Round};

/// How a raw column value decides group membership.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Rule {
    /// `lower < value <= upper`; a missing bound is unbounded.
    Threshold {
        feature: String,
        #[serde(default)]
        lower: Option<f64>,
        #[serde(default)]
        upper: Option<f64>,
    },
    /// Raw value is one of `values`.
    Category { feature: String, values: Vec<String> },
}

impl Rule {
    pub fn feature(&self) -> &str {
        match self {
            Rule::Threshold { feature, .. } | Rule::Category { feature, .. } => feature,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupRule {
    pub name: String,
    pub rule: Rule,
}

impl GroupRule {
    pub fn threshold(name: &str, feature: &str, lower: Option<f64>, upper: Option<f64>) -> Self {
        Self {
            name: name.into(),
            rule: Rule::Threshold {
                feature: feature.into(),
                lower,
                upper,
            },
        }
    }

    pub fn category(name: &str, feature: &str, values: &[&str]) -> Self {
        Self {
            name: name.into(),
            rule: Rule::Category {
                feature: feature.into(),
                values: values.iter().map(|s| s.to_string()).collect(),
            },
        }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreprocessSpec {
    /// Min-max scaled to `[0, 1]`.
    #[serde(default)]
    pub numeric: Vec<String>,
    /// One-hot encoded over the levels present in the file.
    #[serde(default)]
    pub categorical: Vec<String>,
    /// Min-max scaled to `[0, 1]`.
    pub label: String,
    #[serde(default = "default_true")]
    pub intercept: bool,
    pub groups: Vec<GroupRule>,
    #[serde(default = "default_true")]
    pub append_group_indicators: bool,
}

/// Scaling parameters fitted on the full file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    /// `(column, min, max)` per numeric column.
    pub numeric: Vec<(String, f64, f64)>,
    /// `(column, levels)` per categorical column, levels sorted.
    pub categorical: Vec<(String, Vec<String>)>,
    pub label: (String, f64, f64),
}

fn min_max(v: f64, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

impl Scaler {
    pub fn scale_label(&self, raw: f64) -> f64 {
        min_max(raw, self.label.1, self.label.2)
    }

    /// Recovers the category of `column` from an encoded feature row.
    pub fn decode_category<'a>(&'a self, features: &[f64], column: &str) -> Option<&'a str> {
        let mut offset = self.numeric.len();
        for (name, levels) in &self.categorical {
            if name == column {
                let block = features.get(offset..offset + levels.len())?;
                let hot = block.iter().position(|&v| v == 1.0)?;
                return Some(&levels[hot]);
            }
            offset += levels.len();
        }
        None
    }
}

pub fn ingest_csv(path: impl AsRef<Path>, spec: &PreprocessSpec) -> Result<(Dataset, Scaler)> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
    ingest_reader(file, spec)
}

/// Lines starting with `#` are skipped.
pub fn ingest_reader<R: Read>(input: R, spec: &PreprocessSpec) -> Result<(Dataset, Scaler)> {
    if spec.groups.is_empty() {
        return Err(Error::InvalidArgument("at least one group rule is required".into()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let numeric_idx = spec.numeric.iter().map(|c| col(c)).collect::<Result<Vec<_>>>()?;
    let cat_idx = spec.categorical.iter().map(|c| col(c)).collect::<Result<Vec<_>>>()?;
    let label_idx = col(&spec.label)?;
    let rule_idx = spec.groups.iter().map(|g| col(g.rule.feature())).collect::<Result<Vec<_>>>()?;

    let records = reader.records().collect::<std::result::Result<Vec<_>, _>>()?;
    if records.is_empty() {
        return Err(Error::Data("no data rows".into()));
    }

    let parse_num = |row: usize, column: &str, raw: &str| -> Result<f64> {
        raw.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::ParseCell {
                row,
                column: column.to_string(),
                value: raw.to_string(),
            })
    };
    let cell = |row: usize, rec: &csv::StringRecord, i: usize| -> Result<String> {
        match rec.get(i) {
            Some(v) if !v.is_empty() => Ok(v.to_string()),
            other => Err(Error::ParseCell {
                row,
                column: headers[i].to_string(),
                value: other.unwrap_or("").to_string(),
            }),
        }
    };

    // numeric columns, label, categorical values, group flags
    let mut numeric: Vec<Vec<f64>> = vec![Vec::with_capacity(records.len()); numeric_idx.len()];
    let mut cats: Vec<Vec<String>> = vec![Vec::with_capacity(records.len()); cat_idx.len()];
    let mut labels = Vec::with_capacity(records.len());
    let mut flags: Vec<Vec<bool>> = Vec::with_capacity(records.len());
    for (row, rec) in records.iter().enumerate() {
        for (j, &i) in numeric_idx.iter().enumerate() {
            numeric[j].push(parse_num(row, &spec.numeric[j], &cell(row, rec, i)?)?);
        }
        for (j, &i) in cat_idx.iter().enumerate() {
            cats[j].push(cell(row, rec, i)?);
        }
        labels.push(parse_num(row, &spec.label, &cell(row, rec, label_idx)?)?);
        let mut f = Vec::with_capacity(spec.groups.len() + 1);
        for (g, &i) in spec.groups.iter().zip(&rule_idx) {
            let raw = cell(row, rec, i)?;
            f.push(match &g.rule {
                Rule::Threshold { feature, lower, upper } => {
                    let v = parse_num(row, feature, &raw)?;
                    lower.is_none_or(|l| v > l) && upper.is_none_or(|u| v <= u)
                }
                Rule::Category { values, .. } => values.iter().any(|s| *s == raw),
            });
        }
        f.push(true);
        flags.push(f);
    }

    let (lmin, lmax) = bounds(&labels);
    if lmax <= lmin {
        return Err(Error::Data(format!(
            "label column `{}` is constant ({lmin}) and cannot be scaled to [0, 1]",
            spec.label
        )));
    }
    let scaler = Scaler {
        numeric: spec
            .numeric
            .iter()
            .zip(&numeric)
            .map(|(n, v)| {
                let (lo, hi) = bounds(v);
                (n.clone(), lo, hi)
            })
            .collect(),
        categorical: spec
            .categorical
            .iter()
            .zip(&cats)
            .map(|(n, v)| (n.clone(), v.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()))
            .collect(),
        label: (spec.label.clone(), lmin, lmax),
    };

    let mut feature_names: Vec<String> = spec.numeric.clone();
    for (n, levels) in &scaler.categorical {
        feature_names.extend(levels.iter().map(|l| format!("{n}={l}")));
    }
    if spec.append_group_indicators {
        feature_names.extend(spec.groups.iter().map(|g| format!("in_{}", g.name)));
    }
    if spec.intercept {
        feature_names.push("intercept".into());
    }

    let mut rounds = Vec::with_capacity(records.len());
    for row in 0..records.len() {
        let mut x = Vec::with_capacity(feature_names.len());
        for (j, (_, lo, hi)) in scaler.numeric.iter().enumerate() {
            x.push(min_max(numeric[j][row], *lo, *hi));
        }
        for (j, (_, levels)) in scaler.categorical.iter().enumerate() {
            x.extend(levels.iter().map(|l| if *l == cats[j][row] { 1.0 } else { 0.0 }));
        }
        if spec.append_group_indicators {
            x.extend(flags[row][..spec.groups.len()].iter().map(|&f| if f { 1.0 } else { 0.0 }));
        }
        if spec.intercept {
            x.push(1.0);
        }
        rounds.push(Round::new(
            Context::new(x)?,
            ActivityVector::from_flags(&flags[row]),
            scaler.scale_label(labels[row]),
        ));
    }

    for (i, g) in spec.groups.iter().enumerate() {
        if !flags.iter().any(|f| f[i]) {
            log::warn!("group `{}` has no members", g.name);
        }
    }

    let mut sort_keys = BTreeMap::new();
    for (n, v) in spec.numeric.iter().zip(numeric) {
        sort_keys.insert(n.clone(), v.into_iter().map(SortKey::Num).collect());
    }
    for (n, v) in spec.categorical.iter().zip(cats) {
        sort_keys.insert(n.clone(), v.into_iter().map(SortKey::Text).collect());
    }

    let mut group_names: Vec<String> = spec.groups.iter().map(|g| g.name.clone()).collect();
    group_names.push(ALWAYS_ON.into());
    Ok((
        Dataset {
            group_names,
            feature_names,
            rounds,
            sort_keys,
        },
        scaler,
    ))
}

fn bounds(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> PreprocessSpec {
        PreprocessSpec {
            numeric: vec!["age".into()],
            categorical: vec!["color".into()],
            label: "y".into(),
            intercept: true,
            groups: vec![
                GroupRule::threshold("young", "age", None, Some(35.0)),
                GroupRule::threshold("middle", "age", Some(35.0), Some(50.0)),
                GroupRule::threshold("old", "age", Some(50.0), None),
                GroupRule::category("warm", "color", &["red", "orange"]),
            ],
            append_group_indicators: true,
        }
    }

    const CSV: &str = "age,color,y\n10,red,5\n20,blue,7\n30,orange,9\n";

    #[test]
    fn min_max_and_one_hot() {
        let (ds, scaler) = ingest_reader(CSV.as_bytes(), &spec()).unwrap();
        let ages: Vec<f64> = ds.rounds.iter().map(|r| r.context.values()[0]).collect();
        assert_eq!(ages, vec![0.0, 0.5, 1.0]);
        let labels: Vec<f64> = ds.rounds.iter().map(|r| r.outcome).collect();
        assert_eq!(labels, vec![0.0, 0.5, 1.0]);
        // levels sorted: blue, orange, red
        assert_eq!(scaler.categorical[0].1, vec!["blue", "orange", "red"]);
        for r in &ds.rounds {
            let hot: f64 = r.context.values()[1..4].iter().sum();
            assert_eq!(hot, 1.0);
        }
        assert_eq!(scaler.decode_category(ds.rounds[0].context.values(), "color"), Some("red"));
        assert_eq!(scaler.decode_category(ds.rounds[1].context.values(), "color"), Some("blue"));
        assert_eq!(ds.group_names.last().unwrap(), ALWAYS_ON);
        assert_eq!(ds.feature_names.len(), ds.rounds[0].context.dim());
    }

    #[test]
    fn age_thresholds() {
        let csv = "age,color,y\n35,red,1\n35.5,red,2\n50,red,3\n51,red,4\n";
        let (ds, _) = ingest_reader(csv.as_bytes(), &spec()).unwrap();
        let groups: Vec<Vec<f64>> = ds.rounds.iter().map(|r| r.activity.weights()[..3].to_vec()).collect();
        assert_eq!(
            groups,
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0]
            ]
        );
        assert!(ds.rounds.iter().all(|r| r.activity.get(4) == 1.0));
    }

    #[test]
    fn errors() {
        let missing = "age,y\n1,2\n";
        assert!(matches!(ingest_reader(missing.as_bytes(), &spec()), Err(Error::MissingColumn(c)) if c == "color"));

        let bad = "age,color,y\n10,red,5\nabc,red,6\n";
        match ingest_reader(bad.as_bytes(), &spec()) {
            Err(Error::ParseCell { row, column, .. }) => assert_eq!((row, column.as_str()), (1, "age")),
            other => panic!("{other:?}"),
        }

        let empty_cell = "age,color,y\n10,,5\n";
        assert!(matches!(ingest_reader(empty_cell.as_bytes(), &spec()), Err(Error::ParseCell { .. })));

        let constant = "age,color,y\n10,red,5\n20,red,5\n";
        assert!(matches!(ingest_reader(constant.as_bytes(), &spec()), Err(Error::Data(_))));
    }
}
