use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Dataset, SortKey};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OrderMode {
    /// Uniform random permutation from `seed`.
    Shuffle { seed: u64 },
    /// Stable sort on a raw (pre-scaling) column.
    SortBy { column: String, ascending: bool },
}

fn cmp_keys(a: &SortKey, b: &SortKey) -> Ordering {
    match (a, b) {
        (SortKey::Num(x), SortKey::Num(y)) => x.total_cmp(y),
        (SortKey::Text(x), SortKey::Text(y)) => x.cmp(y),
        (SortKey::Num(_), SortKey::Text(_)) => Ordering::Less,
        (SortKey::Text(_), SortKey::Num(_)) => Ordering::Greater,
    }
}

pub fn order_rounds(data: &mut Dataset, mode: &OrderMode) -> Result<()> {
    let mut perm: Vec<usize> = (0..data.len()).collect();
    match mode {
        OrderMode::Shuffle { seed } => perm.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed)),
        OrderMode::SortBy { column, ascending } => {
            let keys = data
                .sort_keys
                .get(column)
                .ok_or_else(|| Error::MissingColumn(column.clone()))?;
            perm.sort_by(|&i, &j| {
                let o = cmp_keys(&keys[i], &keys[j]);
                if *ascending {
                    o
                } else {
                    o.reverse()
                }
            });
        }
    }
    data.permute(&perm);
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::types::{ActivityVector, Context, Round};

    fn dataset(ages: &[f64]) -> Dataset {
        let rounds = ages
            .iter()
            .map(|&a| Round::new(Context::new(vec![a / 100.0]).unwrap(), ActivityVector::all(1), 0.5))
            .collect();
        let mut sort_keys = BTreeMap::new();
        sort_keys.insert("age".to_string(), ages.iter().map(|&a| SortKey::Num(a)).collect());
        Dataset {
            group_names: vec!["always_on".into()],
            feature_names: vec!["age".into()],
            rounds,
            sort_keys,
        }
    }

    #[test]
    fn sort_ascending() {
        let mut d = dataset(&[30.0, 20.0, 25.0]);
        order_rounds(
            &mut d,
            &OrderMode::SortBy {
                column: "age".into(),
                ascending: true,
            },
        )
        .unwrap();
        let ages: Vec<f64> = d.rounds.iter().map(|r| r.context.values()[0] * 100.0).collect();
        assert_eq!(ages, vec![20.0, 25.0, 30.0]);
        assert_eq!(d.sort_keys["age"], vec![SortKey::Num(20.0), SortKey::Num(25.0), SortKey::Num(30.0)]);
    }

    #[test]
    fn shuffle_is_deterministic() {
        let ages: Vec<f64> = (0..50).map(f64::from).collect();
        let mut a = dataset(&ages);
        let mut b = dataset(&ages);
        order_rounds(&mut a, &OrderMode::Shuffle { seed: 3 }).unwrap();
        order_rounds(&mut b, &OrderMode::Shuffle { seed: 3 }).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.rounds, dataset(&ages).rounds);
    }

    #[test]
    fn unknown_column() {
        let mut d = dataset(&[1.0]);
        let mode = OrderMode::SortBy {
            column: "height".into(),
            ascending: true,
        };
        assert!(matches!(order_rounds(&mut d, &mode), Err(Error::MissingColumn(_))));
    }
}
