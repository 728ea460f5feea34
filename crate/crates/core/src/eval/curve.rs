use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};

/// One point of a regret-versus-progress curve for a single group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// 1-based round index.
    pub round: usize,
    pub frac_of_group_seen: f64,
    pub alg_regret: f64,
    pub baseline_regret: f64,
}

/// Samples regret curves at `points` evenly spaced fractions of the group.
///
/// `active` flags the rounds in the group; the three series are cumulative
/// losses indexed by round. Regret at round `t` is cumulative loss minus the
/// final benchmark model's cumulative loss on the same prefix, so the last
/// point equals the reported regret.
pub fn regret_curve(
    active: &[bool],
    alg: &[f64],
    baseline: &[f64],
    benchmark: &[f64],
    points: usize,
) -> Result<Vec<CurvePoint>> {
    let t = active.len();
    check_dim("algorithm series", t, alg.len())?;
    check_dim("baseline series", t, baseline.len())?;
    check_dim("benchmark series", t, benchmark.len())?;
    let positions: Vec<usize> = (0..t).filter(|&i| active[i]).collect();
    let n = positions.len();
    if n == 0 || points == 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(points.min(n));
    let mut last_seen = 0;
    for k in 1..=points {
        let seen = (k * n).div_ceil(points);
        if seen == last_seen {
            continue;
        }
        last_seen = seen;
        let r = positions[seen - 1];
        out.push(CurvePoint {
            round: r + 1,
            frac_of_group_seen: seen as f64 / n as f64,
            alg_regret: alg[r] - benchmark[r],
            baseline_regret: baseline[r] - benchmark[r],
        });
    }
    Ok(out)
}
