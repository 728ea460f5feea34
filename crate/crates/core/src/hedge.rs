//! AdaNormalHedge with time-selection functions.
//!
//! Each meta-expert `i` carries a [`PotentialRecord`] `(R_i, C_i)`: its
//! cumulative activity-gated instantaneous regret and the cumulative absolute
//! value of the same quantity. The potential is
//! `Phi(R, C) = exp([R]_+^2 / (3C))` with `Phi(., 0) = 1`, and the weight is
//! `w(R, C) = (Phi(R+1, C+1) - Phi(R-1, C+1)) / 2`. The distribution played
//! is proportional to `activity * prior * w`.
//!
//! Weights grow like `exp(C/3)` when an expert dominates for long stretches,
//! so the distribution is normalized in the log domain.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, check_unit, Error, Result};
use crate::types::ActivityVector;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PotentialRecord {
    /// Cumulative instantaneous regret.
    pub r: f64,
    /// Cumulative absolute instantaneous regret.
    pub c: f64,
}

impl PotentialRecord {
    pub fn new(r: f64, c: f64) -> Self {
        Self { r, c }
    }
}

/// How the aggregator turns its distribution into a single prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlayMode {
    /// Draw one meta-expert per round with fresh randomness.
    #[default]
    Sample,
    /// Play the probability-weighted average (convex losses only).
    Mix,
}

pub fn potential(r: f64, c: f64) -> Result<f64> {
    Ok(log_potential(r, c)?.exp())
}

fn log_potential(r: f64, c: f64) -> Result<f64> {
    if c < 0.0 || c.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "cumulative absolute regret must be >= 0, got {c}"
        )));
    }
    if c == 0.0 {
        return Ok(0.0);
    }
    let pos = r.max(0.0);
    Ok(pos * pos / (3.0 * c))
}

pub fn raw_weight(record: &PotentialRecord) -> f64 {
    log_raw_weight(record).exp()
}

/// `ln w(R, C)`, or negative infinity when the weight is exactly zero.
pub fn log_raw_weight(record: &PotentialRecord) -> f64 {
    let c = record.c.max(0.0) + 1.0;
    let hi = record.r + 1.0;
    if hi <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let lo = (record.r - 1.0).max(0.0);
    let a = hi * hi / (3.0 * c);
    let b = lo * lo / (3.0 * c);
    // w = e^a (1 - e^(b-a)) / 2 with b < a
    a + (-(b - a).exp_m1()).ln() - std::f64::consts::LN_2
}

/// A probability vector over meta-experts with zero mass on inactive ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HedgeDistribution(Vec<f64>);

impl HedgeDistribution {
    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index whose cumulative mass first exceeds `u` in `[0, 1)`.
    pub fn index_for(&self, u: f64) -> usize {
        let mut acc = 0.0;
        let mut last = 0;
        for (i, &p) in self.0.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                last = i;
                if u < acc {
                    return i;
                }
            }
        }
        last
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.index_for(rng.random::<f64>())
    }
}

pub fn distribution(
    records: &[PotentialRecord],
    activity: &ActivityVector,
    priors: &[f64],
) -> Result<HedgeDistribution> {
    let k = records.len();
    check_dim("activity vector", k, activity.len())?;
    check_dim("priors", k, priors.len())?;
    if let Some(&p) = priors.iter().find(|&&p| !(p >= 0.0 && p.is_finite())) {
        return Err(Error::InvalidArgument(format!("prior {p} is not a nonnegative real")));
    }
    if !activity.any_active() {
        return Err(Error::NoActiveExpert);
    }

    let base: Vec<f64> = (0..k)
        .map(|i| {
            let m = activity.get(i) * priors[i];
            if m > 0.0 {
                m.ln()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    if base.iter().all(|b| *b == f64::NEG_INFINITY) {
        return Err(Error::NoActiveExpert);
    }

    let logits: Vec<f64> = (0..k)
        .map(|i| {
            if base[i] == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                base[i] + log_raw_weight(&records[i])
            }
        })
        .collect();

    let chosen = if logits.iter().all(|l| *l == f64::NEG_INFINITY) {
        // every active weight is zero: fall back to the prior over active experts
        &base
    } else {
        &logits
    };
    Ok(HedgeDistribution(softmax(chosen)))
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits
        .iter()
        .map(|&l| if l == f64::NEG_INFINITY { 0.0 } else { (l - max).exp() })
        .collect();
    let total: f64 = out.iter().sum();
    for p in &mut out {
        *p /= total;
    }
    out
}

pub fn hedge_update(
    records: &mut [PotentialRecord],
    activity: &ActivityVector,
    expert_losses: &[f64],
    incurred_loss: f64,
) -> Result<()> {
    let k = records.len();
    check_dim("activity vector", k, activity.len())?;
    check_dim("expert losses", k, expert_losses.len())?;
    check_unit("incurred loss", incurred_loss)?;
    for &l in expert_losses {
        check_unit("expert loss", l)?;
    }
    for (i, rec) in records.iter_mut().enumerate() {
        let a = activity.get(i);
        if a == 0.0 {
            continue;
        }
        let r = a * (incurred_loss - expert_losses[i]);
        rec.r += r;
        rec.c += r.abs();
    }
    Ok(())
}

/// AdaNormalHedge state over a fixed set of meta-experts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaNormalHedge {
    records: Vec<PotentialRecord>,
    priors: Vec<f64>,
}

impl AdaNormalHedge {
    /// Uniform priors over `k` meta-experts.
    pub fn new(k: usize) -> Self {
        Self {
            records: vec![PotentialRecord::default(); k],
            priors: vec![1.0 / k.max(1) as f64; k],
        }
    }

    pub fn with_priors(priors: Vec<f64>) -> Result<Self> {
        if priors.is_empty() {
            return Err(Error::InvalidArgument("no meta-experts".into()));
        }
        if priors.iter().any(|&p| !(p >= 0.0 && p.is_finite())) || priors.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidArgument(
                "priors must be nonnegative with positive total".into(),
            ));
        }
        Ok(Self {
            records: vec![PotentialRecord::default(); priors.len()],
            priors,
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[PotentialRecord] {
        &self.records
    }

    /// Overwrites the records; used to start from a known state.
    pub fn set_records(&mut self, records: Vec<PotentialRecord>) -> Result<()> {
        check_dim("records", self.records.len(), records.len())?;
        self.records = records;
        Ok(())
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn distribution(&self, activity: &ActivityVector) -> Result<HedgeDistribution> {
        distribution(&self.records, activity, &self.priors)
    }

    pub fn update(
        &mut self,
        activity: &ActivityVector,
        expert_losses: &[f64],
        incurred_loss: f64,
    ) -> Result<()> {
        hedge_update(&mut self.records, activity, expert_losses, incurred_loss)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values evaluated with mpmath at 30 significant digits.
    const W_0_0: f64 = 0.197_806_212_543_044_76;
    const W_2_2: f64 = 0.800_381_379_858_590_8;

    #[test]
    fn potential_examples() {
        assert_eq!(potential(-2.0, 5.0).unwrap(), 1.0);
        assert_eq!(potential(0.0, 0.0).unwrap(), 1.0);
        assert!((potential(3.0, 3.0).unwrap() - std::f64::consts::E).abs() < 1e-15);
        assert!(potential(1.0, -1.0).is_err());
    }

    #[test]
    fn raw_weight_examples() {
        assert!((raw_weight(&PotentialRecord::new(0.0, 0.0)) - W_0_0).abs() < 1e-15);
        assert_eq!(raw_weight(&PotentialRecord::new(-5.0, 10.0)), 0.0);
        assert!((raw_weight(&PotentialRecord::new(2.0, 2.0)) - W_2_2).abs() < 1e-14);
    }

    #[test]
    fn raw_weight_matches_direct_formula() {
        for &(r, c) in &[(0.5, 0.7), (3.0, 10.0), (-0.5, 2.0), (10.0, 40.0), (0.99, 0.0)] {
            let direct = 0.5
                * (potential(r + 1.0, c + 1.0).unwrap() - potential(r - 1.0, c + 1.0).unwrap());
            let w = raw_weight(&PotentialRecord::new(r, c));
            assert!((w - direct).abs() <= 1e-12 * direct.max(1.0), "{r} {c}: {w} vs {direct}");
        }
    }

    #[test]
    fn log_weight_survives_huge_potentials() {
        // exp(3000^2 / 9003) overflows; the log weight does not
        let rec = PotentialRecord::new(3000.0, 3000.0);
        let lw = log_raw_weight(&rec);
        assert!(lw.is_finite() && lw > 700.0);
        let d = distribution(
            &[rec, PotentialRecord::new(2990.0, 3000.0)],
            &ActivityVector::all(2),
            &[0.5, 0.5],
        )
        .unwrap();
        let p = d.probabilities();
        assert!(p[0] > p[1] && (p[0] + p[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distribution_examples() {
        let recs = [PotentialRecord::new(1.0, 3.0), PotentialRecord::new(-2.0, 4.0)];
        let d = distribution(&recs, &ActivityVector::new(vec![0.0, 1.0]).unwrap(), &[0.5, 0.5]).unwrap();
        assert_eq!(d.probabilities(), &[0.0, 1.0]);

        let zero = [PotentialRecord::default(); 2];
        let d = distribution(&zero, &ActivityVector::all(2), &[0.5, 0.5]).unwrap();
        assert_eq!(d.probabilities(), &[0.5, 0.5]);

        let recs = [PotentialRecord::new(2.0, 2.0), PotentialRecord::new(0.0, 0.0)];
        let d = distribution(&recs, &ActivityVector::all(2), &[0.5, 0.5]).unwrap();
        let expected = W_2_2 / (W_2_2 + W_0_0);
        assert!((d.probabilities()[0] - expected).abs() < 1e-14);
        assert!((d.probabilities()[0] - 0.801_834_631).abs() < 1e-9);
        assert!((d.probabilities()[1] - 0.198_165_369).abs() < 1e-9);
    }

    #[test]
    fn zero_weight_fallback_uses_prior_over_active() {
        let recs = [PotentialRecord::new(-5.0, 5.0); 3];
        let act = ActivityVector::new(vec![1.0, 0.0, 1.0]).unwrap();
        let d = distribution(&recs, &act, &[0.2, 0.5, 0.3]).unwrap();
        let p = d.probabilities();
        assert!((p[0] - 0.4).abs() < 1e-15 && p[1] == 0.0 && (p[2] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn no_active_expert() {
        let recs = [PotentialRecord::default(); 2];
        let act = ActivityVector::new(vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            distribution(&recs, &act, &[0.5, 0.5]),
            Err(Error::NoActiveExpert)
        ));
    }

    #[test]
    fn update_examples() {
        let mut recs = vec![PotentialRecord::new(0.3, 0.5), PotentialRecord::default()];
        let act = ActivityVector::new(vec![0.0, 1.0]).unwrap();
        hedge_update(&mut recs, &act, &[0.0, 0.2], 0.6).unwrap();
        assert_eq!(recs[0], PotentialRecord::new(0.3, 0.5));
        assert!((recs[1].r - 0.4).abs() < 1e-15 && (recs[1].c - 0.4).abs() < 1e-15);

        let before = recs.clone();
        hedge_update(&mut recs, &ActivityVector::all(2), &[0.6, 0.6], 0.6).unwrap();
        assert_eq!(recs, before);

        assert!(hedge_update(&mut recs, &act, &[0.0, 1.2], 0.6).is_err());
        assert!(hedge_update(&mut recs, &act, &[0.0, 0.2], -0.1).is_err());
    }

    #[test]
    fn sampling_respects_mass() {
        let d = HedgeDistribution(vec![0.0, 0.25, 0.0, 0.75]);
        assert_eq!(d.index_for(0.0), 1);
        assert_eq!(d.index_for(0.2499), 1);
        assert_eq!(d.index_for(0.25), 3);
        assert_eq!(d.index_for(0.999_999), 3);
    }
}
