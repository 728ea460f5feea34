use crate::error::Result;
use crate::experts::VawState;
use crate::loss::{clip_unit, squared_loss};
use crate::types::{check_rounds, Round};

/// Online ridge regression on the whole history, ignoring subsequences.
///
/// At round `t` it predicts `clip(<theta_t, x_t>)` with `theta_t` the ridge fit
/// (penalty `lambda`) on rounds `1..t-1`, and charges the loss to every
/// subsequence active at `t`, weighted by activity. Returns one cumulative
/// series per subsequence.
pub fn baseline_run(rounds: &[Round], lambda: f64) -> Result<Vec<Vec<f64>>> {
    let (d, k) = check_rounds(rounds)?;
    let mut state = VawState::new(d, lambda)?;
    let mut series: Vec<Vec<f64>> = vec![Vec::with_capacity(rounds.len()); k];
    let mut cum = vec![0.0; k];
    for (t, r) in rounds.iter().enumerate() {
        let step = || -> Result<f64> {
            let p = clip_unit(state.predict_ridge(r.context.values())?)?;
            squared_loss(p, r.outcome)
        };
        let loss = step().map_err(|e| e.at_round(t))?;
        for (i, (c, s)) in cum.iter_mut().zip(series.iter_mut()).enumerate() {
            *c += r.activity.get(i) * loss;
            s.push(*c);
        }
        state
            .update(r.context.values(), r.outcome, 1.0)
            .map_err(|e| e.at_round(t))?;
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{ActivityVector, Context};

    #[test]
    fn first_prediction_is_zero_then_half() {
        let c = Context::new(vec![1.0]).unwrap();
        let rounds = vec![
            Round::new(c.clone(), ActivityVector::all(1), 1.0),
            Round::new(c, ActivityVector::all(1), 1.0),
        ];
        let s = baseline_run(&rounds, 1.0).unwrap();
        // t=1 predicts 0, loss 1; t=2 predicts 1/2, loss 1/4
        assert_eq!(s[0], vec![1.0, 1.25]);
    }

    #[test]
    fn loss_is_charged_only_to_active_groups() {
        let c = Context::new(vec![1.0]).unwrap();
        let rounds = vec![Round::new(c, ActivityVector::new(vec![1.0, 0.0]).unwrap(), 0.5)];
        let s = baseline_run(&rounds, 1.0).unwrap();
        assert_eq!(s, vec![vec![0.25], vec![0.0]]);
    }
}
