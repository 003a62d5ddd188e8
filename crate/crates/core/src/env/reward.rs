use crate::error::{Error, Result};
use crate::metrics::MetricTuple;
use crate::model::Weights;

/// Dense per-step rewards from a trace of normalized metrics.
///
/// The last step earns the weighted final metrics, which also serve as the
/// baseline `b`. Every earlier step `t` earns the weighted change
/// `m_t − m_{t−1}` plus `b`, with the pre-episode metrics `m_0` all zero.
pub fn compute_rewards(trace: &[MetricTuple], weights: &Weights) -> Result<Vec<f64>> {
    let last = trace.last().ok_or(Error::Empty("metric trace"))?;
    let baseline = last.weighted(weights);
    let zero = MetricTuple::default();
    let mut rewards = Vec::with_capacity(trace.len());
    for (t, m) in trace[..trace.len() - 1].iter().enumerate() {
        let prev = if t == 0 { &zero } else { &trace[t - 1] };
        rewards.push(m.weighted_delta(prev, weights) + baseline);
    }
    rewards.push(baseline);
    Ok(rewards)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(aln: f64, o: f64, hpwl: f64, l: f64, d: f64) -> MetricTuple {
        MetricTuple {
            aln,
            hpwl,
            overlap: o,
            adjacency: l,
            distance: d,
            normalized: true,
        }
    }

    #[test]
    fn two_step_hand_execution() {
        let trace = [m(0.5, 0.0, 0.2, 0.1, 0.1), m(0.9, 0.0, 0.5, 0.3, 0.0)];
        let r = compute_rewards(&trace, &Weights::uniform(1.0)).unwrap();
        assert!((r[1] - 0.7).abs() < 1e-12);
        assert!((r[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_metrics_give_baseline_after_first_step() {
        let trace = vec![m(0.4, 0.1, 0.3, 0.2, 0.05); 5];
        let w = Weights::default();
        let r = compute_rewards(&trace, &w).unwrap();
        let b = trace[0].weighted(&w);
        for &ri in &r[1..] {
            assert_eq!(ri, b);
        }
    }

    #[test]
    fn zero_metrics_give_zero_rewards() {
        let r = compute_rewards(&[MetricTuple::default(); 4], &Weights::default()).unwrap();
        assert!(r.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn empty_trace_is_an_error() {
        assert!(compute_rewards(&[], &Weights::default()).is_err());
    }
}
