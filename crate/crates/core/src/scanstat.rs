//! Moving-sum (scan) statistics of demand sequences.

use crate::demand::DemandModel;
use crate::error::{Error, Result};
use crate::rng::{demand_stream, map_trials, stream};
use crate::stats::ProbabilityEstimate;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanQuery {
    pub n: usize,
    pub s: usize,
    pub circular: bool,
    pub x: f64,
}

impl ScanQuery {
    pub fn new(n: usize, s: usize, circular: bool, x: f64) -> Result<Self> {
        if s == 0 || s > n {
            return Err(Error::WindowTooLarge { s, n });
        }
        Ok(Self { n, s, circular, x })
    }
}

/// Largest sum of `s` consecutive entries; circular windows wrap around the end.
pub fn scan_statistic(xs: &[f64], s: usize, circular: bool) -> Result<f64> {
    let n = xs.len();
    if s == 0 || s > n {
        return Err(Error::WindowTooLarge { s, n });
    }
    let mut sum: f64 = xs[..s].iter().sum();
    let mut best = sum;
    let windows = if circular { n } else { n - s + 1 };
    for i in 1..windows {
        sum += xs[(i + s - 1) % n] - xs[i - 1];
        best = best.max(sum);
    }
    Ok(best)
}

/// Scan statistics of `trials` sampled sequences, one row per window length.
///
/// Trial `t` uses the same demand stream as trial `t` of the robustness
/// estimator, so the first `n` values coincide with its demand vector.
pub fn scan_values_mc(
    model: &DemandModel,
    n: usize,
    windows: &[usize],
    circular: bool,
    trials: u64,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if let Some(&s) = windows.iter().find(|&&s| s == 0 || s > n) {
        return Err(Error::WindowTooLarge { s, n });
    }
    let per_trial = map_trials(trials, |t| {
        let xs = model.sample(n, &mut demand_stream(seed, t));
        windows
            .iter()
            .map(|&s| scan_statistic(xs.as_slice(), s, circular).expect("window validated"))
            .collect::<Vec<f64>>()
    });
    Ok((0..windows.len()).map(|w| per_trial.iter().map(|row| row[w]).collect()).collect())
}

/// Fraction of sampled scan values at or below `x`.
pub fn empirical_cdf(values: &[f64], x: f64) -> ProbabilityEstimate {
    let hits = values.iter().filter(|&&v| v <= x).count() as u64;
    ProbabilityEstimate::from_counts(hits, values.len() as u64)
}

pub fn scan_cdf_mc(model: &DemandModel, q: ScanQuery, trials: u64, seed: u64) -> Result<ProbabilityEstimate> {
    let values = scan_values_mc(model, q.n, &[q.s], q.circular, trials, seed)?;
    Ok(empirical_cdf(&values[0], q.x))
}

/// `exp(-(n - s + 1) * P(window sum > x))`.
pub fn scan_cdf_poisson(model: &DemandModel, q: ScanQuery) -> Result<f64> {
    ScanQuery::new(q.n, q.s, q.circular, q.x)?;
    let tail = model.sum_tail(q.s, q.x);
    Ok((-((q.n - q.s + 1) as f64) * tail).exp())
}

/// Naus product approximation `P2 * (P3 / P2)^(L/s - 2)`.
///
/// `P2` and `P3` are the probabilities that no window of length `s` exceeds
/// `x` within `2s` and `3s` consecutive values, estimated by simulation from
/// the same `3s`-long samples.
/// `L` is `n`, or `n + s - 1` for circular queries (the unrolled sequence that
/// carries all `n` circular windows).
pub fn scan_cdf_naus(model: &DemandModel, q: ScanQuery, trials_per_cell: u64, seed: u64) -> Result<f64> {
    ScanQuery::new(q.n, q.s, q.circular, q.x)?;
    if q.n < 3 * q.s {
        return Err(Error::TooShort { n: q.n, s: q.s });
    }
    let cells = map_trials(trials_per_cell, |t| {
        let mut rng = stream(seed ^ 0x5a5a_0003, t);
        let xs = model.sample(3 * q.s, &mut rng);
        let xs = xs.as_slice();
        let ok2 = scan_statistic(&xs[..2 * q.s], q.s, false).expect("len >= s") <= q.x;
        (ok2, ok2 && scan_statistic(&xs[q.s..], q.s, false).expect("len >= s") <= q.x)
    });
    let trials = trials_per_cell.max(1) as f64;
    let p2 = cells.iter().filter(|c| c.0).count() as f64 / trials;
    let p3 = cells.iter().filter(|c| c.1).count() as f64 / trials;
    if p2 <= 0.0 {
        return Ok(0.0);
    }
    let length = if q.circular { q.n + q.s - 1 } else { q.n };
    let exponent = length as f64 / q.s as f64 - 2.0;
    Ok((p2 * (p3 / p2).powf(exponent)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistic_examples() {
        assert_eq!(scan_statistic(&[1., 1., 1., 1.], 2, false).unwrap(), 2.0);
        assert_eq!(scan_statistic(&[0., 3., 1., 2.], 2, false).unwrap(), 4.0);
        assert_eq!(scan_statistic(&[0., 3., 1., 2.], 2, true).unwrap(), 4.0);
        assert_eq!(scan_statistic(&[5., 0., 0., 0.], 2, true).unwrap(), 5.0);
        assert_eq!(scan_statistic(&[5., 0., 0., 0.], 2, false).unwrap(), 5.0);
        assert_eq!(scan_statistic(&[0., 0., 1., 4.], 2, true).unwrap(), 5.0);
        assert_eq!(scan_statistic(&[1., 0., 0., 4.], 2, true).unwrap(), 5.0);
        assert_eq!(scan_statistic(&[1., 0., 0., 4.], 2, false).unwrap(), 4.0);
        assert_eq!(scan_statistic(&[1.], 2, false), Err(Error::WindowTooLarge { s: 2, n: 1 }));
    }

    #[test]
    fn mc_degenerate_models() {
        let zero = DemandModel::bernoulli(1.0, 0.0).unwrap();
        let q = ScanQuery::new(10, 3, true, 0.0).unwrap();
        assert_eq!(scan_cdf_mc(&zero, q, 100, 1).unwrap().p_hat, 1.0);
        let one = DemandModel::bernoulli(1.0, 1.0).unwrap();
        let q = ScanQuery::new(10, 3, false, 2.5).unwrap();
        assert_eq!(scan_cdf_mc(&one, q, 100, 1).unwrap().p_hat, 0.0);
    }

    #[test]
    fn poisson_examples() {
        let m = DemandModel::bernoulli(1.0, 0.1).unwrap();
        let q = ScanQuery::new(100, 3, false, 1.5).unwrap();
        let tail: f64 = 3.0 * 0.01 * 0.9 + 0.001;
        let expected = (-98.0 * tail).exp();
        assert!((scan_cdf_poisson(&m, q).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.0643).abs() < 1e-3);
        let q = ScanQuery::new(100, 3, false, 3.0).unwrap();
        assert_eq!(scan_cdf_poisson(&m, q).unwrap(), 1.0);
    }

    #[test]
    fn naus_requires_three_windows() {
        let m = DemandModel::exp(1.0).unwrap();
        let q = ScanQuery::new(8, 3, false, 1.0).unwrap();
        assert_eq!(scan_cdf_naus(&m, q, 10, 1), Err(Error::TooShort { n: 8, s: 3 }));
        let zero = DemandModel::bernoulli(1.0, 0.0).unwrap();
        let q = ScanQuery::new(30, 3, false, 0.5).unwrap();
        assert_eq!(scan_cdf_naus(&zero, q, 100, 1).unwrap(), 1.0);
    }
}
