//! The robustness metric: probability that a random demand vector is servable.

use crate::allocation::{DesignKind, StorageAllocation};
use crate::demand::DemandModel;
use crate::error::{Error, Result};
use crate::feasibility::check_flow;
use crate::rng::{allocation_stream, count_trials, demand_stream, map_trials};
use crate::stats::ProbabilityEstimate;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustnessEstimate {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    pub seed: u64,
}

impl RobustnessEstimate {
    fn from_counts(successes: u64, trials: u64, seed: u64) -> Self {
        let est = ProbabilityEstimate::from_counts(successes, trials);
        Self { p_hat: est.p_hat, ci_low: est.ci_low, ci_high: est.ci_high, trials, seed }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

/// Where the allocation for each trial comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum AllocationSource {
    /// One allocation shared by every trial.
    Fixed(StorageAllocation),
    /// A fresh randomized allocation per trial, drawn from the trial's allocation stream.
    Resampled { kind: DesignKind, n: usize, d: usize },
}

impl AllocationSource {
    /// Randomized designs are resampled per trial, deterministic ones fixed.
    pub fn for_design(kind: DesignKind, n: usize, d: usize, seed: u64, fix_alloc: bool) -> Result<Self> {
        if kind.is_randomized() && !fix_alloc {
            // surface constructor errors before any trial runs
            StorageAllocation::build_with_rng(kind, n, d, &mut allocation_stream(seed, 0))?;
            Ok(Self::Resampled { kind, n, d })
        } else {
            Ok(Self::Fixed(StorageAllocation::build(kind, n, d, Some(seed))?))
        }
    }

    pub fn n_objects(&self) -> usize {
        match self {
            Self::Fixed(a) => a.n_objects(),
            Self::Resampled { kind: DesignKind::SingleChoice { b }, n, .. } => n * b,
            Self::Resampled { n, .. } => *n,
        }
    }

    fn with_allocation<T>(&self, seed: u64, trial: u64, f: impl FnOnce(&StorageAllocation) -> T) -> Result<T> {
        match self {
            Self::Fixed(a) => Ok(f(a)),
            Self::Resampled { kind, n, d } => {
                let a = StorageAllocation::build_with_rng(*kind, *n, *d, &mut allocation_stream(seed, trial))?;
                Ok(f(&a))
            }
        }
    }
}

fn check_inputs(m: f64, trials: u64) -> Result<()> {
    if !(m > 0.0) {
        return Err(Error::NonpositiveThreshold(m));
    }
    if trials == 0 {
        return Err(Error::ParameterMismatch("trials must be at least 1".into()));
    }
    Ok(())
}

/// Monte Carlo estimate of the probability that the demand is servable at capacity `m`.
pub fn estimate_p(source: &AllocationSource, model: &DemandModel, m: f64, trials: u64, seed: u64) -> Result<RobustnessEstimate> {
    check_inputs(m, trials)?;
    let k = source.n_objects();
    let failure = std::sync::Mutex::new(None);
    let hits = count_trials(trials, |t| {
        let rho = model.sample(k, &mut demand_stream(seed, t));
        match source.with_allocation(seed, t, |a| check_flow(a, &rho, m)) {
            Ok(Ok(v)) => v.feasible,
            Ok(Err(e)) | Err(e) => {
                failure.lock().expect("poisoned").get_or_insert(e);
                false
            }
        }
    });
    if let Some(e) = failure.into_inner().expect("poisoned") {
        return Err(e);
    }
    Ok(RobustnessEstimate::from_counts(hits, trials, seed))
}

/// Estimates at several capacities from the same sampled demand vectors.
pub fn estimate_p_sweep(
    source: &AllocationSource,
    model: &DemandModel,
    ms: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<RobustnessEstimate>> {
    for &m in ms {
        check_inputs(m, trials)?;
    }
    let k = source.n_objects();
    let rows = map_trials(trials, |t| {
        let rho = model.sample(k, &mut demand_stream(seed, t));
        source.with_allocation(seed, t, |a| {
            ms.iter()
                .map(|&m| check_flow(a, &rho, m).map(|v| v.feasible))
                .collect::<Result<Vec<bool>>>()
        })?
    });
    let mut hits = vec![0u64; ms.len()];
    for row in rows {
        for (h, ok) in hits.iter_mut().zip(row?) {
            *h += u64::from(ok);
        }
    }
    Ok(hits.into_iter().map(|h| RobustnessEstimate::from_counts(h, trials, seed)).collect())
}

/// `F_b(m)^n` for `n` nodes each holding `b` objects once.
pub fn p_single_choice(n: usize, b: usize, model: &DemandModel, m: f64) -> Result<f64> {
    if b == 0 {
        return Err(Error::ParameterMismatch("single-choice needs b >= 1".into()));
    }
    Ok(model.sum_cdf(b, m).powi(n as i32))
}

/// `F_d(m d)^(n/d)` for the clustering design.
pub fn p_clustering(n: usize, d: usize, model: &DemandModel, m: f64) -> Result<f64> {
    if d == 0 || n % d != 0 {
        return Err(Error::ParameterMismatch(format!("clustering needs d | n, got n={n} d={d}")));
    }
    Ok(model.sum_cdf(d, m * d as f64).powi((n / d) as i32))
}

/// Exact robustness under `m d * Bernoulli(p)` demands.
///
/// Averages over the number of active objects `A ~ Binomial(n, p)` the
/// probability that `A` uniformly chosen objects have pairwise disjoint
/// service choices. A term is zero as soon as any product factor is
/// nonpositive.
pub fn p_bernoulli_spike(design: DesignKind, n: usize, d: usize, p: f64, m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidModel(format!("p must lie in [0, 1], got {p}")));
    }
    if !(m > 0.0) {
        return Err(Error::NonpositiveThreshold(m));
    }
    if d == 0 || d > n {
        return Err(Error::ParameterMismatch(format!("need n >= d >= 1, got n={n} d={d}")));
    }
    let nf = n as f64;
    let factor: Box<dyn Fn(usize) -> f64> = match design {
        DesignKind::Clustering | DesignKind::Cyclic | DesignKind::Block => {
            let c = match design {
                DesignKind::Clustering if n % d == 0 => d,
                DesignKind::Cyclic => 2 * d - 1,
                DesignKind::Block if n == d * d - d + 1 => d * d - d + 1,
                _ => {
                    return Err(Error::ParameterMismatch(format!("{design} is not defined for n={n} d={d}")));
                }
            };
            Box::new(move |i| (nf - (i * c) as f64) / (nf - i as f64))
        }
        DesignKind::Random | DesignKind::RandomSubsets => {
            let total = binomial_f64(n, d);
            Box::new(move |i| if i * d > n { 0.0 } else { binomial_f64(n - i * d, d) / total })
        }
        other => return Err(Error::ParameterMismatch(format!("no spike formula for {other}"))),
    };
    let mut total = 0.0;
    let mut product = 1.0;
    for a in 0..=n {
        if a >= 2 {
            let f = factor(a - 1);
            if f <= 0.0 {
                break;
            }
            product *= f;
        }
        total += binomial_pmf(n, a, p) * product;
    }
    Ok(total.clamp(0.0, 1.0))
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    statrs::function::factorial::binomial(n as u64, k as u64)
}

fn binomial_pmf(n: usize, k: usize, p: f64) -> f64 {
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let ln = statrs::function::factorial::ln_binomial(n as u64, k as u64) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln();
    ln.exp()
}
