//! Occupancy with complexes: the number of distinct cells hit when `u`
//! uniform `d`-subsets of `n` cells are drawn independently.

use std::collections::BTreeMap;

use rand::Rng;
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::rng::{map_trials, stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OccupancyQuery {
    pub n: usize,
    pub d: usize,
    pub u: usize,
}

impl OccupancyQuery {
    pub fn new(n: usize, d: usize, u: usize) -> Result<Self> {
        if d == 0 || d > n || u == 0 {
            return Err(Error::ParameterMismatch(format!("occupancy needs 1 <= d <= n and u >= 1, got n={n} d={d} u={u}")));
        }
        Ok(Self { n, d, u })
    }

    pub fn support(&self) -> (usize, usize) {
        (self.d, self.n.min(self.u * self.d))
    }
}

pub fn sample_occupancy<R: Rng + ?Sized>(q: OccupancyQuery, rng: &mut R) -> usize {
    let mut hit = vec![false; q.n];
    let mut count = 0;
    for _ in 0..q.u {
        for cell in rand::seq::index::sample(rng, q.n, q.d) {
            if !hit[cell] {
                hit[cell] = true;
                count += 1;
            }
        }
    }
    count
}

/// `n * (1 - (1 - d/n)^u)`.
pub fn mean_occupancy(q: OccupancyQuery) -> f64 {
    let n = q.n as f64;
    n * (1.0 - (1.0 - q.d as f64 / n).powi(q.u as i32))
}

pub fn occupancy_pmf_mc(q: OccupancyQuery, trials: u64, seed: u64) -> BTreeMap<usize, f64> {
    let draws = map_trials(trials, |t| sample_occupancy(q, &mut stream(seed, t)));
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for x in draws {
        *counts.entry(x).or_default() += 1;
    }
    counts.into_iter().map(|(k, c)| (k, c as f64 / trials as f64)).collect()
}

/// Exact distribution, adding one complex at a time: with `j` cells already
/// occupied, a new complex overlaps them in a hypergeometric number of cells.
pub fn occupancy_pmf_exact(q: OccupancyQuery) -> BTreeMap<usize, f64> {
    let (n, d) = (q.n, q.d);
    let ln_total = ln_binomial(n as u64, d as u64);
    let mut dist = vec![0.0; n + 1];
    dist[d] = 1.0;
    for _ in 1..q.u {
        let mut next = vec![0.0; n + 1];
        for (j, &pj) in dist.iter().enumerate() {
            if pj == 0.0 {
                continue;
            }
            for overlap in d.saturating_sub(n - j)..=d.min(j) {
                let ln_p = ln_binomial(j as u64, overlap as u64) + ln_binomial((n - j) as u64, (d - overlap) as u64) - ln_total;
                next[j + d - overlap] += pj * ln_p.exp();
            }
        }
        dist = next;
    }
    dist.into_iter().enumerate().filter(|&(_, p)| p > 0.0).collect()
}
