//! Analytic lower and upper bounds on robustness.
//!
//! Scan-statistic bounds take a [`ScanEval`]: Monte Carlo with the same seed
//! as a robustness estimate sees the same demand vectors, so finite bounds
//! bracket the estimate trial by trial.

use std::collections::BTreeMap;
use std::fmt;

use crate::allocation::{binomial_u128, SpanMethod, StorageAllocation, ENUMERATION_BUDGET};
use crate::demand::DemandModel;
use crate::error::{Error, Result};
use crate::occupancy::{mean_occupancy, occupancy_pmf_exact, occupancy_pmf_mc, OccupancyQuery};
use crate::scanstat::{empirical_cdf, scan_cdf_naus, scan_cdf_poisson, scan_values_mc, ScanQuery};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Lower,
    Upper,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Lower => "lower",
            Self::Upper => "upper",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: String,
    pub kind: BoundKind,
    pub value: f64,
    pub params: BTreeMap<String, String>,
    /// Holds only in the limit of many objects.
    pub asymptotic: bool,
    /// Evaluated through an approximation rather than exactly or by simulation.
    pub approximate: bool,
}

impl BoundReport {
    fn new(name: &str, kind: BoundKind, value: f64) -> Self {
        Self {
            name: name.to_string(),
            kind,
            value: value.clamp(0.0, 1.0),
            params: BTreeMap::new(),
            asymptotic: false,
            approximate: false,
        }
    }

    fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    fn asymptotic(mut self, flag: bool) -> Self {
        self.asymptotic = flag;
        self
    }

    fn approximate(mut self, flag: bool) -> Self {
        self.approximate = flag;
        self
    }
}

/// How scan-statistic CDFs are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanEval {
    MonteCarlo { trials: u64, seed: u64 },
    /// Poisson limit form; asymptotic.
    Poisson,
    /// Naus product approximation.
    Naus { trials_per_cell: u64, seed: u64 },
}

impl ScanEval {
    fn is_asymptotic(&self) -> bool {
        matches!(self, Self::Poisson)
    }

    fn is_approximate(&self) -> bool {
        matches!(self, Self::Naus { .. })
    }

    fn label(&self) -> &'static str {
        match self {
            Self::MonteCarlo { .. } => "mc",
            Self::Poisson => "poisson",
            Self::Naus { .. } => "naus",
        }
    }
}

/// `P(S_s^(c) <= x)` for each `(s, x)`, sharing simulated sequences across queries.
pub fn circular_scan_cdfs(model: &DemandModel, n: usize, queries: &[(usize, f64)], eval: ScanEval) -> Result<Vec<f64>> {
    match eval {
        ScanEval::MonteCarlo { trials, seed } => {
            let mut windows: Vec<usize> = queries.iter().map(|&(s, _)| s).collect();
            windows.sort_unstable();
            windows.dedup();
            let values = scan_values_mc(model, n, &windows, true, trials, seed)?;
            Ok(queries
                .iter()
                .map(|&(s, x)| {
                    let w = windows.binary_search(&s).expect("window listed");
                    empirical_cdf(&values[w], x).p_hat
                })
                .collect())
        }
        ScanEval::Poisson => queries
            .iter()
            .map(|&(s, x)| scan_cdf_poisson(model, ScanQuery::new(n, s, true, x)?))
            .collect(),
        ScanEval::Naus { trials_per_cell, seed } => queries
            .iter()
            .map(|&(s, x)| scan_cdf_naus(model, ScanQuery::new(n, s, true, x)?, trials_per_cell, seed))
            .collect(),
    }
}

/// Default window grid `{1, d, 2d, ceil(n/4)}` clipped to `[1, max_s]`.
pub fn default_windows(n: usize, d: usize, max_s: usize) -> Vec<usize> {
    let mut s: Vec<usize> = [1, d, 2 * d, n.div_ceil(4)].into_iter().filter(|&s| s >= 1 && s <= max_s).collect();
    s.sort_unstable();
    s.dedup();
    s
}

fn check_m(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::NonpositiveThreshold(m))
    }
}

/// `min_t E[F_t(m * span_t)]` over the requested subset sizes.
pub fn ub_span_based(alloc: &StorageAllocation, model: &DemandModel, m: f64, t_values: &[usize], method: SpanMethod) -> Result<BoundReport> {
    check_m(m)?;
    if t_values.is_empty() {
        return Err(Error::BadWindow("no subset sizes given".into()));
    }
    let mut best = f64::INFINITY;
    let mut best_t = 0;
    for &t in t_values {
        let dist = alloc.span_t_distribution(t, method)?;
        let value: f64 = dist.iter().map(|(&span, &w)| w * model.sum_cdf(t, m * span as f64)).sum();
        if value < best {
            best = value;
            best_t = t;
        }
    }
    let sampled = matches!(method, SpanMethod::Sampled { .. });
    Ok(BoundReport::new("span_ub", BoundKind::Upper, best)
        .param("t", best_t)
        .param("span", if sampled { "sampled" } else { "exact" }))
}

/// Picks exact span enumeration when it fits the budget, sampling otherwise.
pub fn auto_span_method(k: usize, t: usize, samples: u64, seed: u64) -> SpanMethod {
    if binomial_u128(k, t) <= ENUMERATION_BUDGET {
        SpanMethod::Exact
    } else {
        SpanMethod::Sampled { samples, seed }
    }
}

/// `min_s P(S_s^(c) <= s m d)`, valid for every d-choice design.
pub fn scan_ub_any(n: usize, d: usize, model: &DemandModel, m: f64, s_values: &[usize], eval: ScanEval) -> Result<BoundReport> {
    check_m(m)?;
    if s_values.is_empty() {
        return Err(Error::BadWindow("no window lengths given".into()));
    }
    if let Some(&s) = s_values.iter().find(|&&s| s == 0 || s > n) {
        return Err(Error::WindowTooLarge { s, n });
    }
    let queries: Vec<(usize, f64)> = s_values.iter().map(|&s| (s, (s * d) as f64 * m)).collect();
    let values = circular_scan_cdfs(model, n, &queries, eval)?;
    let (i, v) = argmin(&values);
    Ok(BoundReport::new("scan_ub", BoundKind::Upper, v)
        .param("s", s_values[i])
        .param("eval", eval.label())
        .asymptotic(eval.is_asymptotic())
        .approximate(eval.is_approximate()))
}

fn argmin(values: &[f64]) -> (usize, f64) {
    values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, v)| if v < best.1 { (i, v) } else { best })
}

/// `P(S_{r+1}^(c) <= m d) <= P <= P(S_s^(c) <= m (s + 2r))` for r-gap designs.
pub fn rgap_bounds(n: usize, d: usize, r: usize, model: &DemandModel, m: f64, s: usize, eval: ScanEval) -> Result<(BoundReport, BoundReport)> {
    check_m(m)?;
    if r + 1 < d || r + 1 > n {
        return Err(Error::BadWindow(format!("r-gap bounds need d - 1 <= r < n, got r={r} d={d} n={n}")));
    }
    if s == 0 || s + 2 * r > n {
        return Err(Error::BadWindow(format!("r-gap upper bound needs 1 <= s <= n - 2r, got s={s} n={n} r={r}")));
    }
    let v = circular_scan_cdfs(model, n, &[(r + 1, m * d as f64), (s, m * (s + 2 * r) as f64)], eval)?;
    let flag = |b: BoundReport| b.param("r", r).param("eval", eval.label()).asymptotic(eval.is_asymptotic()).approximate(eval.is_approximate());
    Ok((flag(BoundReport::new("rgap_lower", BoundKind::Lower, v[0])), flag(BoundReport::new("rgap_upper", BoundKind::Upper, v[1]).param("s", s))))
}

/// Constants of a sub-gaussian demand model, supplied by the user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubGaussian {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundMode {
    /// Scan-statistic bounds at finite `n`; uppers minimize over `windows`.
    Finite { eval: ScanEval, windows: Vec<usize> },
    /// Poisson-limit forms; uppers minimize over `s <= 4d` and the default grid.
    Asymptotic,
    SubGaussian(SubGaussian),
}

fn poisson_form(model: &DemandModel, n: usize, u: usize, x: f64) -> f64 {
    (-((n + 1).saturating_sub(u) as f64) * model.sum_tail(u, x)).exp()
}

fn require_positive_demands(model: &DemandModel) -> Result<()> {
    if model.has_atom_at_zero() {
        Err(Error::NonpositiveDemandModel(format!("{model} has an atom at zero; the Poisson limit needs strictly positive demands")))
    } else {
        Ok(())
    }
}

fn check_subgaussian(sg: &SubGaussian, m: f64, strict: bool) -> Result<()> {
    if !(sg.alpha > 0.0 && sg.beta > 0.0 && sg.gamma > 0.0) {
        return Err(Error::BadMode("sub-gaussian constants alpha, beta, gamma must be positive".into()));
    }
    if m < sg.mu || (strict && m == sg.mu) {
        return Err(Error::BadMode(format!("sub-gaussian bounds need m {} mu, got m={m} mu={}", if strict { ">" } else { ">=" }, sg.mu)));
    }
    Ok(())
}

pub fn cyclic_bounds(n: usize, d: usize, model: &DemandModel, m: f64, mode: &BoundMode) -> Result<(BoundReport, BoundReport)> {
    check_m(m)?;
    if d == 0 || d > n {
        return Err(Error::ParameterMismatch(format!("need n >= d >= 1, got n={n} d={d}")));
    }
    let mf = m;
    let df = d as f64;
    let w = (n - d + 1) as f64;
    match mode {
        BoundMode::Finite { eval, windows } => {
            let windows: Vec<usize> = if windows.is_empty() { default_windows(n, d, n - d + 1) } else { windows.clone() };
            if let Some(&s) = windows.iter().find(|&&s| s == 0 || s > n - d + 1) {
                return Err(Error::BadWindow(format!("cyclic upper bound needs 1 <= s <= n - d + 1, got s={s}")));
            }
            let mut queries = vec![(d, mf * df)];
            queries.extend(windows.iter().map(|&s| (s, mf * (s + d - 1) as f64)));
            let v = circular_scan_cdfs(model, n, &queries, *eval)?;
            let (i, up) = argmin(&v[1..]);
            let tag = |b: BoundReport| b.param("eval", eval.label()).asymptotic(eval.is_asymptotic()).approximate(eval.is_approximate());
            Ok((tag(BoundReport::new("cyclic_lower", BoundKind::Lower, v[0])), tag(BoundReport::new("cyclic_upper", BoundKind::Upper, up).param("s", windows[i]))))
        }
        BoundMode::Asymptotic => {
            require_positive_demands(model)?;
            let lower = poisson_form(model, n, d, mf * df);
            let max_s = n - d + 1;
            let mut windows: Vec<usize> = (1..=max_s.min(4 * d)).collect();
            windows.extend(default_windows(n, d, max_s));
            let upper = windows
                .into_iter()
                .map(|s| poisson_form(model, n, s, mf * (s + d - 1) as f64))
                .fold(f64::INFINITY, f64::min);
            Ok((
                BoundReport::new("cyclic_lower", BoundKind::Lower, lower).param("eval", "poisson").asymptotic(true),
                BoundReport::new("cyclic_upper", BoundKind::Upper, upper).param("eval", "poisson").asymptotic(true),
            ))
        }
        BoundMode::SubGaussian(sg) => {
            check_subgaussian(sg, m, false)?;
            let lower = (-w * sg.gamma * (-df * sg.beta * (mf - sg.mu).powi(2)).exp()).exp();
            let upper = (-w * (-df * sg.alpha * (2.0 * mf - sg.mu).powi(2)).exp()).exp();
            Ok(subgaussian_pair("cyclic", lower, upper, sg))
        }
    }
}

fn subgaussian_pair(design: &str, lower: f64, upper: f64, sg: &SubGaussian) -> (BoundReport, BoundReport) {
    let tag = |b: BoundReport| {
        b.param("alpha", sg.alpha)
            .param("beta", sg.beta)
            .param("gamma", sg.gamma)
            .param("mu", sg.mu)
            .param("eval", "subgaussian")
            .asymptotic(design != "clustering")
    };
    (
        tag(BoundReport::new(&format!("{design}_subgaussian_lower"), BoundKind::Lower, lower)),
        tag(BoundReport::new(&format!("{design}_subgaussian_upper"), BoundKind::Upper, upper)),
    )
}

pub fn block_bounds(n: usize, d: usize, model: &DemandModel, m: f64, mode: &BoundMode) -> Result<(BoundReport, BoundReport)> {
    check_m(m)?;
    if d == 0 || d > n {
        return Err(Error::ParameterMismatch(format!("need n >= d >= 1, got n={n} d={d}")));
    }
    let df = d as f64;
    let lo_x = m * df / 2.0;
    let hi_x = m * (df * df - df);
    match mode {
        BoundMode::Finite { eval, .. } => {
            let v = circular_scan_cdfs(model, n, &[(d, lo_x), (d, hi_x)], *eval)?;
            let tag = |b: BoundReport| b.param("eval", eval.label()).asymptotic(eval.is_asymptotic()).approximate(eval.is_approximate());
            Ok((tag(BoundReport::new("block_lower", BoundKind::Lower, v[0])), tag(BoundReport::new("block_upper", BoundKind::Upper, v[1]))))
        }
        BoundMode::Asymptotic => {
            require_positive_demands(model)?;
            Ok((
                BoundReport::new("block_lower", BoundKind::Lower, poisson_form(model, n, d, lo_x)).param("eval", "poisson").asymptotic(true),
                BoundReport::new("block_upper", BoundKind::Upper, poisson_form(model, n, d, hi_x)).param("eval", "poisson").asymptotic(true),
            ))
        }
        BoundMode::SubGaussian(sg) => {
            check_subgaussian(sg, m, false)?;
            let w = (n - d + 1) as f64;
            let lower = (-w * sg.gamma * (-df * sg.beta * (m / 2.0 - sg.mu).powi(2)).exp()).exp();
            let upper = (-w * (-df * sg.alpha * (m * (df - 1.0) - sg.mu).powi(2)).exp()).exp();
            Ok(subgaussian_pair("block", lower, upper, sg))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClusteringMode {
    Chernoff,
    SubGaussian(SubGaussian),
}

/// Lower bound from the Chernoff bound on each cluster, and the sub-gaussian pair.
pub fn clustering_bounds(n: usize, d: usize, model: &DemandModel, m: f64, mode: ClusteringMode) -> Result<(BoundReport, Option<BoundReport>)> {
    check_m(m)?;
    if d == 0 || n % d != 0 {
        return Err(Error::ParameterMismatch(format!("clustering needs d | n, got n={n} d={d}")));
    }
    let clusters = (n / d) as f64;
    let df = d as f64;
    match mode {
        ClusteringMode::Chernoff => {
            let (s, exponent) = chernoff_exponent(model, m)?;
            let value = (1.0 - (-df * exponent).exp()).max(0.0).powf(clusters);
            Ok((BoundReport::new("clustering_chernoff", BoundKind::Lower, value).param("s", s), None))
        }
        ClusteringMode::SubGaussian(sg) => {
            check_subgaussian(&sg, m, true)?;
            let lower = (1.0 - sg.gamma * (-df * sg.beta * (m - sg.mu).powi(2)).exp()).max(0.0).powf(clusters);
            let upper = (1.0 - (-df * sg.alpha * (m - sg.mu).powi(2)).exp()).powf(clusters);
            let (l, u) = subgaussian_pair("clustering", lower, upper, &sg);
            Ok((l, Some(u)))
        }
    }
}

/// `sup_{s > 0} (m s - ln mgf(s))` and its maximizer.
pub fn chernoff_exponent(model: &DemandModel, m: f64) -> Result<(f64, f64)> {
    model.mgf(1e-9)?;
    let g = |s: f64| -> f64 {
        match model.mgf(s) {
            Ok(phi) if phi.is_finite() && phi > 0.0 => m * s - phi.ln(),
            _ => f64::NEG_INFINITY,
        }
    };
    // the MGF may diverge past a finite abscissa (the Exp rate)
    let mut hi = 1.0;
    let mut limit = f64::INFINITY;
    while !g(hi).is_finite() {
        limit = hi;
        hi *= 0.5;
        if hi < 1e-12 {
            return Ok((0.0, 0.0));
        }
    }
    if limit.is_finite() {
        let (mut a, mut b) = (hi, limit);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if g(mid).is_finite() {
                a = mid;
            } else {
                b = mid;
            }
        }
        hi = a;
    } else {
        while g(2.0 * hi) > g(hi) {
            hi *= 2.0;
            if hi > 1e6 {
                return Ok((hi, f64::INFINITY));
            }
        }
        hi *= 2.0;
    }
    let (s, v) = golden_section_max(g, 0.0, hi, 1e-8);
    let (s, v) = if v > 0.0 { (s, v) } else { (0.0, 0.0) };
    Ok((s, v))
}

fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol * (1.0 + a.abs() + b.abs()) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    let s = 0.5 * (a + b);
    (s, f(s))
}

/// Object groups for the random-design upper bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Partition {
    Explicit(Vec<usize>),
    /// `n / u` groups of `u` objects.
    Even { u: usize },
}

impl Partition {
    fn sizes(&self, n: usize) -> Result<Vec<usize>> {
        let sizes = match self {
            Self::Explicit(v) => v.clone(),
            Self::Even { u } => {
                if *u == 0 || n % u != 0 {
                    return Err(Error::BadPartition(format!("even groups of {u} do not divide n={n}")));
                }
                vec![*u; n / u]
            }
        };
        if sizes.contains(&0) || sizes.iter().sum::<usize>() != n {
            return Err(Error::BadPartition(format!("group sizes {sizes:?} must be positive and sum to n={n}")));
        }
        Ok(sizes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OccupancyMethod {
    /// Exact occupancy distribution.
    Exact,
    /// Occupancy distribution from `draws` simulated draws per group size.
    ExactMc { draws: u64, seed: u64 },
    /// Occupancy replaced by its mean; an approximation, not a guaranteed bound.
    MeanApprox,
}

/// `prod_i E[F_{u_i}(m N_{n,d,u_i})]` for random designs.
pub fn random_ub(n: usize, d: usize, model: &DemandModel, m: f64, partition: &Partition, method: OccupancyMethod) -> Result<BoundReport> {
    check_m(m)?;
    let sizes = partition.sizes(n)?;
    let mut cache: BTreeMap<usize, f64> = BTreeMap::new();
    let mut log_value = 0.0;
    for &u in &sizes {
        if let Some(v) = cache.get(&u) {
            log_value += v.ln();
            continue;
        }
        let q = OccupancyQuery::new(n, d, u)?;
        let v = match method {
            OccupancyMethod::MeanApprox => model.sum_cdf(u, m * mean_occupancy(q)),
            OccupancyMethod::Exact => occupancy_pmf_exact(q).iter().map(|(&occ, &w)| w * model.sum_cdf(u, m * occ as f64)).sum(),
            OccupancyMethod::ExactMc { draws, seed } => {
                occupancy_pmf_mc(q, draws, seed.wrapping_add(u as u64)).iter().map(|(&occ, &w)| w * model.sum_cdf(u, m * occ as f64)).sum()
            }
        };
        cache.insert(u, v);
        log_value += v.ln();
    }
    let label = match method {
        OccupancyMethod::Exact => "exact",
        OccupancyMethod::ExactMc { .. } => "exact-mc",
        OccupancyMethod::MeanApprox => "mean-approx",
    };
    Ok(BoundReport::new("random_ub", BoundKind::Upper, log_value.exp())
        .param("groups", sizes.len())
        .param("occupancy", label)
        .approximate(method == OccupancyMethod::MeanApprox))
}

/// `F_d(m d^2)^(n/d)`, the large-`n` form of the mean approximation.
pub fn random_ub_limit(n: usize, d: usize, model: &DemandModel, m: f64) -> Result<BoundReport> {
    check_m(m)?;
    let df = d as f64;
    let value = model.sum_cdf(d, m * df * df).powf(n as f64 / df);
    Ok(BoundReport::new("random_ub_limit", BoundKind::Upper, value).asymptotic(true).approximate(true))
}

/// `P(S_d^(c) <= m d / v_max)` for the constrained random design.
pub fn constrained_random_lb(n: usize, d: usize, v_max: usize, model: &DemandModel, m: f64, eval: ScanEval) -> Result<BoundReport> {
    check_m(m)?;
    if v_max == 0 {
        return Err(Error::ParameterMismatch("v_max must be at least 1".into()));
    }
    let v = circular_scan_cdfs(model, n, &[(d, m * d as f64 / v_max as f64)], eval)?;
    Ok(BoundReport::new("constrained_random_lower", BoundKind::Lower, v[0])
        .param("vmax", v_max)
        .param("eval", eval.label())
        .asymptotic(eval.is_asymptotic())
        .approximate(eval.is_approximate()))
}

/// Replication factor as a function of scale: `d = max(1, ceil(c * ln(n)^gamma))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DRule {
    pub c: f64,
    pub gamma: f64,
}

impl DRule {
    pub fn d(&self, n: usize) -> usize {
        ((self.c * (n as f64).ln().powf(self.gamma)).ceil() as usize).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrendProxy {
    /// Exact clustering robustness (fractional exponent `n/d` when `d` does not divide `n`).
    Clustering,
    /// Poisson-limit lower bound for the cyclic design.
    CyclicLower,
    /// Poisson-limit upper bound valid for every design.
    AnyDesignUpper,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendRow {
    pub n: usize,
    pub d: usize,
    pub value: f64,
}

pub fn limit_trend(proxy: TrendProxy, model: &DemandModel, m: f64, rule: DRule, n_grid: &[usize]) -> Result<Vec<TrendRow>> {
    check_m(m)?;
    n_grid
        .iter()
        .map(|&n| {
            let d = rule.d(n).min(n);
            let df = d as f64;
            let value = match proxy {
                TrendProxy::Clustering => model.sum_cdf(d, m * df).powf(n as f64 / df),
                TrendProxy::CyclicLower => poisson_form(model, n, d, m * df),
                TrendProxy::AnyDesignUpper => poisson_form(model, n, d, m * df * df),
            };
            Ok(TrendRow { n, d, value })
        })
        .collect()
}
