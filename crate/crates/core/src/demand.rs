//! Object demand distributions.
//!
//! Demands are i.i.d. and expressed in units of a single node's access
//! capacity. Besides sampling, each model evaluates the CDF `F_u` of the sum
//! of `u` demands and its tail `Q_u = 1 - F_u`, which every closed form and
//! bound in this crate is written in terms of.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use rand_distr::{Distribution, Exp, Pareto};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::{gamma_lr, gamma_ur};

use crate::error::{Error, Result};

/// Number of quasi-random points behind the Pareto sum CDF.
pub const PARETO_QMC_POINTS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DemandModel {
    /// Exponential with rate `mu`.
    Exp { mu: f64 },
    /// Pareto with minimum value `lambda` and tail index `alpha`.
    Pareto { lambda: f64, alpha: f64 },
    /// `lambda * Bernoulli(p)`.
    ScaledBernoulli { lambda: f64, p: f64 },
}

/// One sampled demand vector `(rho_1, ..., rho_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandVector(Vec<f64>);

impl DemandVector {
    pub fn new(rho: Vec<f64>) -> Result<Self> {
        if let Some(bad) = rho.iter().find(|r| !r.is_finite() || **r < 0.0) {
            return Err(Error::InvalidModel(format!("demand entry {bad} is not a finite nonnegative value")));
        }
        Ok(Self(rho))
    }

    pub fn zeros(k: usize) -> Self {
        Self(vec![0.0; k])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(self.0.iter().map(|r| r * c).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Parses one real per line; blank lines and `#` comments are skipped.
    pub fn parse_lines(text: &str) -> Result<Self> {
        let mut rho = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let v: f64 = line
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: not a number: {line:?}", lineno + 1)))?;
            rho.push(v);
        }
        Self::new(rho)
    }
}

impl DemandModel {
    pub fn exp(mu: f64) -> Result<Self> {
        Self::Exp { mu }.validated()
    }

    pub fn pareto(lambda: f64, alpha: f64) -> Result<Self> {
        Self::Pareto { lambda, alpha }.validated()
    }

    pub fn bernoulli(lambda: f64, p: f64) -> Result<Self> {
        Self::ScaledBernoulli { lambda, p }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let ok = match self {
            Self::Exp { mu } => mu.is_finite() && mu > 0.0,
            Self::Pareto { lambda, alpha } => lambda.is_finite() && lambda > 0.0 && alpha.is_finite() && alpha > 0.0,
            Self::ScaledBernoulli { lambda, p } => {
                lambda.is_finite() && lambda > 0.0 && (0.0..=1.0).contains(&p)
            }
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::InvalidModel(self.to_string()))
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::Exp { .. } => "exp",
            Self::Pareto { .. } => "pareto",
            Self::ScaledBernoulli { .. } => "bern",
        }
    }

    /// Parameters as `key=value` pairs joined by `;` (CSV-safe).
    pub fn param_string(&self) -> String {
        match *self {
            Self::Exp { mu } => format!("mu={mu}"),
            Self::Pareto { lambda, alpha } => format!("lambda={lambda};alpha={alpha}"),
            Self::ScaledBernoulli { lambda, p } => format!("lambda={lambda};p={p}"),
        }
    }

    /// The model of `c * rho`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        match *self {
            Self::Exp { mu } => Self::exp(mu / c),
            Self::Pareto { lambda, alpha } => Self::pareto(lambda * c, alpha),
            Self::ScaledBernoulli { lambda, p } => Self::bernoulli(lambda * c, p),
        }
    }

    /// Returns a copy with one named parameter replaced.
    pub fn with_param(&self, key: &str, value: f64) -> Result<Self> {
        let m = match (*self, key) {
            (Self::Exp { .. }, "mu") => Self::Exp { mu: value },
            (Self::Pareto { alpha, .. }, "lambda") => Self::Pareto { lambda: value, alpha },
            (Self::Pareto { lambda, .. }, "alpha") => Self::Pareto { lambda, alpha: value },
            (Self::ScaledBernoulli { p, .. }, "lambda") => Self::ScaledBernoulli { lambda: value, p },
            (Self::ScaledBernoulli { lambda, .. }, "p") => Self::ScaledBernoulli { lambda, p: value },
            _ => return Err(Error::InvalidModel(format!("{} has no parameter {key:?}", self.family()))),
        };
        m.validated()
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Exp { mu } => 1.0 / mu,
            Self::Pareto { lambda, alpha } => {
                if alpha > 1.0 {
                    alpha * lambda / (alpha - 1.0)
                } else {
                    f64::INFINITY
                }
            }
            Self::ScaledBernoulli { lambda, p } => lambda * p,
        }
    }

    /// Whether `P(rho = 0) > 0`.
    pub fn has_atom_at_zero(&self) -> bool {
        matches!(*self, Self::ScaledBernoulli { p, .. } if p < 1.0)
    }

    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Exp { mu } => Exp::new(mu).expect("validated rate").sample(rng),
            Self::Pareto { lambda, alpha } => Pareto::new(lambda, alpha).expect("validated pareto").sample(rng),
            Self::ScaledBernoulli { lambda, p } => {
                if rng.random_bool(p) {
                    lambda
                } else {
                    0.0
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> DemandVector {
        DemandVector((0..k).map(|_| self.sample_one(rng)).collect())
    }

    /// `F_u(x) = P(rho_1 + ... + rho_u <= x)`, right-continuous.
    pub fn sum_cdf(&self, u: usize, x: f64) -> f64 {
        assert!(u >= 1, "sum_cdf needs u >= 1");
        if x < 0.0 {
            return 0.0;
        }
        if x == f64::INFINITY {
            return 1.0;
        }
        match *self {
            Self::Exp { mu } => {
                if x == 0.0 {
                    0.0
                } else {
                    gamma_lr(u as f64, mu * x)
                }
            }
            Self::ScaledBernoulli { lambda, p } => binomial_cdf(u, p, bernoulli_successes_at_most(x, lambda)),
            Self::Pareto { lambda, alpha } => pareto_sum_cdf(u, lambda, alpha, x),
        }
    }

    /// `Q_u(x) = 1 - F_u(x)`, evaluated without cancellation where possible.
    pub fn sum_tail(&self, u: usize, x: f64) -> f64 {
        assert!(u >= 1, "sum_tail needs u >= 1");
        if x < 0.0 {
            return 1.0;
        }
        if x == f64::INFINITY {
            return 0.0;
        }
        match *self {
            Self::Exp { mu } => {
                if x == 0.0 {
                    1.0
                } else {
                    gamma_ur(u as f64, mu * x)
                }
            }
            Self::ScaledBernoulli { lambda, p } => binomial_sf(u, p, bernoulli_successes_at_most(x, lambda)),
            Self::Pareto { .. } => 1.0 - self.sum_cdf(u, x),
        }
    }

    /// Moment generating function `E[exp(t rho)]`.
    pub fn mgf(&self, t: f64) -> Result<f64> {
        match *self {
            Self::Exp { mu } => {
                if t < mu {
                    Ok(mu / (mu - t))
                } else {
                    Err(Error::Diverges(t))
                }
            }
            Self::ScaledBernoulli { lambda, p } => Ok(1.0 - p + p * (t * lambda).exp()),
            Self::Pareto { lambda, alpha } => {
                if t > 0.0 {
                    Err(Error::Diverges(t))
                } else if t == 0.0 {
                    Ok(1.0)
                } else {
                    // E[exp(t rho)] = int_0^1 exp(t lambda y^(-1/alpha)) dy
                    Ok(simpson(|y| if y <= 0.0 { 0.0 } else { (t * lambda * y.powf(-1.0 / alpha)).exp() }, 0.0, 1.0, 4000))
                }
            }
        }
    }
}

impl fmt::Display for DemandModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Exp { mu } => write!(f, "exp:mu={mu}"),
            Self::Pareto { lambda, alpha } => write!(f, "pareto:lambda={lambda},alpha={alpha}"),
            Self::ScaledBernoulli { lambda, p } => write!(f, "bern:lambda={lambda},p={p}"),
        }
    }
}

impl FromStr for DemandModel {
    type Err = Error;

    /// Accepts `exp:mu=1.0`, `pareto:lambda=1.0,alpha=2.5`, `bern:lambda=2.0,p=0.3`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params: HashMap<&str, f64> = HashMap::new();
        for kv in rest.split([',', ';']).map(str::trim).filter(|kv| !kv.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {kv:?}")))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::Parse(format!("bad number in {kv:?}")))?;
            params.insert(k.trim(), v);
        }
        let get = |k: &str| {
            params
                .get(k)
                .copied()
                .ok_or_else(|| Error::Parse(format!("model {family:?} is missing parameter {k:?}")))
        };
        let allowed: &[&str] = match family {
            "exp" => &["mu"],
            "pareto" => &["lambda", "alpha"],
            "bern" | "bernoulli" => &["lambda", "p"],
            other => return Err(Error::Parse(format!("unknown demand model {other:?}"))),
        };
        if let Some(k) = params.keys().find(|k| !allowed.contains(k)) {
            return Err(Error::Parse(format!("model {family:?} has no parameter {k:?}")));
        }
        match family {
            "exp" => Self::exp(get("mu")?),
            "pareto" => Self::pareto(get("lambda")?, get("alpha")?),
            _ => Self::bernoulli(get("lambda")?, get("p")?),
        }
    }
}

/// Largest number of active objects whose total `j * lambda` stays `<= x`.
fn bernoulli_successes_at_most(x: f64, lambda: f64) -> f64 {
    // Relative slack absorbs products such as 0.5 * 6 / 1.5 landing just below an integer.
    (x / lambda * (1.0 + 1e-12)).floor()
}

/// `P(Bin(u, p) <= k)`.
pub fn binomial_cdf(u: usize, p: f64, k: f64) -> f64 {
    if k < 0.0 {
        return 0.0;
    }
    if k >= u as f64 {
        return 1.0;
    }
    if p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return 0.0;
    }
    let k = k as f64;
    beta_reg(u as f64 - k, k + 1.0, 1.0 - p)
}

/// `P(Bin(u, p) > k)`.
pub fn binomial_sf(u: usize, p: f64, k: f64) -> f64 {
    if k < 0.0 {
        return 1.0;
    }
    if k >= u as f64 {
        return 0.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    beta_reg(k + 1.0, u as f64 - k, p)
}

type ParetoKey = (usize, u64, u64);

fn pareto_cache() -> &'static Mutex<HashMap<ParetoKey, Arc<Vec<f64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<ParetoKey, Arc<Vec<f64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn pareto_sum_cdf(u: usize, lambda: f64, alpha: f64, x: f64) -> f64 {
    if u == 1 {
        return if x < lambda { 0.0 } else { 1.0 - (lambda / x).powf(alpha) };
    }
    if x < u as f64 * lambda {
        return 0.0;
    }
    let sums = pareto_sorted_sums(u, lambda, alpha);
    let at_most = sums.partition_point(|&s| s <= x);
    at_most as f64 / sums.len() as f64
}

/// Sorted sums of `u` Pareto variates over a Kronecker low-discrepancy set.
fn pareto_sorted_sums(u: usize, lambda: f64, alpha: f64) -> Arc<Vec<f64>> {
    let key = (u, lambda.to_bits(), alpha.to_bits());
    if let Some(v) = pareto_cache().lock().expect("cache poisoned").get(&key) {
        return Arc::clone(v);
    }
    let steps = kronecker_steps(u);
    let mut sums: Vec<f64> = (1..=PARETO_QMC_POINTS)
        .map(|i| {
            steps
                .iter()
                .map(|a| {
                    let z = (0.5 + i as f64 * a).fract();
                    // z is uniform on (0, 1); lambda * z^(-1/alpha) is Pareto.
                    lambda * z.max(f64::MIN_POSITIVE).powf(-1.0 / alpha)
                })
                .sum()
        })
        .collect();
    sums.sort_by(f64::total_cmp);
    let sums = Arc::new(sums);
    pareto_cache().lock().expect("cache poisoned").insert(key, Arc::clone(&sums));
    sums
}

/// Additive-recurrence steps from the generalized golden ratio in `dim` dimensions.
fn kronecker_steps(dim: usize) -> Vec<f64> {
    // phi is the unique positive root of x^(dim+1) = x + 1
    let mut phi: f64 = 2.0;
    for _ in 0..64 {
        let f = phi.powi(dim as i32 + 1) - phi - 1.0;
        let df = (dim as f64 + 1.0) * phi.powi(dim as i32) - 1.0;
        phi -= f / df;
    }
    (1..=dim).map(|j| (1.0 / phi.powi(j as i32)).fract()).collect()
}

pub(crate) fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}
