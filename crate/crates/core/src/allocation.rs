//! Replicated storage allocations.
//!
//! An allocation is a bipartite incidence between `k` objects and `n` nodes:
//! object `i` is stored on the nodes in its service-choice set `C_i`. This
//! module builds the standard `d`-choice designs and answers the structural
//! questions (spans, cumulative overlaps, r-gap property, overlap profile)
//! that the robustness analysis is phrased in.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{stream, StreamRng};

/// Largest number of subsets the exact enumerations will visit.
pub const ENUMERATION_BUDGET: u128 = 10_000_000;

/// Whole-build retries for the constrained random design.
pub const CONSTRAINED_RANDOM_RETRIES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DesignKind {
    /// Each object on exactly one node, `b` objects per node (`k = n * b`).
    SingleChoice { b: usize },
    Clustering,
    Cyclic,
    Block,
    /// Primary copies on node `i`, further replicas by random permutations.
    Random,
    /// Each object independently on a uniform `d`-subset of nodes.
    RandomSubsets,
    RandomBlockApprox,
    ConstrainedRandom { v_max: usize },
}

impl DesignKind {
    pub fn is_randomized(&self) -> bool {
        matches!(self, Self::Random | Self::RandomSubsets | Self::RandomBlockApprox | Self::ConstrainedRandom { .. })
    }

    /// Short name without parameters, as used in CSV `design` columns.
    pub fn name(&self) -> &'static str {
        match self {
            Self::SingleChoice { .. } => "single-choice",
            Self::Clustering => "clustering",
            Self::Cyclic => "cyclic",
            Self::Block => "block",
            Self::Random => "random",
            Self::RandomSubsets => "random-subsets",
            Self::RandomBlockApprox => "random-block-approx",
            Self::ConstrainedRandom { .. } => "constrained-random",
        }
    }
}

impl fmt::Display for DesignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SingleChoice { b } => write!(f, "single-choice:b={b}"),
            Self::ConstrainedRandom { v_max } => write!(f, "constrained-random:vmax={v_max}"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for DesignKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.trim().split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s.trim(), None),
        };
        let value = |key: &str, default: Option<usize>| -> Result<usize> {
            match param {
                None => default.ok_or_else(|| Error::Parse(format!("design {name:?} needs {key}=<int>"))),
                Some(p) => {
                    let (k, v) = p
                        .split_once('=')
                        .ok_or_else(|| Error::Parse(format!("expected {key}=<int>, got {p:?}")))?;
                    if k.trim() != key {
                        return Err(Error::Parse(format!("design {name:?} has no parameter {k:?}")));
                    }
                    v.trim().parse().map_err(|_| Error::Parse(format!("bad integer in {p:?}")))
                }
            }
        };
        let plain = |kind: DesignKind| {
            if param.is_some() {
                Err(Error::Parse(format!("design {name:?} takes no parameters")))
            } else {
                Ok(kind)
            }
        };
        match name {
            "single-choice" => Ok(Self::SingleChoice { b: value("b", Some(1))? }),
            "clustering" => plain(Self::Clustering),
            "cyclic" => plain(Self::Cyclic),
            "block" => plain(Self::Block),
            "random" => plain(Self::Random),
            "random-subsets" => plain(Self::RandomSubsets),
            "random-block-approx" => plain(Self::RandomBlockApprox),
            "constrained-random" => Ok(Self::ConstrainedRandom { v_max: value("vmax", None)? }),
            other => Err(Error::Parse(format!("unknown design {other:?}"))),
        }
    }
}

/// Fractions of object pairs by overlap size.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapProfile {
    /// Overlap size -> fraction among the pairs that overlap at all.
    pub by_size: BTreeMap<usize, f64>,
    /// Fraction of all unordered pairs with disjoint service choices.
    pub zero_fraction: f64,
    pub pairs_total: u64,
    pub pairs_overlapping: u64,
}

impl OverlapProfile {
    pub fn fraction(&self, size: usize) -> f64 {
        self.by_size.get(&size).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpanMethod {
    Exact,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StorageAllocation {
    n_nodes: usize,
    choices: Vec<Vec<usize>>,
    node_contents: Vec<Vec<usize>>,
    kind: Option<DesignKind>,
    d: usize,
    seed: Option<u64>,
}

impl StorageAllocation {
    /// Builds an allocation from explicit service-choice sets.
    pub fn from_choices(n_nodes: usize, choices: Vec<Vec<usize>>) -> Result<Self> {
        for (i, c) in choices.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::ParameterMismatch(format!("object {i} has no service choice")));
            }
            for (pos, &node) in c.iter().enumerate() {
                if node >= n_nodes {
                    return Err(Error::IndexOutOfRange { index: node, len: n_nodes });
                }
                if c[..pos].contains(&node) {
                    return Err(Error::ParameterMismatch(format!("object {i} stored twice on node {node}")));
                }
            }
        }
        let d = choices.iter().map(Vec::len).max().unwrap_or(0);
        let node_contents = transpose(n_nodes, &choices);
        Ok(Self { n_nodes, choices, node_contents, kind: None, d, seed: None })
    }

    pub fn build(kind: DesignKind, n: usize, d: usize, seed: Option<u64>) -> Result<Self> {
        if n == 0 || d == 0 || d > n {
            return Err(Error::ParameterMismatch(format!("need n >= d >= 1, got n={n} d={d}")));
        }
        let choices = match kind {
            DesignKind::SingleChoice { b } => {
                if d != 1 || b == 0 {
                    return Err(Error::ParameterMismatch(format!("single-choice needs d=1 and b>=1, got d={d} b={b}")));
                }
                (0..n * b).map(|i| vec![i / b]).collect()
            }
            DesignKind::Clustering => {
                if n % d != 0 {
                    return Err(Error::ParameterMismatch(format!("clustering needs d | n, got n={n} d={d}")));
                }
                (0..n).map(|i| (i / d * d..i / d * d + d).collect()).collect()
            }
            DesignKind::Cyclic => (0..n).map(|i| (0..d).map(|j| (i + j) % n).collect()).collect(),
            DesignKind::Block => {
                if n != d * d - d + 1 {
                    return Err(Error::ParameterMismatch(format!("block design needs n = d^2 - d + 1 = {}, got n={n}", d * d - d + 1)));
                }
                let diff = perfect_difference_set(n, d).ok_or(Error::NoBlockDesign { d, n })?;
                (0..n).map(|i| diff.iter().map(|&delta| (i + delta) % n).collect()).collect()
            }
            _ => {
                let seed = seed.ok_or_else(|| Error::ParameterMismatch(format!("{kind} needs a seed")))?;
                let mut alloc = Self::build_with_rng(kind, n, d, &mut stream(seed, u64::MAX))?;
                alloc.seed = Some(seed);
                return Ok(alloc);
            }
        };
        let mut alloc = Self::from_choices(n, choices)?;
        alloc.kind = Some(kind);
        alloc.d = d;
        Ok(alloc)
    }

    /// Builds a randomized design from an explicit generator (per-trial rebuilds).
    pub fn build_with_rng(kind: DesignKind, n: usize, d: usize, rng: &mut StreamRng) -> Result<Self> {
        if !kind.is_randomized() {
            return Self::build(kind, n, d, None);
        }
        if n == 0 || d == 0 || d > n {
            return Err(Error::ParameterMismatch(format!("need n >= d >= 1, got n={n} d={d}")));
        }
        let choices = match kind {
            DesignKind::Random => permutation_choices(n, d, rng)?,
            DesignKind::RandomSubsets => random_choices(n, d, rng),
            DesignKind::RandomBlockApprox => approx_block_choices(n, d, rng)?,
            DesignKind::ConstrainedRandom { v_max } => constrained_random_choices(n, d, v_max, rng)?,
            _ => unreachable!(),
        };
        let mut alloc = Self::from_choices(n, choices)?;
        alloc.kind = Some(kind);
        alloc.d = d;
        Ok(alloc)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_objects(&self) -> usize {
        self.choices.len()
    }

    /// Replication factor (largest `|C_i|`).
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kind(&self) -> Option<DesignKind> {
        self.kind
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn choices(&self, object: usize) -> &[usize] {
        &self.choices[object]
    }

    pub fn all_choices(&self) -> &[Vec<usize>] {
        &self.choices
    }

    pub fn node_contents(&self, node: usize) -> &[usize] {
        &self.node_contents[node]
    }

    pub fn node_loads(&self) -> Vec<usize> {
        self.node_contents.iter().map(Vec::len).collect()
    }

    pub fn is_regular(&self) -> bool {
        self.choices.iter().all(|c| c.len() == self.d)
    }

    /// Every node stores the same number of distinct objects.
    pub fn is_balanced(&self) -> bool {
        let loads = self.node_loads();
        loads.windows(2).all(|w| w[0] == w[1])
    }

    fn check_objects(&self, objects: &[usize]) -> Result<()> {
        match objects.iter().find(|&&o| o >= self.n_objects()) {
            Some(&o) => Err(Error::IndexOutOfRange { index: o, len: self.n_objects() }),
            None => Ok(()),
        }
    }

    /// `|union of C_i|` over the given objects.
    pub fn span(&self, objects: &[usize]) -> Result<usize> {
        self.check_objects(objects)?;
        let mut seen = vec![false; self.n_nodes];
        let mut count = 0;
        for &o in objects {
            for &node in &self.choices[o] {
                if !seen[node] {
                    seen[node] = true;
                    count += 1;
                }
            }
        }
        Ok(count)
    }

    fn check_budget(&self, t: usize) -> Result<()> {
        let k = self.n_objects();
        if t == 0 || t > k {
            return Err(Error::IndexOutOfRange { index: t, len: k });
        }
        let subsets = binomial_u128(k, t);
        if subsets > ENUMERATION_BUDGET {
            return Err(Error::BudgetExceeded { subsets, budget: ENUMERATION_BUDGET });
        }
        Ok(())
    }

    /// Sum over all `t`-subsets of objects of `|C_i1 ∩ ... ∩ C_it|`.
    pub fn cum_overlap(&self, t: usize) -> Result<u64> {
        self.check_budget(t)?;
        let mut total = 0u64;
        let mut stack: Vec<Vec<usize>> = Vec::with_capacity(t);
        self.overlap_dfs(t, 0, &mut stack, &mut total);
        Ok(total)
    }

    fn overlap_dfs(&self, t: usize, start: usize, stack: &mut Vec<Vec<usize>>, total: &mut u64) {
        let depth = stack.len();
        if depth == t {
            *total += stack.last().map_or(0, |s| s.len() as u64);
            return;
        }
        let k = self.n_objects();
        for o in start..=k - (t - depth) {
            let next: Vec<usize> = match stack.last() {
                None => self.choices[o].clone(),
                Some(cur) => cur.iter().copied().filter(|n| self.choices[o].contains(n)).collect(),
            };
            // empty intersections stay empty for every superset
            if next.is_empty() {
                continue;
            }
            stack.push(next);
            self.overlap_dfs(t, o + 1, stack, total);
            stack.pop();
        }
    }

    /// Visits the span of every `t`-subset of objects.
    fn for_each_t_span<F: FnMut(usize)>(&self, t: usize, mut visit: F) {
        let mut counts = vec![0u32; self.n_nodes];
        let mut union = 0usize;
        self.span_dfs(t, 0, 0, &mut counts, &mut union, &mut visit);
    }

    fn span_dfs<F: FnMut(usize)>(
        &self,
        t: usize,
        depth: usize,
        start: usize,
        counts: &mut [u32],
        union: &mut usize,
        visit: &mut F,
    ) {
        if depth == t {
            visit(*union);
            return;
        }
        let k = self.n_objects();
        for o in start..=k - (t - depth) {
            for &node in &self.choices[o] {
                if counts[node] == 0 {
                    *union += 1;
                }
                counts[node] += 1;
            }
            self.span_dfs(t, depth + 1, o + 1, counts, union, visit);
            for &node in &self.choices[o] {
                counts[node] -= 1;
                if counts[node] == 0 {
                    *union -= 1;
                }
            }
        }
    }

    /// Sum over all `t`-subsets of objects of their span.
    pub fn cum_span(&self, t: usize) -> Result<u64> {
        self.check_budget(t)?;
        let mut total = 0u64;
        self.for_each_t_span(t, |s| total += s as u64);
        Ok(total)
    }

    /// Distribution of the span of a uniformly chosen `t`-subset of objects.
    pub fn span_t_distribution(&self, t: usize, method: SpanMethod) -> Result<BTreeMap<usize, f64>> {
        let k = self.n_objects();
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        let total = match method {
            SpanMethod::Exact => {
                self.check_budget(t)?;
                let mut total = 0u64;
                self.for_each_t_span(t, |s| {
                    *counts.entry(s).or_default() += 1;
                    total += 1;
                });
                total
            }
            SpanMethod::Sampled { samples, seed } => {
                if t == 0 || t > k {
                    return Err(Error::IndexOutOfRange { index: t, len: k });
                }
                let mut rng = stream(seed, u64::MAX - 1);
                for _ in 0..samples {
                    let subset = rand::seq::index::sample(&mut rng, k, t).into_vec();
                    *counts.entry(self.span(&subset)?).or_default() += 1;
                }
                samples
            }
        };
        Ok(counts.into_iter().map(|(s, c)| (s, c as f64 / total as f64)).collect())
    }

    /// Relocates one copy of `object` from `from_node` to `to_node`.
    pub fn move_object(&self, object: usize, from_node: usize, to_node: usize) -> Result<Self> {
        self.check_objects(&[object])?;
        for node in [from_node, to_node] {
            if node >= self.n_nodes {
                return Err(Error::IndexOutOfRange { index: node, len: self.n_nodes });
            }
        }
        let pos = self.choices[object]
            .iter()
            .position(|&n| n == from_node)
            .ok_or(Error::NotStored { object, node: from_node })?;
        if self.choices[object].contains(&to_node) {
            return Err(Error::AlreadyStored { object, node: to_node });
        }
        let mut choices = self.choices.clone();
        choices[object][pos] = to_node;
        Self::from_choices(self.n_nodes, choices)
    }

    /// True iff objects at circular index distance greater than `r` never share a node.
    pub fn is_r_gap(&self, r: usize) -> bool {
        let k = self.n_objects();
        self.node_contents.iter().all(|objs| {
            objs.iter().enumerate().all(|(a, &i)| {
                objs[a + 1..].iter().all(|&j| {
                    let gap = i.abs_diff(j);
                    gap.min(k - gap) <= r
                })
            })
        })
    }

    pub fn overlap_profile(&self) -> OverlapProfile {
        let mut pair_overlap: HashMap<(usize, usize), usize> = HashMap::new();
        for objs in &self.node_contents {
            for (a, &i) in objs.iter().enumerate() {
                for &j in &objs[a + 1..] {
                    *pair_overlap.entry((i.min(j), i.max(j))).or_default() += 1;
                }
            }
        }
        let k = self.n_objects() as u64;
        let pairs_total = k * k.saturating_sub(1) / 2;
        let pairs_overlapping = pair_overlap.len() as u64;
        let mut hist: BTreeMap<usize, u64> = BTreeMap::new();
        for &size in pair_overlap.values() {
            *hist.entry(size).or_default() += 1;
        }
        let by_size = hist
            .into_iter()
            .map(|(s, c)| (s, c as f64 / pairs_overlapping as f64))
            .collect();
        let zero_fraction = if pairs_total == 0 {
            0.0
        } else {
            (pairs_total - pairs_overlapping) as f64 / pairs_total as f64
        };
        OverlapProfile { by_size, zero_fraction, pairs_total, pairs_overlapping }
    }
}

impl fmt::Display for StorageAllocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = self.kind.map_or_else(|| "custom".to_string(), |k| k.to_string());
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        writeln!(
            f,
            "nodes={} objects={} d={} kind={} seed={}",
            self.n_nodes,
            self.n_objects(),
            self.d,
            kind,
            seed
        )?;
        for (i, c) in self.choices.iter().enumerate() {
            let nodes: Vec<String> = c.iter().map(usize::to_string).collect();
            writeln!(f, "{i}: {}", nodes.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for StorageAllocation {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty allocation file".into()))?;
        let mut fields: HashMap<&str, &str> = HashMap::new();
        for tok in header.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header token {tok:?}")))?;
            fields.insert(k, v);
        }
        let field = |k: &str| fields.get(k).copied().ok_or_else(|| Error::Parse(format!("header is missing {k}")));
        let int = |k: &str| -> Result<usize> { field(k)?.parse().map_err(|_| Error::Parse(format!("bad {k} in header"))) };
        let n_nodes = int("nodes")?;
        let k = int("objects")?;
        let d = int("d")?;
        let kind = match field("kind")? {
            "custom" => None,
            other => Some(other.parse::<DesignKind>()?),
        };
        let seed = match field("seed")? {
            "none" => None,
            s => Some(s.parse::<u64>().map_err(|_| Error::Parse(format!("bad seed {s:?}")))?),
        };
        let mut choices = vec![Vec::new(); k];
        let mut seen = vec![false; k];
        for line in lines {
            let (idx, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected `index: nodes`, got {line:?}")))?;
            let idx: usize = idx.trim().parse().map_err(|_| Error::Parse(format!("bad object index in {line:?}")))?;
            if idx >= k {
                return Err(Error::IndexOutOfRange { index: idx, len: k });
            }
            if seen[idx] {
                return Err(Error::Parse(format!("object {idx} listed twice")));
            }
            seen[idx] = true;
            choices[idx] = rest
                .split(',')
                .map(|s| s.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad node in {line:?}"))))
                .collect::<Result<_>>()?;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Parse(format!("object {missing} missing")));
        }
        let mut alloc = Self::from_choices(n_nodes, choices)?;
        alloc.kind = kind;
        alloc.d = d;
        alloc.seed = seed;
        Ok(alloc)
    }
}

fn transpose(n_nodes: usize, choices: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut contents = vec![Vec::new(); n_nodes];
    for (i, c) in choices.iter().enumerate() {
        for &node in c {
            contents[node].push(i);
        }
    }
    contents
}

pub(crate) fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// A `d`-subset `D` of `Z_n` whose nonzero differences each occur exactly once.
pub fn perfect_difference_set(n: usize, d: usize) -> Option<Vec<usize>> {
    if d == 1 {
        return (n == 1).then(|| vec![0]);
    }
    if n != d * d - d + 1 {
        return None;
    }
    // Translating any solution puts the pair with difference 1 at {0, 1}.
    let mut set = vec![0, 1];
    let mut used = vec![false; n];
    used[1] = true;
    used[n - 1] = true;
    if extend_difference_set(n, d, &mut set, &mut used) {
        Some(set)
    } else {
        None
    }
}

fn extend_difference_set(n: usize, d: usize, set: &mut Vec<usize>, used: &mut [bool]) -> bool {
    if set.len() == d {
        return true;
    }
    let last = *set.last().expect("nonempty");
    for cand in last + 1..n {
        if set.len() + (n - cand) < d {
            break;
        }
        let diffs: Vec<usize> = set.iter().flat_map(|&x| [(cand + n - x) % n, (x + n - cand) % n]).collect();
        let mut ok = true;
        for (i, &df) in diffs.iter().enumerate() {
            if used[df] || diffs[..i].contains(&df) {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        for &df in &diffs {
            used[df] = true;
        }
        set.push(cand);
        if extend_difference_set(n, d, set, used) {
            return true;
        }
        set.pop();
        for &df in &diffs {
            used[df] = false;
        }
    }
    false
}

/// Object `i` keeps its primary copy on node `i`; replica round `r` applies a
/// random permutation, repaired by random swaps until no object lands on a
/// node it already occupies.
fn permutation_choices(n: usize, d: usize, rng: &mut StreamRng) -> Result<Vec<Vec<usize>>> {
    let mut choices: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for _ in 1..d {
        let mut placed = false;
        for _ in 0..100 {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            let mut bad: Vec<usize> = (0..n).filter(|&o| choices[o].contains(&perm[o])).collect();
            let mut budget = 1000 * n;
            while !bad.is_empty() && budget > 0 {
                budget -= 1;
                let pos = rng.random_range(0..bad.len());
                let o = bad[pos];
                let other = rng.random_range(0..n);
                if !choices[o].contains(&perm[other]) && !choices[other].contains(&perm[o]) {
                    perm.swap(o, other);
                    bad.swap_remove(pos);
                    if let Some(p) = bad.iter().position(|&x| x == other) {
                        bad.swap_remove(p);
                    }
                }
            }
            if bad.is_empty() {
                for (o, &node) in perm.iter().enumerate() {
                    choices[o].push(node);
                }
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::ParameterMismatch(format!("random permutation design did not settle for n={n} d={d}")));
        }
    }
    for c in &mut choices {
        c.sort_unstable();
    }
    Ok(choices)
}

/// Each object independently takes a uniform `d`-subset of the nodes.
fn random_choices(n: usize, d: usize, rng: &mut StreamRng) -> Vec<Vec<usize>> {
    (0..n)
        .map(|_| {
            let mut c = rand::seq::index::sample(rng, n, d).into_vec();
            c.sort_unstable();
            c
        })
        .collect()
}

/// Randomized approximation of a symmetric block design.
///
/// All `n * d` copies are shuffled into a queue; each is placed on a random
/// node, probing forward past nodes that already hold the object or are full.
/// If the probe runs off the end, the first node without the object takes it,
/// evicting a random resident back into the queue when the node is full.
fn approx_block_choices(n: usize, d: usize, rng: &mut StreamRng) -> Result<Vec<Vec<usize>>> {
    let mut copies: Vec<usize> = (0..n).flat_map(|o| std::iter::repeat_n(o, d)).collect();
    copies.shuffle(rng);
    let mut queue: VecDeque<usize> = copies.into();
    let mut nodes: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
    let max_steps = 1000 * n * d + 10_000;
    let mut steps = 0;
    while let Some(obj) = queue.pop_front() {
        steps += 1;
        if steps > max_steps {
            return Err(Error::ParameterMismatch(format!(
                "randomized block construction did not settle for n={n} d={d}"
            )));
        }
        let start = rng.random_range(0..n);
        let viable = |node: &Vec<usize>| node.len() < d && !node.contains(&obj);
        if let Some(j) = (start..n).find(|&j| viable(&nodes[j])) {
            nodes[j].push(obj);
            continue;
        }
        let tagged = (0..n)
            .find(|&j| !nodes[j].contains(&obj))
            .expect("an object has at most d < n+1 copies placed");
        if nodes[tagged].len() >= d {
            let victim = rng.random_range(0..nodes[tagged].len());
            let evicted = nodes[tagged].swap_remove(victim);
            queue.push_back(evicted);
        }
        nodes[tagged].push(obj);
    }
    let mut choices = transpose(n, &nodes);
    for c in &mut choices {
        c.sort_unstable();
    }
    Ok(choices)
}

/// Random selection restricted so each object overlaps at most `v_max` of its
/// `d`-hop siblings (objects whose index differs by a multiple of `d`).
fn constrained_random_choices(n: usize, d: usize, v_max: usize, rng: &mut StreamRng) -> Result<Vec<Vec<usize>>> {
    let mut last_failure = 0;
    for _ in 0..CONSTRAINED_RANDOM_RETRIES {
        match try_constrained_random(n, d, v_max, rng) {
            Ok(choices) => return Ok(choices),
            Err(object) => last_failure = object,
        }
    }
    Err(Error::InfeasibleConstraint { object: last_failure, v_max, attempts: CONSTRAINED_RANDOM_RETRIES })
}

fn try_constrained_random(n: usize, d: usize, v_max: usize, rng: &mut StreamRng) -> std::result::Result<Vec<Vec<usize>>, usize> {
    let mut choices: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
    let mut contents: Vec<Vec<usize>> = vec![Vec::new(); n];
    // overlapping[i] lists siblings that currently share a node with i
    let mut overlapping: Vec<Vec<usize>> = vec![Vec::new(); n];
    let is_sibling = |i: usize, j: usize| i != j && i.abs_diff(j) % d == 0;
    let mut suitable = Vec::with_capacity(n);
    for i in 0..n {
        for _ in 0..d {
            suitable.clear();
            for node in 0..n {
                if choices[i].contains(&node) {
                    continue;
                }
                let mut added = 0;
                let mut blocked = false;
                for &j in &contents[node] {
                    if is_sibling(i, j) && !overlapping[i].contains(&j) {
                        added += 1;
                        blocked |= overlapping[j].len() + 1 > v_max;
                    }
                }
                if blocked || overlapping[i].len() + added > v_max {
                    continue;
                }
                suitable.push(node);
            }
            if suitable.is_empty() {
                return Err(i);
            }
            let node = suitable[rng.random_range(0..suitable.len())];
            let newcomers: Vec<usize> = contents[node]
                .iter()
                .copied()
                .filter(|&j| is_sibling(i, j) && !overlapping[i].contains(&j))
                .collect();
            for j in newcomers {
                overlapping[i].push(j);
                overlapping[j].push(i);
            }
            choices[i].push(node);
            contents[node].push(i);
        }
        choices[i].sort_unstable();
    }
    Ok(choices)
}
