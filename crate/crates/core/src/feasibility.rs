//! Membership in the modified capacity region.
//!
//! A demand vector `rho` is servable at per-node capacity `m` when there is a
//! split of every `rho_i` over the nodes in `C_i` that keeps each node's load
//! at most `m`. Equivalently, every object subset `I` satisfies
//! `sum(rho_I) <= m * span(I)`.

use crate::allocation::StorageAllocation;
use crate::demand::DemandVector;
use crate::error::{Error, Result};

/// Relative slack on total demand when comparing served and requested load.
pub const REL_TOL: f64 = 1e-9;
/// Absolute slack so that exactly saturated boundary vectors count as feasible.
pub const ABS_TOL: f64 = 1e-12;

/// Largest object count accepted by [`check_subsets`].
pub const MAX_SUBSET_OBJECTS: usize = 22;

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// Per object, the `(node, amount)` pairs of a feasible assignment.
    Flow(Vec<Vec<(usize, f64)>>),
    /// Every nonempty subset was checked and none violates its span capacity.
    Exhaustive { subsets_checked: u64 },
    /// An object subset whose demand exceeds `m * span` by `excess`.
    Violation { subset: Vec<usize>, excess: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    pub witness: Witness,
    pub max_served: f64,
}

impl FeasibilityVerdict {
    pub fn violating_subset(&self) -> Option<&[usize]> {
        match &self.witness {
            Witness::Violation { subset, .. } => Some(subset),
            _ => None,
        }
    }
}

fn tolerance(total: f64) -> f64 {
    REL_TOL * total + ABS_TOL
}

fn validate(alloc: &StorageAllocation, rho: &DemandVector, m: f64) -> Result<()> {
    if rho.len() != alloc.n_objects() {
        return Err(Error::LengthMismatch { expected: alloc.n_objects(), got: rho.len() });
    }
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::NonpositiveThreshold(m));
    }
    Ok(())
}

struct Edge {
    to: usize,
    cap: f64,
}

struct FlowNetwork {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
    eps: f64,
}

impl FlowNetwork {
    fn new(vertices: usize, eps: f64) -> Self {
        Self { edges: Vec::new(), adj: vec![Vec::new(); vertices], level: vec![0; vertices], iter: vec![0; vertices], eps }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: f64) -> usize {
        let id = self.edges.len();
        self.adj[from].push(id);
        self.edges.push(Edge { to, cap });
        self.adj[to].push(id + 1);
        self.edges.push(Edge { to: from, cap: 0.0 });
        id
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                let Edge { to, cap } = self.edges[e];
                if cap > self.eps && self.level[to] < 0 {
                    self.level[to] = self.level[v] + 1;
                    queue.push_back(to);
                }
            }
        }
    }

    fn dfs(&mut self, v: usize, t: usize, pushed: f64) -> f64 {
        if v == t {
            return pushed;
        }
        while self.iter[v] < self.adj[v].len() {
            let e = self.adj[v][self.iter[v]];
            let Edge { to, cap } = self.edges[e];
            if cap > self.eps && self.level[to] == self.level[v] + 1 {
                let got = self.dfs(to, t, pushed.min(cap));
                if got > 0.0 {
                    self.edges[e].cap -= got;
                    self.edges[e ^ 1].cap += got;
                    return got;
                }
            }
            self.iter[v] += 1;
        }
        0.0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut flow = 0.0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return flow;
            }
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let got = self.dfs(s, t, f64::INFINITY);
                if got <= 0.0 {
                    break;
                }
                flow += got;
            }
        }
    }
}

/// Decides feasibility by max flow; infeasible verdicts carry the min-cut subset.
pub fn check_flow(alloc: &StorageAllocation, rho: &DemandVector, m: f64) -> Result<FeasibilityVerdict> {
    validate(alloc, rho, m)?;
    let k = alloc.n_objects();
    let n = alloc.n_nodes();
    let demand = rho.as_slice();
    let total = rho.total();
    let tol = tolerance(total);

    let source = 0;
    let sink = k + n + 1;
    let scale = total.max(m).max(1.0);
    let mut net = FlowNetwork::new(k + n + 2, 1e-14 * scale);
    let mut object_edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); k];
    for (i, &r) in demand.iter().enumerate() {
        if r <= 0.0 {
            continue;
        }
        net.add_edge(source, 1 + i, r);
        for &node in alloc.choices(i) {
            let id = net.add_edge(1 + i, 1 + k + node, f64::INFINITY);
            object_edges[i].push((node, id));
        }
    }
    for node in 0..n {
        net.add_edge(1 + k + node, sink, m);
    }
    let flow = net.max_flow(source, sink);

    if flow >= total - tol {
        let assignment = object_edges
            .iter()
            .map(|edges| {
                edges
                    .iter()
                    .map(|&(node, id)| (node, net.edges[id ^ 1].cap))
                    .filter(|&(_, x)| x > 0.0)
                    .collect()
            })
            .collect();
        return Ok(FeasibilityVerdict { feasible: true, witness: Witness::Flow(assignment), max_served: flow.min(total) });
    }

    net.bfs(source);
    let subset: Vec<usize> = (0..k).filter(|&i| net.level[1 + i] >= 0).collect();
    let span = alloc.span(&subset)?;
    let excess = subset.iter().map(|&i| demand[i]).sum::<f64>() - m * span as f64;
    Ok(FeasibilityVerdict { feasible: false, witness: Witness::Violation { subset, excess }, max_served: flow })
}

/// Decides feasibility by checking the span condition on every object subset.
pub fn check_subsets(alloc: &StorageAllocation, rho: &DemandVector, m: f64) -> Result<FeasibilityVerdict> {
    validate(alloc, rho, m)?;
    let k = alloc.n_objects();
    if k > MAX_SUBSET_OBJECTS {
        return Err(Error::TooLarge { k, max: MAX_SUBSET_OBJECTS });
    }
    let mut search = SubsetSearch {
        alloc,
        demand: rho.as_slice(),
        m,
        tol: tolerance(rho.total()),
        counts: vec![0; alloc.n_nodes()],
        union: 0,
        sum: 0.0,
        chosen: Vec::with_capacity(k),
        first_violation: None,
        best_gap: 0.0,
        checked: 0,
    };
    search.descend(0);
    let max_served = rho.total() - search.best_gap;
    Ok(match search.first_violation {
        Some((subset, excess)) => FeasibilityVerdict { feasible: false, witness: Witness::Violation { subset, excess }, max_served },
        None => FeasibilityVerdict {
            feasible: true,
            witness: Witness::Exhaustive { subsets_checked: search.checked },
            max_served,
        },
    })
}

struct SubsetSearch<'a> {
    alloc: &'a StorageAllocation,
    demand: &'a [f64],
    m: f64,
    tol: f64,
    counts: Vec<u32>,
    union: usize,
    sum: f64,
    chosen: Vec<usize>,
    first_violation: Option<(Vec<usize>, f64)>,
    best_gap: f64,
    checked: u64,
}

impl SubsetSearch<'_> {
    fn descend(&mut self, start: usize) {
        for o in start..self.demand.len() {
            for &node in self.alloc.choices(o) {
                if self.counts[node] == 0 {
                    self.union += 1;
                }
                self.counts[node] += 1;
            }
            self.sum += self.demand[o];
            self.chosen.push(o);
            self.checked += 1;

            let gap = self.sum - self.m * self.union as f64;
            self.best_gap = self.best_gap.max(gap);
            if gap > self.tol && self.first_violation.is_none() {
                self.first_violation = Some((self.chosen.clone(), gap));
            }
            self.descend(o + 1);

            self.chosen.pop();
            self.sum -= self.demand[o];
            for &node in self.alloc.choices(o) {
                self.counts[node] -= 1;
                if self.counts[node] == 0 {
                    self.union -= 1;
                }
            }
        }
    }
}

/// Smallest per-node capacity under which `rho` is servable.
pub fn min_threshold(alloc: &StorageAllocation, rho: &DemandVector) -> Result<f64> {
    validate(alloc, rho, 1.0)?;
    let total = rho.total();
    if total <= 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = total;
    while hi - lo > 1e-9 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if check_flow(alloc, rho, mid)?.feasible {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
