use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use storage_robustness::bounds::{
    auto_span_method, block_bounds, clustering_bounds, constrained_random_lb, cyclic_bounds, default_windows, random_ub, random_ub_limit, rgap_bounds,
    scan_ub_any, ub_span_based, BoundMode, BoundReport, ClusteringMode, OccupancyMethod, Partition, ScanEval, SubGaussian,
};
use storage_robustness::{estimate_p_sweep, AllocationSource, DemandModel, DesignKind, RobustnessEstimate, StorageAllocation};

use crate::args::{BoundName, BoundsArgs, Eval, Global, Mode, Occupancy};
use crate::output::{num, Csv};
use crate::simulate::models;
use crate::{CliError, EXIT_OK};

const SPAN_SAMPLES: u64 = 200_000;

/// The design a bound describes, and whether its allocation is held fixed.
fn design_of(bound: BoundName, a: &BoundsArgs, span_design: Option<DesignKind>) -> Option<(DesignKind, bool)> {
    match bound {
        BoundName::Span => span_design.map(|k| (k, true)),
        BoundName::ScanAny => None,
        BoundName::Cyclic | BoundName::Rgap => Some((DesignKind::Cyclic, false)),
        BoundName::Block => Some((DesignKind::Block, false)),
        BoundName::Clustering => Some((DesignKind::Clustering, false)),
        BoundName::ConstrainedRandom => Some((DesignKind::ConstrainedRandom { v_max: a.vmax }, false)),
        BoundName::Random | BoundName::RandomLimit => Some((DesignKind::RandomSubsets, false)),
    }
}

fn bound_label(bound: BoundName) -> &'static str {
    match bound {
        BoundName::Span => "span",
        BoundName::ScanAny => "scan-any",
        BoundName::Cyclic => "cyclic",
        BoundName::Block => "block",
        BoundName::Clustering => "clustering",
        BoundName::Rgap => "rgap",
        BoundName::ConstrainedRandom => "constrained-random",
        BoundName::Random => "random",
        BoundName::RandomLimit => "random-limit",
    }
}

fn scan_eval(a: &BoundsArgs, global: &Global) -> ScanEval {
    match a.eval {
        Eval::Mc => ScanEval::MonteCarlo { trials: global.trials, seed: global.seed },
        Eval::Poisson => ScanEval::Poisson,
        Eval::Naus => ScanEval::Naus { trials_per_cell: global.trials, seed: global.seed },
    }
}

fn subgaussian(a: &BoundsArgs) -> Result<SubGaussian, CliError> {
    match (a.sg_alpha, a.sg_beta, a.sg_gamma, a.sg_mu) {
        (Some(alpha), Some(beta), Some(gamma), Some(mu)) => Ok(SubGaussian { alpha, beta, gamma, mu }),
        _ => Err(CliError::Usage("sub-gaussian mode needs --sg-alpha, --sg-beta, --sg-gamma and --sg-mu".into())),
    }
}

struct Task {
    bound: BoundName,
    design: Option<(DesignKind, bool)>,
    n: usize,
    d: usize,
    key: f64,
    model: DemandModel,
}

fn evaluate(t: &Task, m: f64, a: &BoundsArgs, global: &Global, mode: &BoundMode) -> storage_robustness::Result<Vec<BoundReport>> {
    let eval = scan_eval(a, global);
    let (n, d, model) = (t.n, t.d, &t.model);
    let pair = |(l, u): (BoundReport, BoundReport)| vec![l, u];
    Ok(match t.bound {
        BoundName::Span => {
            let (kind, _) = t.design.expect("span bounds carry a design");
            let alloc = StorageAllocation::build(kind, n, d, Some(global.seed))?;
            let ts: Vec<usize> = if a.t.is_empty() { (1..=d).collect() } else { a.t.clone() };
            let mut best: Option<BoundReport> = None;
            for &size in &ts {
                let method = auto_span_method(alloc.n_objects(), size, SPAN_SAMPLES, global.seed);
                let r = ub_span_based(&alloc, model, m, &[size], method)?;
                if best.as_ref().is_none_or(|b| r.value < b.value) {
                    best = Some(r);
                }
            }
            best.into_iter().collect()
        }
        BoundName::ScanAny => {
            let windows = if a.windows.is_empty() { default_windows(n, d, n) } else { a.windows.clone() };
            vec![scan_ub_any(n, d, model, m, &windows, eval)?]
        }
        BoundName::Cyclic => pair(cyclic_bounds(n, d, model, m, mode)?),
        BoundName::Block => pair(block_bounds(n, d, model, m, mode)?),
        BoundName::Clustering => {
            let cm = match mode {
                BoundMode::SubGaussian(sg) => ClusteringMode::SubGaussian(*sg),
                _ => ClusteringMode::Chernoff,
            };
            let (l, u) = clustering_bounds(n, d, model, m, cm)?;
            std::iter::once(l).chain(u).collect()
        }
        BoundName::Rgap => {
            let r = a.r.unwrap_or(d.saturating_sub(1));
            pair(rgap_bounds(n, d, r, model, m, a.s.unwrap_or(d), eval)?)
        }
        BoundName::ConstrainedRandom => vec![constrained_random_lb(n, d, a.vmax, model, m, eval)?],
        BoundName::Random => {
            let method = match a.occupancy {
                Occupancy::Exact => OccupancyMethod::Exact,
                Occupancy::ExactMc => OccupancyMethod::ExactMc { draws: global.trials, seed: global.seed },
                Occupancy::Mean => OccupancyMethod::MeanApprox,
            };
            vec![random_ub(n, d, model, m, &Partition::Even { u: a.group.unwrap_or(d) }, method)?]
        }
        BoundName::RandomLimit => vec![random_ub_limit(n, d, model, m)?],
    })
}

type McKey = (String, bool, usize, usize, u64);

pub fn run(a: &BoundsArgs, global: &Global, w: &mut Csv, err: &mut Vec<u8>) -> Result<u8, CliError> {
    let models = models(&a.grid)?;
    let mut ms = a.grid.m.clone();
    ms.sort_by(f64::total_cmp);
    ms.dedup();
    let mode = match a.mode {
        Mode::Finite => BoundMode::Finite { eval: scan_eval(a, global), windows: a.windows.clone() },
        Mode::Asymptotic => BoundMode::Asymptotic,
        Mode::Subgaussian => BoundMode::SubGaussian(subgaussian(a)?),
    };
    let mut bounds = a.bound.clone();
    bounds.sort();
    bounds.dedup();

    let mut tasks = Vec::new();
    for &bound in &bounds {
        let designs: Vec<Option<DesignKind>> = if bound == BoundName::Span { a.designs.iter().copied().map(Some).collect() } else { vec![None] };
        for span_design in designs {
            for &n in &a.grid.n {
                for &d in &a.grid.d {
                    for (key, model) in &models {
                        tasks.push(Task { bound, design: design_of(bound, a, span_design), n, d, key: *key, model: *model });
                    }
                }
            }
        }
    }

    let results: Vec<Vec<Result<Vec<BoundReport>, String>>> = tasks
        .par_iter()
        .map(|t| ms.iter().map(|&m| evaluate(t, m, a, global, &mode).map_err(|e| e.to_string())).collect())
        .collect();

    let mut mc: BTreeMap<McKey, Result<Vec<RobustnessEstimate>, String>> = BTreeMap::new();
    if a.with_mc {
        let keys: Vec<(McKey, DesignKind, DemandModel)> = tasks
            .iter()
            .filter_map(|t| t.design.map(|(kind, fixed)| ((kind.to_string(), fixed, t.n, t.d, t.key.to_bits()), (kind, t.model))))
            .collect::<BTreeMap<_, _>>()
            .into_iter()
            .map(|(k, (kind, model))| (k, kind, model))
            .collect();
        let estimates: Vec<_> = keys
            .par_iter()
            .map(|(k, kind, model)| {
                let source = AllocationSource::for_design(*kind, k.2, k.3, global.seed, k.1).map_err(|e| e.to_string())?;
                estimate_p_sweep(&source, model, &ms, global.trials, global.seed).map_err(|e| e.to_string())
            })
            .collect();
        mc = keys.into_iter().map(|(k, ..)| k).zip(estimates).collect();
    }

    let design_label = |t: &Task| t.design.map_or_else(|| "any".to_string(), |(k, _)| k.to_string());
    let mut rows = Vec::new();
    for (t, per_m) in tasks.iter().zip(results) {
        let mc_est = t.design.and_then(|(kind, fixed)| mc.get(&(kind.to_string(), fixed, t.n, t.d, t.key.to_bits())));
        for (i, (&m, reports)) in ms.iter().zip(per_m).enumerate() {
            let base = |name: String, kind: String, value: String, asymptotic: String| {
                vec![
                    name,
                    kind,
                    design_label(t),
                    t.n.to_string(),
                    t.d.to_string(),
                    num(m),
                    t.model.family().to_string(),
                    t.model.param_string(),
                    value,
                    asymptotic,
                    global.seed.to_string(),
                ]
            };
            let mc_cols = || -> Vec<String> {
                if !a.with_mc {
                    return vec![];
                }
                match mc_est {
                    Some(Ok(est)) => vec![num(est[i].p_hat), num(est[i].ci_low), num(est[i].ci_high)],
                    Some(Err(_)) => vec!["skipped".into(), String::new(), String::new()],
                    None => vec![String::new(); 3],
                }
            };
            match reports {
                Ok(list) => {
                    for r in list {
                        let mut rec = base(r.name.clone(), r.kind.to_string(), num(r.value), r.asymptotic.to_string());
                        rec.extend(mc_cols());
                        rows.push((bound_label(t.bound), design_label(t), t.n, t.d, m, t.key, rec));
                    }
                }
                Err(reason) => {
                    writeln!(err, "skipped {} {} n={} d={} m={m} {}: {reason}", bound_label(t.bound), design_label(t), t.n, t.d, t.model)?;
                    let mut rec = base(bound_label(t.bound).to_string(), String::new(), "skipped".into(), String::new());
                    rec.extend(mc_cols());
                    rows.push((bound_label(t.bound), design_label(t), t.n, t.d, m, t.key, rec));
                }
            }
        }
    }
    rows.sort_by(|x, y| {
        (x.0, &x.1, x.2, x.3)
            .cmp(&(y.0, &y.1, y.2, y.3))
            .then(x.4.total_cmp(&y.4))
            .then(x.5.total_cmp(&y.5))
            .then(x.6[0].cmp(&y.6[0]))
    });

    let mut header: Vec<&str> = vec!["bound", "kind", "design", "n", "d", "m", "model", "param", "value", "asymptotic", "seed"];
    if a.with_mc {
        header.extend(["mc_p_hat", "mc_ci_low", "mc_ci_high"]);
    }
    w.write_record(&header)?;
    for (.., rec) in rows {
        w.write_record(&rec)?;
    }
    Ok(EXIT_OK)
}
