use std::io::Write;

use rayon::prelude::*;
use storage_robustness::{estimate_p_sweep, AllocationSource, DemandModel, DesignKind, RobustnessEstimate};

use crate::args::{Global, Grid, SimulateArgs};
use crate::output::{num, Csv};
use crate::{CliError, EXIT_OK};

pub const HEADER: [&str; 11] = ["design", "n", "d", "m", "model", "param", "trials", "p_hat", "ci_low", "ci_high", "seed"];

/// The demand models of a grid: one per swept value, with the sweep value as sort key.
pub fn models(grid: &Grid) -> Result<Vec<(f64, DemandModel)>, CliError> {
    check_grid(grid)?;
    if !(grid.scale > 0.0 && grid.scale.is_finite()) {
        return Err(CliError::Usage(format!("--scale must be positive, got {}", grid.scale)));
    }
    let base = grid.model.scaled(grid.scale)?;
    match &grid.sweep {
        None => Ok(vec![(0.0, base)]),
        Some(sweep) => sweep
            .values
            .iter()
            .map(|&v| Ok((v, grid.model.with_param(&sweep.name, v)?.scaled(grid.scale)?)))
            .collect(),
    }
}

pub fn check_grid(grid: &Grid) -> Result<(), CliError> {
    if grid.n.is_empty() || grid.d.is_empty() || grid.m.is_empty() {
        return Err(CliError::Usage("n, d and m grids must be nonempty".into()));
    }
    if let Some(&m) = grid.m.iter().find(|&&m| !(m > 0.0 && m.is_finite())) {
        return Err(CliError::Usage(format!("load thresholds must be positive, got {m}")));
    }
    Ok(())
}

struct Point {
    design: DesignKind,
    n: usize,
    d: usize,
    key: f64,
    model: DemandModel,
}

type Outcome = Result<Vec<RobustnessEstimate>, String>;

pub fn run(a: &SimulateArgs, global: &Global, w: &mut Csv, err: &mut Vec<u8>) -> Result<u8, CliError> {
    if a.designs.is_empty() {
        return Err(CliError::Usage("design list must be nonempty".into()));
    }
    let models = models(&a.grid)?;
    let mut ms = a.grid.m.clone();
    ms.sort_by(f64::total_cmp);
    ms.dedup();

    let mut points = Vec::new();
    for &design in &a.designs {
        for &n in &a.grid.n {
            for &d in &a.grid.d {
                for (key, model) in &models {
                    points.push(Point { design, n, d, key: *key, model: *model });
                }
            }
        }
    }

    let outcomes: Vec<Outcome> = points
        .par_iter()
        .map(|p| {
            let source = AllocationSource::for_design(p.design, p.n, p.d, global.seed, a.fix_alloc).map_err(|e| e.to_string())?;
            estimate_p_sweep(&source, &p.model, &ms, global.trials, global.seed).map_err(|e| e.to_string())
        })
        .collect();

    let mut rows = Vec::new();
    for (p, outcome) in points.iter().zip(outcomes) {
        if let Err(reason) = &outcome {
            writeln!(err, "skipped {} n={} d={} {}: {reason}", p.design, p.n, p.d, p.model)?;
        }
        for (i, &m) in ms.iter().enumerate() {
            let mut rec = vec![p.design.to_string(), p.n.to_string(), p.d.to_string(), num(m), p.model.family().to_string(), p.model.param_string(), global.trials.to_string()];
            match &outcome {
                Ok(est) => rec.extend([num(est[i].p_hat), num(est[i].ci_low), num(est[i].ci_high)]),
                Err(_) => rec.extend(["skipped".to_string(), String::new(), String::new()]),
            }
            rec.push(global.seed.to_string());
            rows.push(((p.design.to_string(), p.n, p.d), m, p.key, rec));
        }
    }
    rows.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)).then(x.2.total_cmp(&y.2)));
    w.write_record(HEADER)?;
    for (.., rec) in rows {
        w.write_record(&rec)?;
    }
    Ok(EXIT_OK)
}
