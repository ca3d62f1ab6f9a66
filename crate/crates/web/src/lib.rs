//! WebAssembly bindings for the browser demo. Every call returns JSON text.

use serde_json::{json, Value};
use storage_robustness::bounds::{cyclic_bounds, scan_ub_any, default_windows, BoundMode, ScanEval};
use storage_robustness::{estimate_p, estimate_p_sweep, AllocationSource, DemandModel, DesignKind, StorageAllocation};
use wasm_bindgen::prelude::*;

/// Largest `n` the grid view will draw.
pub const MAX_GRID_NODES: usize = 200;
/// Cap on Monte Carlo trials per call, to keep the page responsive.
pub const MAX_TRIALS: u64 = 200_000;

fn design(kind: &str) -> Result<DesignKind, String> {
    kind.trim().parse().map_err(|e| format!("{e}"))
}

fn model(spec: &str) -> Result<DemandModel, String> {
    spec.trim().parse().map_err(|e| format!("{e}"))
}

fn trials(t: u64) -> Result<u64, String> {
    if t == 0 || t > MAX_TRIALS {
        return Err(format!("trials must lie in 1..={MAX_TRIALS}, got {t}"));
    }
    Ok(t)
}

/// Node sets of each object and the overlap profile of one allocation.
pub fn allocation_grid_json(kind: &str, n: usize, d: usize, seed: u64) -> Result<String, String> {
    let kind = design(kind)?;
    if n > MAX_GRID_NODES {
        return Err(format!("n must be at most {MAX_GRID_NODES} for the grid view"));
    }
    let alloc = StorageAllocation::build(kind, n, d, Some(seed)).map_err(|e| e.to_string())?;
    let profile = alloc.overlap_profile();
    let overlaps: Vec<f64> = (1..=d).map(|t| profile.fraction(t)).collect();
    Ok(json!({
        "design": kind.to_string(),
        "nodes": alloc.n_nodes(),
        "objects": alloc.all_choices(),
        "overlap_fractions": overlaps,
    })
    .to_string())
}

/// Estimated robustness of each design over a list of thresholds `m`.
pub fn robustness_curve_json(designs: &str, n: usize, d: usize, model_spec: &str, ms: &[f64], t: u64, seed: u64) -> Result<String, String> {
    let model = model(model_spec)?;
    let t = trials(t)?;
    if ms.is_empty() || ms.iter().any(|m| !(*m > 0.0)) {
        return Err("thresholds must be positive".into());
    }
    let mut series = Vec::new();
    for name in designs.split(',').filter(|s| !s.trim().is_empty()) {
        let kind = design(name)?;
        let source = AllocationSource::for_design(kind, n, d, seed, false).map_err(|e| format!("{kind}: {e}"))?;
        let est = estimate_p_sweep(&source, &model, ms, t, seed).map_err(|e| e.to_string())?;
        let points: Vec<Value> = ms
            .iter()
            .zip(&est)
            .map(|(m, e)| json!({ "m": m, "p": e.p_hat, "lo": e.ci_low, "hi": e.ci_high }))
            .collect();
        series.push(json!({ "design": kind.to_string(), "points": points }));
    }
    if series.is_empty() {
        return Err("no designs given".into());
    }
    Ok(json!({ "model": model.to_string(), "series": series }).to_string())
}

/// Cyclic-design lower and upper bounds, the design-free scan upper bound,
/// and a Monte Carlo estimate for the cyclic design.
pub fn bounds_vs_mc_json(n: usize, d: usize, model_spec: &str, m: f64, t: u64, seed: u64) -> Result<String, String> {
    let model = model(model_spec)?;
    let t = trials(t)?;
    let eval = ScanEval::MonteCarlo { trials: t, seed };
    let (lower, upper) = cyclic_bounds(n, d, &model, m, &BoundMode::Finite { eval, windows: vec![] }).map_err(|e| e.to_string())?;
    let any = scan_ub_any(n, d, &model, m, &default_windows(n, d, n), eval).map_err(|e| e.to_string())?;
    let source = AllocationSource::for_design(DesignKind::Cyclic, n, d, seed, false).map_err(|e| e.to_string())?;
    let est = estimate_p(&source, &model, m, t, seed).map_err(|e| e.to_string())?;
    Ok(json!({
        "cyclic_lower": lower.value,
        "cyclic_upper": upper.value,
        "any_design_upper": any.value,
        "mc": { "p": est.p_hat, "lo": est.ci_low, "hi": est.ci_high },
    })
    .to_string())
}

#[wasm_bindgen]
pub fn allocation_grid(kind: &str, n: usize, d: usize, seed: u64) -> Result<String, JsError> {
    allocation_grid_json(kind, n, d, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn robustness_curve(designs: &str, n: usize, d: usize, model: &str, ms: &[f64], trials: u64, seed: u64) -> Result<String, JsError> {
    robustness_curve_json(designs, n, d, model, ms, trials, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn bounds_vs_mc(n: usize, d: usize, model: &str, m: f64, trials: u64, seed: u64) -> Result<String, JsError> {
    bounds_vs_mc_json(n, d, model, m, trials, seed).map_err(|e| JsError::new(&e))
}
