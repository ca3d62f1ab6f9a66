use std::io::Write;

use storage_robustness::{DesignKind, StorageAllocation};

use crate::args::{DesignArgs, Global};
use crate::output::{num, Csv};
use crate::{CliError, EXIT_OK};

fn resolve_n(a: &DesignArgs) -> Result<usize, CliError> {
    match (a.n, a.kind) {
        (Some(n), _) => Ok(n),
        (None, DesignKind::Block) => Ok(a.d * a.d - a.d + 1),
        (None, kind) => Err(CliError::Usage(format!("--n is required for {kind} designs"))),
    }
}

struct Stats {
    seed: Option<u64>,
    balanced: bool,
    cum_overlap_2: u64,
    fractions: Vec<f64>,
}

fn stats(a: &StorageAllocation) -> Result<Stats, CliError> {
    let profile = a.overlap_profile();
    Ok(Stats {
        seed: a.seed(),
        balanced: a.is_balanced(),
        cum_overlap_2: a.cum_overlap(2)?,
        fractions: (1..=a.d()).map(|s| profile.fraction(s)).collect(),
    })
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

pub fn run(a: &DesignArgs, global: &Global, w: &mut Csv, err: &mut Vec<u8>) -> Result<u8, CliError> {
    let n = resolve_n(a)?;
    let seeds: Vec<u64> = if a.kind.is_randomized() { (0..a.seeds).map(|i| global.seed.wrapping_add(i)).collect() } else { vec![global.seed] };
    let allocations = seeds
        .iter()
        .map(|&s| StorageAllocation::build(a.kind, n, a.d, Some(s)))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(path) = &a.alloc_out {
        std::fs::write(path, allocations[0].to_string())?;
    }
    let rows = allocations.iter().map(stats).collect::<Result<Vec<_>, _>>()?;

    let mut header: Vec<String> = ["kind", "n", "d", "seed", "balanced", "cum_overlap_2"].map(String::from).to_vec();
    header.extend((1..=a.d).map(|s| format!("overlap_frac_{s}")));
    w.write_record(&header)?;
    let prefix = |seed: String| vec![a.kind.to_string(), n.to_string(), a.d.to_string(), seed];
    for r in &rows {
        let mut rec = prefix(r.seed.map_or_else(|| "none".to_string(), |s| s.to_string()));
        rec.push(r.balanced.to_string());
        rec.push(r.cum_overlap_2.to_string());
        rec.extend(r.fractions.iter().map(|&f| num(f)));
        w.write_record(&rec)?;
    }
    if rows.len() > 1 {
        let columns: Vec<Vec<f64>> = std::iter::once(rows.iter().map(|r| f64::from(u8::from(r.balanced))).collect())
            .chain(std::iter::once(rows.iter().map(|r| r.cum_overlap_2 as f64).collect()))
            .chain((0..a.d).map(|i| rows.iter().map(|r| r.fractions[i]).collect()))
            .collect();
        let summaries: Vec<(f64, f64)> = columns.iter().map(|c| mean_sd(c)).collect();
        for (label, pick) in [("mean", 0usize), ("stdev", 1)] {
            let mut rec = prefix(label.to_string());
            rec.extend(summaries.iter().map(|&(m, s)| num(if pick == 0 { m } else { s })));
            w.write_record(&rec)?;
        }
        let (m, s) = summaries[2];
        writeln!(err, "{} n={n} d={}: overlap_frac_1 = {m:.4} +/- {s:.4} over {} seeds", a.kind, a.d, rows.len())?;
    }
    Ok(EXIT_OK)
}
