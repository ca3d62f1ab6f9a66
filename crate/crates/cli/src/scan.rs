use storage_robustness::scanstat::{empirical_cdf, scan_cdf_naus, scan_cdf_poisson, scan_values_mc, ScanQuery};

use crate::args::{Global, ScanArgs, ScanMethod};
use crate::output::{num, Csv};
use crate::{CliError, EXIT_OK};

pub fn run(a: &ScanArgs, global: &Global, w: &mut Csv) -> Result<u8, CliError> {
    let mut xs = a.x.clone();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    for &x in &xs {
        ScanQuery::new(a.n, a.s, a.circular, x)?;
    }
    w.write_record(["method", "n", "s", "x", "circular", "model", "param", "p", "ci_low", "ci_high", "trials", "seed"])?;
    let samples = match a.method {
        ScanMethod::Mc => Some(scan_values_mc(&a.model, a.n, &[a.s], a.circular, global.trials, global.seed)?.remove(0)),
        _ => None,
    };
    for x in xs {
        let q = ScanQuery::new(a.n, a.s, a.circular, x)?;
        let (label, p, lo, hi, trials) = match (a.method, &samples) {
            (ScanMethod::Mc, Some(values)) => {
                let est = empirical_cdf(values, x);
                ("mc", est.p_hat, num(est.ci_low), num(est.ci_high), global.trials.to_string())
            }
            (ScanMethod::Poisson, _) => ("poisson", scan_cdf_poisson(&a.model, q)?, String::new(), String::new(), String::new()),
            _ => ("naus", scan_cdf_naus(&a.model, q, global.trials, global.seed)?, String::new(), String::new(), global.trials.to_string()),
        };
        w.write_record([
            label.to_string(),
            a.n.to_string(),
            a.s.to_string(),
            num(x),
            a.circular.to_string(),
            a.model.family().to_string(),
            a.model.param_string(),
            num(p),
            lo,
            hi,
            trials,
            global.seed.to_string(),
        ])?;
    }
    Ok(EXIT_OK)
}
