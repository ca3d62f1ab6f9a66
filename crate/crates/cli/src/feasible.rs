use std::io::Write;

use storage_robustness::{check_flow, check_subsets, DemandVector, StorageAllocation};

use crate::args::{FeasibilityMethod, FeasibleArgs};
use crate::{CliError, EXIT_INFEASIBLE, EXIT_OK};

fn read(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

pub fn run(a: &FeasibleArgs, out: &mut Vec<u8>) -> Result<u8, CliError> {
    let alloc: StorageAllocation = read(&a.alloc)?.parse()?;
    let rho = DemandVector::parse_lines(&read(&a.rho)?)?;
    let verdict = match a.method {
        FeasibilityMethod::Flow => check_flow(&alloc, &rho, a.m)?,
        FeasibilityMethod::Subsets => check_subsets(&alloc, &rho, a.m)?,
    };
    if verdict.feasible {
        writeln!(out, "feasible")?;
        return Ok(EXIT_OK);
    }
    let subset = verdict.violating_subset().unwrap_or_default();
    let listed: Vec<String> = subset.iter().map(ToString::to_string).collect();
    writeln!(out, "infeasible I={{{}}}", listed.join(","))?;
    Ok(EXIT_INFEASIBLE)
}
