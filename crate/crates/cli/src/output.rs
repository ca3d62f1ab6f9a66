use std::io::Write;

use crate::args::Global;
use crate::CliError;

pub type Csv = csv::Writer<Vec<u8>>;

/// Shortest decimal that parses back to the same value.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}


/// Runs `body` against an in-memory CSV writer and sends the bytes to `--out` or `out`.
pub fn emit(global: &Global, out: &mut Vec<u8>, body: impl FnOnce(&mut Csv) -> Result<u8, CliError>) -> Result<u8, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let code = body(&mut w)?;
    let bytes = w.into_inner().map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
    match &global.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => out.write_all(&bytes)?,
    }
    Ok(code)
}
