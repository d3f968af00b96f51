//! Sequence files: one decimal per line, `#` starts a comment.

use std::io::Read;
use std::path::Path;

use crate::error::CliError;

pub fn parse_sequence(text: &str) -> Result<Vec<f64>, CliError> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| CliError::Invalid(format!("line {}: cannot parse {line:?} as a number", i + 1)))?;
        if !v.is_finite() {
            return Err(CliError::Invalid(format!("line {}: value must be finite, got {line}", i + 1)));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(CliError::Invalid("the sequence is empty".into()));
    }
    Ok(values)
}

/// Reads from `path`, or from stdin when the path is absent or `-`.
pub fn read_sequence(path: Option<&Path>) -> Result<Vec<f64>, CliError> {
    let text = match path {
        Some(p) if p != Path::new("-") => std::fs::read_to_string(p)
            .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", p.display())))?,
        _ => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Invalid(format!("cannot read stdin: {e}")))?;
            s
        }
    };
    parse_sequence(&text)
}
