//! Tabulated fading covariance files.
//!
//! Two comma- or whitespace-separated columns, `lag r(lag)`, with the lag in
//! bit intervals. Blank lines, `#` comments and a non-numeric header line are
//! skipped.

use std::fs;
use std::path::Path;

use divdpsk_core::doppler::CovarianceTable;

use crate::CliError;

pub fn load_covariance_table(path: &Path) -> Result<CovarianceTable, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    parse_covariance_table(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn parse_covariance_table(text: &str) -> Result<CovarianceTable, CliError> {
    let mut points = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty()).collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
        match parsed.as_deref() {
            Some(&[lag, r]) => points.push((lag, r)),
            None if points.is_empty() => continue,
            _ => return Err(CliError::Config(format!("line {}: expected two numbers, found {line:?}", n + 1))),
        }
    }
    Ok(CovarianceTable::new(&points)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_header_and_comments() {
        let t = parse_covariance_table("lag,r\n# flat\n0, 1\n1 1.0\n\n2,1 # end\n").unwrap();
        assert_eq!(t.eval(1.5), 1.0);
    }

    #[test]
    fn rejects_ragged_lines() {
        assert!(parse_covariance_table("0 1\n1 0.9 7\n2 0.8\n").is_err());
        assert!(parse_covariance_table("0 1\n1 x\n").is_err());
    }

    #[test]
    fn table_constraints_come_from_the_model() {
        assert!(matches!(parse_covariance_table("0 0.5\n2 0.5\n"), Err(CliError::Model(_))));
    }
}
