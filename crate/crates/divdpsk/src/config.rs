//! Flat TOML configuration files.
//!
//! Keys mirror the long command-line flags with `-` written as `_`, e.g.
//!
//! ```toml
//! L = 2
//! rho = 0.975            # or one value per branch: [0.9, 0.99]
//! gamma_b_db = 15
//! eta = 0.1
//! detector = "both"
//! ```
//!
//! Values given on the command line take precedence.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::CliError;

/// A scalar or a list in the file; always a list after loading.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "L")]
    pub order: Option<usize>,
    pub rho: Option<OneOrMany>,
    pub gamma_db: Option<OneOrMany>,
    pub gamma_b_db: Option<f64>,
    pub gamma_b_start: Option<f64>,
    pub gamma_b_stop: Option<f64>,
    pub gamma_b_step: Option<f64>,
    pub eta: Option<OneOrMany>,
    pub detector: Option<String>,
    pub outputs: Option<Vec<String>>,
    pub raw_bound: Option<bool>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub early_stop: Option<f64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))
    }

    pub fn load_optional(path: Option<&Path>) -> Result<Self, CliError> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars_and_lists() {
        let c = ConfigFile::parse("L = 3\nrho = 0.9\ngamma_db = [0, 10, 20.5]\ndetector = \"suboptimum\"\n").unwrap();
        assert_eq!(c.order, Some(3));
        assert_eq!(c.rho.unwrap().into_vec(), vec![0.9]);
        assert_eq!(c.gamma_db.unwrap().into_vec(), vec![0.0, 10.0, 20.5]);
    }

    #[test]
    fn unknown_keys_are_errors() {
        assert!(ConfigFile::parse("gamma = 3\n").is_err());
        assert!(ConfigFile::parse("[section]\nL = 2\n").is_err());
    }
}
