//! Command-line front end for `divdpsk-core`: threaded Monte Carlo, CSV/JSON
//! result rows, flat TOML configuration and covariance-table files.

pub mod cli;
pub mod config;
mod error;
pub mod parallel;
pub mod row;
pub mod sweep;
pub mod table;

pub use error::CliError;
