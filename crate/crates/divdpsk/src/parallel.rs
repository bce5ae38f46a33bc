//! Thread-per-partition execution of Monte Carlo trial ranges.

use std::env;
use std::num::NonZeroUsize;
use std::ops::Range;
use std::thread;

use divdpsk_core::sim::{PartitionRunner, PreparedSim, Tally};

use crate::CliError;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "DIVDPSK_WORKERS";

/// Runs every range on its own scoped thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Threads;

impl PartitionRunner for Threads {
    fn run(&self, sim: &PreparedSim, seed: u64, ranges: &[Range<u64>]) -> Vec<Tally> {
        if ranges.len() <= 1 {
            return ranges.iter().map(|r| sim.simulate_range(seed, r.clone())).collect();
        }
        thread::scope(|s| {
            let handles: Vec<_> = ranges.iter().map(|r| s.spawn(move || sim.simulate_range(seed, r.clone()))).collect();
            handles.into_iter().map(|h| h.join().expect("simulation worker panicked")).collect()
        })
    }
}

/// Worker count from [`WORKERS_ENV`], else the available parallelism.
pub fn default_workers() -> Result<usize, CliError> {
    match env::var(WORKERS_ENV) {
        Ok(v) => parse_workers(&v),
        Err(_) => Ok(thread::available_parallelism().map_or(1, NonZeroUsize::get)),
    }
}

fn parse_workers(v: &str) -> Result<usize, CliError> {
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(CliError::Config(format!("{WORKERS_ENV}={v:?} is not a positive integer"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use divdpsk_core::sim::{estimate_bep, estimate_bep_with, SimRequest};
    use divdpsk_core::{BranchParams, Detector, DiversityConfig};

    #[test]
    fn threads_match_sequential() {
        let cfg = DiversityConfig::new(
            vec![BranchParams::new(0.95, 4.0), BranchParams::new(0.9, 20.0)],
            Detector::Suboptimum,
        );
        let seq = estimate_bep(&cfg, 50_001, 4, 3).unwrap();
        let par = estimate_bep_with(&cfg, &SimRequest::new(50_001, 4, 3), &Threads).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn worker_env_parsing() {
        assert_eq!(parse_workers(" 8 ").unwrap(), 8);
        assert!(parse_workers("0").is_err());
        assert!(parse_workers("many").is_err());
    }
}
