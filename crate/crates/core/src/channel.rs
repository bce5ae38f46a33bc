//! Branch parameters and diversity configurations.

use crate::{Error, Result};
use alloc::vec::Vec;

/// One diversity branch.
///
/// `rho` is the correlation of the matched-filter fading gain across one
/// bit interval, `gamma` the mean received SNR per bit in linear units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchParams {
    pub rho: f64,
    pub gamma: f64,
}

impl BranchParams {
    pub const fn new(rho: f64, gamma: f64) -> Self {
        Self { rho, gamma }
    }

    pub(crate) fn check(&self, branch: usize) -> Result<()> {
        if !self.rho.is_finite() {
            return Err(Error::NonFinite { branch, field: "rho" });
        }
        if !self.gamma.is_finite() {
            return Err(Error::NonFinite { branch, field: "gamma" });
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::RhoOutOfRange { branch, value: self.rho });
        }
        if self.gamma < 0.0 {
            return Err(Error::NegativeGamma { branch, value: self.gamma });
        }
        Ok(())
    }
}

/// Combining rule applied to the per-branch differential detector outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Detector {
    /// Branch outputs weighted by the maximum-likelihood weights.
    Optimum,
    /// Unit-weight (equal gain) combining.
    Suboptimum,
}

impl Detector {
    pub const ALL: [Detector; 2] = [Detector::Optimum, Detector::Suboptimum];

    pub fn name(self) -> &'static str {
        match self {
            Detector::Optimum => "optimum",
            Detector::Suboptimum => "suboptimum",
        }
    }
}

impl core::str::FromStr for Detector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "optimum" | "opt" => Ok(Detector::Optimum),
            "suboptimum" | "subopt" => Ok(Detector::Suboptimum),
            other => Err(Error::InvalidArgument(alloc::format!(
                "unknown detector '{other}' (expected optimum or suboptimum)"
            ))),
        }
    }
}

impl core::fmt::Display for Detector {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiversityConfig {
    pub branches: Vec<BranchParams>,
    pub detector: Detector,
}

impl DiversityConfig {
    pub fn new(branches: Vec<BranchParams>, detector: Detector) -> Self {
        Self { branches, detector }
    }

    /// `L` identical branches.
    pub fn iid(order: usize, branch: BranchParams, detector: Detector) -> Self {
        Self::new(alloc::vec![branch; order], detector)
    }

    pub fn order(&self) -> usize {
        self.branches.len()
    }

    pub fn with_detector(&self, detector: Detector) -> Self {
        Self { branches: self.branches.clone(), detector }
    }
}

/// Checks every invariant and hands the configuration back unchanged.
pub fn validate_config(cfg: DiversityConfig) -> Result<DiversityConfig> {
    validate_branches(&cfg.branches)?;
    Ok(cfg)
}

pub(crate) fn validate_branches(branches: &[BranchParams]) -> Result<()> {
    if branches.is_empty() {
        return Err(Error::NoBranches);
    }
    branches.iter().enumerate().try_for_each(|(i, b)| b.check(i))
}
