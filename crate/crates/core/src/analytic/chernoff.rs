//! Chernoff bounds on the bit error probability.

use super::partial_fraction::branch_means;
use crate::channel::{validate_branches, BranchParams, Detector, DiversityConfig};
use crate::optimize::{golden_section, newton_bracketed};
use crate::{Error, Result};

/// Relative margin kept from both ends of the admissible parameter interval.
const EDGE_MARGIN: f64 = 1e-12;
const S_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernoffResult {
    pub bound: f64,
    /// Optimized bound parameter, in units where N0 = 1.
    pub s_opt: f64,
    /// Whether the factor-of-two tightening was applied.
    pub improved: bool,
}

/// Bound matching the configuration's detector.
pub fn chernoff_bound(cfg: &DiversityConfig, improved: bool) -> Result<ChernoffResult> {
    match cfg.detector {
        Detector::Optimum => chernoff_optimum(cfg, improved),
        Detector::Suboptimum => chernoff_suboptimum(cfg, improved),
    }
}

/// Optimum-combining bound ∏ᵢ [1 − (ρᵢγᵢ/(1+γᵢ))²], halved when `improved`.
///
/// The optimizing parameter is s = 1/(4N0) for every branch, which always
/// lies inside each branch's admissible interval (0, 1/(4βᵢN0)).
pub fn chernoff_optimum(cfg: &DiversityConfig, improved: bool) -> Result<ChernoffResult> {
    expect_detector(cfg, Detector::Optimum)?;
    let s_opt = 0.25;
    debug_assert!(cfg.branches.iter().all(|b| {
        let (_, beta) = branch_means(b, Detector::Optimum);
        4.0 * s_opt * beta < 1.0
    }));
    let product: f64 = cfg
        .branches
        .iter()
        .map(|b| {
            let r = b.rho * b.gamma / (1.0 + b.gamma);
            1.0 - r * r
        })
        .product();
    Ok(ChernoffResult { bound: scale(product, improved), s_opt, improved })
}

/// Equal-gain combining bound, minimized numerically over s′.
///
/// The bound is `exp(−D(s′))` with
/// `D(s′) = Σᵢ ln(1 + 4s′αᵢ) + ln(1 − 4s′βᵢ)`, αᵢ = 1+γᵢ+ρᵢγᵢ and
/// βᵢ = 1+γᵢ−ρᵢγᵢ. `−D` is convex on (0, 1/(4 max βᵢ)), so golden-section
/// search finds the unique minimizer; a safeguarded Newton step on D′ then
/// pins it to full precision.
pub fn chernoff_suboptimum(cfg: &DiversityConfig, improved: bool) -> Result<ChernoffResult> {
    expect_detector(cfg, Detector::Suboptimum)?;
    let branches = &cfg.branches;
    let beta_max = branches.iter().map(|b| branch_means(b, Detector::Suboptimum).1).fold(0.0, f64::max);
    let s_max = 0.25 / beta_max;
    let lo = EDGE_MARGIN * s_max;
    let hi = (1.0 - EDGE_MARGIN) * s_max;
    let objective = |s: f64| -suboptimum_log_denominator(branches, s);
    let coarse = golden_section(lo, hi, S_REL_TOL, objective);

    let slope = |s: f64| {
        branches.iter().fold((0.0, 0.0), |(g, dg), b| {
            let (alpha, beta) = branch_means(b, Detector::Suboptimum);
            let p = 4.0 * alpha / (1.0 + 4.0 * s * alpha);
            let m = 4.0 * beta / (1.0 - 4.0 * s * beta);
            (g - p + m, dg + p * p + m * m)
        })
    };
    let s_opt = if slope(lo).0 >= 0.0 { lo } else { newton_bracketed(lo, hi, coarse, 1e-15, slope) };
    let bound = libm::exp(-suboptimum_log_denominator(branches, s_opt));
    Ok(ChernoffResult { bound: scale(bound.min(1.0), improved), s_opt, improved })
}

/// D(s′) = ln ∏ᵢ [(1 + 4s′αᵢ)(1 − 4s′βᵢ)] for equal-gain combining.
pub fn suboptimum_log_denominator(branches: &[BranchParams], s: f64) -> f64 {
    branches
        .iter()
        .map(|b| {
            let (alpha, beta) = branch_means(b, Detector::Suboptimum);
            libm::log1p(4.0 * s * alpha) + libm::log1p(-4.0 * s * beta)
        })
        .sum()
}

fn scale(bound: f64, improved: bool) -> f64 {
    if improved {
        0.5 * bound
    } else {
        bound
    }
}

fn expect_detector(cfg: &DiversityConfig, want: Detector) -> Result<()> {
    validate_branches(&cfg.branches)?;
    if cfg.detector != want {
        return Err(Error::InvalidArgument(alloc::format!(
            "{want} Chernoff bound requested for a {} configuration",
            cfg.detector
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn optimum_single_branch_by_hand() {
        let cfg = DiversityConfig::new(vec![BranchParams::new(0.975, 10.0)], Detector::Optimum);
        let r = chernoff_optimum(&cfg, true).unwrap();
        let want = 0.5 * (1.0 - (9.75_f64 / 11.0).powi(2));
        assert!((r.bound - want).abs() < 1e-15);
        assert!((r.bound - 0.107_179_752_066_115_7).abs() < 1e-12);
        assert_eq!(r.s_opt, 0.25);
        assert!(r.improved);
    }

    #[test]
    fn uncorrelated_branches_give_half() {
        let cfg =
            DiversityConfig::new(vec![BranchParams::new(0.0, 3.0), BranchParams::new(0.0, 30.0)], Detector::Optimum);
        assert_eq!(chernoff_optimum(&cfg, true).unwrap().bound, 0.5);
        assert_eq!(chernoff_optimum(&cfg, false).unwrap().bound, 1.0);
    }

    #[test]
    fn identical_branches_reduce_to_power() {
        let b = BranchParams::new(0.9, 12.0);
        let cfg = DiversityConfig::iid(4, b, Detector::Optimum);
        let want = 0.5 * (1.0 - (0.9 * 12.0 / 13.0_f64).powi(2)).powi(4);
        assert!((chernoff_optimum(&cfg, true).unwrap().bound - want).abs() < 1e-15);
    }

    #[test]
    fn suboptimum_single_branch_matches_stationary_point() {
        for (rho, gamma) in [(0.975, 10.0), (0.5, 2.0), (0.99, 1000.0)] {
            let cfg = DiversityConfig::new(vec![BranchParams::new(rho, gamma)], Detector::Suboptimum);
            let r = chernoff_suboptimum(&cfg, true).unwrap();
            let rg = rho * gamma;
            let want = rg / (4.0 * ((1.0 + gamma) * (1.0 + gamma) - rg * rg));
            assert!(((r.s_opt - want) / want).abs() < 1e-8, "{} vs {want}", r.s_opt);
        }
    }

    #[test]
    fn detector_mismatch_rejected() {
        let cfg = DiversityConfig::new(vec![BranchParams::new(0.9, 1.0)], Detector::Suboptimum);
        assert!(chernoff_optimum(&cfg, true).is_err());
        assert!(chernoff_suboptimum(&cfg.with_detector(Detector::Optimum), true).is_err());
    }

    #[test]
    fn suboptimum_uncorrelated_bound_is_trivial() {
        let cfg = DiversityConfig::new(vec![BranchParams::new(0.0, 5.0); 2], Detector::Suboptimum);
        let r = chernoff_suboptimum(&cfg, true).unwrap();
        assert!((r.bound - 0.5).abs() < 1e-9);
    }
}
