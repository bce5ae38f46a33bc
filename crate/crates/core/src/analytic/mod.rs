//! Closed-form error probability, Chernoff bounds and an integration oracle.
//!
//! Everything here is in units with `N0 = 1`; a branch is fully described
//! by its `(ρ, γ)` pair.

mod chernoff;
mod oracle;
mod partial_fraction;

pub use chernoff::{chernoff_bound, chernoff_optimum, chernoff_suboptimum, suboptimum_log_denominator, ChernoffResult};
pub use oracle::{semi_analytic_bep, DEFAULT_ORACLE_TOLERANCE};
pub use partial_fraction::{
    branch_means, cluster_spacing, pf_params, PartialFractionSet, Perturbation, PAIR_SPACING, PAIR_THRESHOLD,
};

use crate::channel::{validate_branches, BranchParams, Detector, DiversityConfig};
use crate::sim::Observation;
use crate::{db_to_linear, Error, Result};
use alloc::vec::Vec;

/// Maximum-likelihood combining weights, wᵢ = ρᵢγᵢ / ((1+γᵢ)² − (ρᵢγᵢ)²).
pub fn optimum_weights(branches: &[BranchParams]) -> Vec<f64> {
    branches
        .iter()
        .map(|b| {
            let rg = b.rho * b.gamma;
            let g1 = 1.0 + b.gamma;
            rg / ((g1 - rg) * (g1 + rg))
        })
        .collect()
}

/// Combining weights for the given detector.
pub fn detector_weights(branches: &[BranchParams], detector: Detector) -> Vec<f64> {
    match detector {
        Detector::Optimum => optimum_weights(branches),
        Detector::Suboptimum => alloc::vec![1.0; branches.len()],
    }
}

/// Exact bit error probability, P = ΣᵢΣⱼ AᵢBⱼ βⱼ/(αᵢ+βⱼ).
///
/// Under the optimum detector, branches with ρᵢγᵢ = 0 carry zero weight and
/// are left out; if every branch is like that the decision is a coin flip
/// and 0.5 is returned.
pub fn exact_bep(cfg: &DiversityConfig) -> Result<f64> {
    Ok(exact_bep_detailed(cfg)?.0)
}

/// [`exact_bep`] together with the perturbation applied to repeated poles.
pub fn exact_bep_detailed(cfg: &DiversityConfig) -> Result<(f64, Perturbation)> {
    let Some(pf) = effective_pf(cfg)? else {
        return Ok((0.5, Perturbation::default()));
    };
    Ok((pf.prob_x_below_y().clamp(0.0, 1.0), pf.perturbation()))
}

/// Partial fractions of the branches that actually enter the decision.
pub(crate) fn effective_pf(cfg: &DiversityConfig) -> Result<Option<PartialFractionSet>> {
    validate_branches(&cfg.branches)?;
    let active: Vec<BranchParams> = match cfg.detector {
        Detector::Optimum => cfg.branches.iter().copied().filter(|b| b.rho * b.gamma > 0.0).collect(),
        Detector::Suboptimum => cfg.branches.clone(),
    };
    if active.is_empty() {
        return Ok(None);
    }
    pf_params(&active, cfg.detector).map(Some)
}

/// Splits a total SNR per bit (dB) between two branches: branch 1 receives
/// the fraction `eta`. Returns linear (γ₁, γ₂).
pub fn power_split(gamma_b_db: f64, eta: f64) -> Result<(f64, f64)> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::EtaOutOfRange(eta));
    }
    if !gamma_b_db.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!("gamma_b = {gamma_b_db} dB is not finite")));
    }
    let total = db_to_linear(gamma_b_db);
    Ok((eta * total, (1.0 - eta) * total))
}

/// Combiner decision statistics `X = Σ wᵢ|z̃ᵢ(k) + z̃ᵢ(k−1)|²` and
/// `Y = Σ wᵢ|z̃ᵢ(k) − z̃ᵢ(k−1)|²`; a 0-bit is in error when X < Y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionStatistics {
    pub x: f64,
    pub y: f64,
}

impl DecisionStatistics {
    pub fn from_observations(obs: &[Observation], weights: &[f64]) -> Self {
        assert_eq!(obs.len(), weights.len(), "one weight per branch");
        obs.iter().zip(weights).fold(Self { x: 0.0, y: 0.0 }, |acc, (o, &w)| Self {
            x: acc.x + w * (o.z_curr + o.z_prev).norm_sqr(),
            y: acc.y + w * (o.z_curr - o.z_prev).norm_sqr(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn l1_closed_form(rho: f64, gamma: f64) -> f64 {
        (1.0 + gamma * (1.0 - rho)) / (2.0 * (1.0 + gamma))
    }

    #[test]
    fn weights_by_hand() {
        let w =
            optimum_weights(&[BranchParams::new(0.0, 10.0), BranchParams::new(1.0, 0.0), BranchParams::new(1.0, 1.0)]);
        assert_eq!(w[0], 0.0);
        assert_eq!(w[1], 0.0);
        assert!((w[2] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn single_branch_fully_correlated() {
        for det in Detector::ALL {
            let cfg = DiversityConfig::new(vec![BranchParams::new(1.0, 10.0)], det);
            let p = exact_bep(&cfg).unwrap();
            assert!((p - 1.0 / 22.0).abs() < 1e-15, "{det}: {p}");
        }
    }

    #[test]
    fn single_branch_matches_reduction() {
        for (rho, gamma) in [(0.3, 0.5), (0.975, 31.6), (0.999, 1000.0)] {
            let want = l1_closed_form(rho, gamma);
            for det in Detector::ALL {
                let cfg = DiversityConfig::new(vec![BranchParams::new(rho, gamma)], det);
                assert!((exact_bep(&cfg).unwrap() - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn uncorrelated_suboptimum_is_coin_flip() {
        let cfg =
            DiversityConfig::new(vec![BranchParams::new(0.0, 3.0), BranchParams::new(0.0, 8.0)], Detector::Suboptimum);
        assert!((exact_bep(&cfg).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn zero_weight_branches_dropped_under_optimum() {
        let with =
            DiversityConfig::new(vec![BranchParams::new(0.9, 10.0), BranchParams::new(0.0, 50.0)], Detector::Optimum);
        let without = DiversityConfig::new(vec![BranchParams::new(0.9, 10.0)], Detector::Optimum);
        assert_eq!(exact_bep(&with).unwrap(), exact_bep(&without).unwrap());

        let none = DiversityConfig::new(vec![BranchParams::new(0.0, 10.0); 3], Detector::Optimum);
        assert_eq!(exact_bep(&none).unwrap(), 0.5);
    }

    #[test]
    fn power_split_values() {
        let (g1, g2) = power_split(15.0, 0.1).unwrap();
        assert!((crate::linear_to_db(g1) - 5.0).abs() < 0.01);
        assert!((crate::linear_to_db(g2) - 14.54).abs() < 0.01);
        let (g1, g2) = power_split(30.0, 0.1).unwrap();
        assert!((g1 - 100.0).abs() < 1e-9 && (g2 - 900.0).abs() < 1e-9);
        let (g1, g2) = power_split(7.3, 0.5).unwrap();
        assert_eq!(g1, g2);
        assert_eq!(power_split(10.0, 1.0), Err(Error::EtaOutOfRange(1.0)));
        assert!(power_split(10.0, 0.0).is_err());
    }
}
