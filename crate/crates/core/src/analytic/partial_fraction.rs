//! Partial-fraction parameters of the decision-statistic densities.
//!
//! With the statistics scaled so that `x_i` and `y_i` are exponential with
//! means `α_i` and `β_i`, the densities of `X = Σ x_i` and `Y = Σ y_i` are
//! the mixtures
//!
//! ```text
//! p_X(x) = Σ_i A_i / α_i · exp(−x / α_i),   A_i = ∏_{m≠i} α_i / (α_i − α_m)
//! p_Y(y) = Σ_j B_j / β_j · exp(−y / β_j),   B_j = ∏_{n≠j} β_j / (β_j − β_n)
//! ```
//!
//! The coefficients only exist for distinct means. Coinciding (or nearly
//! coinciding) means are spread apart symmetrically about their average
//! before the products are formed, and all products are carried in
//! double-double precision so that the large, alternating coefficients of a
//! spread cluster still cancel correctly.
//!
//! P(X < Y) = ΣᵢΣⱼ AᵢBⱼ βⱼ/(αᵢ+βⱼ) is evaluated with the inner sum over i
//! collapsed by the mixture identity Σᵢ Aᵢ/(1 + αᵢu) = ∏ᵢ 1/(1 + αᵢu) at
//! u = 1/βⱼ. Each term then has the size of the result, and cancellation is
//! confined to the Bⱼ of clustered βs.

use crate::channel::{validate_branches, BranchParams, Detector};
use crate::dd::Dd;
use crate::{Error, Result};
use alloc::vec::Vec;

/// Relative gap below which two means are treated as one repeated pole.
pub const PAIR_THRESHOLD: f64 = 1e-9;
/// Relative spacing given to a repeated pair.
pub const PAIR_SPACING: f64 = 1e-6;

/// Relative spacing used when `size` means form a cluster.
///
/// The coefficients of a cluster grow like `spacing^-(size-1)` while the
/// error from spreading (symmetric about the cluster mean) grows like
/// `spacing²`; the two balance at `2^(-104/(size+1))` in double-double.
pub fn cluster_spacing(size: usize) -> f64 {
    match size {
        0..=2 => PAIR_SPACING,
        n => libm::exp2(-104.0 / (n as f64 + 1.0)).max(PAIR_SPACING),
    }
}

/// Which mean sets were spread apart, and by how much (largest relative spacing).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Perturbation {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

impl Perturbation {
    pub fn applied(&self) -> bool {
        self.alpha.is_some() || self.beta.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialFractionSet {
    alphas: Vec<f64>,
    betas: Vec<f64>,
    a: Vec<Dd>,
    b: Vec<Dd>,
    perturbation: Perturbation,
}

impl PartialFractionSet {
    /// Builds the set from mean values, spreading repeated poles if needed.
    pub fn from_means(mut alphas: Vec<f64>, mut betas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() || alphas.len() != betas.len() {
            return Err(Error::InvalidArgument("alpha and beta lists must be non-empty and equal length".into()));
        }
        if alphas.iter().chain(&betas).any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument("partial-fraction means must be positive and finite".into()));
        }
        let perturbation = Perturbation { alpha: separate(&mut alphas), beta: separate(&mut betas) };
        let a = coefficients(&alphas);
        let b = coefficients(&betas);
        Ok(Self { alphas, betas, a, b, perturbation })
    }

    pub fn order(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// `A_i`, rounded to `f64`.
    pub fn a_coeffs(&self) -> Vec<f64> {
        self.a.iter().map(|v| v.to_f64()).collect()
    }

    /// `B_j`, rounded to `f64`.
    pub fn b_coeffs(&self) -> Vec<f64> {
        self.b.iter().map(|v| v.to_f64()).collect()
    }

    pub fn perturbation(&self) -> Perturbation {
        self.perturbation
    }

    /// Σ A_i and Σ B_j, accumulated in extended precision.
    pub fn coefficient_sums(&self) -> (f64, f64) {
        let sum = |v: &[Dd]| v.iter().fold(Dd::ZERO, |acc, &x| acc + x).to_f64();
        (sum(&self.a), sum(&self.b))
    }

    pub(crate) fn a_dd(&self) -> &[Dd] {
        &self.a
    }

    pub(crate) fn b_dd(&self) -> &[Dd] {
        &self.b
    }

    /// P(X < Y) = Σⱼ Bⱼ ∏ᵢ βⱼ/(αᵢ+βⱼ).
    pub fn prob_x_below_y(&self) -> f64 {
        self.b
            .iter()
            .zip(&self.betas)
            .fold(Dd::ZERO, |acc, (&bj, &beta)| {
                let beta_dd = Dd::from(beta);
                let survival = self.alphas.iter().fold(Dd::ONE, |p, &alpha| p * beta_dd / (Dd::from(alpha) + beta_dd));
                acc + bj * survival
            })
            .to_f64()
    }

    /// The literal double sum ΣᵢΣⱼ AᵢBⱼ βⱼ/(αᵢ+βⱼ), in double-double.
    ///
    /// Equal to [`Self::prob_x_below_y`] in exact arithmetic, but it loses
    /// digits when poles cluster or when βⱼ ≪ αᵢ.
    pub fn double_sum(&self) -> f64 {
        let mut total = Dd::ZERO;
        for (&ai, &alpha) in self.a.iter().zip(&self.alphas) {
            let mut inner = Dd::ZERO;
            for (&bj, &beta) in self.b.iter().zip(&self.betas) {
                inner = inner + bj * Dd::from(beta) / (Dd::from(alpha) + Dd::from(beta));
            }
            total = total + ai * inner;
        }
        total.to_f64()
    }
}

/// Exponential means of the (scaled) per-branch statistics.
pub fn branch_means(branch: &BranchParams, detector: Detector) -> (f64, f64) {
    let rg = branch.rho * branch.gamma;
    let g1 = 1.0 + branch.gamma;
    match detector {
        Detector::Optimum => (rg / (g1 - rg), rg / (g1 + rg)),
        Detector::Suboptimum => (g1 + rg, g1 - rg),
    }
}

/// αᵢ, βᵢ, Aᵢ, Bᵢ for the given branches and detector.
///
/// Under the optimum detector a branch with ρᵢγᵢ = 0 has αᵢ = βᵢ = 0 and the
/// coefficients do not exist; that is reported as [`Error::DegenerateBranch`].
pub fn pf_params(branches: &[BranchParams], detector: Detector) -> Result<PartialFractionSet> {
    validate_branches(branches)?;
    if detector == Detector::Optimum {
        if let Some(i) = branches.iter().position(|b| b.rho * b.gamma == 0.0) {
            return Err(Error::DegenerateBranch { branch: i });
        }
    }
    let (alphas, betas) = branches.iter().map(|b| branch_means(b, detector)).unzip();
    PartialFractionSet::from_means(alphas, betas)
}

fn coefficients(means: &[f64]) -> Vec<Dd> {
    means
        .iter()
        .enumerate()
        .map(|(i, &mi)| {
            means
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != i)
                .fold(Dd::ONE, |acc, (_, &mm)| acc * Dd::from(mi) / (Dd::from(mi) - Dd::from(mm)))
        })
        .collect()
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

/// Spreads clusters of near-equal values. Returns the widest spacing used.
fn separate(values: &mut [f64]) -> Option<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    let mut clusters = Vec::new();
    find_clusters(values, &order, values.len(), &mut clusters);
    let mut widest: Option<f64> = None;
    for cluster in clusters {
        let spacing = cluster_spacing(cluster.len());
        let centre = cluster.iter().map(|&i| values[i]).sum::<f64>() / cluster.len() as f64;
        let mid = (cluster.len() as f64 - 1.0) / 2.0;
        for (pos, &i) in cluster.iter().enumerate() {
            values[i] = centre * (1.0 + (pos as f64 - mid) * spacing);
        }
        widest = Some(widest.map_or(spacing, |w: f64| w.max(spacing)));
    }
    widest
}

fn link_threshold(size: usize) -> f64 {
    if size <= 2 {
        PAIR_THRESHOLD
    } else {
        cluster_spacing(size)
    }
}

/// Single-linkage grouping of sorted indices. A group is accepted as a
/// cluster of size `m` only if it stays linked at the threshold for `m`;
/// otherwise it is re-split at its own, tighter threshold.
fn find_clusters(values: &[f64], sorted: &[usize], size_hint: usize, out: &mut Vec<Vec<usize>>) {
    let threshold = link_threshold(size_hint);
    let mut start = 0;
    for end in 1..=sorted.len() {
        let linked = end < sorted.len() && relative_gap(values[sorted[end - 1]], values[sorted[end]]) < threshold;
        if linked {
            continue;
        }
        let group = &sorted[start..end];
        match group.len() {
            1 => {}
            m if m >= size_hint => out.push(group.to_vec()),
            m => find_clusters(values, group, m, out),
        }
        start = end;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn single_branch_has_unit_coefficients() {
        let pf = pf_params(&[BranchParams::new(0.7, 4.0)], Detector::Optimum).unwrap();
        assert_eq!(pf.a_coeffs(), vec![1.0]);
        assert_eq!(pf.b_coeffs(), vec![1.0]);
        assert!(!pf.perturbation().applied());
    }

    #[test]
    fn optimum_means_by_hand() {
        let pf = pf_params(&[BranchParams::new(1.0, 3.0)], Detector::Optimum).unwrap();
        assert!((pf.alphas()[0] - 3.0).abs() < 1e-15);
        assert!((pf.betas()[0] - 3.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn suboptimum_means_by_hand() {
        let pf = pf_params(&[BranchParams::new(0.5, 2.0)], Detector::Suboptimum).unwrap();
        assert_eq!(pf.alphas(), &[4.0]);
        assert_eq!(pf.betas(), &[2.0]);
    }

    #[test]
    fn degenerate_optimum_branch_is_an_error() {
        let branches = [BranchParams::new(0.9, 5.0), BranchParams::new(0.0, 5.0)];
        assert_eq!(pf_params(&branches, Detector::Optimum).unwrap_err(), Error::DegenerateBranch { branch: 1 });
        assert!(pf_params(&branches, Detector::Suboptimum).is_ok());
    }

    #[test]
    fn identical_branches_are_spread_and_flagged() {
        let branches = [BranchParams::new(0.975, 10.0); 2];
        let pf = pf_params(&branches, Detector::Optimum).unwrap();
        let p = pf.perturbation();
        assert_eq!(p.alpha, Some(PAIR_SPACING));
        assert_eq!(p.beta, Some(PAIR_SPACING));
        assert!(relative_gap(pf.alphas()[0], pf.alphas()[1]) > 0.5 * PAIR_SPACING);
        let (sa, sb) = pf.coefficient_sums();
        assert!((sa - 1.0).abs() < 1e-10 && (sb - 1.0).abs() < 1e-10);
    }

    #[test]
    fn spreading_preserves_cluster_mean() {
        let mut v = vec![2.0, 5.0, 2.0, 2.0, 9.0];
        let used = separate(&mut v);
        assert_eq!(used, Some(cluster_spacing(3)));
        assert_eq!(v[1], 5.0);
        assert_eq!(v[4], 9.0);
        let mean = (v[0] + v[2] + v[3]) / 3.0;
        assert!((mean - 2.0).abs() < 1e-15);
        assert!(relative_gap(v[0], v[2]) > 1e-7 && relative_gap(v[2], v[3]) > 1e-7);
    }

    #[test]
    fn well_separated_values_untouched() {
        let mut v = vec![1.0, 1.0 + 1e-8, 3.0];
        assert_eq!(separate(&mut v), None);
        assert_eq!(v, vec![1.0, 1.0 + 1e-8, 3.0]);
    }

    #[test]
    fn collapsed_sum_equals_double_sum_for_distinct_poles() {
        let branches = [BranchParams::new(0.9, 2.0), BranchParams::new(0.975, 30.0), BranchParams::new(0.5, 7.0)];
        for det in [Detector::Optimum, Detector::Suboptimum] {
            let pf = pf_params(&branches, det).unwrap();
            let (a, b) = (pf.prob_x_below_y(), pf.double_sum());
            assert!(((a - b) / a).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn spacing_grows_with_cluster_size() {
        assert_eq!(cluster_spacing(2), PAIR_SPACING);
        assert!((2..8).all(|k| cluster_spacing(k) <= cluster_spacing(k + 1)));
    }
}
