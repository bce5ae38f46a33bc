//! Grid expansion and per-point evaluation.

use divdpsk_core::analytic::{chernoff_bound, exact_bep, power_split};
use divdpsk_core::sim::{estimate_bep_with, EarlyStop, SimRequest};
use divdpsk_core::{db_to_linear, validate_config, BranchParams, Detector, DiversityConfig};

use crate::parallel::Threads;
use crate::row::ResultRow;
use crate::CliError;

/// Which Chernoff bound fills the `bound` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// Halved bound.
    Improved,
    Raw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSettings {
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub early_stop: Option<EarlyStop>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outputs {
    pub exact: bool,
    pub bound: Option<BoundKind>,
    pub mc: Option<McSettings>,
}

impl Outputs {
    /// Parses names such as `exact`, `chernoff`, `chernoff_improved`, `mc`.
    /// `mc` needs the Monte Carlo settings to be supplied.
    pub fn from_names<S: AsRef<str>>(names: &[S], mc: Option<McSettings>) -> Result<Self, CliError> {
        let mut out = Outputs::default();
        let mut wants_mc = false;
        for name in names {
            let kind = match name.as_ref().trim().to_ascii_lowercase().replace('-', "_").as_str() {
                "exact" => {
                    out.exact = true;
                    None
                }
                "chernoff" => Some(BoundKind::Raw),
                "chernoff_improved" => Some(BoundKind::Improved),
                "mc" => {
                    wants_mc = true;
                    None
                }
                other => return Err(CliError::Config(format!("unknown output '{other}'"))),
            };
            if let Some(kind) = kind {
                if out.bound.is_some_and(|b| b != kind) {
                    return Err(CliError::Config("choose one of chernoff and chernoff_improved".into()));
                }
                out.bound = Some(kind);
            }
        }
        if wants_mc {
            out.mc = Some(mc.ok_or_else(|| CliError::Config("output mc needs --trials".into()))?);
        }
        if !out.exact && out.bound.is_none() && out.mc.is_none() {
            return Err(CliError::Config("no outputs requested".into()));
        }
        Ok(out)
    }
}

/// A grid of (γ_b, η, ρ, detector) points at fixed diversity order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub gamma_b_db: Vec<f64>,
    /// Ignored when `order == 1`.
    pub eta: Vec<f64>,
    pub rho: Vec<f64>,
    pub order: usize,
    pub detectors: Vec<Detector>,
    pub outputs: Outputs,
}

/// `start, start+step, …` up to `stop` inclusive (with a small tolerance).
pub fn db_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(CliError::Config("gamma_b range must be finite".into()));
    }
    if step <= 0.0 {
        return Err(CliError::Config(format!("gamma_b step {step} must be positive")));
    }
    if stop < start {
        return Err(CliError::Config(format!("empty gamma_b range {start}..{stop}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

/// Per-branch SNRs: branch 1 gets `η·γ_b`, the remaining `(1−η)·γ_b` is
/// shared equally by branches 2..L. A single branch takes everything.
pub fn split_energy(gamma_b_db: f64, eta: f64, order: usize) -> Result<Vec<f64>, CliError> {
    match order {
        0 => Err(divdpsk_core::Error::NoBranches.into()),
        1 => Ok(vec![db_to_linear(gamma_b_db)]),
        2 => {
            let (g1, g2) = power_split(gamma_b_db, eta)?;
            Ok(vec![g1, g2])
        }
        _ => {
            let (g1, rest) = power_split(gamma_b_db, eta)?;
            let mut g = vec![rest / (order - 1) as f64; order];
            g[0] = g1;
            Ok(g)
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.gamma_b_db.is_empty() || self.rho.is_empty() || self.detectors.is_empty() {
            return Err(CliError::Config("sweep grid is empty".into()));
        }
        if self.order == 0 {
            return Err(divdpsk_core::Error::NoBranches.into());
        }
        if self.order > 1 && self.eta.is_empty() {
            return Err(CliError::Config("sweep needs at least one eta".into()));
        }
        if let Some(&eta) = self.eta.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(divdpsk_core::Error::EtaOutOfRange(eta).into());
        }
        if let Some(&rho) = self.rho.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(divdpsk_core::Error::RhoOutOfRange { branch: 0, value: rho }.into());
        }
        Ok(())
    }

    /// Grid points in output order: γ_b outermost, then η, ρ, detector.
    pub fn points(&self) -> Vec<GridPoint> {
        let etas: Vec<Option<f64>> =
            if self.order == 1 { vec![None] } else { self.eta.iter().copied().map(Some).collect() };
        let mut out = Vec::new();
        for &gamma_b_db in &self.gamma_b_db {
            for &eta in &etas {
                for &rho in &self.rho {
                    for &detector in &self.detectors {
                        out.push(GridPoint { gamma_b_db, eta, rho, order: self.order, detector });
                    }
                }
            }
        }
        out
    }

    pub fn run(&self) -> Result<Vec<ResultRow>, CliError> {
        self.validate()?;
        self.points()
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let cfg = p.config()?;
                let mut row = evaluate(&cfg, &self.outputs, i as u64)?;
                row.gamma_b_db = Some(p.gamma_b_db);
                row.eta = p.eta;
                Ok(row)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub gamma_b_db: f64,
    pub eta: Option<f64>,
    pub rho: f64,
    pub order: usize,
    pub detector: Detector,
}

impl GridPoint {
    pub fn config(&self) -> Result<DiversityConfig, CliError> {
        let gammas = split_energy(self.gamma_b_db, self.eta.unwrap_or(1.0), self.order)?;
        let branches = gammas.into_iter().map(|g| BranchParams::new(self.rho, g)).collect();
        Ok(validate_config(DiversityConfig::new(branches, self.detector))?)
    }
}

/// Evaluates the requested outputs for one configuration. Monte Carlo uses
/// seed `mc.seed + index` so that every row of a sweep draws its own stream.
pub fn evaluate(cfg: &DiversityConfig, outputs: &Outputs, index: u64) -> Result<ResultRow, CliError> {
    let cfg = validate_config(cfg.clone())?;
    let mut row = ResultRow::new(cfg.order(), cfg.detector);
    let rho = cfg.branches[0].rho;
    row.rho = cfg.branches.iter().all(|b| b.rho == rho).then_some(rho);
    if outputs.exact {
        row.exact_bep = Some(exact_bep(&cfg)?);
    }
    if let Some(kind) = outputs.bound {
        row.bound = Some(chernoff_bound(&cfg, kind == BoundKind::Improved)?.bound);
    }
    if let Some(mc) = &outputs.mc {
        let req = SimRequest {
            early_stop: mc.early_stop,
            ..SimRequest::new(mc.trials, mc.seed.wrapping_add(index), mc.workers)
        };
        let est = estimate_bep_with(&cfg, &req, &Threads)?;
        row.mc_p_hat = Some(est.p_hat);
        row.mc_ci = Some(est.ci95_halfwidth);
        row.trials = Some(est.trials);
        row.seed = Some(est.seed);
    }
    Ok(row)
}

/// Data behind the two published BEP-versus-SNR comparisons: L = 2,
/// ρ = 0.975, γ_b from 0 to 30 dB, both detectors, exact and improved bound.
/// Figure 1 contrasts a strongly unequal split with the near-equal one;
/// figure 2 adds intermediate splits to show the approach to the equal case.
pub fn figure(n: u32) -> Result<SweepSpec, CliError> {
    let eta = match n {
        1 => vec![0.1, 0.5001],
        2 => vec![0.1, 0.3, 0.4, 0.5001],
        _ => return Err(CliError::Config(format!("no figure {n} (expected 1 or 2)"))),
    };
    Ok(SweepSpec {
        gamma_b_db: db_range(0.0, 30.0, 1.0)?,
        eta,
        rho: vec![0.975],
        order: 2,
        detectors: Detector::ALL.to_vec(),
        outputs: Outputs { exact: true, bound: Some(BoundKind::Improved), mc: None },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_ranges() {
        assert_eq!(db_range(0.0, 30.0, 1.0).unwrap().len(), 31);
        assert_eq!(db_range(0.0, 1.0, 0.1).unwrap().len(), 11);
        assert_eq!(db_range(5.0, 5.0, 1.0).unwrap(), vec![5.0]);
        assert!(db_range(10.0, 0.0, 1.0).is_err());
        assert!(db_range(0.0, 10.0, 0.0).is_err());
    }

    #[test]
    fn energy_split_conventions() {
        let g = split_energy(10.0, 0.25, 4).unwrap();
        assert!((g.iter().sum::<f64>() - 10.0).abs() < 1e-12);
        assert!((g[0] - 2.5).abs() < 1e-12 && (g[3] - 2.5).abs() < 1e-12);
        assert_eq!(split_energy(10.0, 0.9, 1).unwrap(), vec![10.0]);
        assert!(split_energy(10.0, 1.0, 2).is_err());
    }

    #[test]
    fn figure_one_grid() {
        let spec = figure(1).unwrap();
        let points = spec.points();
        assert_eq!(points.len(), 124);
        assert_eq!((points[0].gamma_b_db, points[0].eta, points[0].detector), (0.0, Some(0.1), Detector::Optimum));
        assert_eq!(points[1].detector, Detector::Suboptimum);
        assert_eq!(points[2].eta, Some(0.5001));
        assert_eq!(points[4].gamma_b_db, 1.0);
        assert!(figure(3).is_err());
    }

    #[test]
    fn output_names() {
        let o = Outputs::from_names(&["exact", "chernoff-improved"], None).unwrap();
        assert!(o.exact && o.bound == Some(BoundKind::Improved));
        assert!(Outputs::from_names(&["chernoff", "chernoff_improved"], None).is_err());
        assert!(Outputs::from_names(&["mc"], None).is_err());
        assert!(Outputs::from_names(&["bogus"], None).is_err());
        assert!(Outputs::from_names::<&str>(&[], None).is_err());
    }

    #[test]
    fn sweep_rows_carry_grid_coordinates() {
        let spec = SweepSpec {
            gamma_b_db: vec![15.0],
            eta: vec![0.1],
            rho: vec![0.975],
            order: 2,
            detectors: vec![Detector::Optimum],
            outputs: Outputs { exact: true, bound: None, mc: None },
        };
        let rows = spec.run().unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].gamma_b_db, rows[0].eta, rows[0].rho), (Some(15.0), Some(0.1), Some(0.975)));
        assert!((rows[0].exact_bep.unwrap() - 0.010653031).abs() < 1e-8);
    }
}
