//! Fading correlation over one bit interval from a Doppler spectrum.
//!
//! For a rectangular pulse the matched-filter fading gain is the bit-interval
//! average of the continuous gain, so its lag-`j` covariance is
//!
//! ```text
//! R(j) = ∫₀¹ ∫₀¹ r(u − v + j) du dv
//! ```
//!
//! with `r` the normalized continuous covariance and lags in units of `T`.
//! The correlation coefficient is `ρ = R(1) / R(0)`.

use crate::quadrature::GaussLegendre;
use crate::special::j0_unchecked;
use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};

/// Highest Gauss–Legendre order tried before giving up.
pub const MAX_QUAD_ORDER: usize = 512;
/// Convergence threshold on |ρ(2q) − ρ(q)|.
pub const RHO_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DopplerKind {
    /// Isotropic scattering: r(τ) = J₀(2π f_D τ).
    Jakes,
    /// Gaussian spectrum with 3 dB half-width f_D: r(τ) = exp(−(π f_D τ)² / ln 2).
    Gaussian,
    /// Flat spectrum on [−f_D, f_D]: r(τ) = sinc(2 f_D τ).
    Rectangular,
    /// Covariance sampled at user lags, linearly interpolated.
    Tabulated,
}

impl core::str::FromStr for DopplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "jakes" | "clarke" => Ok(Self::Jakes),
            "gaussian" | "gauss" => Ok(Self::Gaussian),
            "rectangular" | "flat" => Ok(Self::Rectangular),
            "tabulated" | "table" => Ok(Self::Tabulated),
            other => Err(Error::InvalidDoppler(format!("unknown spectrum '{other}'"))),
        }
    }
}

/// A normalized covariance r(τ) sampled at increasing lags (in bit intervals).
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceTable {
    lags: Vec<f64>,
    values: Vec<f64>,
}

impl CovarianceTable {
    /// Validates and stores `(lag, r)` points.
    ///
    /// Lags must start at 0, increase strictly and reach at least 2 bit
    /// intervals; r(0) must be 1 and every |r| ≤ 1.
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidDoppler("table needs at least two points".into()));
        }
        if points.iter().any(|(t, r)| !t.is_finite() || !r.is_finite()) {
            return Err(Error::InvalidDoppler("table contains non-finite values".into()));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidDoppler("lags must be strictly increasing".into()));
        }
        let (first, last) = (points[0].0, points[points.len() - 1].0);
        if first != 0.0 || last < 2.0 {
            return Err(Error::InvalidDoppler(format!(
                "lags must cover [0, 2] bit intervals, table covers [{first}, {last}]"
            )));
        }
        if (points[0].1 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDoppler(format!("r(0) = {} but must be 1", points[0].1)));
        }
        if let Some((t, r)) = points.iter().find(|(_, r)| r.abs() > 1.0 + 1e-12) {
            return Err(Error::InvalidDoppler(format!("|r({t})| = {} exceeds 1", r.abs())));
        }
        Ok(Self { lags: points.iter().map(|p| p.0).collect(), values: points.iter().map(|p| p.1).collect() })
    }

    /// Linear interpolation; r is even, so negative lags mirror.
    pub fn eval(&self, lag: f64) -> f64 {
        let t = lag.abs();
        let idx = self.lags.partition_point(|&x| x <= t);
        if idx == 0 {
            return self.values[0];
        }
        if idx >= self.lags.len() {
            return self.values[self.values.len() - 1];
        }
        let (t0, t1) = (self.lags[idx - 1], self.lags[idx]);
        let (r0, r1) = (self.values[idx - 1], self.values[idx]);
        r0 + (r1 - r0) * (t - t0) / (t1 - t0)
    }

    fn lags(&self) -> &[f64] {
        &self.lags
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DopplerSpec {
    kind: DopplerKind,
    fdt: f64,
    table: Option<CovarianceTable>,
}

impl DopplerSpec {
    /// A parametric spectrum with normalized Doppler bandwidth `fdt = f_D·T`.
    pub fn parametric(kind: DopplerKind, fdt: f64) -> Result<Self> {
        if kind == DopplerKind::Tabulated {
            return Err(Error::InvalidDoppler("tabulated spectrum requires a table".into()));
        }
        if !fdt.is_finite() || fdt < 0.0 {
            return Err(Error::InvalidDoppler(format!("fdT = {fdt} must be finite and >= 0")));
        }
        Ok(Self { kind, fdt, table: None })
    }

    pub fn jakes(fdt: f64) -> Result<Self> {
        Self::parametric(DopplerKind::Jakes, fdt)
    }

    pub fn tabulated(table: CovarianceTable) -> Self {
        Self { kind: DopplerKind::Tabulated, fdt: 0.0, table: Some(table) }
    }

    pub fn kind(&self) -> DopplerKind {
        self.kind
    }

    pub fn fdt(&self) -> f64 {
        self.fdt
    }

    /// Normalized continuous covariance at `lag` bit intervals.
    pub fn covariance(&self, lag: f64) -> f64 {
        let x = self.fdt * lag;
        match self.kind {
            DopplerKind::Jakes => j0_unchecked(2.0 * PI * x),
            DopplerKind::Gaussian => libm::exp(-(PI * x) * (PI * x) / LN_2),
            DopplerKind::Rectangular => {
                let arg = 2.0 * PI * x;
                if arg.abs() < 1e-8 {
                    1.0 - arg * arg / 6.0
                } else {
                    libm::sin(arg) / arg
                }
            }
            DopplerKind::Tabulated => self.table.as_ref().map_or(f64::NAN, |t| t.eval(lag)),
        }
    }
}

/// ρ = R(1)/R(0) for the given spectrum.
///
/// Parametric spectra use a tensor-product Gauss–Legendre rule on the unit
/// square starting at `quad_order`, doubling until successive estimates
/// differ by less than [`RHO_TOLERANCE`] or the order would exceed
/// [`MAX_QUAD_ORDER`]. Tabulated covariances are piecewise linear, so their
/// integrals are evaluated exactly piece by piece instead.
pub fn rho_from_doppler(spec: &DopplerSpec, quad_order: usize) -> Result<f64> {
    if quad_order < 2 {
        return Err(Error::QuadratureOrder(quad_order));
    }
    if let Some(table) = &spec.table {
        let rho = tabulated_lag_covariance(table, 1.0) / tabulated_lag_covariance(table, 0.0);
        return Ok(rho.clamp(-1.0, 1.0));
    }
    let mut order = quad_order.min(MAX_QUAD_ORDER / 2);
    let mut older = f64::NAN;
    let mut previous = tensor_rho(spec, order);
    loop {
        order *= 2;
        if order > MAX_QUAD_ORDER {
            return Err(Error::NoConvergence { last: previous, previous: older });
        }
        let current = tensor_rho(spec, order);
        if (current - previous).abs() < RHO_TOLERANCE {
            return Ok(current.clamp(-1.0, 1.0));
        }
        older = previous;
        previous = current;
    }
}

/// ρ from a single tensor rule of the given order (no convergence loop).
pub fn tensor_rho(spec: &DopplerSpec, order: usize) -> f64 {
    let rule = GaussLegendre::new(order);
    let pts: Vec<(f64, f64)> = rule.unit_interval().collect();
    lag_covariance(spec, &pts, 1.0) / lag_covariance(spec, &pts, 0.0)
}

fn lag_covariance(spec: &DopplerSpec, pts: &[(f64, f64)], lag: f64) -> f64 {
    pts.iter().map(|&(u, wu)| wu * pts.iter().map(|&(v, wv)| wv * spec.covariance(u - v + lag)).sum::<f64>()).sum()
}

/// R(j) = ∫_{j−1}^{j+1} (1 − |s − j|) r(s) ds, integrated exactly for a
/// piecewise-linear r (a 2-point Gauss rule is exact on each quadratic piece).
fn tabulated_lag_covariance(table: &CovarianceTable, lag: f64) -> f64 {
    let mut breaks: Vec<f64> = alloc::vec![lag - 1.0, lag, lag + 1.0];
    breaks.extend(table.lags().iter().flat_map(|&t| [t, -t]));
    breaks.retain(|&t| t >= lag - 1.0 && t <= lag + 1.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let rule = GaussLegendre::new(2);
    breaks.windows(2).map(|w| rule.integrate(w[0], w[1], |s| (1.0 - (s - lag).abs()) * table.eval(s))).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_bandwidth_gives_unit_correlation() {
        for kind in [DopplerKind::Jakes, DopplerKind::Gaussian, DopplerKind::Rectangular] {
            let spec = DopplerSpec::parametric(kind, 0.0).unwrap();
            let rho = rho_from_doppler(&spec, 8).unwrap();
            assert!((rho - 1.0).abs() < 1e-10, "{kind:?}: {rho}");
        }
    }

    #[test]
    fn constant_table_gives_unit_correlation() {
        let table = CovarianceTable::new(&[(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)]).unwrap();
        let rho = rho_from_doppler(&DopplerSpec::tabulated(table), 8).unwrap();
        assert!((rho - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_must_cover_two_bit_intervals() {
        let err = CovarianceTable::new(&[(0.0, 1.0), (1.5, 0.9)]).unwrap_err();
        assert!(matches!(err, Error::InvalidDoppler(_)));
        assert!(CovarianceTable::new(&[(0.0, 1.0), (2.0, 0.9), (1.0, 0.95)]).is_err());
        assert!(CovarianceTable::new(&[(0.0, 0.9), (2.0, 0.9)]).is_err());
        assert!(CovarianceTable::new(&[(0.0, 1.0), (2.0, 1.3)]).is_err());
    }

    #[test]
    fn tabulated_jakes_approaches_parametric() {
        let jakes = DopplerSpec::jakes(0.1).unwrap();
        let points: Vec<(f64, f64)> = (0..=400).map(|i| i as f64 * 0.005).map(|t| (t, jakes.covariance(t))).collect();
        let table = DopplerSpec::tabulated(CovarianceTable::new(&points).unwrap());
        let a = rho_from_doppler(&jakes, 8).unwrap();
        let b = rho_from_doppler(&table, 8).unwrap();
        assert!((a - b).abs() < 1e-5, "{a} vs {b}");
    }

    #[test]
    fn invalid_inputs() {
        assert!(DopplerSpec::jakes(-0.1).is_err());
        assert!(DopplerSpec::jakes(f64::NAN).is_err());
        assert!(DopplerSpec::parametric(DopplerKind::Tabulated, 0.1).is_err());
        let spec = DopplerSpec::jakes(0.05).unwrap();
        assert_eq!(rho_from_doppler(&spec, 1), Err(Error::QuadratureOrder(1)));
    }

    #[test]
    fn non_convergence_reports_iterates() {
        // A very wide Doppler spread oscillates too fast for the order cap.
        let spec = DopplerSpec::parametric(DopplerKind::Rectangular, 400.0).unwrap();
        match rho_from_doppler(&spec, 2) {
            Err(Error::NoConvergence { last, previous }) => assert!(last.is_finite() && previous.is_finite()),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
