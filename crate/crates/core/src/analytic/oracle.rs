//! Semi-analytic cross-check of the closed form.
//!
//! Integrates P(X < Y) = ∫₀^∞ p_Y(y) F_X(y) dy numerically, with the mixture
//! density of Y and the closed-form mixture CDF of X. The closed-form double
//! sum is never used here.

use super::effective_pf;
use crate::channel::DiversityConfig;
use crate::dd::Dd;
use crate::quadrature::integrate_adaptive;
use crate::{Error, Result};

pub const DEFAULT_ORACLE_TOLERANCE: f64 = 1e-8;

const MAX_INTERVALS: usize = 4000;

pub fn semi_analytic_bep(cfg: &DiversityConfig, tol: f64) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(alloc::format!("tolerance {tol} must be positive")));
    }
    let Some(pf) = effective_pf(cfg)? else {
        return Ok(0.5);
    };
    let alphas = pf.alphas();
    let betas = pf.betas();
    let a = pf.a_dd();
    let b = pf.b_dd();

    let density_y = |y: f64| {
        b.iter().zip(betas).fold(Dd::ZERO, |acc, (&bj, &beta)| acc + bj * (libm::exp(-y / beta) / beta)).to_f64()
    };
    let cdf_x =
        |y: f64| a.iter().zip(alphas).fold(Dd::ZERO, |acc, (&ai, &alpha)| acc - ai * libm::expm1(-y / alpha)).to_f64();

    // y = c·u/(1−u) maps [0, ∞) onto [0, 1).
    let c = betas.iter().copied().fold(0.0, f64::max);
    let (value, err) = integrate_adaptive(0.0, 1.0, 0.01 * tol, MAX_INTERVALS, |u| {
        let one_minus = 1.0 - u;
        let y = c * u / one_minus;
        if !y.is_finite() {
            return 0.0;
        }
        let jac = c / (one_minus * one_minus);
        let fy = density_y(y);
        if fy == 0.0 {
            0.0
        } else {
            fy * cdf_x(y) * jac
        }
    });
    if err > tol {
        return Err(Error::NoConvergence { last: value, previous: value + err });
    }
    Ok(value)
}
