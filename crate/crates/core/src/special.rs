//! Bessel function of the first kind, order zero.

use crate::dd::Dd;
use crate::{Error, Result};
use core::f64::consts::{FRAC_PI_4, PI};

/// Switch from the Maclaurin series to the Hankel asymptotic expansion. At 12
/// the truncated expansion is still off by ~8e-13, so the switch sits at 13.
const SERIES_LIMIT: f64 = 13.0;
/// Below this the plain `f64` series is already accurate to ~1e-15.
const F64_SERIES_LIMIT: f64 = 6.0;

/// J₀(x), absolute error below 1e-12 for |x| ≤ 50.
///
/// Uses the Maclaurin series for |x| ≤ 13 (accumulated in double-double above
/// |x| = 6, where the alternating terms grow to ~1e4) and the Hankel
/// asymptotic expansion beyond, truncated at its smallest term.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(x));
    }
    let ax = x.abs();
    Ok(if ax <= F64_SERIES_LIMIT {
        series_f64(ax)
    } else if ax <= SERIES_LIMIT {
        series_dd(ax)
    } else {
        hankel(ax)
    })
}

/// J₀ for arguments already known to be finite.
pub(crate) fn j0_unchecked(x: f64) -> f64 {
    bessel_j0(x).unwrap_or(f64::NAN)
}

fn series_f64(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term.abs() < 1e-18 {
            return sum;
        }
        k += 1.0;
    }
}

fn series_dd(x: f64) -> f64 {
    let q = -(Dd::square(x) * 0.25);
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    let mut k = 1.0;
    loop {
        term = term * q / (k * k);
        sum = sum + term;
        if term.to_f64().abs() < 1e-20 {
            return sum.to_f64();
        }
        k += 1.0;
    }
}

/// J₀(x) ≈ √(2/(πx)) [P(x) cos(x − π/4) − Q(x) sin(x − π/4)].
fn hankel(x: f64) -> f64 {
    let mut p = 0.0;
    let mut q = 0.0;
    // term = a_k / x^k, a_k = ∏_{m=1..k} (−(2m−1)²) / (k! 8^k);
    // P takes the even k, Q the odd k, each with alternating sign.
    let mut term = 1.0_f64;
    let mut k = 0u32;
    let mut previous = f64::INFINITY;
    loop {
        let magnitude = term.abs();
        if magnitude > previous || magnitude < 1e-17 {
            break;
        }
        previous = magnitude;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        k += 1;
        let odd = f64::from(2 * k - 1);
        term *= -(odd * odd) / (f64::from(k) * 8.0 * x);
    }
    let chi = x - FRAC_PI_4;
    libm::sqrt(2.0 / (PI * x)) * (p * libm::cos(chi) - q * libm::sin(chi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_at_zero() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
    }

    #[test]
    fn value_at_one() {
        assert!((bessel_j0(1.0).unwrap() - 0.765_197_686_557_966_6).abs() < 1e-14);
    }

    #[test]
    fn first_zero() {
        assert!(bessel_j0(2.404_825_557_7).unwrap().abs() < 1e-9);
    }

    #[test]
    fn even_function() {
        for x in [0.3, 7.1, 13.0, 40.0] {
            assert_eq!(bessel_j0(x).unwrap(), bessel_j0(-x).unwrap());
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(bessel_j0(f64::NAN), Err(Error::Domain(_))));
        assert!(bessel_j0(f64::INFINITY).is_err());
    }

    #[test]
    fn continuous_across_crossovers() {
        for edge in [F64_SERIES_LIMIT, SERIES_LIMIT] {
            let below = bessel_j0(edge - 1e-12).unwrap();
            let above = bessel_j0(edge + 1e-12).unwrap();
            assert!((below - above).abs() < 1e-12, "jump at {edge}");
        }
    }

    #[test]
    fn large_argument_reference_values() {
        // Reference values from a 50-digit evaluation.
        let cases =
            [(15.0, -0.014_224_472_826_780_773), (30.0, -0.086_367_983_581_040_23), (50.0, 0.055_812_327_669_251_86)];
        for (x, want) in cases {
            assert!((bessel_j0(x).unwrap() - want).abs() < 1e-13, "x = {x}");
        }
    }
}
