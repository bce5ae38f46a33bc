//! One-dimensional minimization.

const INV_PHI: f64 = 0.618_033_988_749_894_8; // (√5 − 1) / 2

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `rel_tol` times its midpoint (or
/// after 400 iterations) and returns the midpoint of the final bracket.
pub fn golden_section(mut lo: f64, mut hi: f64, rel_tol: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..400 {
        if (hi - lo) <= rel_tol * (0.5 * (hi + lo)).abs() {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Safeguarded Newton iteration for a root of `g` inside `[lo, hi]`.
///
/// `g_and_slope` returns `(g(x), g'(x))`. Steps that leave the bracket fall
/// back to bisection; the bracket is shrunk using the sign of `g`, which
/// must be increasing on the interval.
pub fn newton_bracketed(
    mut lo: f64,
    mut hi: f64,
    start: f64,
    rel_tol: f64,
    mut g_and_slope: impl FnMut(f64) -> (f64, f64),
) -> f64 {
    let mut x = start.clamp(lo, hi);
    for _ in 0..100 {
        let (g, slope) = g_and_slope(x);
        if g == 0.0 {
            return x;
        }
        if g > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let mut next = x - g / slope;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= rel_tol * x.abs() {
            return next;
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_parabola_vertex() {
        let x = golden_section(0.0, 10.0, 1e-8, |x| (x - 3.7) * (x - 3.7) + 1.0);
        assert!((x - 3.7).abs() < 1e-6);
    }

    #[test]
    fn golden_section_boundary_minimum() {
        let x = golden_section(1.0, 2.0, 1e-10, |x| x);
        assert!((x - 1.0).abs() < 1e-9);
    }

    #[test]
    fn newton_solves_monotone_equation() {
        // g(x) = x^3 - 2, increasing
        let x = newton_bracketed(0.0, 3.0, 2.9, 1e-14, |x| (x * x * x - 2.0, 3.0 * x * x));
        assert!((x - libm::cbrt(2.0)).abs() < 1e-13);
    }
}
