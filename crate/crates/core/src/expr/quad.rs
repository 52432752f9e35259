//! Adaptive Simpson quadrature with interval bisection.

use crate::error::Result;

pub const DEFAULT_ABS_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_DEPTH: u32 = 40;

/// Integrates `f` over `[a, b]` (either orientation) to absolute tolerance
/// `tol`, bisecting at most `max_depth` levels deep. Errors raised by the
/// integrand abort the integration.
pub fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = simpson(a, b, fa, fm, fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

/// [`adaptive_simpson`] with the default tolerance and depth.
pub fn integrate<F>(f: &F, a: f64, b: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    adaptive_simpson(f, a, b, DEFAULT_ABS_TOL, DEFAULT_MAX_DEPTH)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    Ok(recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_trig() {
        let cube = integrate(&|x: f64| Ok(x * x * x), 0.0, 2.0).unwrap();
        assert!((cube - 4.0).abs() < 1e-13);
        let s = integrate(&|x: f64| Ok(x.cos()), 0.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
        let rev = integrate(&|x: f64| Ok(x.cos()), std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        assert!((rev + 1.0).abs() < 1e-12);
    }

    #[test]
    fn elliptic_integrand_against_series() {
        // ∫_0^{π/2} sqrt(1 - m cos^2 r) dr = E(m), complete elliptic integral of
        // the second kind; E(0.49) via its hypergeometric series.
        let m = 0.49_f64;
        let mut series = 0.0;
        let mut coef = 1.0_f64;
        for n in 0..200 {
            if n > 0 {
                let nf = n as f64;
                coef *= ((2.0 * nf - 1.0) / (2.0 * nf)).powi(2);
            }
            series += coef * m.powi(n) / (1.0 - 2.0 * n as f64);
        }
        let expected = std::f64::consts::FRAC_PI_2 * series;
        let got =
            integrate(&|r: f64| Ok((1.0 - m * r.cos().powi(2)).sqrt()), 0.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((got - expected).abs() < 1e-12, "{} vs {}", got, expected);
    }
}
