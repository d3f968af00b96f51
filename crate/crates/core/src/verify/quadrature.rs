//! Deterministic attenuation integrals for sequences of length one and two.

use crate::attenuation::Regions;
use crate::error::{Error, Result};
use crate::gauss::{envelope_1d, log_envelope_seq, GaussianClass, SufficientStats};
use crate::specfun::normal_sf;

use super::integrate::integrate;
use super::IntegralEstimate;

/// Truncation distance, in units of `σ_M`, beyond the mean box.
const TAIL_SIGMAS: f64 = 12.0;
const MAX_SEGMENTS: usize = 2000;

fn check_tol(rel_tol: f64, lo: f64, hi: f64) -> Result<()> {
    if !(rel_tol > lo && rel_tol < hi) {
        return Err(Error::InvalidArgument(format!("rel_tol must lie in ({lo:e}, {hi:e}), got {rel_tol:e}")));
    }
    Ok(())
}

/// Sorted, de-duplicated breakpoints `±h, ±(h+σ_m), ±(h+σ_M), ±L`.
fn breakpoints(class: &GaussianClass<f64>, limit: f64) -> Vec<f64> {
    let h = class.half_alpha();
    let mut pts = vec![
        -limit,
        -(h + class.sigma_max()),
        -(h + class.sigma_min()),
        -h,
        h,
        h + class.sigma_min(),
        h + class.sigma_max(),
        limit,
    ];
    pts.dedup();
    pts
}

struct Pieces {
    regions: Regions<f64>,
    error: f64,
}

/// Integrates `f` piecewise and files each piece under the region its
/// midpoint belongs to.
fn integrate_pieces<F: Fn(f64) -> f64>(f: F, pts: &[f64], h: f64, rel_tol: f64) -> Result<Pieces> {
    let mut regions = Regions { r1: 0.0, r2: 0.0, r3: 0.0 };
    let mut error = 0.0;
    for w in pts.windows(2) {
        let piece = integrate(&f, w[0], w[1], 0.0, rel_tol, MAX_SEGMENTS)?;
        let mid = 0.5 * (w[0] + w[1]);
        if mid < -h {
            regions.r1 += piece.value;
        } else if mid > h {
            regions.r3 += piece.value;
        } else {
            regions.r2 += piece.value;
        }
        error += piece.error;
    }
    Ok(Pieces { regions, error })
}

fn finish(pieces: Pieces, rel_tol: f64) -> Result<IntegralEstimate> {
    let value = pieces.regions.total();
    if pieces.error > rel_tol * value {
        return Err(Error::Convergence(format!(
            "achieved error {:.3e} exceeds {:.3e}",
            pieces.error,
            rel_tol * value
        )));
    }
    Ok(IntegralEstimate {
        value,
        std_error: 0.0,
        abs_error: pieces.error,
        samples: 0,
        seed: None,
        regions: Some(pieces.regions),
        region_std_errors: None,
    })
}

/// `∫ p̂(x) dx` for a single observation, integrating the piecewise envelope
/// between its breakpoints and adding the Gaussian tail mass beyond
/// `±(α/2 + 12σ_M)` in closed form.
pub fn quadrature_atten_1d(class: &GaussianClass<f64>, rel_tol: f64) -> Result<IntegralEstimate> {
    check_tol(rel_tol, 1e-12, 1e-2)?;
    let h = class.half_alpha();
    let limit = h + TAIL_SIGMAS * class.sigma_max();
    let pts = breakpoints(class, limit);
    let mut pieces = integrate_pieces(|x| envelope_1d(x, class), &pts, h, rel_tol)?;
    let tail = normal_sf(TAIL_SIGMAS);
    pieces.regions.r1 += tail;
    pieces.regions.r3 += tail;
    finish(pieces, rel_tol)
}

/// `∫∫ p̂(x₁, x₂) dx₁ dx₂` in the coordinates `y = (x₁+x₂)/2`, `z = (x₁-x₂)/2`
/// (Jacobian 2). The inner `z` integral is split where the variance estimate
/// hits `σ_m²` or `σ_M²`; the outer `y` integral at the mean-box edges and
/// their `σ` offsets. Mass with `|y|` beyond `α/2 + 12σ_M` is added in
/// closed form; mass with `|z| > 12σ_M` is below `1e-60` and dropped.
pub fn quadrature_atten_2d(class: &GaussianClass<f64>, rel_tol: f64) -> Result<IntegralEstimate> {
    check_tol(rel_tol, 1e-10, 1e-2)?;
    let h = class.half_alpha();
    let (sm, sx) = (class.sigma_min(), class.sigma_max());
    let z_limit = TAIL_SIGMAS * sx;
    let inner_tol = (rel_tol * 1e-2).max(1e-13);

    let density = |y: f64, z: f64| -> f64 {
        let stats = SufficientStats::new(2, y, 2.0 * z * z).expect("finite coordinates");
        log_envelope_seq(&stats, class).exp()
    };

    // Jacobian 2, and a factor 2 for integrating z over [0, ∞) only.
    let inner = |y: f64| -> f64 {
        let d = y - y.clamp(-h, h);
        let mut pts = vec![0.0];
        for s in [sm, sx] {
            let s2 = s * s - d * d;
            if s2 > 0.0 {
                pts.push(s2.sqrt());
            }
        }
        pts.push(z_limit);
        pts.dedup();
        let mut total = 0.0;
        for w in pts.windows(2) {
            // Inner failures surface through the outer error estimate.
            total += integrate(|z| density(y, z), w[0], w[1], 0.0, inner_tol, MAX_SEGMENTS)
                .map(|q| q.value)
                .unwrap_or(f64::NAN);
        }
        4.0 * total
    };

    let limit = h + TAIL_SIGMAS * sx;
    let pts = breakpoints(class, limit);
    let mut pieces = integrate_pieces(inner, &pts, h, rel_tol)?;
    if !pieces.regions.total().is_finite() {
        return Err(Error::Convergence("inner z integral failed to converge".into()));
    }
    // One side of the truncated y-tail carries erfc(12)/2.
    let tail = normal_sf(TAIL_SIGMAS * std::f64::consts::SQRT_2);
    pieces.regions.r1 += tail;
    pieces.regions.r3 += tail;
    finish(pieces, rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn class(a: f64, lo: f64, hi: f64) -> GaussianClass<f64> {
        GaussianClass::new(a, lo, hi).unwrap()
    }

    #[test]
    fn one_d_singleton_integrates_to_one() {
        let r = quadrature_atten_1d(&class(0.0, 5.0, 5.0), 1e-11).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
        assert_eq!(r.std_error, 0.0);
        assert!(r.is_deterministic());
    }

    #[test]
    fn one_d_fixed_variance() {
        let r = quadrature_atten_1d(&class(1.0, 1.0, 1.0), 1e-10).unwrap();
        assert!((r.value - (1.0 + 1.0 / (2.0 * PI).sqrt())).abs() < 1e-9);
        let regions = r.regions.unwrap();
        assert!((regions.r1 - 0.5).abs() < 1e-10);
        assert!((regions.r1 - regions.r3).abs() < 1e-12);
    }

    #[test]
    fn tolerance_bounds() {
        let c = class(1.0, 1.0, 1.0);
        assert!(quadrature_atten_1d(&c, 1e-13).is_err());
        assert!(quadrature_atten_1d(&c, 0.1).is_err());
        assert!(quadrature_atten_2d(&c, 1e-11).is_err());
    }

    #[test]
    fn two_d_singleton_and_fixed_variance() {
        let r = quadrature_atten_2d(&class(0.0, 1.0, 1.0), 1e-9).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8);
        let r = quadrature_atten_2d(&class(1.0, 1.0, 1.0), 1e-8).unwrap();
        assert!((r.value - (1.0 + 1.0 / PI.sqrt())).abs() < 1e-6);
        let regions = r.regions.unwrap();
        assert!((regions.r2 - 1.0 / PI.sqrt()).abs() < 1e-6);
    }
}
