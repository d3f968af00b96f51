//! Closed-form attenuation `A = ∫ p̂` for bounded Gaussian classes.
//!
//! The exact value for `n` i.i.d. samples is `1 + T1 + T2 + T3` with
//!
//! * `T1 = α (1/σ_m - 1/σ_M) · n^{n/2} (n-1) e^{-n/2} / (2^{n/2} √π Γ((n+1)/2))`
//!   (mean inside the box, variance estimate inside `[σ_m², σ_M²]`),
//! * `T2 = α √(n/2π) · (I_n/σ_m + (1-I_n)/σ_M)` (mean inside, variance clipped),
//! * `T3 = c_n ln(σ_M/σ_m)` with `c_n = n^{n/2+1} e^{-n/2} / (2^{n/2} Γ(n/2+1))`
//!   (mean clipped to either end, variance unclipped),
//!
//! and the remaining `1` is the mass of the two clipped-mean, clipped-variance
//! pieces. Every power and gamma factor is evaluated through `log_gamma`.
//!
//! `I_n` is the probability that `zᵀ(I + 11ᵀ)z ≤ n` for `z ~ N(0, (I + 11ᵀ)⁻¹)`
//! in `n - 1` dimensions, i.e. `P(χ²_{n-1} ≤ n)`, with `I_1 = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::GaussianClass;
use crate::scalar::Scalar;
use crate::specfun::{log_gamma, regularized_gamma_p};

/// How an attenuation value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Approx,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Approx => "approx",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

/// Mass of the envelope split by where the sample mean falls:
/// below the mean box (`r1`), inside it (`r2`), above it (`r3`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regions<T> {
    pub r1: T,
    pub r2: T,
    pub r3: T,
}

impl<T: Scalar> Regions<T> {
    pub fn total(&self) -> T {
        self.r1 + self.r2 + self.r3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttenuationResult<T> {
    /// `ln A`.
    pub log_value: T,
    /// `A`; `+∞` when `exp(log_value)` overflows.
    pub value: T,
    pub method: Method,
    pub regions: Option<Regions<T>>,
    pub std_error: Option<T>,
}

/// Additive pieces of the exact formula, kept in log form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactTerms<T> {
    pub n: usize,
    pub i_n: T,
    /// `ln T1`, `-∞` when the term vanishes.
    pub log_t1: T,
    pub log_t2: T,
    pub log_t3: T,
}

impl<T: Scalar> ExactTerms<T> {
    pub fn t1(&self) -> T {
        self.log_t1.exp()
    }

    pub fn t2(&self) -> T {
        self.log_t2.exp()
    }

    pub fn t3(&self) -> T {
        self.log_t3.exp()
    }

    /// `ln(1 + T1 + T2 + T3)`.
    pub fn log_total(&self) -> T {
        log_sum_exp(&[T::zero(), self.log_t1, self.log_t2, self.log_t3])
    }
}

fn log_sum_exp<T: Scalar>(logs: &[T]) -> T {
    let max = logs.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() {
        return max;
    }
    // Plain summation while it cannot overflow keeps reductions bit-faithful.
    if max < T::lit(600.0) {
        let sum = logs.iter().fold(T::zero(), |acc, &l| acc + l.exp());
        return sum.ln();
    }
    let sum = logs.iter().fold(T::zero(), |acc, &l| acc + (l - max).exp());
    max + sum.ln()
}

fn safe_ln<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        x.ln()
    } else {
        T::neg_infinity()
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("sequence length n must be at least 1".into()));
    }
    Ok(())
}

/// `ln c_n`, the coefficient of `ln(σ_M/σ_m)` in the exact attenuation.
pub fn log_variance_coefficient<T: Scalar>(n: usize) -> Result<T> {
    check_n(n)?;
    let nf = T::count(n);
    let half = nf / T::lit(2.0);
    Ok((half + T::one()) * nf.ln() - half - half * T::LN_2() - log_gamma(half + T::one())?)
}

/// `ln` of the `T1` prefactor `n^{n/2}(n-1)e^{-n/2}/(2^{n/2}√π Γ((n+1)/2))`.
fn log_interior_coefficient<T: Scalar>(n: usize) -> Result<T> {
    if n < 2 {
        return Ok(T::neg_infinity());
    }
    let nf = T::count(n);
    let half = nf / T::lit(2.0);
    Ok(half * nf.ln() + (nf - T::one()).ln()
        - half
        - half * T::LN_2()
        - T::lit(0.5) * T::PI().ln()
        - log_gamma(half + T::lit(0.5))?)
}

/// `I_n = P(χ²_{n-1} ≤ n)` for `n ≥ 2`, and `I_1 = 1`.
pub fn compute_in<T: Scalar>(n: usize) -> Result<T> {
    check_n(n)?;
    if n == 1 {
        return Ok(T::one());
    }
    let nf = T::count(n);
    regularized_gamma_p((nf - T::one()) / T::lit(2.0), nf / T::lit(2.0))
}

/// The three non-constant terms of the exact attenuation.
pub fn exact_terms<T: Scalar>(n: usize, class: &GaussianClass<T>) -> Result<ExactTerms<T>> {
    check_n(n)?;
    let (alpha, sm, sx) = (class.alpha(), class.sigma_min(), class.sigma_max());
    let i_n = compute_in::<T>(n)?;
    let nf = T::count(n);
    let ln_alpha = safe_ln(alpha);

    let log_t1 = ln_alpha + safe_ln(sm.recip() - sx.recip()) + log_interior_coefficient(n)?;
    let spread = i_n / sm + (T::one() - i_n) / sx;
    let log_t2 =
        ln_alpha + T::lit(0.5) * (nf / (T::lit(2.0) * T::PI())).ln() + safe_ln(spread);
    let log_t3 = log_variance_coefficient::<T>(n)? + safe_ln((sx / sm).ln());

    // ln(0) + (-inf) style sums must stay -inf, never NaN.
    let clean = |v: T| if v.is_nan() { T::neg_infinity() } else { v };
    Ok(ExactTerms { n, i_n, log_t1: clean(log_t1), log_t2: clean(log_t2), log_t3: clean(log_t3) })
}

fn finish<T: Scalar>(log_value: T, method: Method, regions: Option<Regions<T>>) -> AttenuationResult<T> {
    AttenuationResult { log_value, value: log_value.exp(), method, regions, std_error: None }
}

/// Exact attenuation for `n` i.i.d. samples, valid for every `n ≥ 1`.
///
/// The region breakdown assigns `½ + T3/2` to each clipped-mean side and
/// `T1 + T2` to the interior.
pub fn atten_exact<T: Scalar>(n: usize, class: &GaussianClass<T>) -> Result<AttenuationResult<T>> {
    let terms = exact_terms(n, class)?;
    let half = T::lit(0.5);
    let side = half + half * terms.t3();
    let regions = Regions { r1: side, r2: terms.t1() + terms.t2(), r3: side };
    Ok(finish(terms.log_total(), Method::Exact, Some(regions)))
}

/// Known variance `σ²`, mean range `α`: `1 + (α/σ)√(n/2π)`.
pub fn atten_mean_only<T: Scalar>(n: usize, alpha: T, sigma: T) -> Result<AttenuationResult<T>> {
    check_n(n)?;
    GaussianClass::fixed_variance(alpha, sigma)?;
    let value = T::one() + alpha / sigma * (T::count(n) / (T::lit(2.0) * T::PI())).sqrt();
    Ok(finish(value.ln(), Method::Exact, None))
}

/// Fixed mean, standard deviation in `[σ_m, σ_M]`: `1 + c_n ln(σ_M/σ_m)`.
pub fn atten_variance_only<T: Scalar>(n: usize, sigma_min: T, sigma_max: T) -> Result<AttenuationResult<T>> {
    check_n(n)?;
    GaussianClass::fixed_mean(sigma_min, sigma_max)?;
    let log_t3 = log_variance_coefficient::<T>(n)? + safe_ln((sigma_max / sigma_min).ln());
    Ok(finish(log_sum_exp(&[T::zero(), log_t3]), Method::Exact, None))
}

/// Large-`n` form with Stirling's approximation applied and the `O(1)`
/// remainder dropped:
///
/// `α√(n(n-1))/(π√2)·(1/σ_m - 1/σ_M) + α√(n/2π)·(I_n/σ_m + (1-I_n)/σ_M) + √(n/π)·ln(σ_M/σ_m)`.
///
/// The constant `1` of the exact value is part of the dropped remainder, so
/// this can be below one (it is zero for a singleton class).
pub fn atten_approx<T: Scalar>(n: usize, class: &GaussianClass<T>) -> Result<AttenuationResult<T>> {
    if n < 2 {
        return Err(Error::Domain(format!("approximate attenuation needs n >= 2, got {n}")));
    }
    let (alpha, sm, sx) = (class.alpha(), class.sigma_min(), class.sigma_max());
    let nf = T::count(n);
    let i_n = compute_in::<T>(n)?;
    let pi = T::PI();
    let interior =
        alpha * (nf * (nf - T::one())).sqrt() / (pi * T::SQRT_2()) * (sm.recip() - sx.recip());
    let clipped_var =
        alpha * (nf / (T::lit(2.0) * pi)).sqrt() * (i_n / sm + (T::one() - i_n) / sx);
    let clipped_mean = (nf / pi).sqrt() * (sx / sm).ln();
    let value = interior + clipped_var + clipped_mean;
    Ok(AttenuationResult { log_value: safe_ln(value), value, method: Method::Approx, regions: None, std_error: None })
}
