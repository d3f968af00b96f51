//! Gaussian parameter boxes, sufficient statistics, clipped maximum likelihood
//! and the envelope density `p̂` (the pointwise maximum over the class).
//!
//! Everything is kept in the natural-log domain; the linear accessors may
//! underflow to zero for long sequences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Gaussians with mean in `[-alpha/2, alpha/2]` and standard deviation in
/// `[sigma_min, sigma_max]`, sampled i.i.d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianClass<T> {
    alpha: T,
    sigma_min: T,
    sigma_max: T,
}

impl<T: Scalar> GaussianClass<T> {
    pub fn new(alpha: T, sigma_min: T, sigma_max: T) -> Result<Self> {
        if !(alpha.is_finite() && sigma_min.is_finite() && sigma_max.is_finite()) {
            return Err(Error::Domain(format!(
                "class parameters must be finite (alpha={alpha}, sigma_min={sigma_min}, sigma_max={sigma_max})"
            )));
        }
        if alpha < T::zero() {
            return Err(Error::Domain(format!("alpha must be nonnegative, got {alpha}")));
        }
        if sigma_min <= T::zero() {
            return Err(Error::Domain(format!("sigma_min must be positive, got {sigma_min}")));
        }
        if sigma_min > sigma_max {
            return Err(Error::Domain(format!(
                "sigma_min ({sigma_min}) exceeds sigma_max ({sigma_max})"
            )));
        }
        Ok(Self { alpha, sigma_min, sigma_max })
    }

    /// Known variance `sigma²`, mean range `alpha`.
    pub fn fixed_variance(alpha: T, sigma: T) -> Result<Self> {
        Self::new(alpha, sigma, sigma)
    }

    /// Zero mean, standard deviation in `[sigma_min, sigma_max]`.
    pub fn fixed_mean(sigma_min: T, sigma_max: T) -> Result<Self> {
        Self::new(T::zero(), sigma_min, sigma_max)
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn sigma_min(&self) -> T {
        self.sigma_min
    }

    pub fn sigma_max(&self) -> T {
        self.sigma_max
    }

    /// Upper end of the mean interval.
    pub fn half_alpha(&self) -> T {
        self.alpha / T::lit(2.0)
    }

    pub fn is_singleton(&self) -> bool {
        self.alpha == T::zero() && self.sigma_min == self.sigma_max
    }

    /// Whether `(mu, sigma)` lies in the (closed) parameter box.
    pub fn contains(&self, mu: T, sigma: T) -> bool {
        let h = self.half_alpha();
        mu >= -h && mu <= h && sigma >= self.sigma_min && sigma <= self.sigma_max
    }
}

/// `(n, mean, Σ(x_i - mean)²)` for a real sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SufficientStats<T> {
    n: usize,
    mean: T,
    sse: T,
}

impl<T: Scalar> SufficientStats<T> {
    pub fn new(n: usize, mean: T, sse: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("sample count must be positive".into()));
        }
        if !mean.is_finite() || !sse.is_finite() || sse < T::zero() {
            return Err(Error::Domain(format!(
                "statistics must be finite with sse >= 0 (mean={mean}, sse={sse})"
            )));
        }
        Ok(Self { n, mean, sse })
    }

    /// Stats of a single observation.
    pub fn single(x: T) -> Result<Self> {
        Self::new(1, x, T::zero())
    }

    /// Welford accumulation over the sorted sequence. Sorting first makes the
    /// result bit-identical for every permutation of the input.
    pub fn from_slice(xs: &[T]) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::InvalidArgument("empty sequence".into()));
        }
        if let Some(bad) = xs.iter().find(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("non-finite observation {bad}")));
        }
        let mut sorted = xs.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values are ordered"));

        let mut mean = T::zero();
        let mut sse = T::zero();
        for (k, &x) in sorted.iter().enumerate() {
            let delta = x - mean;
            mean = mean + delta / T::count(k + 1);
            sse = sse + delta * (x - mean);
        }
        // All-equal input must give exactly zero.
        if sorted[0] == sorted[sorted.len() - 1] {
            mean = sorted[0];
            sse = T::zero();
        }
        Self::new(xs.len(), mean, sse.max(T::zero()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> T {
        self.mean
    }

    pub fn sse(&self) -> T {
        self.sse
    }

    /// `Σ(x_i - mu)²` via the parallel-axis identity.
    pub fn sum_sq_about(&self, mu: T) -> T {
        let d = self.mean - mu;
        self.sse + T::count(self.n) * d * d
    }
}

/// Clipped maximum-likelihood parameters and the log-density they attain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlEstimate<T> {
    pub mu_hat: T,
    pub sigma_hat_sq: T,
    /// Natural log of the envelope density at the input.
    pub log_phat: T,
}

impl<T: Scalar> MlEstimate<T> {
    pub fn sigma_hat(&self) -> T {
        self.sigma_hat_sq.sqrt()
    }

    /// Linear envelope value; underflows to zero for long sequences.
    pub fn phat(&self) -> T {
        self.log_phat.exp()
    }
}

/// Projects `value` onto the closed interval `[lo, hi]`.
pub fn clamp<T: Scalar>(value: T, lo: T, hi: T) -> Result<T> {
    if lo > hi || lo.is_nan() || hi.is_nan() {
        return Err(Error::InvalidArgument(format!("empty interval [{lo}, {hi}]")));
    }
    Ok(clamp_unchecked(value, lo, hi))
}

#[inline]
fn clamp_unchecked<T: Scalar>(value: T, lo: T, hi: T) -> T {
    if value <= lo {
        lo
    } else if value >= hi {
        hi
    } else {
        value
    }
}

/// `log p_{σ,μ}(x)` for an i.i.d. sequence summarized by `stats`.
pub fn log_density<T: Scalar>(stats: &SufficientStats<T>, mu: T, sigma: T) -> T {
    let n = T::count(stats.n);
    let var = sigma * sigma;
    let two = T::lit(2.0);
    -(n / two) * (two * T::PI() * var).ln() - stats.sum_sq_about(mu) / (two * var)
}

/// Maximum likelihood over the class box: the mean is clipped first, then the
/// variance about the clipped mean.
pub fn ml_estimate<T: Scalar>(stats: &SufficientStats<T>, class: &GaussianClass<T>) -> MlEstimate<T> {
    let h = class.half_alpha();
    let mu_hat = clamp_unchecked(stats.mean, -h, h);
    let n = T::count(stats.n);
    let ss = stats.sum_sq_about(mu_hat);
    let sigma_hat_sq = clamp_unchecked(
        ss / n,
        class.sigma_min * class.sigma_min,
        class.sigma_max * class.sigma_max,
    );
    let two = T::lit(2.0);
    let log_phat = -(n / two) * (two * T::PI() * sigma_hat_sq).ln() - ss / (two * sigma_hat_sq);
    MlEstimate { mu_hat, sigma_hat_sq, log_phat }
}

/// `log p̂(x)`: the largest log-density any class member assigns to the sequence.
pub fn log_envelope_seq<T: Scalar>(stats: &SufficientStats<T>, class: &GaussianClass<T>) -> T {
    ml_estimate(stats, class).log_phat
}

/// Envelope of a single observation, written out branch by branch:
/// flat top, `σ_m` shoulder, `1/(√(2πe)·d)` band and `σ_M` tail, where `d`
/// is the distance from the mean interval.
pub fn envelope_1d<T: Scalar>(x: T, class: &GaussianClass<T>) -> T {
    log_envelope_1d(x, class).exp()
}

pub fn log_envelope_1d<T: Scalar>(x: T, class: &GaussianClass<T>) -> T {
    let two = T::lit(2.0);
    let half_ln_2pi = (two * T::PI()).ln() / two;
    let (sm, sm_max) = (class.sigma_min, class.sigma_max);
    let d = x.abs() - class.half_alpha();
    if d <= T::zero() {
        -half_ln_2pi - sm.ln()
    } else if d <= sm {
        -half_ln_2pi - sm.ln() - d * d / (two * sm * sm)
    } else if d <= sm_max {
        -half_ln_2pi - T::lit(0.5) - d.ln()
    } else {
        -half_ln_2pi - sm_max.ln() - d * d / (two * sm_max * sm_max)
    }
}
