//! The normalized envelope `q* = p̂ / A`, its regret and code lengths.

use serde::{Deserialize, Serialize};

use crate::attenuation::atten_exact;
use crate::error::{Error, Result};
use crate::gauss::{log_density, log_envelope_seq, GaussianClass, SufficientStats};
use crate::scalar::Scalar;

/// Minimax-optimal density over length-`n` sequences for a Gaussian class.
///
/// The normalizer always comes from the exact attenuation so that
/// `q*(x) ≥ p(x)/A` holds for every member `p` of the class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniversalDensity<T> {
    class: GaussianClass<T>,
    n: usize,
    log_atten: T,
}

impl<T: Scalar> UniversalDensity<T> {
    pub fn new(class: GaussianClass<T>, n: usize) -> Result<Self> {
        let atten = atten_exact(n, &class)?;
        Ok(Self { class, n, log_atten: atten.log_value.max(T::zero()) })
    }

    pub fn class(&self) -> &GaussianClass<T> {
        &self.class
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `ln A`.
    pub fn log_atten(&self) -> T {
        self.log_atten
    }

    fn check(&self, stats: &SufficientStats<T>) -> Result<()> {
        if stats.n() != self.n {
            return Err(Error::InvalidArgument(format!(
                "sequence length {} does not match density length {}",
                stats.n(),
                self.n
            )));
        }
        Ok(())
    }

    /// `ln q*(x) = ln p̂(x) - ln A`.
    pub fn log_q_star(&self, stats: &SufficientStats<T>) -> Result<T> {
        self.check(stats)?;
        Ok(log_envelope_seq(stats, &self.class) - self.log_atten)
    }

    /// `ln p_{σ,μ}(x) - ln q*(x)`; at most `ln A` for every in-class `(μ, σ)`.
    pub fn regret(&self, mu: T, sigma: T, stats: &SufficientStats<T>) -> Result<T> {
        if !self.class.contains(mu, sigma) {
            return Err(Error::Domain(format!("parameters (mu={mu}, sigma={sigma}) lie outside the class")));
        }
        let log_q = self.log_q_star(stats)?;
        Ok(log_density(stats, mu, sigma) - log_q)
    }

    /// Differential code length `-log₂ q*(x)` in bits.
    pub fn codelength_bits(&self, stats: &SufficientStats<T>) -> Result<T> {
        Ok(-self.log_q_star(stats)? / T::LN_2())
    }
}
