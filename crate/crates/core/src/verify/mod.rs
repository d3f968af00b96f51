//! Numerical oracles for the closed forms: adaptive quadrature for one and
//! two samples, stratified importance sampling for general `n`.
//!
//! None of these call into the attenuation formulas except to pick sample
//! allocations and mixture weights, which affect variance but not the
//! expectation of an estimator.

mod integrate;
mod linalg;
mod montecarlo;
mod quadrature;
mod transform;

use serde::{Deserialize, Serialize};

use crate::attenuation::{AttenuationResult, Method, Regions};

pub use integrate::{integrate, QuadOutcome};
pub use linalg::{cholesky, determinant, ones_plus_identity, RankOneCholesky};
pub use montecarlo::{mc_atten, mc_in, DEFAULT_CHUNK};
pub use quadrature::{quadrature_atten_1d, quadrature_atten_2d};
pub use transform::TransformedSample;

/// Result of a numerical integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    /// Standard error of a stochastic estimate; zero for quadrature.
    pub std_error: f64,
    /// Error estimate reported by quadrature; zero for sampling.
    pub abs_error: f64,
    /// Number of random samples drawn; zero for quadrature.
    pub samples: u64,
    pub seed: Option<u64>,
    pub regions: Option<Regions<f64>>,
    /// Per-stratum standard errors of a Monte Carlo estimate.
    pub region_std_errors: Option<Regions<f64>>,
}

impl IntegralEstimate {
    pub fn is_deterministic(&self) -> bool {
        self.samples == 0
    }

    /// Repackages an attenuation estimate in the common result type.
    pub fn to_attenuation(&self) -> AttenuationResult<f64> {
        let method = if self.is_deterministic() { Method::Quadrature } else { Method::MonteCarlo };
        AttenuationResult {
            log_value: self.value.ln(),
            value: self.value,
            method,
            regions: self.regions,
            std_error: if self.is_deterministic() { None } else { Some(self.std_error) },
        }
    }
}
