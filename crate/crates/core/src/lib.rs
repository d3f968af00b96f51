//! Worst-case optimal universal densities for Gaussian classes with bounded
//! mean and variance.
//!
//! For a class of i.i.d. Gaussians with mean in `[-α/2, α/2]` and standard
//! deviation in `[σ_m, σ_M]`, the envelope `p̂(x) = sup_p p(x)` over length-`n`
//! sequences integrates to the *attenuation* `A`; the density `q* = p̂/A`
//! satisfies `q*(x) ≥ p(x)/A` for every member `p` and no density does better.
//!
//! * [`gauss`]: parameter boxes, sufficient statistics, clipped ML and `p̂`.
//! * [`specfun`]: log-gamma, incomplete gamma and error functions.
//! * [`attenuation`]: exact and asymptotic closed forms for `A`.
//! * [`universal`]: `q*`, regret and code lengths.
//! * [`verify`]: quadrature and Monte Carlo oracles for the closed forms.
//!
//! The closed-form modules are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

pub mod attenuation;
pub mod error;
pub mod gauss;
pub mod scalar;
pub mod specfun;
pub mod universal;
pub mod verify;

pub use attenuation::{
    atten_approx, atten_exact, atten_mean_only, atten_variance_only, compute_in, exact_terms, Method,
};
pub use error::{Error, Result};
pub use gauss::{clamp, envelope_1d, log_density, log_envelope_seq, ml_estimate};
pub use scalar::Scalar;
pub use verify::{mc_atten, mc_in, quadrature_atten_1d, quadrature_atten_2d, IntegralEstimate, TransformedSample};

pub type GaussianClass = gauss::GaussianClass<f64>;
pub type SufficientStats = gauss::SufficientStats<f64>;
pub type MlEstimate = gauss::MlEstimate<f64>;
pub type AttenuationResult = attenuation::AttenuationResult<f64>;
pub type ExactTerms = attenuation::ExactTerms<f64>;
pub type Regions = attenuation::Regions<f64>;
pub type UniversalDensity = universal::UniversalDensity<f64>;
