//! Empirical certification of growth, dissipativity and Wasserstein-decay conditions.

mod coupling;
mod dissipativity;
mod distant;
mod growth;
mod rate;
mod uniform;

pub use coupling::{simulate_coupling, CouplingConfig, CouplingCurve};
pub use dissipativity::{fit_dissipativity, DissipativityConstants, DissipativityFit, FrontierPoint};
pub use distant::{
    distant_bound_s2_over_k, distant_lhs, distant_profile, friendly_distant, rate_from_distant, sigma_tilde,
    DistantConfig, DistantProfile, FriendlyDistant, KSelection, ProfileBin,
};
pub use growth::{fit_growth, radial_points, GrowthConstants, RadialSampling};
pub use rate::{ExponentialRate, RateModel};
pub use uniform::{uniform_dissipativity_rate, uniform_lhs, uniform_lhs_constant_sigma};

use thiserror::Error;

use crate::diffusion::DiffusionError;
use crate::objective::ObjectiveError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("{coefficient} growth ratio still increasing at the largest radius")]
    GrowthExceeded { coefficient: &'static str },
    #[error("A‖x‖²/‖x‖² is not bounded away from zero from below at large radius (asymptotic slope {slope:.3e})")]
    NotDissipative { slope: f64 },
    #[error("uniform dissipativity fails: max pairwise ratio {max_lhs:.3e} ≥ 0")]
    NotUniform { max_lhs: f64 },
    #[error("distant-dissipativity profile is not eventually negative")]
    NoDecay,
    #[error("σσᵀ − s²I is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },
    #[error("γ = {gamma} does not exceed L*/K_m = {gamma_min}")]
    GammaTooSmall { gamma: f64, gamma_min: f64 },
    #[error("relative rates need an L2 rate")]
    MissingL2Rate,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("coefficient evaluation returned a non-finite value")]
    NonFinite,
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

pub type Result<T> = std::result::Result<T, VerifyError>;

fn finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(VerifyError::NonFinite)
    }
}
