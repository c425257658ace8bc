//! Explicit constants and error bounds: moment constants, integration error,
//! semigroup tables, Stein factors, expected suboptimality and the assembled report.

mod integration;
mod moments;
mod quadrature;
mod report;
mod semigroup;
mod stein;
mod subopt;

pub use integration::{
    c_constants, checked_integration_error_bound, eta_exponent, integration_error_bound, CConstants,
};
pub use moments::{alpha_tilde, beta_rn, kappa_r, moment_bound, step_threshold};
pub use quadrature::{integrate_half_line, QuadratureResult};
pub use report::{assemble_corollary, AssemblyMode, BoundInputs, BoundReport, RunSchedule};
pub use semigroup::{semigroup_constants, CoefficientConstants, SemigroupConstantTable};
pub use stein::{alpha_tilde_omega, omega_integral, omega_r, stein_factors, OmegaIntegrals, SteinFactorSet, SteinInputs};
pub use subopt::{
    quadratic_gamma_ratio, quadratic_gibbs_sampler, suboptimality_entropy_form, suboptimality_generalized_gibbs,
    suboptimality_quadratic, QuadraticSampleEstimate,
};

use thiserror::Error;

use crate::verify::VerifyError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("α̃ vanishes (α = {alpha}, reduction {reduction}); the bound is vacuous")]
    DegenerateAlphaTilde { alpha: f64, reduction: f64 },
    #[error("order n = {0} is not supported here (c₃ needs n ≥ 1)")]
    BadN(u32),
    #[error("n_e = {n_e} must be even and ≥ n + 4 = {min}")]
    BadMomentOrder { n_e: u32, min: u32 },
    #[error("step size η = {eta} is not below the threshold {threshold:.3e}")]
    StepTooLarge { eta: f64, threshold: f64 },
    #[error("missing coefficient: {0}")]
    MissingCoefficient(String),
    #[error("suboptimality log term is negative ({value:.3e}); the bound is vacuous in this regime")]
    NegativeLogArgument { value: f64 },
    #[error("quadrature did not converge (estimate {estimate:.6e}, error {error:.3e})")]
    QuadratureNonConvergent { estimate: f64, error: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite intermediate value: {0}")]
    NonFinite(&'static str),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

pub type Result<T> = std::result::Result<T, BoundsError>;

fn finite(v: f64, what: &'static str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(BoundsError::NonFinite(what))
    }
}

fn positive(v: f64, what: &str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(BoundsError::InvalidParameter(format!("{what} must be positive and finite, got {v}")))
    }
}

fn nonnegative(v: f64, what: &str) -> Result<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(BoundsError::InvalidParameter(format!("{what} must be nonnegative and finite, got {v}")))
    }
}
