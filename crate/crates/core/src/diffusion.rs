//! Diffusion coefficients (b, σ, a, c), drift construction from a target measure,
//! and the generator A.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::linalg::{fd_step, frobenius, sym_eigenvalues, Matrix, MatrixField, ScalarField, Vector, VectorField};
use crate::objective::{ObjectiveError, ObjectiveSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiffusionError {
    #[error("no divergence oracle and finite-difference fallback disabled")]
    MissingDivergence,
    #[error("generalized Gibbs target with θ < 1 needs the optimal value f(x*)")]
    MissingOptimalValue,
    #[error("target has no evaluable log-density")]
    MissingDensity,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("stream coefficient not skew-symmetric (‖c+cᵀ‖_F = {residual:.3e})")]
    NotSkewSymmetric { residual: f64 },
    #[error("covariance not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },
    #[error("diffusion `{label}` produced a non-finite value")]
    NonFinite { label: String },
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

pub type Result<T> = std::result::Result<T, DiffusionError>;

/// dZ = b(Z)dt + σ(Z)dB with a = σσᵀ, optional stream c and divergence ⟨∇, a+c⟩.
#[derive(Clone)]
pub struct DiffusionSpec {
    dim: usize,
    noise_dim: usize,
    label: String,
    drift: VectorField,
    sigma: MatrixField,
    covariance: Option<MatrixField>,
    stream: Option<MatrixField>,
    div_m: Option<VectorField>,
}

impl fmt::Debug for DiffusionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiffusionSpec")
            .field("dim", &self.dim)
            .field("noise_dim", &self.noise_dim)
            .field("label", &self.label)
            .field("covariance", &self.covariance.is_some())
            .field("stream", &self.stream.is_some())
            .field("div_m", &self.div_m.is_some())
            .finish()
    }
}

impl DiffusionSpec {
    /// Square noise (l = d).
    ///
    /// # Panics
    /// If `dim == 0`.
    pub fn new(
        dim: usize,
        label: impl Into<String>,
        drift: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
        sigma: impl Fn(&Vector) -> Matrix + Send + Sync + 'static,
    ) -> Self {
        assert!(dim >= 1, "diffusion dimension must be positive");
        Self {
            dim,
            noise_dim: dim,
            label: label.into(),
            drift: Arc::new(drift),
            sigma: Arc::new(sigma),
            covariance: None,
            stream: None,
            div_m: None,
        }
    }

    pub fn from_fields(dim: usize, label: impl Into<String>, drift: VectorField, sigma: MatrixField) -> Self {
        assert!(dim >= 1, "diffusion dimension must be positive");
        Self {
            dim,
            noise_dim: dim,
            label: label.into(),
            drift,
            sigma,
            covariance: None,
            stream: None,
            div_m: None,
        }
    }

    /// Rectangular σ: d × l.
    pub fn with_noise_dim(mut self, l: usize) -> Self {
        self.noise_dim = l;
        self
    }

    pub fn with_covariance(mut self, a: MatrixField) -> Self {
        self.covariance = Some(a);
        self
    }

    pub fn with_stream(mut self, c: MatrixField) -> Self {
        self.stream = Some(c);
        self
    }

    pub fn with_divergence(mut self, div_m: VectorField) -> Self {
        self.div_m = Some(div_m);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn noise_dim(&self) -> usize {
        self.noise_dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn drift(&self, x: &Vector) -> Vector {
        (self.drift)(x)
    }

    pub fn sigma(&self, x: &Vector) -> Matrix {
        (self.sigma)(x)
    }

    pub fn drift_field(&self) -> VectorField {
        self.drift.clone()
    }

    pub fn sigma_field(&self) -> MatrixField {
        self.sigma.clone()
    }

    /// a(x): the analytic oracle when present, σσᵀ otherwise.
    pub fn covariance(&self, x: &Vector) -> Matrix {
        match &self.covariance {
            Some(a) => a(x),
            None => {
                let s = self.sigma(x);
                &s * s.transpose()
            }
        }
    }

    /// c(x), zero by default.
    pub fn stream(&self, x: &Vector) -> Matrix {
        match &self.stream {
            Some(c) => c(x),
            None => Matrix::zeros(self.dim, self.dim),
        }
    }

    /// m(x) = a(x) + c(x).
    pub fn m(&self, x: &Vector) -> Matrix {
        match &self.stream {
            Some(c) => self.covariance(x) + c(x),
            None => self.covariance(x),
        }
    }

    /// ⟨∇, m(x)⟩: oracle when present, central differences otherwise.
    pub fn div_m(&self, x: &Vector) -> Vector {
        match &self.div_m {
            Some(d) => d(x),
            None => fd_divergence(|y| self.m(y), x, fd_step(x)),
        }
    }

    /// Checks skew-symmetry of c (1e−10) and PSD of a (eigenvalues ≥ −1e−10) at x.
    pub fn validate_at(&self, x: &Vector) -> Result<()> {
        if x.len() != self.dim {
            return Err(DiffusionError::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        let s = self.sigma(x);
        if s.nrows() != self.dim || s.ncols() != self.noise_dim {
            return Err(DiffusionError::InvalidParameter(format!(
                "σ(x) is {}×{}, expected {}×{}",
                s.nrows(),
                s.ncols(),
                self.dim,
                self.noise_dim
            )));
        }
        let c = self.stream(x);
        let residual = frobenius(&(&c + c.transpose()));
        if residual > 1e-10 {
            return Err(DiffusionError::NotSkewSymmetric { residual });
        }
        let min_eigenvalue = sym_eigenvalues(&self.covariance(x)).first().copied().unwrap_or(0.0);
        if min_eigenvalue < -1e-10 {
            return Err(DiffusionError::NotPositiveSemidefinite { min_eigenvalue });
        }
        Ok(())
    }
}

/// ⟨∇, M(x)⟩_i = Σ_j ∂_j M_ij(x) by central differences.
pub fn fd_divergence(m: impl Fn(&Vector) -> Matrix, x: &Vector, h: f64) -> Vector {
    let d = x.len();
    let mut out = Vector::zeros(d);
    let mut xp = x.clone();
    for j in 0..d {
        xp[j] = x[j] + h;
        let mp = m(&xp);
        xp[j] = x[j] - h;
        let mm = m(&xp);
        xp[j] = x[j];
        out += (mp.column(j) - mm.column(j)) / (2.0 * h);
    }
    out
}

/// Family of the target measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetKind {
    /// p ∝ exp(−γf).
    Gibbs { gamma: f64 },
    /// p ∝ exp(−γ(f−f*)^θ).
    GeneralizedGibbs { gamma: f64, theta: f64, f_star: f64 },
    ExplicitLogDensity,
}

/// Invariant measure via ∇log p (and log p itself when evaluable).
#[derive(Clone)]
pub struct TargetMeasure {
    pub kind: TargetKind,
    log_density: Option<ScalarField>,
    log_density_grad: VectorField,
}

impl fmt::Debug for TargetMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetMeasure")
            .field("kind", &self.kind)
            .field("log_density", &self.log_density.is_some())
            .finish()
    }
}

fn nan_vector(d: usize) -> Vector {
    Vector::from_element(d, f64::NAN)
}

impl TargetMeasure {
    pub fn gibbs(obj: &ObjectiveSpec, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(DiffusionError::InvalidParameter(format!("γ must be positive, got {gamma}")));
        }
        let (o1, o2) = (obj.clone(), obj.clone());
        let d = obj.dim();
        Ok(Self {
            kind: TargetKind::Gibbs { gamma },
            log_density: Some(Arc::new(move |x: &Vector| o1.value(x).map_or(f64::NAN, |v| -gamma * v))),
            log_density_grad: Arc::new(move |x: &Vector| {
                o2.gradient(x).map_or_else(|_| nan_vector(d), |g| g * -gamma)
            }),
        })
    }

    /// `f_star` falls back to the objective's known minimum; required when θ < 1.
    pub fn generalized_gibbs(obj: &ObjectiveSpec, gamma: f64, theta: f64, f_star: Option<f64>) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(DiffusionError::InvalidParameter(format!("γ must be positive, got {gamma}")));
        }
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(DiffusionError::InvalidParameter(format!("θ must lie in (0, 1], got {theta}")));
        }
        let f_star = match f_star.or_else(|| obj.known_min().map(|m| m.value)) {
            Some(v) => v,
            None if theta == 1.0 => 0.0,
            None => return Err(DiffusionError::MissingOptimalValue),
        };
        let (o1, o2) = (obj.clone(), obj.clone());
        let d = obj.dim();
        Ok(Self {
            kind: TargetKind::GeneralizedGibbs { gamma, theta, f_star },
            log_density: Some(Arc::new(move |x: &Vector| {
                o1.value(x).map_or(f64::NAN, |v| -gamma * (v - f_star).max(0.0).powf(theta))
            })),
            log_density_grad: Arc::new(move |x: &Vector| {
                let (Ok(v), Ok(g)) = (o2.value(x), o2.gradient(x)) else {
                    return nan_vector(d);
                };
                let gap = (v - f_star).max(0.0);
                if theta == 1.0 {
                    g * -gamma
                } else if gap == 0.0 {
                    Vector::zeros(d)
                } else {
                    g * (-gamma * theta * gap.powf(theta - 1.0))
                }
            }),
        })
    }

    pub fn explicit(log_density: Option<ScalarField>, log_density_grad: VectorField) -> Self {
        Self { kind: TargetKind::ExplicitLogDensity, log_density, log_density_grad }
    }

    pub fn grad_log_density(&self, x: &Vector) -> Vector {
        (self.log_density_grad)(x)
    }

    pub fn log_density(&self, x: &Vector) -> Option<f64> {
        self.log_density.as_ref().map(|l| l(x))
    }
}

/// Behaviour when no analytic divergence is supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DivergenceFallback {
    #[default]
    FiniteDifference,
    Disabled,
}

/// b(x) = ½(a+c)∇log p + ½⟨∇, a+c⟩, the expanded form of (1/2p)⟨∇, p(a+c)⟩.
pub fn drift_from_invariant(
    target: &TargetMeasure,
    a: MatrixField,
    c: Option<MatrixField>,
    div_m: Option<VectorField>,
    fallback: DivergenceFallback,
) -> Result<VectorField> {
    let m: MatrixField = match c {
        Some(c) => {
            let a = a.clone();
            Arc::new(move |x: &Vector| a(x) + c(x))
        }
        None => a,
    };
    let div: VectorField = match (div_m, fallback) {
        (Some(d), _) => d,
        (None, DivergenceFallback::FiniteDifference) => {
            let m = m.clone();
            Arc::new(move |x: &Vector| fd_divergence(|y| m(y), x, fd_step(x)))
        }
        (None, DivergenceFallback::Disabled) => return Err(DiffusionError::MissingDivergence),
    };
    let grad = target.log_density_grad.clone();
    Ok(Arc::new(move |x: &Vector| (m(x) * grad(x) + div(x)) * 0.5))
}

/// Diffusion coefficient σ with optional analytic a = σσᵀ, stream c and ⟨∇, a+c⟩.
#[derive(Clone)]
pub struct DiffusionCoefficients {
    pub sigma: MatrixField,
    pub covariance: Option<MatrixField>,
    pub stream: Option<MatrixField>,
    pub div_m: Option<VectorField>,
    pub noise_dim: Option<usize>,
}

impl DiffusionCoefficients {
    pub fn new(sigma: MatrixField) -> Self {
        Self { sigma, covariance: None, stream: None, div_m: None, noise_dim: None }
    }

    /// σ = s·I.
    pub fn scaled_identity(dim: usize, s: f64) -> Self {
        Self::new(Arc::new(move |_: &Vector| Matrix::identity(dim, dim) * s)).with_divergence(Arc::new(
            move |_: &Vector| Vector::zeros(dim),
        ))
    }

    pub fn with_covariance(mut self, a: MatrixField) -> Self {
        self.covariance = Some(a);
        self
    }

    pub fn with_stream(mut self, c: MatrixField) -> Self {
        self.stream = Some(c);
        self
    }

    pub fn with_divergence(mut self, div_m: VectorField) -> Self {
        self.div_m = Some(div_m);
        self
    }

    /// a = σσᵀ (or the analytic oracle) as a field.
    pub fn covariance_field(&self) -> MatrixField {
        match &self.covariance {
            Some(a) => a.clone(),
            None => {
                let s = self.sigma.clone();
                Arc::new(move |x: &Vector| {
                    let s = s(x);
                    &s * s.transpose()
                })
            }
        }
    }

    /// m = a + c as a field.
    pub fn m_field(&self) -> MatrixField {
        let a = self.covariance_field();
        match &self.stream {
            Some(c) => {
                let c = c.clone();
                Arc::new(move |x: &Vector| a(x) + c(x))
            }
            None => a,
        }
    }

    /// ⟨∇, m⟩ as a field (central differences without an oracle).
    pub fn div_field(&self) -> VectorField {
        match &self.div_m {
            Some(d) => d.clone(),
            None => {
                let m = self.m_field();
                Arc::new(move |x: &Vector| fd_divergence(|y| m(y), x, fd_step(x)))
            }
        }
    }
}

/// Diffusion with stationary density ∝ e^{−γf}:
/// b_γ = −½m∇f + (1/2γ)⟨∇,m⟩, σ_γ = σ/√γ.
pub fn gibbs_diffusion(obj: &ObjectiveSpec, coeffs: &DiffusionCoefficients, gamma: f64) -> Result<DiffusionSpec> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(DiffusionError::InvalidParameter(format!("γ must be positive, got {gamma}")));
    }
    let d = obj.dim();
    let m = coeffs.m_field();
    let div = coeffs.div_field();
    let o = obj.clone();
    let (m1, div1) = (m.clone(), div.clone());
    let drift = move |x: &Vector| match o.gradient(x) {
        Ok(g) => m1(x) * g * -0.5 + div1(x) / (2.0 * gamma),
        Err(_) => nan_vector(d),
    };
    let sigma = coeffs.sigma.clone();
    let scale = gamma.sqrt().recip();
    let mut spec = DiffusionSpec::new(d, format!("gibbs[{}](γ={gamma})", obj.label()), drift, move |x: &Vector| {
        sigma(x) * scale
    });
    if let Some(l) = coeffs.noise_dim {
        spec = spec.with_noise_dim(l);
    }
    if let Some(a) = &coeffs.covariance {
        let a = a.clone();
        spec = spec.with_covariance(Arc::new(move |x: &Vector| a(x) / gamma));
    }
    if let Some(c) = &coeffs.stream {
        let c = c.clone();
        spec = spec.with_stream(Arc::new(move |x: &Vector| c(x) / gamma));
    }
    Ok(spec.with_divergence(Arc::new(move |x: &Vector| div(x) / gamma)))
}

/// Langevin diffusion b = −∇f, σ = √(2/γ)·I.
pub fn langevin(obj: &ObjectiveSpec, gamma: f64) -> Result<DiffusionSpec> {
    let spec = gibbs_diffusion(obj, &DiffusionCoefficients::scaled_identity(obj.dim(), 2.0_f64.sqrt()), gamma)?;
    Ok(spec.with_label(format!("langevin[{}](γ={gamma})", obj.label())))
}

fn check_finite(spec: &DiffusionSpec, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(DiffusionError::NonFinite { label: spec.label.clone() })
    }
}

/// Ag(x) = ⟨b, ∇g⟩ + ½⟨σσᵀ, ∇²g⟩.
pub fn apply_generator(
    spec: &DiffusionSpec,
    g_grad: impl Fn(&Vector) -> Vector,
    g_hess: impl Fn(&Vector) -> Matrix,
    x: &Vector,
) -> Result<f64> {
    let a = spec.covariance(x);
    let v = spec.drift(x).dot(&g_grad(x)) + 0.5 * a.component_mul(&g_hess(x)).sum();
    check_finite(spec, v)
}

/// A‖x‖² = 2⟨b(x), x⟩ + ‖σ(x)‖_F².
pub fn generator_sq_norm(spec: &DiffusionSpec, x: &Vector) -> Result<f64> {
    let v = 2.0 * spec.drift(x).dot(x) + spec.sigma(x).norm_squared();
    check_finite(spec, v)
}

/// ‖2p b − FD⟨∇, p(a+c)⟩‖ / (1 + ‖b‖p) at x, with p rescaled so that p(x) = 1.
pub fn check_stationarity_fd(spec: &DiffusionSpec, target: &TargetMeasure, x: &Vector, h: f64) -> Result<f64> {
    let log_p = target.log_density.as_ref().ok_or(DiffusionError::MissingDensity)?;
    if !(h > 0.0) {
        return Err(DiffusionError::InvalidParameter(format!("h must be positive, got {h}")));
    }
    let l0 = log_p(x);
    let b = spec.drift(x);
    let mut div = Vector::zeros(spec.dim);
    let mut xp = x.clone();
    for j in 0..spec.dim {
        xp[j] = x[j] + h;
        let plus = spec.m(&xp).column(j) * (log_p(&xp) - l0).exp();
        xp[j] = x[j] - h;
        let minus = spec.m(&xp).column(j) * (log_p(&xp) - l0).exp();
        xp[j] = x[j];
        div += (plus - minus) / (2.0 * h);
    }
    let v = (&b * 2.0 - div).norm() / (1.0 + b.norm());
    check_finite(spec, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::standard_normal_vector;
    use crate::rng::stream_rng;

    fn half_sq(d: usize) -> ObjectiveSpec {
        ObjectiveSpec::new(d, "half_sq", |x: &Vector| 0.5 * x.norm_squared()).with_gradient(|x: &Vector| x.clone())
    }

    fn log_obj(c: f64, d: usize) -> ObjectiveSpec {
        ObjectiveSpec::new(d, "log", move |x: &Vector| c * (1.0 + 0.5 * x.norm_squared()).ln())
            .with_gradient(move |x: &Vector| x * (c / (1.0 + 0.5 * x.norm_squared())))
    }

    fn sublinear_coeffs(d: usize) -> DiffusionCoefficients {
        DiffusionCoefficients::new(Arc::new(move |x: &Vector| {
            Matrix::identity(d, d) * (1.0 + 0.5 * x.norm_squared()).sqrt()
        }))
    }

    fn identity(d: usize, s: f64) -> MatrixField {
        Arc::new(move |_: &Vector| Matrix::identity(d, d) * s)
    }

    #[test]
    fn langevin_reduction_is_exact() {
        let obj = log_obj(10.0, 3);
        let mut rng = stream_rng(11, 0);
        for gamma in [0.5, 1.0, 7.0] {
            let target = TargetMeasure::gibbs(&obj, gamma).unwrap();
            let b = drift_from_invariant(&target, identity(3, 2.0 / gamma), None, None, Default::default()).unwrap();
            for _ in 0..20 {
                let x = standard_normal_vector(&mut rng, 3) * 3.0;
                let expected = -obj.gradient(&x).unwrap();
                assert!((b(&x) - expected).amax() <= 1e-12 * (1.0 + x.norm()));
            }
        }
    }

    #[test]
    fn gaussian_target_gives_ou_drift() {
        let target = TargetMeasure::explicit(
            Some(Arc::new(|x: &Vector| -0.5 * x.norm_squared())),
            Arc::new(|x: &Vector| -x),
        );
        let b = drift_from_invariant(&target, identity(2, 1.0), None, None, Default::default()).unwrap();
        let x = Vector::from_vec(vec![1.0, -3.0]);
        assert!((b(&x) + &x * 0.5).amax() < 1e-9);
    }

    #[test]
    fn sublinear_drift_componentwise() {
        let obj = log_obj(10.0, 2);
        let target = TargetMeasure::gibbs(&obj, 1.0).unwrap();
        let a: MatrixField = Arc::new(|x: &Vector| Matrix::identity(2, 2) * (1.0 + 0.5 * x.norm_squared()));
        let b = drift_from_invariant(&target, a, None, None, Default::default()).unwrap();
        let x = Vector::from_vec(vec![1.0, 1.0]);
        // −½a∇f + ½⟨∇,a⟩ with a∇f = c·x and ⟨∇,a⟩ = x.
        let expected = &x * (-5.0) + &x * 0.5;
        assert!((b(&x) - expected).amax() < 1e-9);
    }

    #[test]
    fn missing_divergence_when_fallback_disabled() {
        let obj = half_sq(2);
        let target = TargetMeasure::gibbs(&obj, 1.0).unwrap();
        let err = drift_from_invariant(&target, identity(2, 1.0), None, None, DivergenceFallback::Disabled);
        assert!(matches!(err, Err(DiffusionError::MissingDivergence)));
    }

    #[test]
    fn gibbs_diffusion_identity_m() {
        let obj = log_obj(3.0, 2);
        let spec = gibbs_diffusion(&obj, &DiffusionCoefficients::scaled_identity(2, 1.0), 2.0).unwrap();
        let x = Vector::from_vec(vec![0.3, -2.0]);
        assert!((spec.drift(&x) + obj.gradient(&x).unwrap() * 0.5).amax() < 1e-15);
        assert!((spec.sigma(&x) - Matrix::identity(2, 2) / 2.0_f64.sqrt()).amax() < 1e-15);

        let ou = gibbs_diffusion(&half_sq(2), &DiffusionCoefficients::scaled_identity(2, 1.0), 1.0).unwrap();
        assert!((ou.drift(&x) + &x * 0.5).amax() < 1e-15);
    }

    #[test]
    fn gibbs_diffusion_matches_generic_constructor() {
        let obj = log_obj(10.0, 2);
        let gamma = 1.0;
        let spec = gibbs_diffusion(&obj, &sublinear_coeffs(2), gamma).unwrap();
        let x = Vector::from_vec(vec![1.0, 1.0]);
        let a = 1.0 + 0.5 * x.norm_squared();
        let expected = obj.gradient(&x).unwrap() * (-0.5 * a) + &x * (0.5 / gamma);
        assert!((spec.drift(&x) - expected).amax() < 1e-8);
        assert!(spec.drift(&Vector::zeros(2)).amax() < 1e-12);
    }

    #[test]
    fn generator_identities() {
        let mut rng = stream_rng(5, 0);
        let obj = log_obj(10.0, 3);
        let spec = gibbs_diffusion(&obj, &sublinear_coeffs(3), 1.0).unwrap();
        for _ in 0..100 {
            let x = standard_normal_vector(&mut rng, 3) * 4.0;
            let generic = apply_generator(&spec, |y| y * 2.0, |_| Matrix::identity(3, 3) * 2.0, &x).unwrap();
            let closed = generator_sq_norm(&spec, &x).unwrap();
            assert!((generic - closed).abs() <= 1e-10 * (1.0 + closed.abs()));
            let constant = apply_generator(&spec, |_| Vector::zeros(3), |_| Matrix::zeros(3, 3), &x).unwrap();
            assert_eq!(constant, 0.0);
        }
        let ou = DiffusionSpec::new(4, "ou", |x: &Vector| -x, |_: &Vector| Matrix::identity(4, 4) * 2.0_f64.sqrt());
        let x = Vector::from_vec(vec![1.0, 2.0, -1.0, 0.5]);
        assert!((generator_sq_norm(&ou, &x).unwrap() - (-2.0 * x.norm_squared() + 8.0)).abs() < 1e-12);
    }

    #[test]
    fn stationarity_residuals() {
        let ou = langevin(&half_sq(2), 1.0).unwrap();
        let target = TargetMeasure::gibbs(&half_sq(2), 1.0).unwrap();
        assert!(check_stationarity_fd(&ou, &target, &Vector::from_vec(vec![1.0, 0.0]), 1e-4).unwrap() < 1e-6);

        let obj = log_obj(10.0, 2);
        let spec = gibbs_diffusion(&obj, &sublinear_coeffs(2), 1.0).unwrap();
        let target = TargetMeasure::gibbs(&obj, 1.0).unwrap();
        let x = Vector::from_vec(vec![1.0, 1.0]);
        assert!(check_stationarity_fd(&spec, &target, &x, 1e-4).unwrap() < 1e-6);

        let drift = spec.drift_field();
        let wrong = DiffusionSpec::from_fields(
            2,
            "wrong",
            Arc::new(move |x: &Vector| drift(x).add_scalar(1.0)),
            spec.sigma_field(),
        );
        for h in [1e-2, 1e-3, 1e-4] {
            assert!(check_stationarity_fd(&wrong, &target, &x, h).unwrap() > 0.1);
        }
    }

    #[test]
    fn validation_catches_bad_coefficients() {
        let ok = DiffusionSpec::new(2, "ok", |x: &Vector| -x, |_: &Vector| Matrix::identity(2, 2));
        assert!(ok.validate_at(&Vector::zeros(2)).is_ok());
        let skew = ok.clone().with_stream(Arc::new(|_: &Vector| Matrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])));
        assert!(skew.validate_at(&Vector::zeros(2)).is_ok());
        let bad = ok.clone().with_stream(Arc::new(|_: &Vector| Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])));
        assert!(matches!(bad.validate_at(&Vector::zeros(2)), Err(DiffusionError::NotSkewSymmetric { .. })));
        let neg = ok.with_covariance(Arc::new(|_: &Vector| -Matrix::identity(2, 2)));
        assert!(matches!(neg.validate_at(&Vector::zeros(2)), Err(DiffusionError::NotPositiveSemidefinite { .. })));
    }

    #[test]
    fn generalized_gibbs_requires_optimal_value() {
        let obj = half_sq(2);
        assert!(matches!(
            TargetMeasure::generalized_gibbs(&obj, 1.0, 0.5, None),
            Err(DiffusionError::MissingOptimalValue)
        ));
        let with_min = obj.clone().with_known_min(vec![0.0, 0.0], 0.0).unwrap();
        let t = TargetMeasure::generalized_gibbs(&with_min, 2.0, 0.5, None).unwrap();
        let x = Vector::from_vec(vec![1.0, 1.0]);
        // ∇[−2 (‖x‖²/2)^{1/2}] = −2·½·(‖x‖²/2)^{−1/2}·x
        let expected = &x * (-(0.5 * x.norm_squared()).powf(-0.5));
        assert!((t.grad_log_density(&x) - expected).amax() < 1e-12);
        assert!(TargetMeasure::generalized_gibbs(&obj, 1.0, 1.0, None).is_ok());
        assert!(TargetMeasure::generalized_gibbs(&obj, 1.0, 1.5, Some(0.0)).is_err());
    }

    #[test]
    fn fd_divergence_of_stream_field() {
        // c(x) = [[0, x0·x1], [−x0·x1, 0]] ⇒ ⟨∇,c⟩ = (x0, −x1).
        let c = |x: &Vector| Matrix::from_row_slice(2, 2, &[0.0, x[0] * x[1], -x[0] * x[1], 0.0]);
        let x = Vector::from_vec(vec![0.7, 1.9]);
        let div = fd_divergence(c, &x, 1e-5);
        assert!((div - Vector::from_vec(vec![0.7, -1.9])).amax() < 1e-8);
    }
}
