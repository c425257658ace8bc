//! Objectives with derivative oracles and sampled smoothness coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{fd_step, fd_step_second, op_norm, symmetrize, uniform_in_ball, Matrix, Vector};
use crate::provenance::Provenance;
use crate::rng::stream_rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObjectiveError {
    #[error("no oracle for derivative of order {order}")]
    MissingOracle { order: usize },
    #[error("derivative order {0} is not supported (0..=4)")]
    UnsupportedOrder(usize),
    #[error("objective `{label}` returned a non-finite value")]
    NonFinite { label: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("gradient at the declared minimiser has norm {norm:.3e}")]
    NotStationary { norm: f64 },
    #[error("invalid sampling configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, ObjectiveError>;

/// Declared global minimiser.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnownMinimum {
    pub x: Vec<f64>,
    pub value: f64,
}

/// Objective f: ℝᵈ → ℝ with optional analytic derivative oracles.
#[derive(Clone)]
pub struct ObjectiveSpec {
    dim: usize,
    label: String,
    eval: Arc<dyn Fn(&Vector) -> f64 + Send + Sync>,
    grad: Option<Arc<dyn Fn(&Vector) -> Vector + Send + Sync>>,
    hess: Option<Arc<dyn Fn(&Vector) -> Matrix + Send + Sync>>,
    third_op_norm: Option<Arc<dyn Fn(&Vector) -> f64 + Send + Sync>>,
    fourth_op_norm: Option<Arc<dyn Fn(&Vector) -> f64 + Send + Sync>>,
    known_min: Option<KnownMinimum>,
    fd_step: Option<f64>,
}

impl fmt::Debug for ObjectiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveSpec")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .field("grad", &self.grad.is_some())
            .field("hess", &self.hess.is_some())
            .field("third_op_norm", &self.third_op_norm.is_some())
            .field("fourth_op_norm", &self.fourth_op_norm.is_some())
            .field("known_min", &self.known_min)
            .finish()
    }
}

/// Value returned by [`eval_with_fallback`].
#[derive(Debug, Clone, PartialEq)]
pub enum Derivative {
    Value(f64),
    Gradient(Vector),
    Hessian(Matrix),
    /// ‖∇ⁱf(x)‖_op for i ∈ {3, 4}.
    OpNorm(f64),
}

impl ObjectiveSpec {
    /// # Panics
    /// If `dim == 0`.
    pub fn new(
        dim: usize,
        label: impl Into<String>,
        eval: impl Fn(&Vector) -> f64 + Send + Sync + 'static,
    ) -> Self {
        assert!(dim >= 1, "objective dimension must be positive");
        Self {
            dim,
            label: label.into(),
            eval: Arc::new(eval),
            grad: None,
            hess: None,
            third_op_norm: None,
            fourth_op_norm: None,
            known_min: None,
            fd_step: None,
        }
    }

    pub fn with_gradient(mut self, g: impl Fn(&Vector) -> Vector + Send + Sync + 'static) -> Self {
        self.grad = Some(Arc::new(g));
        self
    }

    pub fn with_hessian(mut self, h: impl Fn(&Vector) -> Matrix + Send + Sync + 'static) -> Self {
        self.hess = Some(Arc::new(h));
        self
    }

    pub fn with_third_op_norm(mut self, t: impl Fn(&Vector) -> f64 + Send + Sync + 'static) -> Self {
        self.third_op_norm = Some(Arc::new(t));
        self
    }

    pub fn with_fourth_op_norm(mut self, t: impl Fn(&Vector) -> f64 + Send + Sync + 'static) -> Self {
        self.fourth_op_norm = Some(Arc::new(t));
        self
    }

    /// Fixed finite-difference step instead of cbrt(eps)·(1+‖x‖).
    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = Some(h);
        self
    }

    /// Declares (x*, f(x*)); rejects points where the gradient is not ≈ 0.
    pub fn with_known_min(mut self, x: Vec<f64>, value: f64) -> Result<Self> {
        let xv = Vector::from_vec(x.clone());
        let g = self.gradient(&xv)?;
        let tol = 1e-6 * (1.0 + value.abs() + xv.norm());
        if g.norm() > tol {
            return Err(ObjectiveError::NotStationary { norm: g.norm() });
        }
        self.known_min = Some(KnownMinimum { x, value });
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn known_min(&self) -> Option<&KnownMinimum> {
        self.known_min.as_ref()
    }

    pub fn has_gradient(&self) -> bool {
        self.grad.is_some()
    }

    pub fn has_hessian(&self) -> bool {
        self.hess.is_some()
    }

    fn check_dim<'a>(&self, x: &'a Vector) -> Result<&'a Vector> {
        if x.len() != self.dim {
            return Err(ObjectiveError::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(x)
    }

    fn non_finite(&self) -> ObjectiveError {
        ObjectiveError::NonFinite { label: self.label.clone() }
    }

    fn raw(&self, x: &Vector) -> Result<f64> {
        let v = (self.eval)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.non_finite())
        }
    }

    pub fn value(&self, x: &Vector) -> Result<f64> {
        self.raw(self.check_dim(x)?)
    }

    pub fn gradient(&self, x: &Vector) -> Result<Vector> {
        self.check_dim(x)?;
        let g = match &self.grad {
            Some(g) => g(x),
            None => self.fd_gradient(x)?,
        };
        if g.iter().all(|v| v.is_finite()) {
            Ok(g)
        } else {
            Err(self.non_finite())
        }
    }

    pub fn hessian(&self, x: &Vector) -> Result<Matrix> {
        self.check_dim(x)?;
        let h = match (&self.hess, &self.grad) {
            (Some(h), _) => h(x),
            (None, Some(_)) => self.fd_hessian_from_gradient(x)?,
            (None, None) => self.fd_hessian_from_value(x)?,
        };
        if h.iter().all(|v| v.is_finite()) {
            Ok(h)
        } else {
            Err(self.non_finite())
        }
    }

    /// ‖∇ⁱf(x)‖_op for i ∈ 0..=4 (|f| for i = 0).
    pub fn derivative_op_norm(&self, x: &Vector, order: usize) -> Result<f64> {
        match order {
            0 => Ok(self.value(x)?.abs()),
            1 => Ok(self.gradient(x)?.norm()),
            2 => Ok(op_norm(&self.hessian(x)?)),
            3 | 4 => {
                self.check_dim(x)?;
                let oracle = if order == 3 { &self.third_op_norm } else { &self.fourth_op_norm };
                let v = oracle.as_ref().ok_or(ObjectiveError::MissingOracle { order })?(x);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(self.non_finite())
                }
            }
            _ => Err(ObjectiveError::UnsupportedOrder(order)),
        }
    }

    fn step(&self, x: &Vector) -> f64 {
        self.fd_step.unwrap_or_else(|| fd_step(x))
    }

    fn fd_gradient(&self, x: &Vector) -> Result<Vector> {
        let h = self.step(x);
        let mut g = Vector::zeros(self.dim);
        let mut xp = x.clone();
        for i in 0..self.dim {
            xp[i] = x[i] + h;
            let fp = self.raw(&xp)?;
            xp[i] = x[i] - h;
            let fm = self.raw(&xp)?;
            xp[i] = x[i];
            g[i] = (fp - fm) / (2.0 * h);
        }
        Ok(g)
    }

    fn fd_hessian_from_gradient(&self, x: &Vector) -> Result<Matrix> {
        let grad = self.grad.as_ref().expect("gradient oracle present");
        let h = self.step(x);
        let mut m = Matrix::zeros(self.dim, self.dim);
        let mut xp = x.clone();
        for i in 0..self.dim {
            xp[i] = x[i] + h;
            let gp = grad(&xp);
            xp[i] = x[i] - h;
            let gm = grad(&xp);
            xp[i] = x[i];
            m.set_column(i, &((gp - gm) / (2.0 * h)));
        }
        Ok(symmetrize(&m))
    }

    fn fd_hessian_from_value(&self, x: &Vector) -> Result<Matrix> {
        let h = self.fd_step.unwrap_or_else(|| fd_step_second(x));
        let d = self.dim;
        let f0 = self.raw(x)?;
        let mut m = Matrix::zeros(d, d);
        let mut xp = x.clone();
        for i in 0..d {
            xp[i] = x[i] + h;
            let fp = self.raw(&xp)?;
            xp[i] = x[i] - h;
            let fm = self.raw(&xp)?;
            xp[i] = x[i];
            m[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
            for j in 0..i {
                let mut corner = |si: f64, sj: f64| {
                    xp[i] = x[i] + si * h;
                    xp[j] = x[j] + sj * h;
                    let v = self.raw(&xp);
                    xp[i] = x[i];
                    xp[j] = x[j];
                    v
                };
                let v = (corner(1.0, 1.0)? - corner(1.0, -1.0)? - corner(-1.0, 1.0)? + corner(-1.0, -1.0)?)
                    / (4.0 * h * h);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }
}

/// Derivative of order 0..=4: analytic oracle when present, central differences otherwise
/// (orders ≤ 2 only).
pub fn eval_with_fallback(obj: &ObjectiveSpec, x: &Vector, order: usize) -> Result<Derivative> {
    if !x.iter().all(|v| v.is_finite()) {
        return Err(obj.non_finite());
    }
    Ok(match order {
        0 => Derivative::Value(obj.value(x)?),
        1 => Derivative::Gradient(obj.gradient(x)?),
        2 => Derivative::Hessian(obj.hessian(x)?),
        3 | 4 => Derivative::OpNorm(obj.derivative_op_norm(x, order)?),
        _ => return Err(ObjectiveError::UnsupportedOrder(order)),
    })
}

/// Sampling plan for supremum estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SampleConfig {
    pub samples: usize,
    pub radius: f64,
    pub seed: u64,
    /// Fraction of pairs with y = x + δ, ‖δ‖ ≤ 0.1·radius; the rest draw y independently.
    pub local_fraction: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self { samples: 10_000, radius: 10.0, seed: 0, local_fraction: 0.5 }
    }
}

impl SampleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(ObjectiveError::InvalidConfig("samples must be positive".into()));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(ObjectiveError::InvalidConfig("radius must be positive and finite".into()));
        }
        if !(0.0..=1.0).contains(&self.local_fraction) {
            return Err(ObjectiveError::InvalidConfig("local_fraction must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Pairs closer than this are skipped as degenerate.
pub const DEGENERATE_PAIR: f64 = 1e-12;

/// Pair number `index` of the sampling plan; deterministic per index.
pub fn sample_pair(cfg: &SampleConfig, dim: usize, index: usize) -> (Vector, Vector) {
    use rand::Rng;
    let mut rng = stream_rng(cfg.seed, index as u64);
    let x = uniform_in_ball(&mut rng, dim, cfg.radius);
    let local: f64 = rng.random();
    let y = if local < cfg.local_fraction {
        &x + uniform_in_ball(&mut rng, dim, 0.1 * cfg.radius)
    } else {
        uniform_in_ball(&mut rng, dim, cfg.radius)
    };
    (x, y)
}

/// Point number `index` of the sampling plan; index 0 is the origin.
pub fn sample_point(cfg: &SampleConfig, dim: usize, index: usize) -> Vector {
    if index == 0 {
        return Vector::zeros(dim);
    }
    let mut rng = stream_rng(cfg.seed, index as u64);
    uniform_in_ball(&mut rng, dim, cfg.radius)
}

fn par_max(count: usize, f: impl Fn(usize) -> Result<f64> + Sync + Send) -> Result<f64> {
    (0..count).into_par_iter().map(f).try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Sampled μ̃_{1,n}(f) = max |f(x)−f(y)| / [(1+‖x‖ⁿ+‖y‖ⁿ)‖x−y‖].
pub fn estimate_pseudo_lipschitz(obj: &ObjectiveSpec, n: u32, cfg: &SampleConfig) -> Result<f64> {
    cfg.validate()?;
    par_max(cfg.samples, |i| {
        let (x, y) = sample_pair(cfg, obj.dim(), i);
        let dist = (&x - &y).norm();
        if dist < DEGENERATE_PAIR {
            return Ok(0.0);
        }
        let weight = 1.0 + x.norm().powi(n as i32) + y.norm().powi(n as i32);
        Ok((obj.value(&x)? - obj.value(&y)?).abs() / (weight * dist))
    })
}

/// Sampled π̃_{i,n}(f) = max ‖∇ⁱf(x)‖_op / (1+‖x‖ⁿ).
pub fn estimate_derivative_growth(obj: &ObjectiveSpec, i: usize, n: u32, cfg: &SampleConfig) -> Result<f64> {
    cfg.validate()?;
    if !(1..=4).contains(&i) {
        return Err(ObjectiveError::UnsupportedOrder(i));
    }
    par_max(cfg.samples, |k| {
        let x = sample_point(cfg, obj.dim(), k);
        Ok(obj.derivative_op_norm(&x, i)? / (1.0 + x.norm().powi(n as i32)))
    })
}

/// Sampled μ_i(f) = sup ‖∇ⁱf‖_op (i = 0: sup |f|).
pub fn estimate_lipschitz_coefficient(obj: &ObjectiveSpec, i: usize, cfg: &SampleConfig) -> Result<f64> {
    cfg.validate()?;
    par_max(cfg.samples, |k| obj.derivative_op_norm(&sample_point(cfg, obj.dim(), k), i))
}

/// Smoothness coefficients of f used by the Stein factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessEstimate {
    pub order_n: u32,
    pub mu_tilde_1n: f64,
    /// π̃_{i,n}(f), i ∈ 1..=4.
    pub pi_tilde: BTreeMap<u8, f64>,
    /// μ_i(f), i ∈ 0..=2.
    pub mu: BTreeMap<u8, f64>,
    pub sample_size: usize,
    pub sample_radius: f64,
    pub provenance: Provenance,
}

impl SmoothnessEstimate {
    /// Closed-form coefficients; `pi_tilde` lists π̃_{1..4,n}, `mu` lists μ_{0..2}.
    pub fn analytic(order_n: u32, mu_tilde_1n: f64, pi_tilde: [f64; 4], mu: [f64; 3]) -> Self {
        Self {
            order_n,
            mu_tilde_1n,
            pi_tilde: (1u8..).zip(pi_tilde).collect(),
            mu: (0u8..).zip(mu).collect(),
            sample_size: 0,
            sample_radius: f64::INFINITY,
            provenance: Provenance::Analytic,
        }
    }

    pub fn pi(&self, i: u8) -> Option<f64> {
        self.pi_tilde.get(&i).copied()
    }

    /// π̃_{a:b,n}(f) = max_{a≤i≤b} π̃_{i,n}(f).
    pub fn pi_range(&self, a: u8, b: u8) -> Option<f64> {
        (a..=b).map(|i| self.pi(i)).try_fold(0.0_f64, |acc, v| v.map(|v| acc.max(v)))
    }
}

/// Samples μ̃_{1,n}, π̃_{i,n} (orders with an oracle or FD fallback) and μ_{0..2}.
pub fn estimate_smoothness(obj: &ObjectiveSpec, n: u32, cfg: &SampleConfig) -> Result<SmoothnessEstimate> {
    let mu_tilde_1n = estimate_pseudo_lipschitz(obj, n, cfg)?;
    let mut pi_tilde = BTreeMap::new();
    for i in 1..=4usize {
        match estimate_derivative_growth(obj, i, n, cfg) {
            Ok(v) => {
                pi_tilde.insert(i as u8, v);
            }
            Err(ObjectiveError::MissingOracle { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let mut mu = BTreeMap::new();
    for i in 0..=2usize {
        mu.insert(i as u8, estimate_lipschitz_coefficient(obj, i, cfg)?);
    }
    Ok(SmoothnessEstimate {
        order_n: n,
        mu_tilde_1n,
        pi_tilde,
        mu,
        sample_size: cfg.samples,
        sample_radius: cfg.radius,
        provenance: Provenance::Fitted,
    })
}
