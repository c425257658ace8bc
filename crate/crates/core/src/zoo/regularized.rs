use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{check, AnalyticConstants, Dataset, Result, ZooEntry};
use crate::diffusion::{gibbs_diffusion, DiffusionCoefficients, TargetMeasure};
use crate::linalg::{log_grid, Matrix, Vector};
use crate::objective::ObjectiveSpec;

/// Per-datapoint loss ψ(r; y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// tanh((r−y)²).
    Sigmoid,
    /// 1 − tanh(y·r).
    SigmoidMargin,
    /// log(1 + (r−y)²).
    StudentT,
    /// −log(e^{−(r−y)²} + ε).
    BlakeZisserman {
        #[serde(default = "default_epsilon")]
        epsilon: f64,
    },
}

fn default_epsilon() -> f64 {
    0.01
}

impl LossKind {
    pub fn blake_zisserman() -> Self {
        LossKind::BlakeZisserman { epsilon: default_epsilon() }
    }

    /// (ψ, ψ′, ψ″) at r for outcome y.
    pub fn eval(&self, r: f64, y: f64) -> (f64, f64, f64) {
        match *self {
            LossKind::Sigmoid => {
                let u = r - y;
                let t = (u * u).tanh();
                let sech2 = 1.0 - t * t;
                (t, 2.0 * u * sech2, 2.0 * sech2 - 8.0 * u * u * sech2 * t)
            }
            LossKind::SigmoidMargin => {
                let t = (y * r).tanh();
                let sech2 = 1.0 - t * t;
                (1.0 - t, -y * sech2, 2.0 * y * y * sech2 * t)
            }
            LossKind::StudentT => {
                let u = r - y;
                let s = 1.0 + u * u;
                (s.ln(), 2.0 * u / s, 2.0 * (1.0 - u * u) / (s * s))
            }
            LossKind::BlakeZisserman { epsilon } => {
                let u = r - y;
                let e = (-u * u).exp();
                let den = e + epsilon;
                (-den.ln(), 2.0 * u * e / den, 2.0 * e / den - 4.0 * u * u * e * epsilon / (den * den))
            }
        }
    }
}

/// r(x) = ρ(‖x‖²/2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularizer {
    /// ρ(z) = λz.
    Ridge { lambda: f64 },
    /// ρ(z) = λ(√(1+z) − 1).
    PseudoHuber { lambda: f64 },
}

/// Fitted δ-constants of the regularizer conditions on a log grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaConstants {
    /// sup g₁(z)/z.
    pub delta_1: f64,
    /// sup 4g₁′(z)²·z/g₁(z).
    pub delta_2: f64,
    /// sup √max(0, −ρ′(0)zρ‴(z)) / ρ′(z).
    pub delta_3: f64,
}

impl Regularizer {
    pub fn lambda(&self) -> f64 {
        match *self {
            Regularizer::Ridge { lambda } | Regularizer::PseudoHuber { lambda } => lambda,
        }
    }

    /// (ρ, ρ′, ρ″, ρ‴) at z.
    pub fn rho(&self, z: f64) -> [f64; 4] {
        match *self {
            Regularizer::Ridge { lambda } => [lambda * z, lambda, 0.0, 0.0],
            Regularizer::PseudoHuber { lambda } => {
                let s = (1.0 + z).sqrt();
                [lambda * (s - 1.0), 0.5 * lambda / s, -0.25 * lambda / (s * s * s), 0.375 * lambda / (s * s * s * s * s)]
            }
        }
    }

    /// g_s(z) = ρ′(0)/ρ′(z/2) − s.
    pub fn g(&self, s: f64, z: f64) -> f64 {
        self.rho(0.0)[1] / self.rho(0.5 * z)[1] - s
    }

    /// g₁′(z).
    pub fn g1_prime(&self, z: f64) -> f64 {
        let [_, r1, r2, _] = self.rho(0.5 * z);
        -0.5 * self.rho(0.0)[1] * r2 / (r1 * r1)
    }

    /// g₁(z)/z, continuous at z = 0.
    pub fn g1_over_z(&self, z: f64) -> f64 {
        match *self {
            Regularizer::Ridge { .. } => 0.0,
            // √(1+z/2) − 1 = (z/2)/(√(1+z/2) + 1).
            Regularizer::PseudoHuber { .. } => 0.5 / ((1.0 + 0.5 * z).sqrt() + 1.0),
        }
    }

    /// δ₁, δ₂, δ₃ over z ∈ [1e−6, 1e6].
    pub fn delta_constants(&self) -> DeltaConstants {
        let rho0 = self.rho(0.0)[1];
        let mut out = DeltaConstants { delta_1: 0.0, delta_2: 0.0, delta_3: 0.0 };
        for z in log_grid(1e-6, 1e6, 2000) {
            let h = self.g1_over_z(z);
            out.delta_1 = out.delta_1.max(h);
            if h > 0.0 {
                out.delta_2 = out.delta_2.max(4.0 * self.g1_prime(z).powi(2) / h);
            }
            let [_, r1, _, r3] = self.rho(z);
            out.delta_3 = out.delta_3.max((-rho0 * z * r3).max(0.0).sqrt() / r1);
        }
        out
    }
}

fn projector(x: &Vector) -> Option<Matrix> {
    let r2 = x.norm_squared();
    (r2 > 0.0).then(|| x * x.transpose() / r2)
}

/// σ = (I − P) + P·√g₀(‖x‖²), a = I + P·g₁(‖x‖²), ⟨∇, a⟩ = x[(d−1)g₁(r²)/r² + 2g₁′(r²)], P = xxᵀ/‖x‖².
pub fn regularized_coefficients(reg: Regularizer, d: usize) -> DiffusionCoefficients {
    let id = move || Matrix::identity(d, d);
    DiffusionCoefficients::new(Arc::new(move |x: &Vector| match projector(x) {
        Some(p) => id() + p * (reg.g(0.0, x.norm_squared()).sqrt() - 1.0),
        None => id(),
    }))
    .with_covariance(Arc::new(move |x: &Vector| match projector(x) {
        Some(p) => id() + p * reg.g(1.0, x.norm_squared()),
        None => id(),
    }))
    .with_divergence(Arc::new(move |x: &Vector| {
        let z = x.norm_squared();
        x * ((d as f64 - 1.0) * reg.g1_over_z(z) + 2.0 * reg.g1_prime(z))
    }))
}

/// f(x) = (1/L)Σψ(⟨x, v_l⟩; y_l) + ρ(‖x‖²/2) with the radial diffusion design.
pub fn regularized_loss_example(loss: LossKind, data: &Dataset, reg: Regularizer, gamma: f64) -> Result<ZooEntry> {
    check("lambda", reg.lambda(), reg.lambda() > 0.0 && reg.lambda().is_finite(), "need λ > 0")?;
    check("gamma", gamma, gamma > 0.0 && gamma.is_finite(), "need γ > 0")?;
    if let LossKind::BlakeZisserman { epsilon } = loss {
        check("epsilon", epsilon, epsilon > 0.0 && epsilon.is_finite(), "need ε > 0")?;
    }
    let d = data.dim();
    let l = data.len() as f64;
    let vs: Arc<Vec<Vector>> = Arc::new(data.covariates.iter().map(|v| Vector::from_vec(v.clone())).collect());
    let ys: Arc<Vec<f64>> = Arc::new(data.outcomes.clone());
    let (v1, y1, v2, y2, v3, y3) = (vs.clone(), ys.clone(), vs.clone(), ys.clone(), vs, ys);
    let objective = ObjectiveSpec::new(d, "regularized_loss", move |x: &Vector| {
        let loss_part: f64 = v1.iter().zip(y1.iter()).map(|(v, y)| loss.eval(x.dot(v), *y).0).sum::<f64>() / l;
        loss_part + reg.rho(0.5 * x.norm_squared())[0]
    })
    .with_gradient(move |x: &Vector| {
        let mut g = x * reg.rho(0.5 * x.norm_squared())[1];
        for (v, y) in v2.iter().zip(y2.iter()) {
            g += v * (loss.eval(x.dot(v), *y).1 / l);
        }
        g
    })
    .with_hessian(move |x: &Vector| {
        let [_, r1, r2, _] = reg.rho(0.5 * x.norm_squared());
        let mut h = Matrix::identity(d, d) * r1 + x * x.transpose() * r2;
        for (v, y) in v3.iter().zip(y3.iter()) {
            h += v * v.transpose() * (loss.eval(x.dot(v), *y).2 / l);
        }
        h
    });
    let diffusion = gibbs_diffusion(&objective, &regularized_coefficients(reg, d), gamma)?
        .with_label(format!("regularized-designed({loss:?}, {reg:?}, γ={gamma})"));
    let target = TargetMeasure::gibbs(&objective, gamma)?;
    let notes = match reg {
        Regularizer::Ridge { .. } => "ridge: a = I, so the drift is −½∇f".to_string(),
        Regularizer::PseudoHuber { .. } => {
            let dc = reg.delta_constants();
            format!(
                "pseudo-Huber: a∇r = ρ′(0)x; δ₁ = {:.4}, δ₂ = {:.4}, δ₃ = {:.4}; K_m, L_m, R_m via friendly_distant",
                dc.delta_1, dc.delta_2, dc.delta_3
            )
        }
    };
    Ok(ZooEntry {
        name: "regularized_loss".into(),
        params: serde_json::json!({ "loss": loss, "regularizer": reg, "gamma": gamma, "points": data.len() }),
        objective,
        diffusion,
        target,
        gamma,
        analytic: AnalyticConstants::default(),
        notes,
    })
}
