use serde::{Deserialize, Serialize};

use super::{Result, VerifyError};

/// ϱ(t) = A·e^{−kt/2}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialRate {
    pub amplitude: f64,
    pub k: f64,
}

impl ExponentialRate {
    pub fn new(amplitude: f64, k: f64) -> Self {
        Self { amplitude, k }
    }

    pub fn at(&self, t: f64) -> f64 {
        self.amplitude * (-0.5 * self.k * t).exp()
    }
}

/// L1 (and optionally L2) Wasserstein rates with the relative rates ϱ̃₁, ϱ̃₂.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateModel {
    pub rho1: ExponentialRate,
    pub rho2: Option<ExponentialRate>,
    pub source: String,
}

impl RateModel {
    pub fn l1_only(rho1: ExponentialRate, source: impl Into<String>) -> Self {
        Self { rho1, rho2: None, source: source.into() }
    }

    pub fn with_l2(rho1: ExponentialRate, rho2: ExponentialRate, source: impl Into<String>) -> Self {
        Self { rho1, rho2: Some(rho2), source: source.into() }
    }

    /// ϱ_p(t) = e^{−kt/2}. An L2 rate also bounds the L1 distance (W₁ ≤ W₂).
    pub fn uniform(p: u8, k: f64, source: impl Into<String>) -> Self {
        let rate = ExponentialRate::new(1.0, k);
        if p == 2 {
            Self::with_l2(rate, rate, source)
        } else {
            Self::l1_only(rate, source)
        }
    }

    /// Highest order p with a certified rate.
    pub fn p(&self) -> u8 {
        if self.rho2.is_some() {
            2
        } else {
            1
        }
    }

    pub fn amplitude(&self) -> f64 {
        self.rho1.amplitude
    }

    pub fn k(&self) -> f64 {
        self.rho1.k
    }

    pub fn rho1(&self, t: f64) -> f64 {
        self.rho1.at(t)
    }

    pub fn rho2(&self, t: f64) -> Result<f64> {
        self.rho2.map(|r| r.at(t)).ok_or(VerifyError::MissingL2Rate)
    }

    /// ϱ̃₁(t) = log(ϱ₂(t)/ϱ₁(t)).
    pub fn relative_1(&self, t: f64) -> Result<f64> {
        let r2 = self.rho2.ok_or(VerifyError::MissingL2Rate)?;
        Ok(r2.amplitude.ln() - self.rho1.amplitude.ln() + 0.5 * (self.rho1.k - r2.k) * t)
    }

    /// ϱ̃₂(t) = log(ϱ₁(t)/[ϱ₁(0)ϱ₂(t)]) / log(ϱ₁(t)/ϱ₁(0)), in closed form
    /// [log A₂ + (k₁−k₂)t/2]/(k₁t/2) for exponential rates (limit value at t = 0).
    pub fn relative_2(&self, t: f64) -> Result<f64> {
        let r2 = self.rho2.ok_or(VerifyError::MissingL2Rate)?;
        let numerator = r2.amplitude.ln() + 0.5 * (self.rho1.k - r2.k) * t;
        let denominator = 0.5 * self.rho1.k * t;
        if t == 0.0 {
            return Ok(match numerator.partial_cmp(&0.0) {
                Some(std::cmp::Ordering::Greater) => f64::INFINITY,
                Some(std::cmp::Ordering::Less) => f64::NEG_INFINITY,
                _ => (self.rho1.k - r2.k) / self.rho1.k,
            });
        }
        Ok(numerator / denominator)
    }

    /// ϱ̃_r(t), r ∈ {1, 2}.
    pub fn relative(&self, r: u8, t: f64) -> Result<f64> {
        match r {
            1 => self.relative_1(t),
            2 => self.relative_2(t),
            _ => Err(VerifyError::InvalidParameter(format!("r must be 1 or 2, got {r}"))),
        }
    }
}
