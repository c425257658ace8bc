use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{nonnegative, BoundsError, Result};
use crate::provenance::Provenance;

/// Derivative coefficients of the diffusion coefficients entering the Stein factors.
///
/// Index `i−1` holds order `i` for `mu_b`, `mu_sigma`, `phi_sigma` (i = 1..4) and
/// `pi_sigma` (π̃_{i,0}(σ), i = 1..3); `pi_sigma_inv[i]` is π̃_{i,0}(σ⁻¹), i = 0..2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientConstants {
    pub mu_b: [f64; 4],
    pub mu_sigma: [f64; 4],
    pub phi_sigma: [f64; 4],
    pub pi_sigma: [f64; 3],
    pub pi_sigma_inv: [f64; 3],
    pub provenance: Provenance,
}

impl CoefficientConstants {
    pub fn validate(&self) -> Result<()> {
        let all = self.mu_b.iter().chain(&self.mu_sigma).chain(&self.phi_sigma).chain(&self.pi_sigma).chain(&self.pi_sigma_inv);
        for v in all {
            nonnegative(*v, "coefficient constant")?;
        }
        Ok(())
    }

    /// V_{i,n} = μ_i(b) + nμ_i(σ)² + φ_i(σ)².
    pub fn v(&self, i: usize, n: i32) -> Result<f64> {
        if !(1..=4).contains(&i) {
            return Err(BoundsError::MissingCoefficient(format!("V_{{{i},{n}}}")));
        }
        let k = i - 1;
        Ok(self.mu_b[k] + n as f64 * self.mu_sigma[k].powi(2) + self.phi_sigma[k].powi(2))
    }

    /// π̃_{a:b,0}(σ), 1 ≤ a ≤ b ≤ 3.
    pub fn pi_sigma_range(&self, a: usize, b: usize) -> f64 {
        self.pi_sigma[a - 1..b].iter().copied().fold(0.0, f64::max)
    }

    /// π̃_{a:b,0}(σ⁻¹), 0 ≤ a ≤ b ≤ 2.
    pub fn pi_sigma_inv_range(&self, a: usize, b: usize) -> f64 {
        self.pi_sigma_inv[a..=b].iter().copied().fold(0.0, f64::max)
    }
}

/// V_{i,n}, γ_{i,n}, θ_{i,n} keyed by "i,n".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemigroupConstantTable {
    pub n: u32,
    pub v: BTreeMap<String, f64>,
    pub gamma_c: BTreeMap<String, f64>,
    pub theta_c: BTreeMap<String, f64>,
}

fn key(i: usize, n: i32) -> String {
    format!("{i},{n}")
}

/// Ratio with 0/0 := 0 (vanishing higher-order coefficients).
fn ratio(num: f64, den: f64, what: &str) -> Result<f64> {
    if den > 0.0 {
        Ok(num / den)
    } else if num == 0.0 {
        Ok(0.0)
    } else {
        Err(BoundsError::MissingCoefficient(format!("{what}: zero denominator with nonzero numerator")))
    }
}

fn gamma_theta(c: &CoefficientConstants, i: usize, n: i32) -> Result<(f64, f64)> {
    let nf = n as f64;
    let v = |i, n| c.v(i, n);
    match (i, n) {
        (1, _) => Ok((1.0, nf * v(1, n - 2)?)),
        (2, _) => Ok((
            ratio(v(2, n - 2)?, nf * v(1, 2 * n - 2)?, "gamma_2")?,
            3.0 * nf * v(1, 2 * n - 2)? + nf * v(2, n - 2)?,
        )),
        (3, _) => Ok((
            ratio(15.0 * v(2, n - 2)? + 5.0 * v(3, n - 2)?, 4.0 * nf * v(1, 4 * n - 2)?, "gamma_3")?,
            7.0 * nf * v(1, 3 * n - 2)? + 10.0 * nf * v(2, n - 2)? + 3.0 * nf * v(3, n - 2)?,
        )),
        (4, 2) => Ok((
            ratio(v(4, 0)? + 6.0 * v(3, 0)? + 5.0 * v(2, 0)?, 16.0 * v(1, 6)?, "gamma_4")?,
            31.0 * v(1, 5)? + 27.0 * v(2, 2)? + 12.0 * v(3, 1)? + v(4, 0)?,
        )),
        _ => Err(BoundsError::MissingCoefficient(format!("gamma/theta_{{{i},{n}}} is only defined for i ≤ 3 or (4,2)"))),
    }
}

/// Entries used by the Stein factors plus the order-n rows (1,n), (2,n), (3,n).
const STEIN_ENTRIES: [(usize, i32); 8] = [(2, 2), (2, 3), (2, 4), (2, 6), (3, 2), (3, 3), (3, 4), (4, 2)];

pub fn semigroup_constants(coeffs: &CoefficientConstants, n: u32) -> Result<SemigroupConstantTable> {
    coeffs.validate()?;
    let mut table = SemigroupConstantTable { n, v: BTreeMap::new(), gamma_c: BTreeMap::new(), theta_c: BTreeMap::new() };
    let ni = n as i32;
    let rows = STEIN_ENTRIES.iter().copied().chain([(1, ni), (2, ni), (3, ni)]);
    for (i, m) in rows {
        let (g, t) = gamma_theta(coeffs, i, m)?;
        table.gamma_c.insert(key(i, m), g);
        table.theta_c.insert(key(i, m), t);
    }
    for i in 1..=4 {
        for m in [-2, -1, 0, 1, 2, 4, 5, 6, 10] {
            table.v.insert(key(i, m), coeffs.v(i, m)?);
        }
    }
    Ok(table)
}

impl SemigroupConstantTable {
    pub fn gamma(&self, i: usize, n: i32) -> Result<f64> {
        self.gamma_c.get(&key(i, n)).copied().ok_or_else(|| BoundsError::MissingCoefficient(format!("gamma_{{{i},{n}}}")))
    }

    pub fn theta(&self, i: usize, n: i32) -> Result<f64> {
        self.theta_c.get(&key(i, n)).copied().ok_or_else(|| BoundsError::MissingCoefficient(format!("theta_{{{i},{n}}}")))
    }
}
