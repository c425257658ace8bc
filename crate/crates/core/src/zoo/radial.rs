//! Exact derivative suprema for radial functions x ↦ g(1 + ‖x‖²/2).
//!
//! Along a unit direction u with B = ⟨x, u⟩ ∈ [−r, r], q(t) = q + tB + t²/2, so
//! h' = g₁B, h'' = g₂B² + g₁, h''' = g₃B³ + 3g₂B, h'''' = g₄B⁴ + 6g₃B² + 3g₂.
//! The operator norm of a symmetric tensor is sup_u |∇ᵏ[u,…,u]|.

use crate::linalg::log_grid;

/// Profile g(q) of a radial function, q = 1 + ‖x‖²/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// coef·q^p.
    Power { coef: f64, p: f64 },
    /// coef·ln q.
    Log { coef: f64 },
}

impl Profile {
    /// [g, g′, g″, g‴, g⁗] at q.
    pub fn derivs(&self, q: f64) -> [f64; 5] {
        let mut out = [0.0; 5];
        match *self {
            Profile::Power { coef, p } => {
                let mut falling = coef;
                for (j, o) in out.iter_mut().enumerate() {
                    *o = falling * q.powf(p - j as f64);
                    falling *= p - j as f64;
                }
            }
            Profile::Log { coef } => {
                out[0] = coef * q.ln();
                let mut fact = 1.0;
                for j in 1..5 {
                    let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                    out[j] = sign * coef * fact * q.powi(-(j as i32));
                    fact *= j as f64;
                }
            }
        }
        out
    }

    /// Value at radius r.
    pub fn at_radius(&self, r: f64) -> f64 {
        self.derivs(1.0 + 0.5 * r * r)[0]
    }

    /// d/dr of the value at radius r.
    pub fn radial_slope(&self, r: f64) -> f64 {
        self.derivs(1.0 + 0.5 * r * r)[1] * r
    }
}

/// ‖∇ᵏ[g(1+‖x‖²/2)]‖_op at ‖x‖ = r in dimension `dim` (k ≤ 4).
pub fn radial_op_norm(profile: &Profile, k: usize, r: f64, dim: usize) -> f64 {
    let g = profile.derivs(1.0 + 0.5 * r * r);
    let r2 = r * r;
    // In one dimension the only unit directions are ±1, so B = ±r.
    let interior = dim > 1;
    match k {
        0 => g[0].abs(),
        1 => g[1].abs() * r,
        2 => {
            let edge = (g[2] * r2 + g[1]).abs();
            if interior {
                edge.max(g[1].abs())
            } else {
                edge
            }
        }
        3 => {
            let h = |b: f64| (g[3] * b * b * b + 3.0 * g[2] * b).abs();
            let mut best = h(r);
            if interior && g[3] != 0.0 {
                let b2 = -g[2] / g[3];
                if b2 > 0.0 && b2 <= r2 {
                    best = best.max(h(b2.sqrt()));
                }
            }
            best
        }
        4 => {
            let h = |w: f64| (g[4] * w * w + 6.0 * g[3] * w + 3.0 * g[2]).abs();
            let mut best = h(r2);
            if interior {
                best = best.max(h(0.0));
                if g[4] != 0.0 {
                    let w = -3.0 * g[3] / g[4];
                    if w > 0.0 && w <= r2 {
                        best = best.max(h(w));
                    }
                }
            }
            best
        }
        _ => f64::NAN,
    }
}

const R_LO: f64 = 1e-6;
const R_HI: f64 = 1e8;
const GRID: usize = 4000;

/// sup_{r≥0} φ(r) over a log grid with golden-section refinement; ∞ when φ still
/// grows over the last decade of the grid.
pub fn sup_over_radius(phi: impl Fn(f64) -> f64) -> f64 {
    let mut rs = vec![0.0];
    rs.extend(log_grid(R_LO, R_HI, GRID));
    let vals: Vec<f64> = rs.iter().map(|r| phi(*r)).collect();
    let last = vals[vals.len() - 1];
    let decade_before = phi(R_HI / 10.0);
    if last > decade_before * (1.0 + 1e-6) + 1e-300 {
        return f64::INFINITY;
    }
    let (i, &v) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is nonempty");
    if i == 0 || i + 1 == rs.len() {
        return v;
    }
    let (mut a, mut b) = (rs[i - 1], rs[i + 1]);
    let ratio = 0.5 * (5.0_f64.sqrt() - 1.0);
    for _ in 0..100 {
        let c = b - ratio * (b - a);
        let d = a + ratio * (b - a);
        if phi(c) >= phi(d) {
            b = d;
        } else {
            a = c;
        }
    }
    v.max(phi(0.5 * (a + b)))
}

/// sup_x ‖∇ᵏ f(x)‖_op / (1 + ‖x‖ⁿ) (unweighted when `weight_n` is None).
pub fn radial_sup(profile: &Profile, k: usize, weight_n: Option<u32>, dim: usize) -> f64 {
    sup_over_radius(|r| {
        let v = radial_op_norm(profile, k, r, dim);
        match weight_n {
            Some(n) => v / (1.0 + r.powi(n as i32)),
            None => v,
        }
    })
}

/// sup |h(r₁) − h(r₂)| / ((1 + r₁ⁿ + r₂ⁿ)|r₁ − r₂|) for a radial h; pairs on the same ray
/// minimise ‖x − y‖ at fixed norms, and the diagonal limit uses |h′(r)|.
pub fn radial_pseudo_lipschitz(h: impl Fn(f64) -> f64, dh: impl Fn(f64) -> f64, n: u32) -> f64 {
    let w = |r: f64| r.powi(n as i32);
    let diag = sup_over_radius(|r| dh(r).abs() / (1.0 + 2.0 * w(r)));
    let mut rs = vec![0.0];
    rs.extend(log_grid(1e-3, 1e6, 600));
    let vals: Vec<f64> = rs.iter().map(|r| h(*r)).collect();
    let mut best = diag;
    for i in 0..rs.len() {
        for j in 0..i {
            let q = (vals[i] - vals[j]).abs() / ((1.0 + w(rs[i]) + w(rs[j])) * (rs[i] - rs[j]));
            best = best.max(q);
        }
    }
    best
}
