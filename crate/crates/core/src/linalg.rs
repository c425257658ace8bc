//! Vector/matrix aliases, oracle types and small dense linear-algebra helpers.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// x ↦ scalar oracle.
pub type ScalarField = Arc<dyn Fn(&Vector) -> f64 + Send + Sync>;
/// x ↦ vector oracle.
pub type VectorField = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;
/// x ↦ matrix oracle.
pub type MatrixField = Arc<dyn Fn(&Vector) -> Matrix + Send + Sync>;

/// Central-difference step cbrt(eps)·(1+‖x‖).
pub fn fd_step(x: &Vector) -> f64 {
    f64::EPSILON.cbrt() * (1.0 + x.norm())
}

/// Step eps^{1/4}·(1+‖x‖) for second differences of a scalar.
pub fn fd_step_second(x: &Vector) -> f64 {
    f64::EPSILON.powf(0.25) * (1.0 + x.norm())
}

/// Largest singular value.
pub fn op_norm(m: &Matrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    if m.nrows() == m.ncols() && is_symmetric(m, 0.0) {
        return SymmetricEigen::new(m.clone())
            .eigenvalues
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()));
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |acc, v| acc.max(*v))
}

pub fn frobenius(m: &Matrix) -> f64 {
    m.norm()
}

pub fn is_symmetric(m: &Matrix, tol: f64) -> bool {
    m.nrows() == m.ncols() && (m - m.transpose()).amax() <= tol
}

pub fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

/// Eigenvalues of the symmetric part, ascending.
pub fn sym_eigenvalues(m: &Matrix) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(symmetrize(m)).eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

pub fn max_sym_eigenvalue(m: &Matrix) -> f64 {
    sym_eigenvalues(m).last().copied().unwrap_or(0.0)
}

/// Principal square root of a symmetric PSD matrix; eigenvalues in [−tol, 0) clamp to zero.
/// Returns the most negative eigenvalue on failure.
pub fn psd_sqrt(m: &Matrix, tol: f64) -> Result<Matrix, f64> {
    let eig = SymmetricEigen::new(symmetrize(m));
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -tol {
        return Err(min);
    }
    let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    Ok(&eig.eigenvectors * Matrix::from_diagonal(&roots) * eig.eigenvectors.transpose())
}

pub fn standard_normal_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    Vector::from_fn(dim, |_, _| rng.sample(StandardNormal))
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    loop {
        let v = standard_normal_vector(rng, dim);
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Uniform draw from the ball of the given radius.
pub fn uniform_in_ball<R: Rng + ?Sized>(rng: &mut R, dim: usize, radius: f64) -> Vector {
    let u: f64 = rng.random();
    unit_vector(rng, dim) * (radius * u.powf(1.0 / dim as f64))
}

/// n!! with the conventions (−1)!! = 0!! = 1.
pub fn double_factorial(n: i64) -> f64 {
    let mut acc = 1.0;
    let mut k = n;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

/// Log-spaced grid of `count` points on [lo, hi].
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}
