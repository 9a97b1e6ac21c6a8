//! Small dense helpers shared by the state and measure modules.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Mat2 = Matrix2<Complex64>;
pub type Mat4 = Matrix4<Complex64>;
pub type Vec4 = Vector4<Complex64>;

pub(crate) const EIG_EPS: f64 = 1e-15;
pub(crate) const EIG_MAX_ITER: usize = 10_000;

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `a ⊗ b` with `a` acting on the first (system) factor.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    Mat4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &Mat4) -> Result<[f64; 4]> {
    let eig = SymmetricEigen::try_new(*m, EIG_EPS, EIG_MAX_ITER)
        .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
    let mut ev = [0.0; 4];
    for (dst, v) in ev.iter_mut().zip(eig.eigenvalues.iter()) {
        *dst = *v;
    }
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// `½‖a - b‖₁`.
pub fn trace_distance(a: &Mat4, b: &Mat4) -> Result<f64> {
    let diff = a - b;
    let herm = (diff + diff.adjoint()) * c(0.5);
    Ok(0.5 * hermitian_eigenvalues(&herm)?.iter().map(|x| x.abs()).sum::<f64>())
}

pub(crate) fn hermiticity_error(m: &Mat4) -> f64 {
    (m - m.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max)
}
