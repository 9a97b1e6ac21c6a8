use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::lindblad::{reservoir_squeeze, FockBlockState};
use crate::fock::vector::{fock_overlap, squeezed_coherent_with_tolerance, FockVector};
use crate::linalg::{c, Mat4};
use crate::model::{alpha_tilde, Level, ModelParams};
use crate::state::{TwoQubitState, DEGENERATE_OVERLAP};

/// Largest leakage accepted by [`reduce_to_qubits`].
pub const MAX_LEAKAGE: f64 = 0.01;

/// Negative eigenvalues down to this are integration error, not a failure.
const EIGENVALUE_FLOOR: f64 = -1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub state: TwoQubitState,
    /// `1 - tr` of the projected matrix before renormalization.
    pub leakage: f64,
    /// `⟨ψ₁|ψ₂⟩` of the numerically built pointer states.
    pub pointer_overlap: Complex64,
}

/// Orthonormal pointer basis `{|0̃⟩, |1̃⟩}` built in the number basis. A
/// single vector is returned when the pointers coincide.
pub fn pointer_basis(params: &ModelParams, t: f64, d: usize, max_loss: f64) -> Result<(Vec<FockVector>, Complex64)> {
    let eps = reservoir_squeeze(params);
    let mut pointers = Vec::with_capacity(2);
    for n in Level::BOTH {
        let a = alpha_tilde(params, t, n)?;
        pointers.push(squeezed_coherent_with_tolerance(a, eps, d, max_loss)?.normalized());
    }
    let e0 = pointers[0].clone();
    let ov = fock_overlap(&e0, &pointers[1])?;
    if ov.norm() >= DEGENERATE_OVERLAP {
        return Ok((vec![e0], ov));
    }
    let mut e1 = pointers[1].clone();
    for (x, y) in e1.amplitudes.iter_mut().zip(&e0.amplitudes) {
        *x -= ov * y;
    }
    Ok((vec![e0, e1.normalized()], ov))
}

/// `⟨a|B|b⟩` for a row-major `d×d` block.
fn sandwich(a: &FockVector, block: &[Complex64], b: &FockVector) -> Complex64 {
    let d = a.cutoff();
    let mut acc = Complex64::default();
    for i in 0..d {
        let row = &block[i * d..(i + 1) * d];
        let inner: Complex64 = row.iter().zip(&b.amplitudes).map(|(x, y)| x * y).sum();
        acc += a.amplitudes[i].conj() * inner;
    }
    acc
}

/// Projects every block onto the pointer span at the state's time.
pub fn reduce_to_qubits(state: &FockBlockState, params: &ModelParams) -> Result<Reduction> {
    reduce_with_tolerance(state, params, crate::fock::vector::MAX_TRUNCATION_LOSS)
}

/// [`reduce_to_qubits`] with a caller-chosen truncation budget for the
/// pointer states.
pub fn reduce_with_tolerance(state: &FockBlockState, params: &ModelParams, max_loss: f64) -> Result<Reduction> {
    let (basis, ov) = pointer_basis(params, state.time, state.cutoff, max_loss)?;
    let mut m = Mat4::zeros();
    for n in Level::BOTH {
        for mm in Level::BOTH {
            let block = state.block(n, mm);
            for (a, ea) in basis.iter().enumerate() {
                for (b, eb) in basis.iter().enumerate() {
                    m[(2 * n.index() + a, 2 * mm.index() + b)] = sandwich(ea, block, eb);
                }
            }
        }
    }
    let m = (m + m.adjoint()) * c(0.5);
    let tr = m.trace().re;
    let leakage = 1.0 - tr;
    if leakage.is_nan() || leakage > MAX_LEAKAGE {
        return Err(Error::ReductionUnreliable { leakage, limit: MAX_LEAKAGE });
    }
    let state = TwoQubitState::with_eigenvalue_floor(m / c(tr), EIGENVALUE_FLOOR)?;
    Ok(Reduction { state, leakage, pointer_overlap: ov })
}
