//! Entanglement and nonlocality of two-qubit states: Wootters concurrence,
//! entanglement of formation and the maximal CHSH value, plus the closed
//! forms they take on the model states.

use nalgebra::{Matrix3, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eigenvalues, kron, Mat2, Mat4, EIG_EPS, EIG_MAX_ITER};
use crate::model::ModelParams;
use crate::state::{MeterBasis, PointerOverlaps, TwoQubitState};

/// Pauli matrices in the standard basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliSet {
    pub sx: Mat2,
    pub sy: Mat2,
    pub sz: Mat2,
}

impl PauliSet {
    pub fn standard() -> Self {
        let (o, l, i) = (c(0.0), c(1.0), Complex64::i());
        Self { sx: Mat2::new(o, l, l, o), sy: Mat2::new(o, -i, i, o), sz: Mat2::new(l, o, o, -l) }
    }

    /// `[σx, σy, σz]`.
    pub fn all(&self) -> [Mat2; 3] {
        [self.sx, self.sy, self.sz]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementReport {
    pub concurrence: f64,
    pub eof: f64,
    pub bell_max: f64,
    /// Sum of the two largest eigenvalues of `T Tᵀ`.
    pub m_rho: f64,
}

pub fn entanglement_report(state: &TwoQubitState) -> Result<EntanglementReport> {
    let concurrence = concurrence(state)?;
    let m_rho = horodecki_m(state)?;
    Ok(EntanglementReport { concurrence, eof: eof(concurrence)?, bell_max: 2.0 * m_rho.sqrt(), m_rho })
}

fn sy_sy() -> Mat4 {
    let sy = PauliSet::standard().sy;
    kron(&sy, &sy)
}

/// `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`.
pub fn spin_flip(state: &TwoQubitState) -> Mat4 {
    let y = sy_sy();
    y * state.matrix().conjugate() * y
}

/// Wootters concurrence `max(0, λ₁ - λ₂ - λ₃ - λ₄)`.
///
/// With `ρ = W W†` the `λᵢ` are the singular values of `Wᵀ (σy⊗σy) W`. This
/// avoids square roots of the noisy near-zero eigenvalues of `ρρ̃`, which
/// for rank-deficient states amplify roundoff from 1e-17 to 1e-9.
pub fn concurrence(state: &TwoQubitState) -> Result<f64> {
    let eig = SymmetricEigen::try_new(*state.matrix(), EIG_EPS, EIG_MAX_ITER)
        .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge in concurrence".into()))?;
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let floor = 64.0 * f64::EPSILON * top;
    let mut w = eig.eigenvectors;
    for (k, &ev) in eig.eigenvalues.iter().enumerate() {
        let s = if ev > floor { ev.sqrt() } else { 0.0 };
        w.column_mut(k).scale_mut(s);
    }
    let tau = w.transpose() * sy_sy() * w;
    let svd = tau
        .try_svd(false, false, EIG_EPS, EIG_MAX_ITER)
        .ok_or_else(|| Error::Numerical("SVD did not converge in concurrence".into()))?;
    Ok(wootters_combination(svd.singular_values.iter().copied().collect()))
}

fn wootters_combination(mut lambdas: Vec<f64>) -> f64 {
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let rest: f64 = lambdas[1..].iter().sum();
    (lambdas[0] - rest).max(0.0)
}

/// Square roots of the spectrum of `ρρ̃` from a general complex Schur
/// decomposition. Imaginary parts below 1e-10 and negative real parts
/// above -1e-10 are treated as noise; anything larger is an error.
pub fn spin_flip_spectrum(state: &TwoQubitState) -> Result<[f64; 4]> {
    let prod = state.matrix() * spin_flip(state);
    let schur = Schur::try_new(prod, EIG_EPS, EIG_MAX_ITER)
        .ok_or_else(|| Error::Numerical("Schur decomposition of rho*rho_tilde did not converge".into()))?;
    let ev =
        schur.eigenvalues().ok_or_else(|| Error::Numerical("Schur form of rho*rho_tilde is not triangular".into()))?;
    let mut out = [0.0; 4];
    for (dst, z) in out.iter_mut().zip(ev.iter()) {
        if z.im.abs() > 1e-10 || z.re < -1e-10 {
            return Err(Error::Numerical(format!(
                "eigenvalue {z} of rho*rho_tilde is not real and nonnegative; spectrum {:?}",
                ev.as_slice()
            )));
        }
        *dst = z.re.max(0.0).sqrt();
    }
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

/// Concurrence from [`spin_flip_spectrum`]. Independent of [`concurrence`]
/// but limited to about `√ε` accuracy on rank-deficient states.
pub fn concurrence_from_spectrum(state: &TwoQubitState) -> Result<f64> {
    Ok(wootters_combination(spin_flip_spectrum(state)?.to_vec()))
}

/// Binary entropy in bits of `(1 - y, y)` for `y <= 1/2`.
fn binary_entropy_small(y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    let big = -(1.0 - y) * (-y).ln_1p();
    (big - y * y.ln()) / std::f64::consts::LN_2
}

/// Entanglement of formation `h((1 + √(1-c²))/2)`.
pub fn eof(conc: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&conc) {
        return Err(Error::Domain(format!("concurrence must lie in [0, 1], got {conc}")));
    }
    let conc = conc.clamp(0.0, 1.0);
    let root = (1.0 - conc * conc).sqrt();
    // 1 - x = (1 - √(1-c²))/2 without the cancellation.
    let small = conc * conc / (2.0 * (1.0 + root));
    Ok(binary_entropy_small(small))
}

/// `T[(m, n)] = tr(ρ σ_n ⊗ σ_m)`, `n` on the system and `m` on the meter.
pub fn correlation_matrix(state: &TwoQubitState) -> Matrix3<f64> {
    let paulis = PauliSet::standard().all();
    Matrix3::from_fn(|m, n| (state.matrix() * kron(&paulis[n], &paulis[m])).trace().re)
}

/// `M(ρ)`: sum of the two largest eigenvalues of `T Tᵀ`.
pub fn horodecki_m(state: &TwoQubitState) -> Result<f64> {
    let t = correlation_matrix(state);
    let eig = SymmetricEigen::try_new(t * t.transpose(), EIG_EPS, EIG_MAX_ITER)
        .ok_or_else(|| Error::Numerical("eigensolver did not converge for T T^T".into()))?;
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok((ev[0] + ev[1]).max(0.0))
}

/// Maximal CHSH value `2√M(ρ)`.
pub fn bell_max(state: &TwoQubitState) -> Result<f64> {
    Ok(2.0 * horodecki_m(state)?.sqrt())
}

/// `C = exp(Γ₁₂)·√(1-P²)/P` from the overlaps.
pub fn concurrence_from_overlaps(ov: &PointerOverlaps) -> f64 {
    if ov.is_degenerate() {
        return 0.0;
    }
    ov.coherence_ratio() * ov.q()
}

/// `2√(1 + C² + E² - P²)` from the overlaps, with `E² - P²` formed as
/// `P²·expm1(2(Γ₁₂ - ln P))`.
pub fn bell_max_from_overlaps(ov: &PointerOverlaps) -> f64 {
    let conc = concurrence_from_overlaps(ov);
    let e2_minus_p2 = (2.0 * ov.ln_p).exp() * (2.0 * (ov.gamma12 - ov.ln_p)).exp_m1();
    2.0 * (1.0 + conc * conc + e2_minus_p2).sqrt()
}

pub fn concurrence_closed(params: &ModelParams, t: f64) -> Result<f64> {
    Ok(concurrence_from_overlaps(&PointerOverlaps::at(params, t)?))
}

pub fn bell_max_closed(params: &ModelParams, t: f64) -> Result<f64> {
    Ok(bell_max_from_overlaps(&PointerOverlaps::at(params, t)?))
}

/// `-tr(ρ σ_y^S ⊗ σ_y^M(t))` with `σ_y^M(t) = i(|1̃⟩⟨0̃| - |0̃⟩⟨1̃|)` built
/// from the meter basis vectors.
pub fn concurrence_expectation(state: &TwoQubitState, basis: &MeterBasis) -> f64 {
    let [e0, e1] = basis.orthonormal_vectors();
    let i = Complex64::i();
    let sy_meter = Mat2::from_fn(|a, b| i * (e1[a] * e0[b].conj() - e0[a] * e1[b].conj()));
    let sy_system = PauliSet::standard().sy;
    -(state.matrix() * kron(&sy_system, &sy_meter)).trace().re
}

/// Smallest eigenvalue; a negative value flags a matrix that is not a state.
pub fn min_eigenvalue(state: &TwoQubitState) -> Result<f64> {
    Ok(hermitian_eigenvalues(state.matrix())?[0])
}
