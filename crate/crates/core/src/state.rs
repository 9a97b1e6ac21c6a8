//! The 4×4 system–meter density matrix in the orthonormalized pointer basis.
//!
//! Basis order is `{|1⟩|0̃⟩, |1⟩|1̃⟩, |2⟩|0̃⟩, |2⟩|1̃⟩}` with
//! `|0̃⟩ = |-α̃,ε⟩` and `|1̃⟩ = (|α̃,ε⟩ - P|-α̃,ε⟩)/√(1-P²)`. In this basis
//! the pointer states have coordinates `(1, 0)` and `(P, q)`, `q = √(1-P²)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eigenvalues, hermiticity_error, Mat2, Mat4, Vec4};
use crate::model::{gamma12, ln_overlap_p, ModelParams};

/// Overlaps above this are treated as a single pointer state.
pub const DEGENERATE_OVERLAP: f64 = 1.0 - 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    m: Mat4,
}

impl TwoQubitState {
    /// Validates Hermiticity and unit trace to 1e-12 and a smallest
    /// eigenvalue of at least -1e-10.
    pub fn new(m: Mat4) -> Result<Self> {
        Self::with_eigenvalue_floor(m, -1e-10)
    }

    /// As [`TwoQubitState::new`] with a caller-chosen floor on the smallest
    /// eigenvalue; used for matrices carrying integration error.
    pub fn with_eigenvalue_floor(m: Mat4, floor: f64) -> Result<Self> {
        let herm = hermiticity_error(&m);
        if herm > 1e-12 {
            return Err(Error::Domain(format!("matrix is not Hermitian (error {herm:.2e})")));
        }
        let tr = m.trace();
        if (tr - c(1.0)).norm() > 1e-12 {
            return Err(Error::Domain(format!("trace is {tr}, expected 1")));
        }
        let lo = hermitian_eigenvalues(&m)?[0];
        if lo < floor {
            return Err(Error::Domain(format!("smallest eigenvalue {lo:.3e} is negative")));
        }
        Ok(Self { m })
    }

    /// Wraps a matrix without checking it; used for synthetic inputs.
    pub fn from_matrix_unchecked(m: Mat4) -> Self {
        Self { m }
    }

    /// `|ψ⟩⟨ψ|` for the normalized `psi`.
    pub fn pure(psi: &Vec4) -> Result<Self> {
        let n = psi.norm();
        if n == 0.0 {
            return Err(Error::Domain("zero state vector".into()));
        }
        let v = psi / c(n);
        Ok(Self { m: v * v.adjoint() })
    }

    pub fn maximally_mixed() -> Self {
        Self { m: Mat4::identity() * c(0.25) }
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.m
    }

    pub fn eigenvalues(&self) -> Result<[f64; 4]> {
        hermitian_eigenvalues(&self.m)
    }

    /// `(U⊗V) ρ (U⊗V)†`.
    pub fn conjugated(&self, u: &Mat4) -> Self {
        Self { m: u * self.m * u.adjoint() }
    }
}

/// Coordinates of the two pointer states in the orthonormal meter basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeterBasis {
    pub p: f64,
    pub c0_minus: Complex64,
    pub c1_minus: Complex64,
    pub c0_plus: Complex64,
    pub c1_plus: Complex64,
}

impl MeterBasis {
    fn from_overlap(p: f64, q: f64) -> Self {
        Self { p, c0_minus: c(1.0), c1_minus: c(0.0), c0_plus: c(p), c1_plus: c(q) }
    }

    /// The `t → 0` limit where both pointer states coincide with `|0̃⟩`.
    pub fn degenerate_limit() -> Self {
        Self::from_overlap(1.0, 0.0)
    }

    pub fn is_degenerate(&self) -> bool {
        self.p >= DEGENERATE_OVERLAP
    }

    /// Coordinates of `|0̃⟩` and `|1̃⟩` rebuilt from the pointer coordinates
    /// by Gram–Schmidt. In the degenerate limit `|1̃⟩` is the orthogonal
    /// complement of `|0̃⟩`.
    pub fn orthonormal_vectors(&self) -> [[Complex64; 2]; 2] {
        let e0 = [self.c0_minus, self.c1_minus];
        let ov = e0[0].conj() * self.c0_plus + e0[1].conj() * self.c1_plus;
        let raw = [self.c0_plus - ov * e0[0], self.c1_plus - ov * e0[1]];
        let n = (raw[0].norm_sqr() + raw[1].norm_sqr()).sqrt();
        if n < 1e-300 {
            return [e0, [-e0[1].conj(), e0[0].conj()]];
        }
        [e0, [raw[0] / n, raw[1] / n]]
    }
}

/// Scalar inputs of the analytic state at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerOverlaps {
    /// `ln P`; kept separately because `P` underflows long before the
    /// ratio `exp(Γ₁₂)/P` does.
    pub ln_p: f64,
    /// `Γ₁₂`.
    pub gamma12: f64,
}

impl PointerOverlaps {
    pub fn at(params: &ModelParams, t: f64) -> Result<Self> {
        Ok(Self { ln_p: ln_overlap_p(params, t)?, gamma12: gamma12(params, t)? })
    }

    /// Synthetic overlaps with `P = p`, `exp(Γ₁₂) = e`.
    pub fn from_values(p: f64, e: f64) -> Self {
        Self { ln_p: p.ln(), gamma12: e.ln() }
    }

    pub fn p(&self) -> f64 {
        self.ln_p.exp()
    }

    /// `√(1 - P²)`, accurate when `P` is close to 1.
    pub fn q(&self) -> f64 {
        (-(2.0 * self.ln_p).exp_m1()).max(0.0).sqrt()
    }

    /// `exp(Γ₁₂)`.
    pub fn coherence(&self) -> f64 {
        self.gamma12.exp()
    }

    /// `exp(Γ₁₂)/P` without forming either factor.
    pub fn coherence_ratio(&self) -> f64 {
        (self.gamma12 - self.ln_p).exp()
    }

    pub fn is_degenerate(&self) -> bool {
        self.p() >= DEGENERATE_OVERLAP
    }
}

pub fn meter_basis(params: &ModelParams, t: f64) -> Result<MeterBasis> {
    let ov = PointerOverlaps::at(params, t)?;
    if ov.is_degenerate() {
        return Err(Error::DegenerateBasis { overlap: ov.p() });
    }
    Ok(MeterBasis::from_overlap(ov.p(), ov.q()))
}

/// Places each block `ρ_nm e^{Γ_nm} |α̃_n⟩⟨α̃_m| / ⟨α̃_m|α̃_n⟩` in the 4×4
/// matrix. A degenerate basis yields the product state `ρ0 ⊗ |0̃⟩⟨0̃|`.
pub fn assemble_from_overlaps(rho0: &Mat2, ov: &PointerOverlaps) -> TwoQubitState {
    let mut m = Mat4::zeros();
    let (r11, r12, r21, r22) = (rho0[(0, 0)], rho0[(0, 1)], rho0[(1, 0)], rho0[(1, 1)]);
    let e = ov.coherence();
    if ov.is_degenerate() {
        m[(0, 0)] = r11;
        m[(2, 2)] = r22;
        m[(0, 2)] = r12 * e;
        m[(2, 0)] = r21 * e;
        return TwoQubitState::from_matrix_unchecked(m);
    }
    let (p, q) = (ov.p(), ov.q());
    let ratio = ov.coherence_ratio();
    m[(0, 0)] = r11;
    m[(2, 2)] = r22 * (p * p);
    m[(2, 3)] = r22 * (p * q);
    m[(3, 2)] = r22 * (p * q);
    m[(3, 3)] = r22 * (q * q);
    m[(0, 2)] = r12 * e;
    m[(0, 3)] = r12 * (ratio * q);
    m[(2, 0)] = r21 * e;
    m[(3, 0)] = r21 * (ratio * q);
    TwoQubitState::from_matrix_unchecked(m)
}

/// The analytic system–meter state at time `t`.
pub fn assemble_rho(params: &ModelParams, t: f64) -> Result<TwoQubitState> {
    let ov = PointerOverlaps::at(params, t)?;
    Ok(assemble_from_overlaps(&params.rho0, &ov))
}

/// `tr ρ²`.
pub fn purity(state: &TwoQubitState) -> f64 {
    let m = state.matrix();
    // tr(ρ²) = Σ|ρ_ij|² for Hermitian ρ.
    m.iter().map(|x| x.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::trace_distance;

    fn params(alpha0: f64, r: f64) -> ModelParams {
        ModelParams::new(alpha0, 1.0, r, 0.0).unwrap()
    }

    #[test]
    fn basis_normalization_and_overlap() {
        for t in [0.05, 0.5, 3.0] {
            let b = meter_basis(&params(2.0, 1.0), t).unwrap();
            assert!((b.c0_minus.norm_sqr() + b.c1_minus.norm_sqr() - 1.0).abs() < 1e-12);
            assert!((b.c0_plus.norm_sqr() + b.c1_plus.norm_sqr() - 1.0).abs() < 1e-12);
            let ov = b.c0_minus * b.c0_plus.conj() + b.c1_minus * b.c1_plus.conj();
            assert!((ov - c(b.p)).norm() < 1e-12);
        }
    }

    #[test]
    fn orthogonal_limit_at_large_amplitude() {
        let b = meter_basis(&params(100.0, 0.0), 10.0).unwrap();
        assert!(b.c0_plus.norm() < 1e-300);
        assert_eq!(b.c1_plus, c(1.0));
    }

    #[test]
    fn degenerate_basis_at_t0() {
        let err = meter_basis(&params(2.0, 1.0), 0.0).unwrap_err();
        assert!(matches!(err, Error::DegenerateBasis { .. }));
    }

    #[test]
    fn initial_state_is_pure_product() {
        let s = assemble_rho(&params(2.0, 1.0), 0.0).unwrap();
        let m = s.matrix();
        assert_eq!(m.trace(), c(1.0));
        assert_eq!(m[(0, 2)], c(0.5));
        assert!((purity(&s) - 1.0).abs() < 1e-15);
        let psi = Vec4::new(c(1.0), c(0.0), c(1.0), c(0.0));
        let expect = TwoQubitState::pure(&psi).unwrap();
        assert!(trace_distance(m, expect.matrix()).unwrap() < 1e-15);
    }

    #[test]
    fn fully_decohered_limit_is_classical_mixture() {
        let s = assemble_rho(&params(100.0, 0.0), 50.0).unwrap();
        let mut expect = Mat4::zeros();
        expect[(0, 0)] = c(0.5);
        expect[(3, 3)] = c(0.5);
        assert!(trace_distance(s.matrix(), &expect).unwrap() < 1e-15);
    }

    #[test]
    fn assembled_states_are_valid() {
        for alpha0 in [1.0, 10.0, 100.0] {
            for r in [0.0, 0.5, 2.0, 4.0] {
                for k in 0..=120 {
                    let t = 0.05 * k as f64;
                    let s = assemble_rho(&params(alpha0, r), t).unwrap();
                    TwoQubitState::new(*s.matrix()).unwrap();
                }
            }
        }
    }

    #[test]
    fn purity_examples() {
        assert!((purity(&TwoQubitState::maximally_mixed()) - 0.25).abs() < 1e-15);
        let psi = Vec4::new(c(0.3), Complex64::new(0.1, 0.4), c(-0.2), c(0.8));
        assert!((purity(&TwoQubitState::pure(&psi).unwrap()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn purity_never_increases() {
        for alpha0 in [1.0, 10.0, 100.0] {
            for r in [0.0, 2.0, 3.5] {
                let p = params(alpha0, r);
                let mut last = 1.0 + 1e-15;
                for k in 0..=600 {
                    let pur = purity(&assemble_rho(&p, 0.01 * k as f64).unwrap());
                    assert!(pur <= last + 1e-14, "alpha0={alpha0} r={r} k={k}");
                    last = pur;
                }
            }
        }
    }

    #[test]
    fn coherence_equal_to_overlap_gives_pure_state() {
        for p in [0.1, 0.35, 0.6, 0.9] {
            let s = assemble_from_overlaps(&Mat2::from_element(c(0.5)), &PointerOverlaps::from_values(p, p));
            let ev = s.eigenvalues().unwrap();
            assert!(ev[..3].iter().all(|x| x.abs() < 1e-10), "{ev:?}");
        }
    }

    #[test]
    fn rejects_invalid_matrices() {
        let mut m = Mat4::identity() * c(0.25);
        m[(0, 1)] = c(0.1);
        assert!(TwoQubitState::new(m).is_err());
        assert!(TwoQubitState::new(Mat4::identity()).is_err());
        let mut neg = Mat4::zeros();
        neg[(0, 0)] = c(1.5);
        neg[(1, 1)] = c(-0.5);
        assert!(TwoQubitState::new(neg).is_err());
    }
}
