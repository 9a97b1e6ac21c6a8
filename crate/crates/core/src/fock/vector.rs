use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest truncation loss accepted by [`squeezed_coherent`].
pub const MAX_TRUNCATION_LOSS: f64 = 1e-8;

/// Amplitudes of a meter state in the number basis `|0⟩ … |d-1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub amplitudes: Vec<Complex64>,
    /// Probability weight the exact state carries beyond the cutoff.
    pub truncation_loss: f64,
}

impl FockVector {
    pub fn cutoff(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn number_state(k: usize, d: usize) -> Self {
        let mut amplitudes = vec![Complex64::default(); d];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Self { amplitudes, truncation_loss: 0.0 }
    }

    /// `⟨a†a⟩` over the truncated amplitudes.
    pub fn mean_number(&self) -> f64 {
        self.amplitudes.iter().enumerate().map(|(k, c)| k as f64 * c.norm_sqr()).sum()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm_sqr().sqrt();
        for c in &mut self.amplitudes {
            *c /= n;
        }
        self
    }
}

fn check_cutoff(d: usize) -> Result<()> {
    if d < 4 {
        return Err(Error::InsufficientCutoff(format!("cutoff must be at least 4, got {d}")));
    }
    Ok(())
}

/// Poisson-weighted amplitudes, built by the ratio recursion
/// `c_k = c_{k-1}·α/√k` so no factorial is ever formed.
fn coherent_amplitudes(alpha: Complex64, d: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(d);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    out.push(c);
    for k in 1..d {
        c = c * alpha / (k as f64).sqrt();
        out.push(c);
    }
    out
}

/// Coherent state `|α⟩` truncated at `d`.
pub fn coherent_state(alpha: Complex64, d: usize) -> Result<FockVector> {
    check_cutoff(d)?;
    let df = d as f64;
    if alpha.norm_sqr() > df - 6.0 * df.sqrt() {
        return Err(Error::InsufficientCutoff(format!(
            "|alpha|^2 = {:.3} exceeds d - 6 sqrt(d) = {:.3} for d = {d}",
            alpha.norm_sqr(),
            df - 6.0 * df.sqrt()
        )));
    }
    let amplitudes = coherent_amplitudes(alpha, d);
    // Tail weight from the next terms of the Poisson series; summing
    // them directly avoids the cancellation in 1 - Σ|c_k|².
    let mut tail = 0.0;
    let mut c = amplitudes[d - 1];
    for k in d..d + 4 * d {
        c = c * alpha / (k as f64).sqrt();
        let w = c.norm_sqr();
        tail += w;
        if w < 1e-300 || w < tail * 1e-17 {
            break;
        }
    }
    Ok(FockVector { amplitudes, truncation_loss: tail })
}

/// `exp(½ε*a² - ½εa†²)·v` on a truncated space. The generator is
/// anti-Hermitian, so the map is unitary on the truncated space; it is
/// applied as a product of short Taylor steps.
pub(crate) fn apply_squeeze(v: &[Complex64], epsilon: Complex64) -> Vec<Complex64> {
    let d = v.len();
    if epsilon.norm() == 0.0 || d < 3 {
        return v.to_vec();
    }
    let sq: Vec<f64> = (0..d + 2).map(|k| (k as f64).sqrt()).collect();
    let half_ec = 0.5 * epsilon.conj();
    let half_e = 0.5 * epsilon;
    let generate = |x: &[Complex64], out: &mut [Complex64]| {
        for k in 0..d {
            // (a² x)_k = √((k+1)(k+2)) x_{k+2};  (a†² x)_k = √(k(k-1)) x_{k-2}
            let mut acc = Complex64::default();
            if k + 2 < d {
                acc += half_ec * (sq[k + 1] * sq[k + 2]) * x[k + 2];
            }
            if k >= 2 {
                acc -= half_e * (sq[k] * sq[k - 1]) * x[k - 2];
            }
            out[k] = acc;
        }
    };
    let bound = epsilon.norm() * (d as f64 + 1.0);
    let steps = (2.0 * bound).ceil().max(1.0) as usize;
    let tau = 1.0 / steps as f64;
    let mut x = v.to_vec();
    let mut term = vec![Complex64::default(); d];
    let mut next = vec![Complex64::default(); d];
    for _ in 0..steps {
        term.copy_from_slice(&x);
        let mut k = 1.0;
        loop {
            generate(&term, &mut next);
            let scale = tau / k;
            let mut norm = 0.0;
            for (t, n) in term.iter_mut().zip(&next) {
                *t = n * scale;
                norm += t.norm_sqr();
            }
            for (xi, t) in x.iter_mut().zip(&term) {
                *xi += t;
            }
            if norm < 1e-36 || k > 60.0 {
                break;
            }
            k += 1.0;
        }
    }
    x
}

/// Squeezed coherent state `exp(½ε*a² - ½εa†²)|α⟩`, squeezing applied
/// after displacement. The state is built on a padded space and the weight
/// that lands beyond `d` is reported as the truncation loss.
pub fn squeezed_coherent_with_tolerance(
    alpha: Complex64,
    epsilon: Complex64,
    d: usize,
    max_loss: f64,
) -> Result<FockVector> {
    check_cutoff(d)?;
    if epsilon.norm() > 4.0 {
        return Err(Error::Domain(format!("|epsilon| must be <= 4, got {}", epsilon.norm())));
    }
    if epsilon.norm() == 0.0 {
        let v = coherent_state(alpha, d)?;
        if v.truncation_loss > max_loss {
            return Err(loss_error(v.truncation_loss, max_loss, d));
        }
        return Ok(v);
    }
    // The padded space grows until the weight near its edge is negligible
    // against the loss budget, so the reported tail is trustworthy.
    let edge_limit = 1e-6 * max_loss;
    let mut padded = 2 * d + 40;
    let full = loop {
        let full = apply_squeeze(&coherent_amplitudes(alpha, padded), epsilon);
        let edge: f64 = full[padded - padded / 8..].iter().map(|c| c.norm_sqr()).sum();
        if edge <= edge_limit {
            break full;
        }
        if padded >= 8 * d + 320 {
            return Err(Error::InsufficientCutoff(format!(
                "squeezed state reaches the padded edge (weight {edge:.2e}); increase d"
            )));
        }
        padded *= 2;
    };
    let tail: f64 = full[d..].iter().map(|c| c.norm_sqr()).sum();
    if tail > max_loss {
        return Err(loss_error(tail, max_loss, d));
    }
    Ok(FockVector { amplitudes: full[..d].to_vec(), truncation_loss: tail })
}

fn loss_error(loss: f64, max_loss: f64, d: usize) -> Error {
    Error::InsufficientCutoff(format!("truncation loss {loss:.3e} at d = {d} exceeds {max_loss:.1e}"))
}

/// [`squeezed_coherent_with_tolerance`] at [`MAX_TRUNCATION_LOSS`].
pub fn squeezed_coherent(alpha: Complex64, epsilon: Complex64, d: usize) -> Result<FockVector> {
    squeezed_coherent_with_tolerance(alpha, epsilon, d, MAX_TRUNCATION_LOSS)
}

/// `⟨a|b⟩`, conjugate-linear in the first argument.
pub fn fock_overlap(a: &FockVector, b: &FockVector) -> Result<Complex64> {
    if a.cutoff() != b.cutoff() {
        return Err(Error::CutoffMismatch { left: a.cutoff(), right: b.cutoff() });
    }
    Ok(a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| x.conj() * y).sum())
}
