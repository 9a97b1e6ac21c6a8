//! Closed-form time dependence of the driven meter in a squeezed reservoir.
//!
//! The meter amplitude grows as `1 - exp(-γt/2)`, and the coherence between
//! the two measurement branches decays with the exponent returned by
//! [`gamma_exponent`]. Internally everything is a function of the scaled time
//! `x = γt/2`; public functions take `γ` and `t` separately.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{domain, Error, Result};

/// Internal level of the measured system. `One` carries the sign `-1`,
/// `Two` the sign `+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    One,
    Two,
}

impl Level {
    pub const BOTH: [Level; 2] = [Level::One, Level::Two];

    pub fn sign(self) -> f64 {
        match self {
            Level::One => -1.0,
            Level::Two => 1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Level::One => 0,
            Level::Two => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Asymptotic meter amplitude `|Ω|η/γ`.
    pub alpha0: f64,
    /// Reservoir damping rate.
    pub gamma: f64,
    /// Squeezing magnitude.
    pub r: f64,
    /// Squeezing phase in radians.
    pub theta: f64,
    /// Initial internal density matrix.
    pub rho0: Matrix2<Complex64>,
}

impl ModelParams {
    /// Parameters with the equal-superposition initial state (all
    /// `rho0` elements 1/2).
    pub fn new(alpha0: f64, gamma: f64, r: f64, theta: f64) -> Result<Self> {
        let params = Self { alpha0, gamma, r, theta, rho0: Matrix2::from_element(Complex64::new(0.5, 0.0)) };
        params.validate()?;
        Ok(params)
    }

    pub fn with_rho0(mut self, rho0: Matrix2<Complex64>) -> Result<Self> {
        self.rho0 = rho0;
        self.validate()?;
        Ok(self)
    }

    /// Checks the parameter invariants. `alpha0 = 0` (drive off) is
    /// accepted so the oracle can be run against its stationary state.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0.is_finite() && self.alpha0 >= 0.0) {
            return Err(domain(format!("alpha0 must be finite and >= 0, got {}", self.alpha0)));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(domain(format!("gamma must be finite and > 0, got {}", self.gamma)));
        }
        if !(self.r.is_finite() && self.r >= 0.0) {
            return Err(domain(format!("r must be finite and >= 0, got {}", self.r)));
        }
        if !self.theta.is_finite() {
            return Err(domain("theta must be finite"));
        }
        let m = &self.rho0;
        if (m - m.adjoint()).norm() > 1e-12 {
            return Err(domain("rho0 is not Hermitian"));
        }
        if (m.trace() - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(domain("rho0 does not have unit trace"));
        }
        // 2x2 Hermitian: PSD iff both diagonal entries and the determinant are >= 0.
        let det = m[(0, 0)].re * m[(1, 1)].re - m[(0, 1)].norm_sqr();
        if m[(0, 0)].re < -1e-12 || m[(1, 1)].re < -1e-12 || det < -1e-12 {
            return Err(domain("rho0 is not positive semidefinite"));
        }
        Ok(())
    }

    /// Squeeze parameter `ε = r·e^{2iθ}`.
    pub fn epsilon(&self) -> Complex64 {
        Complex64::from_polar(self.r, 2.0 * self.theta)
    }

    /// Scaled time `x = γt/2`.
    pub fn scaled_time(&self, t: f64) -> f64 {
        0.5 * self.gamma * t
    }

    pub fn rho0_element(&self, n: Level, m: Level) -> Complex64 {
        self.rho0[(n.index(), m.index())]
    }

    pub(crate) fn require_theta_zero(&self, what: &str) -> Result<()> {
        if self.theta != 0.0 {
            return Err(Error::Unsupported(format!(
                "{what} is only available in closed form for theta = 0 (got {}); \
                 use the Fock oracle overlap for general squeezing phase",
                self.theta
            )));
        }
        Ok(())
    }
}

/// Second moments of the squeezed reservoir.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirMoments {
    pub n_bar: f64,
    pub m: Complex64,
}

/// `Ω = Ω₁·Ω₂*/(2Δ)`.
pub fn effective_rabi(omega1: Complex64, omega2: Complex64, delta: f64) -> Result<Complex64> {
    if delta == 0.0 || !delta.is_finite() {
        return Err(domain(format!("detuning must be finite and nonzero, got {delta}")));
    }
    Ok(omega1 * omega2.conj() / (2.0 * delta))
}

/// Minimum-uncertainty reservoir: `N = sinh²r`, `M = -sinh r cosh r e^{2iθ}`.
pub fn reservoir_moments(r: f64, theta: f64) -> Result<ReservoirMoments> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(domain(format!("squeezing magnitude must be >= 0, got {r}")));
    }
    let (s, c) = (r.sinh(), r.cosh());
    Ok(ReservoirMoments { n_bar: s * s, m: -Complex64::from_polar(s * c, 2.0 * theta) })
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(domain(format!("time must be >= 0, got {t}")));
    }
    Ok(())
}

/// `1 - e^{-x}`, accurate for small `x`.
pub(crate) fn rise(x: f64) -> f64 {
    -(-x).exp_m1()
}

/// `1 - x - e^{-x}` (always <= 0), with a series near zero to avoid
/// cancellation.
pub(crate) fn decay_shape(x: f64) -> f64 {
    if x.is_infinite() {
        return f64::NEG_INFINITY;
    }
    if x.abs() < 0.5 {
        // -(x²/2! - x³/3! + x⁴/4! - ...)
        let mut term = x * x / 2.0;
        let mut sum = 0.0f64;
        let mut k = 2.0;
        while term.abs() > 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            sum += term;
            k += 1.0;
            term *= -x / k;
        }
        -sum
    } else {
        1.0 - x - (-x).exp()
    }
}

/// `cosh r - sinh r e^{2iθ}` with the real part written as
/// `e^{-r} + 2 sinh r sin²θ` so large `r` does not cancel.
fn squeeze_projection(r: f64, theta: f64) -> Complex64 {
    let s = theta.sin();
    Complex64::new((-r).exp() + 2.0 * r.sinh() * s * s, -r.sinh() * (2.0 * theta).sin())
}

/// Reservoir noise factor `1 + 2[sinh²r - cosh r sinh r cos 2θ]`, evaluated
/// as `e^{-2r} + 2 sinh 2r sin²θ`.
pub(crate) fn noise_factor(r: f64, theta: f64) -> f64 {
    let s = theta.sin();
    (-2.0 * r).exp() + 2.0 * (2.0 * r).sinh() * s * s
}

/// Pointer-state amplitude of branch `n`.
pub fn alpha_tilde(params: &ModelParams, t: f64, n: Level) -> Result<Complex64> {
    check_time(t)?;
    let x = params.scaled_time(t);
    Ok(n.sign() * params.alpha0 * rise(x) * squeeze_projection(params.r, params.theta))
}

/// Decoherence exponent between branches `n` and `m`.
pub fn gamma_exponent(params: &ModelParams, t: f64, n: Level, m: Level) -> Result<f64> {
    check_time(t)?;
    if n == m {
        return Ok(0.0);
    }
    let x = params.scaled_time(t);
    let ds = n.sign() - m.sign();
    Ok(ds * ds * params.alpha0 * params.alpha0 * noise_factor(params.r, params.theta) * decay_shape(x))
}

/// `Γ₁₂(t)`.
pub fn gamma12(params: &ModelParams, t: f64) -> Result<f64> {
    gamma_exponent(params, t, Level::One, Level::Two)
}

/// `ln P(t) = -2|α̃(t)|²`; finite even where `P` itself underflows.
pub fn ln_overlap_p(params: &ModelParams, t: f64) -> Result<f64> {
    params.require_theta_zero("overlap P(t)")?;
    let a = alpha_tilde(params, t, Level::Two)?;
    Ok(-2.0 * a.norm_sqr())
}

/// Overlap `⟨-α̃,ε|α̃,ε⟩ = exp(-2α̃²)` of the two pointer states.
pub fn overlap_p(params: &ModelParams, t: f64) -> Result<f64> {
    Ok(ln_overlap_p(params, t)?.exp())
}

/// `exp(Γ₁₂(t))`.
pub fn decoherence_factor(params: &ModelParams, t: f64) -> Result<f64> {
    Ok(gamma12(params, t)?.exp())
}
