//! End-to-end comparison of the integrated master equation with the
//! closed-form state.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::lindblad::{integrate_with, reservoir_squeeze, step_limit, IntegratorOptions};
use crate::fock::reduce::{reduce_with_tolerance, MAX_LEAKAGE};
use crate::fock::vector::squeezed_coherent_with_tolerance;
use crate::linalg::trace_distance;
use crate::model::{alpha_tilde, Level, ModelParams};
use crate::state::assemble_rho;

/// Norm budget for every meter state truncated by an oracle run.
pub const ORACLE_LOSS: f64 = 1e-5;
/// Largest trace distance to the closed form accepted by a verification.
pub const MAX_TRACE_DISTANCE: f64 = 1e-3;
/// Largest drive amplitude the oracle is run at.
pub const MAX_ORACLE_ALPHA0: f64 = 4.0;
const MAX_CUTOFF: usize = 4096;

fn cutoff_ok(amplitude: Complex64, epsilon: Complex64, d: usize, max_loss: f64) -> bool {
    let df = d as f64;
    if amplitude.norm_sqr() > df - 6.0 * df.sqrt() {
        return false;
    }
    [amplitude, Complex64::default()].iter().all(|&a| squeezed_coherent_with_tolerance(a, epsilon, d, max_loss).is_ok())
}

/// Smallest cutoff at which the pointer states up to `t_max` and the initial
/// squeezed vacuum each lose at most `max_loss` of their norm.
pub fn oracle_cutoff(params: &ModelParams, t_max: f64, max_loss: f64) -> Result<usize> {
    params.validate()?;
    // |α̃| grows monotonically in t.
    let amplitude = alpha_tilde(params, t_max, Level::Two)?;
    let eps = reservoir_squeeze(params);
    let mut hi = 16;
    while !cutoff_ok(amplitude, eps, hi, max_loss) {
        if hi >= MAX_CUTOFF {
            return Err(Error::InsufficientCutoff(format!(
                "no cutoff up to {MAX_CUTOFF} meets the truncation budget {max_loss:.1e}"
            )));
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if cutoff_ok(amplitude, eps, mid, max_loss) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSample {
    pub t: f64,
    pub trace_distance: f64,
    pub leakage: f64,
    /// `|Tr ρ₁₁ + Tr ρ₂₂ - 1|`.
    pub trace_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub cutoff: usize,
    pub step: f64,
    pub samples: Vec<OracleSample>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.samples.iter().all(|s| s.trace_distance < MAX_TRACE_DISTANCE && s.leakage < MAX_LEAKAGE)
    }
}

/// Integrates from `t = 0`, reduces every sample to the pointer span and
/// measures its distance to the closed-form state.
pub fn run_oracle(params: &ModelParams, t_grid: &[f64], cutoff: Option<usize>) -> Result<OracleReport> {
    params.validate()?;
    if params.alpha0 > MAX_ORACLE_ALPHA0 {
        return Err(Error::Domain(format!("oracle runs need alpha0 <= {MAX_ORACLE_ALPHA0}, got {}", params.alpha0)));
    }
    let t_max = t_grid.iter().copied().fold(0.0, f64::max);
    let d = match cutoff {
        Some(d) => d,
        None => oracle_cutoff(params, t_max, ORACLE_LOSS)?,
    };
    let opts = IntegratorOptions { max_initial_loss: ORACLE_LOSS, ..Default::default() };
    let states = integrate_with(params, t_grid, d, &opts)?;
    let mut samples = Vec::with_capacity(states.len());
    for s in &states {
        let red = reduce_with_tolerance(s, params, ORACLE_LOSS)?;
        let exact = assemble_rho(params, s.time)?;
        samples.push(OracleSample {
            t: s.time,
            trace_distance: trace_distance(red.state.matrix(), exact.matrix())?,
            leakage: red.leakage,
            trace_drift: (s.total_trace() - 1.0).abs(),
        });
    }
    Ok(OracleReport { cutoff: d, step: step_limit(params, d)?, samples })
}
