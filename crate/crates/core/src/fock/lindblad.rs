//! Brute-force integration of the driven, squeezed-reservoir master equation
//! in a truncated number basis.
//!
//! The internal levels are never represented as operators: the density
//! operator is split into four meter blocks `ρ_nm` and each block evolves
//! under
//!
//! ```text
//! dρ_nm/dt = (α₀γ/2)[s_n X ρ_nm - s_m ρ_nm X]
//!          + γ/2 {(N+1) D[a] + N D[a†] + M (2a†ρa† - a†²ρ - ρa†²) + M* (2aρa - a²ρ - ρa²)}
//! ```
//!
//! with `X = a† - a`, `s_n = ±1`. All operator products are taken between
//! truncated matrices, which keeps the total trace exactly conserved by the
//! generator.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::vector::{squeezed_coherent_with_tolerance, FockVector};
use crate::model::{reservoir_moments, Level, ModelParams};

/// Sample of the four meter blocks at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct FockBlockState {
    pub cutoff: usize,
    pub time: f64,
    /// Row-major `d×d` blocks in the order (1,1), (1,2), (2,1), (2,2).
    pub blocks: [Vec<Complex64>; 4],
}

pub(crate) fn block_slot(n: Level, m: Level) -> usize {
    2 * n.index() + m.index()
}

impl FockBlockState {
    pub fn zeros(cutoff: usize, time: f64) -> Self {
        let z = vec![Complex64::default(); cutoff * cutoff];
        Self { cutoff, time, blocks: [z.clone(), z.clone(), z.clone(), z] }
    }

    /// `ρ_nm ⊗ |ψ⟩⟨ψ|` for the given meter vector.
    pub fn product(params: &ModelParams, meter: &FockVector, time: f64) -> Self {
        let d = meter.cutoff();
        let mut s = Self::zeros(d, time);
        for n in Level::BOTH {
            for m in Level::BOTH {
                let c = params.rho0_element(n, m);
                let blk = &mut s.blocks[block_slot(n, m)];
                for i in 0..d {
                    for j in 0..d {
                        blk[i * d + j] = c * meter.amplitudes[i] * meter.amplitudes[j].conj();
                    }
                }
            }
        }
        s
    }

    pub fn block(&self, n: Level, m: Level) -> &[Complex64] {
        &self.blocks[block_slot(n, m)]
    }

    pub fn block_trace(&self, n: Level, m: Level) -> Complex64 {
        let d = self.cutoff;
        let b = self.block(n, m);
        (0..d).map(|i| b[i * d + i]).sum()
    }

    /// Tr ρ₁₁ + Tr ρ₂₂.
    pub fn total_trace(&self) -> f64 {
        (self.block_trace(Level::One, Level::One) + self.block_trace(Level::Two, Level::Two)).re
    }

    /// Largest deviation of `ρ₂₁` from `ρ₁₂†`.
    pub fn pairing_error(&self) -> f64 {
        let d = self.cutoff;
        let (a, b) = (self.block(Level::One, Level::Two), self.block(Level::Two, Level::One));
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((b[i * d + j] - a[j * d + i].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }
}

/// Scalar used by the integrator. Real arithmetic is used whenever the
/// whole problem is real (θ = 0 with a real initial matrix).
pub(crate) trait Amplitude:
    Copy
    + Default
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
    + Neg<Output = Self>
    + AddAssign
{
    fn from_complex(c: Complex64) -> Option<Self>;
    fn to_complex(self) -> Complex64;
    fn is_finite_value(self) -> bool;
}

impl Amplitude for f64 {
    fn from_complex(c: Complex64) -> Option<Self> {
        (c.im == 0.0).then_some(c.re)
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl Amplitude for Complex64 {
    fn from_complex(c: Complex64) -> Option<Self> {
        Some(c)
    }
    fn to_complex(self) -> Complex64 {
        self
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

const PAD: usize = 2;

/// `d×d` matrix stored with a two-cell zero margin on every side so the
/// stencil never needs bounds tests; reads past the cutoff see zeros,
/// which is exactly what products of truncated ladder matrices produce.
#[derive(Clone)]
pub(crate) struct Padded<T> {
    d: usize,
    stride: usize,
    data: Vec<T>,
}

impl<T: Amplitude> Padded<T> {
    fn zeros(d: usize) -> Self {
        let stride = d + 2 * PAD;
        Self { d, stride, data: vec![T::default(); stride * stride] }
    }

    fn from_block(d: usize, block: &[Complex64]) -> Option<Self> {
        let mut p = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let at = p.at(i, j);
                p.data[at] = T::from_complex(block[i * d + j])?;
            }
        }
        Some(p)
    }

    fn to_block(&self) -> Vec<Complex64> {
        let d = self.d;
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                out.push(self.data[self.at(i, j)].to_complex());
            }
        }
        out
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        (i + PAD) * self.stride + j + PAD
    }

    fn trace(&self) -> Complex64 {
        (0..self.d).map(|i| self.data[self.at(i, i)].to_complex()).sum()
    }

    fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite_value())
    }
}

/// Coefficients of the block generator for one parameter point.
pub(crate) struct Generator<T> {
    d: usize,
    drive: f64,
    half_gamma: f64,
    n_plus: f64,
    n_bar: f64,
    m: T,
    m_conj: T,
    m_abs: f64,
    /// `√k` for `k < d + 3`.
    sq: Vec<f64>,
    /// Diagonal decay of one index: `-γ/2 [(N+1) k + N (aa†)_kk]`.
    diag: Vec<f64>,
    /// `-γ/2 M √((k+1)(k+2))`, the `ρ a†²` coupling of column `k`.
    col_p2: Vec<T>,
    /// `-γ/2 M* √(k(k-1))`, the `ρ a²` coupling of column `k`.
    col_m2: Vec<T>,
}

impl<T: Amplitude> Generator<T> {
    pub(crate) fn new(params: &ModelParams, d: usize) -> Result<Self> {
        let mom = reservoir_moments(params.r, params.theta)?;
        let m = T::from_complex(mom.m)
            .ok_or_else(|| Error::Numerical("complex reservoir correlation in a real integrator".into()))?;
        let m_conj = T::from_complex(mom.m.conj()).expect("conjugate of representable value");
        let half_gamma = 0.5 * params.gamma;
        let sq: Vec<f64> = (0..d + 3).map(|k| (k as f64).sqrt()).collect();
        let aa_dag = |k: usize| if k + 1 < d { (k + 1) as f64 } else { 0.0 };
        let diag = (0..d).map(|k| -half_gamma * ((mom.n_bar + 1.0) * k as f64 + mom.n_bar * aa_dag(k))).collect();
        let col_p2 = (0..d).map(|k| m * (-half_gamma * sq[k + 1] * sq[k + 2])).collect();
        let col_m2 = (0..d).map(|k| m_conj * (-half_gamma * if k > 0 { sq[k] * sq[k - 1] } else { 0.0 })).collect();
        Ok(Self {
            d,
            drive: 0.5 * params.alpha0 * params.gamma,
            half_gamma,
            n_plus: mom.n_bar + 1.0,
            n_bar: mom.n_bar,
            m,
            m_conj,
            m_abs: mom.m.norm(),
            sq,
            diag,
            col_p2,
            col_m2,
        })
    }

    /// `(a a†)_kk` for truncated ladder matrices: `k+1`, except 0 on the
    /// last level.
    #[inline]
    fn aa_dag(&self, k: usize) -> f64 {
        if k + 1 < self.d {
            (k + 1) as f64
        } else {
            0.0
        }
    }

    /// Gershgorin bound on the spectral radius of the block generator.
    pub(crate) fn spectral_bound(&self) -> f64 {
        let sq = &self.sq;
        let mut worst = 0.0f64;
        for i in 0..self.d {
            for j in 0..self.d {
                let sim1 = if i > 0 { sq[i - 1] } else { 0.0 };
                let sjm1 = if j > 0 { sq[j - 1] } else { 0.0 };
                let diag = self.n_plus * (i + j) as f64 + self.n_bar * (self.aa_dag(i) + self.aa_dag(j));
                let off = 2.0 * self.n_plus * sq[i + 1] * sq[j + 1]
                    + 2.0 * self.n_bar * sq[i] * sq[j]
                    + self.m_abs * (2.0 * sq[i] * sq[j + 1] + sq[i] * sim1 + sq[j + 1] * sq[j + 2])
                    + self.m_abs * (2.0 * sq[i + 1] * sq[j] + sq[i + 1] * sq[i + 2] + sq[j] * sjm1);
                let drive = self.drive * (sq[i] + sq[i + 1] + sq[j] + sq[j + 1]);
                worst = worst.max(self.half_gamma * (diag + off) + drive);
            }
        }
        worst
    }

    /// `dst = L_nm(src)` for the block with signs `(s_n, s_m)`.
    ///
    /// Each output entry reads a five-point row stencil, three entries from
    /// each neighbouring row and one entry two rows away. Reads that fall in
    /// the zero margin reproduce products of truncated ladder matrices.
    pub(crate) fn apply(&self, sn: f64, sm: f64, src: &Padded<T>, dst: &mut Padded<T>) {
        let d = self.d;
        let w = src.stride;
        let sq = &self.sq[..d + 2];
        let diag = &self.diag[..d];
        let col_p2 = &self.col_p2[..d];
        let col_m2 = &self.col_m2[..d];
        let hg = self.half_gamma;
        let (kn, km) = (self.drive * sn, self.drive * sm);
        let s = &src.data;
        for i in 0..d {
            let (si, si1) = (sq[i], sq[i + 1]);
            let sim1 = if i > 0 { sq[i - 1] } else { 0.0 };
            let di = diag[i];
            // Row-only coefficients.
            let c_up1 = kn * si;
            let c_dn1 = -kn * si1;
            let c_dn1_p1 = hg * self.n_plus * 2.0 * si1;
            let c_up1_m1 = hg * self.n_bar * 2.0 * si;
            let c_up1_p1 = self.m * (hg * 2.0 * si);
            let c_dn1_m1 = self.m_conj * (hg * 2.0 * si1);
            let c_up2 = self.m * (-hg * si * sim1);
            let c_dn2 = self.m_conj * (-hg * si1 * sq[i + 2]);

            let row = (i + PAD) * w + PAD;
            let r = &s[row - 2..row + d + 2];
            let u1 = &s[row - w - 1..row - w + d + 1];
            let d1 = &s[row + w - 1..row + w + d + 1];
            let u2 = &s[row - 2 * w..row - 2 * w + d];
            let d2 = &s[row + 2 * w..row + 2 * w + d];
            let out = &mut dst.data[row..row + d];
            for j in 0..d {
                let (a, b) = (sq[j], sq[j + 1]);
                let mut acc = r[j + 2] * (di + diag[j]);
                acc += u1[j + 1] * c_up1 + d1[j + 1] * c_dn1;
                acc += r[j + 3] * (-km * b) + r[j + 1] * (km * a);
                acc += d1[j + 2] * (c_dn1_p1 * b) + u1[j] * (c_up1_m1 * a);
                acc += u1[j + 2] * (c_up1_p1 * b) + u2[j] * c_up2 + r[j + 4] * col_p2[j];
                acc += d1[j] * (c_dn1_m1 * a) + d2[j] * c_dn2 + r[j] * col_m2[j];
                out[j] = acc;
            }
        }
    }
}

/// Time derivative of every block of `state`.
pub fn lindblad_rhs(state: &FockBlockState, params: &ModelParams) -> Result<FockBlockState> {
    let d = state.cutoff;
    let gen = Generator::<Complex64>::new(params, d)?;
    let mut out = FockBlockState::zeros(d, state.time);
    let mut dst = Padded::zeros(d);
    for n in Level::BOTH {
        for m in Level::BOTH {
            let slot = block_slot(n, m);
            let src = Padded::<Complex64>::from_block(d, &state.blocks[slot]).expect("complex blocks");
            gen.apply(n.sign(), m.sign(), &src, &mut dst);
            out.blocks[slot] = dst.to_block();
        }
    }
    Ok(out)
}

/// Initial meter state of an oracle run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialMeter {
    /// Stationary state of the reservoir without drive: the squeezed
    /// vacuum with `⟨a†a⟩ = N`. This is the `t = 0` limit of the analytic
    /// pointer states.
    #[default]
    ReservoirVacuum,
    /// The number-basis vacuum `|0⟩`.
    Vacuum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    /// Upper bound on the RK4 step. The stability and accuracy rules may
    /// pick a smaller one.
    pub max_step: Option<f64>,
    pub initial: InitialMeter,
    /// Truncation-loss budget for the initial meter state.
    pub max_initial_loss: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self { max_step: None, initial: InitialMeter::default(), max_initial_loss: 1e-8 }
    }
}

/// Squeeze parameter of the reservoir's stationary state, `-ε`. The
/// stationary state of the dissipator has `⟨a²⟩ = -M = |M|e^{2iθ}`, which is
/// `exp(½ξ*a² - ½ξa†²)|0⟩` with `ξ = -r e^{2iθ}`.
pub fn reservoir_squeeze(params: &ModelParams) -> Complex64 {
    -params.epsilon()
}

pub(crate) fn initial_meter(params: &ModelParams, d: usize, opts: &IntegratorOptions) -> Result<FockVector> {
    match opts.initial {
        InitialMeter::Vacuum => Ok(FockVector::number_state(0, d)),
        InitialMeter::ReservoirVacuum => Ok(squeezed_coherent_with_tolerance(
            Complex64::default(),
            reservoir_squeeze(params),
            d,
            opts.max_initial_loss,
        )?
        .normalized()),
    }
}

/// Largest step allowed by the accuracy rule
/// `h <= min(0.01/γ, 0.1/(α₀γ))` and the RK4 stability limit.
pub fn step_limit(params: &ModelParams, d: usize) -> Result<f64> {
    let gen = Generator::<Complex64>::new(params, d)?;
    let mut h = 0.01 / params.gamma;
    if params.alpha0 > 0.0 {
        h = h.min(0.1 / (params.alpha0 * params.gamma));
    }
    // RK4 is stable for |hλ| <= 2.5 in the closed left half-plane.
    Ok(h.min(2.5 / gen.spectral_bound()))
}

/// Integrates from `t_grid[0] = 0` and returns one sample per grid time.
pub fn integrate(params: &ModelParams, t_grid: &[f64], d: usize) -> Result<Vec<FockBlockState>> {
    integrate_with(params, t_grid, d, &IntegratorOptions::default())
}

pub fn integrate_with(
    params: &ModelParams,
    t_grid: &[f64],
    d: usize,
    opts: &IntegratorOptions,
) -> Result<Vec<FockBlockState>> {
    params.validate()?;
    if d < 4 {
        return Err(Error::InsufficientCutoff(format!("cutoff must be at least 4, got {d}")));
    }
    match t_grid.first() {
        Some(&0.0) => {}
        _ => return Err(Error::Domain("time grid must start at 0".into())),
    }
    if t_grid.iter().any(|t| !t.is_finite()) || t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("time grid must be finite and non-decreasing".into()));
    }
    let mut h_max = step_limit(params, d)?;
    if let Some(h) = opts.max_step {
        if h.is_nan() || h <= 0.0 {
            return Err(Error::Domain(format!("max_step must be > 0, got {h}")));
        }
        h_max = h_max.min(h);
    }
    let meter = initial_meter(params, d, opts)?;
    let real = params.theta == 0.0 && meter.amplitudes.iter().all(|c| c.im == 0.0);
    if real {
        run::<f64>(params, &meter, t_grid, h_max)
    } else {
        run::<Complex64>(params, &meter, t_grid, h_max)
    }
}

struct Lane<T> {
    sn: f64,
    sm: f64,
    y: Padded<T>,
    tmp: Padded<T>,
    k: Padded<T>,
    acc: Padded<T>,
}

fn axpy<T: Amplitude>(out: &mut Padded<T>, y: &Padded<T>, a: f64, x: &Padded<T>) {
    for ((o, yv), xv) in out.data.iter_mut().zip(&y.data).zip(&x.data) {
        *o = *yv + *xv * a;
    }
}

fn rk4_step<T: Amplitude>(gen: &Generator<T>, lane: &mut Lane<T>, h: f64) {
    let Lane { sn, sm, y, tmp, k, acc } = lane;
    gen.apply(*sn, *sm, y, acc);
    axpy(tmp, y, 0.5 * h, acc);
    gen.apply(*sn, *sm, tmp, k);
    for (a, kv) in acc.data.iter_mut().zip(&k.data) {
        *a += *kv * 2.0;
    }
    axpy(tmp, y, 0.5 * h, k);
    gen.apply(*sn, *sm, tmp, k);
    for (a, kv) in acc.data.iter_mut().zip(&k.data) {
        *a += *kv * 2.0;
    }
    axpy(tmp, y, h, k);
    gen.apply(*sn, *sm, tmp, k);
    let w = h / 6.0;
    for ((yv, a), kv) in y.data.iter_mut().zip(&acc.data).zip(&k.data) {
        *yv += (*a + *kv) * w;
    }
}

/// `(-1)^(i+j) b_ij`: conjugation by the parity operator `(-1)^{a†a}`.
fn parity_conjugate(block: &[Complex64], d: usize) -> Vec<Complex64> {
    let mut out = block.to_vec();
    for i in 0..d {
        for j in 0..d {
            if (i + j) % 2 == 1 {
                out[i * d + j] = -out[i * d + j];
            }
        }
    }
    out
}

/// Integrates two unit-weight lanes, `(1,1)` and `(1,2)`, from `|ψ⟩⟨ψ|`.
/// The generator is linear in each block, so block `(n,m)` is `ρ_nm` times
/// its lane. The dissipator is invariant under `a → -a`, which flips the
/// drive sign, and the initial meter state has even parity; hence lane
/// `(2,2)` is the parity conjugate of lane `(1,1)` and `(2,1)` is the
/// adjoint of `(1,2)`.
fn run<T: Amplitude>(
    params: &ModelParams,
    meter: &FockVector,
    t_grid: &[f64],
    h_max: f64,
) -> Result<Vec<FockBlockState>> {
    let d = meter.cutoff();
    let gen = Generator::<T>::new(params, d)?;
    let mut projector = vec![Complex64::default(); d * d];
    for i in 0..d {
        for j in 0..d {
            projector[i * d + j] = meter.amplitudes[i] * meter.amplitudes[j].conj();
        }
    }
    let mut lanes: Vec<Lane<T>> = [(Level::One, Level::One), (Level::One, Level::Two)]
        .iter()
        .map(|&(n, m)| {
            let y = Padded::from_block(d, &projector).expect("real start for real run");
            Lane { sn: n.sign(), sm: m.sign(), tmp: y.clone(), k: y.clone(), acc: y.clone(), y }
        })
        .collect();
    let scale = |block: Vec<Complex64>, c: Complex64| -> Vec<Complex64> { block.into_iter().map(|x| x * c).collect() };
    let rho = |n, m| params.rho0_element(n, m);

    let mut out = Vec::with_capacity(t_grid.len());
    let mut t = 0.0;
    for &target in t_grid {
        let span = target - t;
        if span > 0.0 {
            let steps = (span / h_max).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            for _ in 0..steps {
                for lane in lanes.iter_mut() {
                    rk4_step(&gen, lane, h);
                }
            }
            t = target;
        }
        let drift = (lanes[0].y.trace().re - 1.0).abs();
        if !lanes.iter().all(|l| l.y.all_finite()) || drift > 1e-6 {
            return Err(Error::Integration {
                t,
                reason: format!("total trace drifted by {drift:.3e}; reduce the step or increase the cutoff"),
            });
        }
        let l11 = lanes[0].y.to_block();
        let b12 = scale(lanes[1].y.to_block(), rho(Level::One, Level::Two));
        let mut b21 = vec![Complex64::default(); d * d];
        for i in 0..d {
            for j in 0..d {
                b21[j * d + i] = b12[i * d + j].conj();
            }
        }
        let b22 = scale(parity_conjugate(&l11, d), rho(Level::Two, Level::Two));
        let b11 = scale(l11, rho(Level::One, Level::One));
        out.push(FockBlockState { cutoff: d, time: t, blocks: [b11, b12, b21, b22] });
    }
    Ok(out)
}
