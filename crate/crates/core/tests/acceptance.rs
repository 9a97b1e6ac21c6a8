//! End-to-end acceptance checks. Prints one PASS/FAIL line per check and
//! exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use meterent::fock::{
    integrate_with, oracle_cutoff, run_oracle, step_limit, InitialMeter, IntegratorOptions, ORACLE_LOSS,
};
use meterent::linalg::{kron, Mat2, Mat4};
use meterent::measures::{
    bell_max, bell_max_closed, bell_max_from_overlaps, concurrence, concurrence_closed, concurrence_expectation,
    concurrence_from_overlaps, eof, spin_flip,
};
use meterent::model::{decoherence_factor, ModelParams};
use meterent::state::{assemble_from_overlaps, assemble_rho, meter_basis, purity, PointerOverlaps, TwoQubitState};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

type Check = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn figure_params(r: f64) -> ModelParams {
    ModelParams::new(100.0, 1.0, r, 0.0).unwrap()
}

fn grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| t_max * k as f64 / n as f64).collect()
}

/// `alpha0 × r × 200` times in `(0, 6]`.
fn model_grid() -> Vec<(ModelParams, f64)> {
    let mut pts = Vec::new();
    for alpha0 in [1.0, 10.0, 100.0] {
        for r in [0.0, 2.0, 3.5] {
            let p = ModelParams::new(alpha0, 1.0, r, 0.0).unwrap();
            for k in 1..=200 {
                pts.push((p.clone(), 6.0 * k as f64 / 200.0));
            }
        }
    }
    pts
}

fn closed_forms_match_matrix_measures() -> Outcome {
    let start = Instant::now();
    let (mut dc, mut db) = (0.0f64, 0.0f64);
    for (p, t) in model_grid() {
        let rho = assemble_rho(&p, t).unwrap();
        dc = dc.max((concurrence_closed(&p, t).unwrap() - concurrence(&rho).unwrap()).abs());
        db = db.max((bell_max_closed(&p, t).unwrap() - bell_max(&rho).unwrap()).abs());
    }
    let el = start.elapsed();
    outcome(
        dc < 1e-10 && db < 1e-10 && within(el, 10.0),
        format!("max |dC| = {dc:.2e}, max |dB| = {db:.2e}, {:.2} s", el.as_secs_f64()),
    )
}

fn master_equation_matches_closed_form() -> Outcome {
    let start = Instant::now();
    let times = [0.0, 0.5, 1.0, 2.0, 4.0];
    let mut pass = true;
    let mut parts = Vec::new();
    for r in [0.0, 1.0, 2.0] {
        let p = ModelParams::new(2.0, 1.0, r, 0.0).unwrap();
        let report = run_oracle(&p, &times, None).unwrap();
        let td = report.samples.iter().map(|s| s.trace_distance).fold(0.0, f64::max);
        let leak = report.samples.iter().map(|s| s.leakage).fold(0.0, f64::max);
        let drift = report.samples.iter().map(|s| s.trace_drift).fold(0.0, f64::max);
        pass &= td < 1e-3 && leak < 0.01 && drift < 1e-8;
        parts.push(format!("r={r}: d={} TD {td:.1e} leak {leak:.1e} drift {drift:.1e}", report.cutoff));
    }
    let el = start.elapsed();
    pass &= within(el, 300.0);
    outcome(pass, format!("{}; {:.0} s", parts.join("; "), el.as_secs_f64()))
}

fn squeezing_slows_decoherence() -> Outcome {
    let times = grid(6.0, 600);
    let f = |r: f64| -> Vec<f64> { times.iter().map(|&t| decoherence_factor(&figure_params(r), t).unwrap()).collect() };
    let (f0, f2, f35) = (f(0.0), f(2.0), f(3.5));
    let ordered = (0..times.len()).all(|k| f35[k] >= f2[k] && f2[k] >= f0[k]);
    let strict = (0..times.len()).any(|k| times[k] > 0.0 && times[k] < 6.0 && f35[k] > f2[k] && f2[k] > f0[k]);
    let k = times.iter().position(|&t| t >= 0.05).unwrap();
    outcome(
        ordered && strict,
        format!("at t = {}: f(3.5) = {:.4}, f(2) = {:.4}, f(0) = {:.3e}", times[k], f35[k], f2[k], f0[k]),
    )
}

fn concurrence_peak_moves_later() -> Outcome {
    let times = grid(6.0, 6000);
    let mut peaks = Vec::new();
    let mut max_eof = Vec::new();
    for r in [0.0, 2.0, 3.5] {
        let p = figure_params(r);
        let c: Vec<f64> = times.iter().map(|&t| concurrence_closed(&p, t).unwrap()).collect();
        let k = (0..c.len()).max_by(|&a, &b| c[a].total_cmp(&c[b])).unwrap();
        peaks.push(times[k]);
        max_eof.push(c.iter().map(|&x| eof(x).unwrap()).fold(0.0, f64::max));
    }
    let pass = peaks[2] > peaks[1] && peaks[1] > peaks[0] && max_eof.iter().all(|&e| e < 1.0);
    outcome(pass, format!("argmax t = {peaks:?} for r = [0, 2, 3.5], max EoF = {max_eof:.4?}"))
}

fn bell_violation_window() -> Outcome {
    let times = grid(6.0, 60000);
    let mut pass = true;
    let mut ends = Vec::new();
    for r in [0.0, 2.0, 3.5] {
        let p = figure_params(r);
        let b: Vec<f64> = times.iter().map(|&t| bell_max_closed(&p, t).unwrap()).collect();
        pass &= (b[0] - 2.0).abs() < 1e-12;
        pass &= b.iter().all(|&x| x <= TSIRELSON + 1e-9);
        // Violation is resolved while B - 2 exceeds the tolerance of B(0) = 2.
        let Some(first) = b.iter().position(|&x| x - 2.0 > 1e-12) else {
            pass = false;
            ends.push(f64::NAN);
            continue;
        };
        let end = b[first..].iter().position(|&x| x - 2.0 <= 1e-12).map_or(f64::INFINITY, |k| times[first + k]);
        ends.push(end);
    }
    pass &= ends[0] < ends[1] && ends[1] < ends[2];
    outcome(pass, format!("violation ends at t = {ends:?} for r = [0, 2, 3.5]"))
}

fn equal_concurrence_unequal_violation() -> Outcome {
    let (p1, p2) = (figure_params(2.0), figure_params(3.5));
    let mut best: Option<(f64, f64, f64, f64)> = None;
    for t in grid(0.6, 6000).into_iter().filter(|&t| t >= 0.1) {
        let dc = concurrence_closed(&p1, t).unwrap() - concurrence_closed(&p2, t).unwrap();
        let db = bell_max_closed(&p1, t).unwrap() - bell_max_closed(&p2, t).unwrap();
        let dp = purity(&assemble_rho(&p1, t).unwrap()) - purity(&assemble_rho(&p2, t).unwrap());
        if dc.abs() < 0.01 && db > 0.0 && dp < 0.0 && best.is_none_or(|b| (t - 0.3).abs() < (b.0 - 0.3).abs()) {
            best = Some((t, dc, db, dp));
        }
    }
    match best {
        Some((t, dc, db, dp)) => {
            outcome(true, format!("t = {t:.4}: C1 - C2 = {dc:.2e}, B1 - B2 = {db:.3e}, purity1 - purity2 = {dp:.3e}"))
        }
        None => outcome(false, "no time in [0.1, 0.6] shows the sign pattern".into()),
    }
}

fn ginibre<const N: usize>(rng: &mut StdRng) -> nalgebra::SMatrix<Complex64, N, N> {
    nalgebra::SMatrix::from_fn(|_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

fn random_state(rng: &mut StdRng) -> TwoQubitState {
    let mut g: Mat4 = ginibre(rng);
    // Rank 1 to 4 so pure and rank-deficient states are sampled too.
    let rank = rng.random_range(1..=4);
    for j in rank..4 {
        g.column_mut(j).fill(Complex64::default());
    }
    let m = g * g.adjoint();
    let tr = m.trace().re;
    TwoQubitState::new(m / Complex64::new(tr, 0.0)).unwrap()
}

fn random_unitary(rng: &mut StdRng) -> Mat2 {
    ginibre::<2>(rng).qr().q()
}

fn random_states_are_sane() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let (mut c_range, mut b_max, mut lu, mut inv) = (true, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100_000 {
        let rho = random_state(&mut rng);
        let c = concurrence(&rho).unwrap();
        let b = bell_max(&rho).unwrap();
        c_range &= (0.0..=1.0).contains(&c);
        b_max = b_max.max(b);
        let u = kron(&random_unitary(&mut rng), &random_unitary(&mut rng));
        let moved = rho.conjugated(&u);
        lu = lu.max((concurrence(&moved).unwrap() - c).abs()).max((bell_max(&moved).unwrap() - b).abs());
        let once = TwoQubitState::from_matrix_unchecked(spin_flip(&rho));
        inv = inv.max((spin_flip(&once) - rho.matrix()).camax());
    }
    let el = start.elapsed();
    outcome(
        c_range && b_max <= TSIRELSON + 1e-9 && lu < 1e-10 && inv < 1e-12 && within(el, 60.0),
        format!(
            "C in [0,1]: {c_range}, max B = {b_max:.12}, local-unitary drift {lu:.1e}, involution {inv:.1e}, {:.1} s",
            el.as_secs_f64()
        ),
    )
}

fn expectation_matches_concurrence() -> Outcome {
    let mut worst = 0.0f64;
    for (p, t) in model_grid() {
        let rho = assemble_rho(&p, t).unwrap();
        let basis = meter_basis(&p, t).unwrap();
        worst = worst.max((concurrence_expectation(&rho, &basis) - concurrence(&rho).unwrap()).abs());
    }
    outcome(worst < 1e-10, format!("max |C_exp - C| = {worst:.2e}"))
}

fn pure_states_are_consistent() -> Outcome {
    let rho0 = Mat2::from_element(Complex64::new(0.5, 0.0));
    let mut worst = 0.0f64;
    for k in 1..=9 {
        let p = k as f64 / 10.0;
        let ov = PointerOverlaps::from_values(p, p);
        let rho = assemble_from_overlaps(&rho0, &ov);
        let c_exact = (1.0 - p * p).sqrt();
        let b_exact = 2.0 * (1.0 + c_exact * c_exact).sqrt();
        for err in [
            concurrence(&rho).unwrap() - c_exact,
            concurrence_from_overlaps(&ov) - c_exact,
            bell_max(&rho).unwrap() - b_exact,
            bell_max_from_overlaps(&ov) - b_exact,
            purity(&rho) - 1.0,
        ] {
            worst = worst.max(err.abs());
        }
    }
    outcome(worst < 1e-10, format!("max deviation {worst:.2e} over P = 0.1..0.9"))
}

fn integrator_is_fourth_order() -> Outcome {
    let p = ModelParams::new(2.0, 1.0, 1.0, 0.0).unwrap();
    let t_end = 1.0;
    // A coherent start keeps the error above roundoff down to small steps.
    let d = oracle_cutoff(&p, t_end, ORACLE_LOSS).unwrap();
    let h_stab = step_limit(&p, d).unwrap();
    let run = |h: f64| {
        let opts =
            IntegratorOptions { max_step: Some(h), initial: InitialMeter::Vacuum, max_initial_loss: ORACLE_LOSS };
        integrate_with(&p, &[0.0, t_end], d, &opts).unwrap().pop().unwrap()
    };
    let reference = run(h_stab / 32.0);
    let mut ratios = Vec::new();
    for h in [h_stab, h_stab / 2.0, h_stab / 4.0] {
        ratios.push(run(h).max_abs_diff(&reference) / run(h / 2.0).max_abs_diff(&reference));
    }
    outcome(
        ratios.iter().all(|r| (12.0..=20.0).contains(r)),
        format!("d = {d}, h_max = {h_stab:.3e}, error ratios per halving {ratios:.2?}"),
    )
}

fn main() {
    let checks: [Check; 10] = [
        ("closed forms match matrix measures", closed_forms_match_matrix_measures),
        ("master equation matches closed form", master_equation_matches_closed_form),
        ("squeezing slows decoherence", squeezing_slows_decoherence),
        ("concurrence peak moves later with squeezing", concurrence_peak_moves_later),
        ("Bell violation window", bell_violation_window),
        ("equal concurrence with unequal violation", equal_concurrence_unequal_violation),
        ("random states are sane", random_states_are_sane),
        ("expectation form matches concurrence", expectation_matches_concurrence),
        ("pure states are consistent", pure_states_are_consistent),
        ("integrator is fourth order", integrator_is_fourth_order),
    ];
    let mut failed = 0;
    for (k, (name, check)) in checks.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|e| outcome(false, format!("panicked: {:?}", e.downcast_ref::<String>())));
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2} {name}: {}", k + 1, result.detail);
        failed += usize::from(!result.pass);
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
