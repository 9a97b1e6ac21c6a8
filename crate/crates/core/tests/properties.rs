use meterent::linalg::{hermitian_eigenvalues, Mat4};
use meterent::measures::{bell_max, concurrence, concurrence_closed, eof};
use meterent::model::{alpha_tilde, gamma12, ln_overlap_p, Level, ModelParams};
use meterent::state::{assemble_rho, purity, TwoQubitState};
use num_complex::Complex64;
use proptest::prelude::*;

fn params(alpha0: f64, r: f64) -> ModelParams {
    ModelParams::new(alpha0, 1.0, r, 0.0).unwrap()
}

fn state_from(entries: &[f64]) -> TwoQubitState {
    let g = Mat4::from_fn(|i, j| Complex64::new(entries[2 * (4 * i + j)], entries[2 * (4 * i + j) + 1]));
    let m = g * g.adjoint();
    let tr = m.trace().re;
    TwoQubitState::new(m / Complex64::new(tr, 0.0)).unwrap()
}

fn arb_state() -> impl Strategy<Value = TwoQubitState> {
    prop::collection::vec(-1.0f64..1.0, 32)
        .prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3))
        .prop_map(|v| state_from(&v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn exponent_has_unsqueezed_shape(alpha0 in 0.0f64..100.0, r in 0.0f64..4.0, t in 0.0f64..10.0) {
        let x = t / 2.0;
        let scale = 4.0 * alpha0 * alpha0 * (-2.0 * r).exp();
        let expected = scale * (-x - (-x).exp_m1());
        let got = gamma12(&params(alpha0, r), t).unwrap();
        // The reference itself cancels to about eps·x relative to `scale`.
        let tol = 1e-12 * expected.abs() + 4.0 * f64::EPSILON * scale * x;
        prop_assert!((got - expected).abs() <= tol, "{got} vs {expected}");
    }

    #[test]
    fn coherence_never_exceeds_overlap(alpha0 in 0.0f64..100.0, r in 0.0f64..4.0, t in 0.0f64..10.0) {
        let p = params(alpha0, r);
        prop_assert!(gamma12(&p, t).unwrap() <= ln_overlap_p(&p, t).unwrap() + 1e-12);
    }
}

proptest! {
    #[test]
    fn amplitude_grows_in_time(alpha0 in 0.1f64..100.0, r in 0.0f64..4.0, t in 0.0f64..10.0, dt in 1e-6f64..1.0) {
        let p = params(alpha0, r);
        let a = alpha_tilde(&p, t, Level::Two).unwrap().re;
        let b = alpha_tilde(&p, t + dt, Level::Two).unwrap().re;
        prop_assert!(b > a);
        prop_assert_eq!(alpha_tilde(&p, t, Level::One).unwrap().re, -a);
    }

    #[test]
    fn model_state_is_physical(alpha0 in 0.0f64..100.0, r in 0.0f64..4.0, t in 0.0f64..10.0) {
        let rho = assemble_rho(&params(alpha0, r), t).unwrap();
        prop_assert!((rho.matrix() - rho.matrix().adjoint()).norm() < 1e-15);
        prop_assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(hermitian_eigenvalues(rho.matrix()).unwrap()[0] > -1e-12);
        let pur = purity(&rho);
        prop_assert!((0.25 - 1e-12..=1.0 + 1e-12).contains(&pur));
        let c = concurrence_closed(&params(alpha0, r), t).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
    }

    #[test]
    fn eof_is_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(eof(lo).unwrap() <= eof(hi).unwrap());
    }

    #[test]
    fn bell_bounded_by_concurrence(rho in arb_state()) {
        let c = concurrence(&rho).unwrap();
        let b = bell_max(&rho).unwrap();
        prop_assert!(b <= 2.0 * 2f64.sqrt() + 1e-9);
        prop_assert!(b <= 2.0 * (1.0 + c * c).sqrt() + 1e-9, "B = {b}, C = {c}");
    }

    #[test]
    fn concurrence_is_convex(a in arb_state(), b in arb_state(), w in 0.0f64..1.0) {
        let mix = TwoQubitState::new(a.matrix() * Complex64::new(w, 0.0) + b.matrix() * Complex64::new(1.0 - w, 0.0)).unwrap();
        let lhs = concurrence(&mix).unwrap();
        let rhs = w * concurrence(&a).unwrap() + (1.0 - w) * concurrence(&b).unwrap();
        prop_assert!(lhs <= rhs + 1e-10);
    }
}
