use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use qsense_core::distinguishability::{critical_fidelity, SampleBudget};
use qsense_core::envelope::EnvelopeSpec;
use qsense_core::manybody::verify_scaling;
use qsense_core::pauli::{eig, evolve_fixed_axis, fidelity, propagate_td, stats, PauliHamiltonian, QubitState};
use qsense_core::qsl::{
    actual_crossing_time, actual_crossing_time_static, bound_envelope, bound_static, ml_static, Crossing,
};
use qsense_core::scenarios::{ac_tmin, ac_tmin_numeric, biomagnetic_threshold, AcScenario, ProbeKind};

fn hamiltonian() -> impl Strategy<Value = PauliHamiltonian> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64)
        .prop_filter("non-degenerate", |(_, x, y, z)| x * x + y * y + z * z > 1e-4)
        .prop_map(|(a0, x, y, z)| PauliHamiltonian::new(a0, x, y, z))
}

fn state() -> impl Strategy<Value = QubitState> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(a, b, c, d)| a * a + b * b + c * c + d * d > 1e-3)
        .prop_map(|(a, b, c, d)| QubitState::normalized(Complex64::new(a, b), Complex64::new(c, d)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn propagator_is_unitary(h in hamiltonian(), phase in -20.0..20.0f64) {
        let u = h.exp_minus_i(phase).0;
        for r in 0..2 {
            for c in 0..2 {
                let dot: Complex64 = (0..2).map(|k| u[k][r].conj() * u[k][c]).sum();
                let want = if r == c { 1.0 } else { 0.0 };
                prop_assert!((dot - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn eigenstates_are_stationary(h in hamiltonian(), t in 0.0..50.0f64) {
        let es = eig(&h);
        for v in [es.v_plus, es.v_minus] {
            prop_assert!((fidelity(&evolve_fixed_axis(&h, t, &v), &v) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn time_ordering_reduces_for_fixed_axis(h in hamiltonian(), psi in state(), k in 0.1..2.0f64, t in 0.1..4.0f64) {
        // r(t) = sin kt along a fixed axis: the ordered product equals the closed form
        let ordered = propagate_td(|s| h * (k * s).sin(), 0.0, t, &psi, 1e-8).unwrap();
        let closed = evolve_fixed_axis(&h, (1.0 - (k * t).cos()) / k, &psi);
        prop_assert!((fidelity(&ordered, &closed) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn static_bounds_never_exceed_actual(omega in 0.1..5.0f64, c in 0.001..0.999f64, n in 1u64..1000) {
        let f0 = critical_fidelity(SampleBudget::new(n).unwrap());
        let st = stats(&PauliHamiltonian::sigma_z(0.5 * omega), &QubitState::from_weight(c).unwrap());
        let b = bound_static(&st, f0).unwrap();
        let bound = b.t_min.unwrap();
        match actual_crossing_time_static(omega, c, f0).unwrap() {
            Crossing::At(t) => prop_assert!(t >= bound * (1.0 - 1e-12), "{t} < {bound}"),
            Crossing::Infeasible => prop_assert!((1.0 - 2.0 * c).powi(2) > f0),
        }
    }

    #[test]
    fn equal_weight_saturates_mt(omega in 0.1..5.0f64, n in 1u64..1000) {
        let f0 = critical_fidelity(SampleBudget::new(n).unwrap());
        let st = stats(&PauliHamiltonian::sigma_z(0.5 * omega), &QubitState::plus());
        let mt = bound_static(&st, f0).unwrap().tau_mt.time().unwrap();
        let t = actual_crossing_time_static(omega, 0.5, f0).unwrap().time().unwrap();
        prop_assert!((t - mt).abs() <= 1e-9 * mt.max(1.0));
    }

    #[test]
    fn envelope_bounds_never_exceed_actual(
        omega in 0.2..3.0f64, c in 0.01..0.99f64, k in 0.05..2.0f64, n in 1u64..50,
    ) {
        let f0 = critical_fidelity(SampleBudget::new(n).unwrap());
        let env = EnvelopeSpec::sinusoid(k, 4.0 * PI / k).unwrap();
        let b = bound_envelope(omega, c, &env, f0).unwrap();
        if let Crossing::At(t) = actual_crossing_time(omega, c, &env, f0).unwrap() {
            let mt = b.tau_mt.time().expect("bound reached before the actual crossing");
            let ml = b.tau_ml.time().expect("bound reached before the actual crossing");
            prop_assert!(t >= mt.max(ml) - 2e-9, "{t} vs {mt} / {ml}");
        }
    }

    #[test]
    fn lower_reference_loosens_ml(mean in -1.0..1.0f64, gap in 0.01..2.0f64, drop in 1e-6..5.0f64, n in 1u64..100) {
        let f0 = critical_fidelity(SampleBudget::new(n).unwrap());
        let e_g = mean - gap;
        prop_assert!(ml_static(mean, e_g - drop, f0).unwrap() < ml_static(mean, e_g, f0).unwrap());
    }

    #[test]
    fn many_body_scaling_holds(h in hamiltonian(), psi in state(), m in 2usize..7) {
        verify_scaling(&h, &psi, [m]).unwrap();
    }

    #[test]
    fn ac_closed_form_matches_quadrature(omega in 0.2..3.0f64, frac in 0.01..0.99f64, n in 1u64..200) {
        let probe = AcScenario::single(omega, 1.0, n).unwrap();
        let kmax = qsense_core::scenarios::ac_kmax(&probe);
        let s = AcScenario::single(omega, frac * kmax, n).unwrap();
        let a = ac_tmin(&s).time().unwrap();
        let b = ac_tmin_numeric(&s).unwrap().time().unwrap();
        prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn biomagnetic_threshold_monotone(f in 0.1..1000.0f64, df in 0.1..100.0f64, n in 1u64..1_000_000, m in 1u32..20) {
        let b = SampleBudget::new(n).unwrap();
        let b2 = SampleBudget::new(n + 1).unwrap();
        for kind in [ProbeKind::Product, ProbeKind::Ghz] {
            let base = biomagnetic_threshold(f, b, m, kind).unwrap();
            prop_assert!(biomagnetic_threshold(f + df, b, m, kind).unwrap() > base);
            prop_assert!(biomagnetic_threshold(f, b2, m, kind).unwrap() < base);
            prop_assert!(biomagnetic_threshold(f, b, m + 1, kind).unwrap() < base);
        }
    }
}

#[test]
fn many_body_random_cases() {
    // fixed draws keep the sweep reproducible
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..30 {
        let mut u = || rng.random_range(-1.0..1.0);
        let h = PauliHamiltonian::new(u(), u(), u(), u());
        let psi = QubitState::normalized(Complex64::new(u(), u()), Complex64::new(u(), u())).unwrap();
        verify_scaling(&h, &psi, 2..=6).unwrap();
    }
}
