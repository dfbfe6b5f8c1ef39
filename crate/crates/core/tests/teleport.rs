use noclone::states::{sample_haar_pure, C64};
use noclone::teleport::*;
use noclone::InputState;
use proptest::prelude::*;

#[test]
fn coherent_and_single_photon_fidelities_in_closed_form() {
    for r in [0.0, 0.2, 0.7, 1.5] {
        let s = (-2.0f64 * r).exp();
        let f0 = 1.0 / (1.0 + s);
        assert!((tmsv_fidelity(&InputState::Fock(0), r).unwrap() - f0).abs() < 1e-13);
        // (1/π) ∫ e^{-(1+s)|ξ|²} (1 − |ξ|²)² d²ξ
        let t = 1.0 / (1.0 + s);
        let f1 = t - 2.0 * t * t + 2.0 * t * t * t;
        assert!((tmsv_fidelity(&InputState::Fock(1), r).unwrap() - f1).abs() < 1e-13);
    }
}

#[test]
fn moment_route_matches_closed_forms() {
    let inputs = [InputState::Fock(2), InputState::Cat { alpha: 1.3, gamma: -1 }, InputState::Cat { alpha: 0.8, gamma: 0 }, InputState::pure(sample_haar_pure(3, 5))];
    for input in &inputs {
        for r in [0.0, 0.35, 1.1] {
            let a = tmsv_fidelity(input, r).unwrap();
            let b = tmsv_fidelity_moments(input, r).unwrap();
            assert!((a - b).abs() < 1e-10, "{:?} at r = {r}: {a} vs {b}", input.descriptor());
        }
    }
}

#[test]
fn f0_is_the_exponential_of_the_epr_operator() {
    for d in [0usize, 1, 3] {
        let o = epr_operator_block(d, 120);
        let e = (-o).exp();
        for i in 0..12 {
            for l in 0..12 {
                assert!((e[(i, l)] - f0_element(d, i, l)).abs() < 1e-12, "d = {d} ({i}, {l})");
            }
        }
    }
}

#[test]
fn block_route_reproduces_the_tmsv_fidelity() {
    for n in 0..=3usize {
        let block = teleport_operator_block(n, 0, 150).unwrap();
        for r in [0.1, 0.5, 0.9] {
            let f = block.expectation(&tmsv_coefficients(r, 150)).unwrap();
            let want = tmsv_fidelity(&InputState::Fock(n), r).unwrap();
            assert!((f - want).abs() < 1e-9, "n = {n}, r = {r}: {f} vs {want}");
        }
    }
}

#[test]
fn tmsv_block_has_the_right_photon_number() {
    let r: f64 = 0.6;
    let res = TwoModeResource::Block { d: 0, coeffs: tmsv_coefficients(r, 200) };
    assert!((res.mean_photon_number() - r.sinh().powi(2)).abs() < 1e-12);
    let f = resource_fidelity(&res, 1).unwrap();
    assert!((f - resource_fidelity(&TwoModeResource::Tmsv(r), 1).unwrap()).abs() < 1e-10);
}

#[test]
fn critical_squeezing_inverts_the_fidelity() {
    for n in 0..=3usize {
        let input = InputState::Fock(n);
        let f_vac = tmsv_fidelity(&input, 0.0).unwrap();
        for target in [0.55, 0.6, 0.66] {
            let r = critical_squeezing(&input, target).unwrap();
            if target <= f_vac {
                assert_eq!(r, 0.0);
            } else {
                assert!((tmsv_fidelity(&input, r).unwrap() - target).abs() < 1e-10);
            }
        }
        assert!(critical_squeezing(&input, 1.0).is_err());
    }
}

#[test]
fn frontier_trades_photons_for_fidelity() {
    let f = pnes_frontier(1, &lambda_grid(1e-2, 10.0, 25), 150).unwrap();
    assert!(f.len() > 10);
    for w in f.windows(2) {
        assert!(w[1].n_av >= w[0].n_av);
        assert!(w[1].fidelity >= w[0].fidelity - 1e-12);
    }
    // at equal photon number the optimum beats the TMSV
    for p in &f {
        let r = p.n_av.sqrt().asinh();
        assert!(p.fidelity >= tmsv_fidelity(&InputState::Fock(1), r).unwrap() - 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mirrored_blocks_coincide(n in 0usize..4, d in 1i64..4, i_max in 5usize..40) {
        let a = teleport_operator_block(n, d, i_max).unwrap();
        let b = teleport_operator_block(n, -d, i_max).unwrap();
        prop_assert_eq!(a.matrix, b.matrix);
    }

    #[test]
    fn swapping_modes_keeps_the_fidelity(n in 0usize..3, coeffs in proptest::collection::vec(-1.0f64..1.0, 2..12), d in -2i64..3) {
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let c: Vec<C64> = coeffs.iter().map(|x| C64::new(x / norm, 0.0)).collect();
        let res = TwoModeResource::Block { d, coeffs: c };
        let a = resource_fidelity(&res, n).unwrap();
        let b = resource_fidelity(&res.swapped(), n).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&a));
    }

    #[test]
    fn blocks_are_symmetric_and_bounded(n in 0usize..4, d in 0i64..3) {
        let b = teleport_operator_block(n, d, 30).unwrap();
        prop_assert_eq!(b.matrix.clone(), b.matrix.transpose());
        let top = b.matrix.clone().symmetric_eigen().eigenvalues.max();
        prop_assert!(top <= 1.0 + 1e-10);
    }

    #[test]
    fn tmsv_fidelity_increases_with_squeezing(n in 0usize..4, r in 0.0f64..2.0, dr in 0.01f64..0.5) {
        let input = InputState::Fock(n);
        prop_assert!(tmsv_fidelity(&input, r + dr).unwrap() > tmsv_fidelity(&input, r).unwrap());
    }
}
