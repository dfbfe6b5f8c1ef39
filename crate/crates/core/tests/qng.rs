use noclone::qng::*;
use noclone::states::*;
use proptest::prelude::*;

#[test]
fn number_state_deltas_are_thermal_entropies() {
    for n in 0..6usize {
        let nf = n as f64;
        let want = if n == 0 { 0.0 } else { (nf + 1.0) * (nf + 1.0).ln() - nf * nf.ln() };
        assert!((delta_pure(&make_fock(n)).unwrap() - want).abs() < 1e-12);
        assert!((thermal_entropy(nf) - want).abs() < 1e-12);
    }
    assert!((thermal_entropy(1.0) - 2.0 * 2f64.ln()).abs() < 1e-15);
}

#[test]
fn gaussian_pure_states_have_no_delta() {
    let sq = apply_squeeze(&make_fock(0).resized(80), 0.5).unwrap();
    let moved = apply_displacement(&sq, C64::new(0.3, -0.2)).unwrap();
    assert!(delta_pure(&moved).unwrap().abs() < 1e-9);
}

#[test]
fn number_state_negativities_in_closed_form() {
    // ∫|W| = ∫₀^∞ |L_n(2u)| e^{-u} du
    let one = 4.0 * (-0.5f64).exp() - 1.0;
    let q = |u: f64| (2.0 * u * u + 1.0) * (-u).exp();
    let (u1, u2) = (1.0 - 0.5f64.sqrt(), 1.0 + 0.5f64.sqrt());
    let two = 1.0 - 2.0 * q(u1) + 2.0 * q(u2);
    for (n, abs) in [(1usize, one), (2, two)] {
        let w = wigner_integrals(&make_fock(n).to_density()).unwrap();
        assert!((w.abs - abs).abs() < 1e-9, "n = {n}: {} vs {abs}", w.abs);
        assert!((w.total - 1.0).abs() < 1e-9);
        assert!((wigner_negativity(&make_fock(n).to_density()).unwrap() - abs.ln()).abs() < 1e-9);
    }
}

#[test]
fn positive_wigner_functions_have_no_negativity() {
    for rho in [make_fock(0).to_density(), make_coherent(C64::new(0.7, 0.2)).to_density(), make_coherent_mixture(1.2)] {
        assert!(wigner_negativity(&rho).unwrap() < 1e-9);
    }
}

#[test]
fn spearman_on_hand_ranked_data() {
    assert!((spearman(&[1.0, 2.0, 3.0, 4.0], &[10.0, 20.0, 30.0, 40.0]) - 1.0).abs() < 1e-15);
    assert!((spearman(&[1.0, 2.0, 3.0, 4.0], &[4.0, 3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
    // ranks (1,2,3,4,5) against (2,1,4,3,5): 1 − 6·4/(5·24) = 0.8
    assert!((spearman(&[1.0, 2.0, 3.0, 4.0, 5.0], &[0.2, 0.1, 0.4, 0.3, 0.5]) - 0.8).abs() < 1e-12);
    assert!(spearman(&[1.0], &[2.0]).is_nan());
}

#[test]
fn families_are_parameterised_as_documented() {
    for f in Family::all() {
        let rows = family_members(f, 5, 3).unwrap();
        assert_eq!(rows.len(), 5);
        assert_eq!(f.name().parse::<Family>().unwrap(), f);
        for (_, input, psi) in &rows {
            assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
            let rho = input.density().unwrap();
            let same = rho.resized(psi.dim().max(rho.dim()));
            let want = psi.resized(psi.dim().max(rho.dim())).to_density();
            assert!((same.matrix() - want.matrix()).norm() < 1e-10, "{}", f.name());
        }
    }
    let cats = family_members(Family::EvenCat, 4, 0).unwrap();
    assert!((cats.last().unwrap().0 - CAT_ALPHA_MAX).abs() < 1e-15);
    assert!("gaussian".parse::<Family>().is_err());
}

fn arb_state() -> impl Strategy<Value = FockVector> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3)
        .prop_filter("non-zero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-2)
        .prop_map(|v| FockVector::normalized(v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap())
}

fn rotate(psi: &FockVector, phi: f64) -> FockVector {
    FockVector::new(psi.amplitudes().iter().enumerate().map(|(k, a)| a * C64::from_polar(1.0, k as f64 * phi)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn delta_ignores_displacement_and_rotation(psi in arb_state(), ar in -0.5f64..0.5, ai in -0.5f64..0.5, phi in 0.0f64..std::f64::consts::TAU) {
        let base = delta_pure(&psi).unwrap();
        let moved = apply_displacement(&psi.resized(60), C64::new(ar, ai)).unwrap();
        prop_assert!((delta_pure(&moved).unwrap() - base).abs() < 1e-8);
        prop_assert!((delta_pure(&rotate(&psi, phi)).unwrap() - base).abs() < 1e-12);
        prop_assert!(base >= -1e-12);
    }

    #[test]
    fn wigner_function_is_normalized(seed in 0u64..10_000, dim in 2usize..5) {
        let w = wigner_integrals(&sample_random_density(dim, seed)).unwrap();
        prop_assert!((w.total - 1.0).abs() < 1e-9);
        prop_assert!(w.abs >= 1.0 - 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn negativity_ignores_displacement(psi in arb_state(), ar in -0.5f64..0.5, ai in -0.5f64..0.5) {
        let base = wigner_negativity(&psi.to_density()).unwrap();
        let moved = displace_density(&psi.to_density().resized(40), C64::new(ar, ai)).unwrap();
        let shifted = wigner_negativity(&moved).unwrap();
        prop_assert!((shifted - base).abs() < 1e-7, "{base} vs {shifted}");
    }
}
