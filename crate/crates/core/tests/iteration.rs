use noclone::cloner::{CloneKernel, CloneOperator, Grid, GridWavefunction};
use noclone::iteration::*;
use noclone::InputState;
use proptest::prelude::*;
use std::sync::Arc;

#[test]
fn vacuum_radial_law() {
    // z = (x² + p²)/2 under |φ₀(x)φ₀(p)|² is exponential with rate 2
    let psi = GridWavefunction::two_mode_vacuum(Grid::symmetric(256));
    let prof = pz_profile(&psi, PZ_BIN, PZ_MAX).unwrap();
    let (t1, t2) = prof.total();
    assert!((t1 - 1.0).abs() < 1e-9 && (t2 - 1.0).abs() < 1e-9);
    assert!(prof.beyond.0 < 1e-12);
    // the mean is ½, and ⟨e^{-z}⟩ is the vacuum overlap 2/3
    assert!((prof.integrate(|z| z) - 0.5).abs() < 2e-3);
    assert!((prof.integrate(|z| (-z).exp()) - 2.0 / 3.0).abs() < 1e-3);
    // single bins hold few lattice radii, so compare the distribution function
    let mut cdf = 0.0;
    for (k, p) in prof.p1.iter().enumerate().take(200) {
        cdf += p * prof.dz;
        let edge = (k + 1) as f64 * prof.dz;
        let want = 1.0 - (-2.0 * edge).exp();
        if (k + 1) % 25 == 0 {
            assert!((cdf - want).abs() < 1e-2, "CDF({edge}) = {cdf} vs {want}");
        }
    }
}

#[test]
fn ansatz_at_zero_squeezing() {
    // both the narrow and the wide component are the vacuum at r = 0
    let f = analytic_ansatz_fidelity(0, 0.0).unwrap();
    assert!((f - 2.0 / 3.0).abs() < 1e-12, "{f}");
    assert!((ansatz_normalization(0.0) - 0.5).abs() < 1e-15);
}

#[test]
fn one_photon_ansatz_optimum() {
    let (r, f) = optimal_ansatz_r(1).unwrap();
    assert!((r - 1.277).abs() < 2e-3, "r = {r}");
    assert!((f - 0.53925).abs() < 1e-4, "F = {f}");
}

#[test]
fn ansatz_samples_are_normalized_and_match_the_closed_form() {
    for (n, r) in [(1usize, 0.8), (2, 1.4)] {
        let a = ansatz(r, ansatz_grid(r)).unwrap();
        assert!((a.wavefunction.norm() - 1.0).abs() < 1e-12);
        let kernel = CloneKernel::build(&InputState::Fock(n), a.wavefunction.grid).unwrap();
        let q = CloneOperator::new(Arc::new(kernel)).rayleigh_quotient(&a.wavefunction);
        assert!((q - analytic_ansatz_fidelity(n, r).unwrap()).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn power_iteration_never_loses_fidelity(n in 0usize..3, r in 0.2f64..1.2) {
        let grid = ansatz_grid(r);
        let a = ansatz(r, grid).unwrap();
        let kernel = CloneKernel::build(&InputState::Fock(n), grid).unwrap();
        let t = power_iterate(&a.wavefunction, &kernel, 4).unwrap();
        for w in t.trace.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12);
        }
    }

    #[test]
    fn ansatz_fidelity_stays_below_the_coherent_bound(n in 0usize..4, r in 0.0f64..3.0) {
        let f = analytic_ansatz_fidelity(n, r).unwrap();
        prop_assert!(f > 0.0 && f < 0.6826);
    }
}
