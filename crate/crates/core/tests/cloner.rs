use noclone::cloner::*;
use noclone::states::*;
use noclone::InputState;
use proptest::prelude::*;
use std::sync::Arc;

fn grid_params(size: usize) -> SolverParams {
    SolverParams { grid: Grid::symmetric(size), ..Default::default() }
}

#[test]
fn general_routes_match_number_state_closed_forms() {
    // the generic quadrature routes know nothing about number states
    let gaussian = [2.0 / 3.0, 10.0 / 27.0, 22.0 / 81.0, 490.0 / 2187.0];
    let classical = [0.5, 0.25, 3.0 / 16.0, 5.0 / 32.0];
    for n in 0..4 {
        let generic = InputState::pure(make_fock(n).resized(n + 2));
        assert!((gaussian_ncb(&generic).unwrap() - gaussian[n]).abs() < 1e-12);
        assert!((classical_bound(&generic).unwrap().bound - classical[n]).abs() < 1e-10, "n = {n}");
        assert!((classical_bound(&InputState::Fock(n)).unwrap().bound - classical[n]).abs() < 1e-12);
    }
}

#[test]
fn cat_kernels_match_the_generic_pure_kernel() {
    for (alpha, g) in [(0.4, 1i8), (1.3, -1), (2.0, 1)] {
        let closed = InputState::Cat { alpha, gamma: g };
        let generic = InputState::pure(make_cat_vector(alpha, g).unwrap());
        for &(w1, w2) in &[(0.0, 0.0), (0.5, -1.2), (2.1, 0.3), (-1.4, 3.3)] {
            assert!((closed.kernel(w1, w2) - generic.kernel(w1, w2)).abs() < 1e-12, "α = {alpha}");
        }
    }
    let mix = InputState::Cat { alpha: 1.1, gamma: 0 };
    let generic = InputState::Mixed(make_coherent_mixture(1.1));
    for &(w1, w2) in &[(0.0, 0.0), (0.9, -0.4), (-2.0, 2.5)] {
        assert!((mix.kernel(w1, w2) - generic.kernel(w1, w2)).abs() < 1e-12);
    }
}

#[test]
fn fock_and_grid_routes_agree_for_one_photon() {
    let f = ncb_fock(&InputState::Fock(1), &SolverParams::default(), None).unwrap();
    let g = ncb_grid(&InputState::Fock(1), &grid_params(256), None).unwrap();
    assert!((f.bound - g.bound).abs() < 1e-4);
    assert!(f.bound < g.bound, "the Fock route converges from below");
}

#[test]
fn general_fock_route_handles_a_superposition() {
    let psi = make_superposition(C64::new(1.0, 0.0), C64::new(0.0, 0.6), C64::new(0.3, 0.0)).unwrap();
    let input = InputState::pure(psi);
    let f = ncb_fock(&input, &SolverParams { n_trunc: 60, ..Default::default() }, None).unwrap();
    let g = ncb_grid(&input, &grid_params(128), None).unwrap();
    assert_eq!(f.params["route"], "general");
    assert!(f.bound <= g.bound + 1e-6 && g.bound - f.bound < 2e-2, "{} vs {}", f.bound, g.bound);
}

#[test]
fn truncation_sweep_is_monotone() {
    let rows = truncation_sweep(&InputState::Fock(2), &[10, 20, 30, 40, 60], &SolverParams::default()).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].bound >= w[0].bound - 1e-10);
    }
}

#[test]
fn route_limits_are_reported() {
    assert!(matches!(ncb_fock(&InputState::Fock(11), &SolverParams::default(), None), Err(noclone::Error::NotImplemented(_))));
    assert!(matches!(ncb_fock(&InputState::Cat { alpha: 3.0, gamma: 1 }, &SolverParams::default(), None), Err(noclone::Error::NotImplemented(_))));
    assert!(fock_route_supports(&InputState::Fock(10)) && !fock_route_supports(&InputState::Fock(11)));
    assert!(matches!(CloneKernel::build(&InputState::Cat { alpha: 40.0, gamma: 1 }, Grid::symmetric(128)), Err(noclone::Error::Extent(_))));
}

#[test]
fn matrix_elements_are_symmetric() {
    for &(i, j, l, m) in &[(0, 0, 2, 0), (1, 2, 3, 0), (2, 1, 0, 3), (4, 2, 2, 4)] {
        let a = fock_ncb_matrix_element(1, i, j, l, m);
        let b = fock_ncb_matrix_element(1, l, m, i, j);
        assert!((a - b).abs() < 1e-13);
    }
    // ⟨00|f̂(x̂₁, p̂₂)|00⟩ for the vacuum kernel is ∫ e^{-(x²+p²)/2} |φ₀(x)φ₀(p)|² = 2/3
    assert!((fock_ncb_matrix_element(0, 0, 0, 0, 0) - 2.0 / 3.0).abs() < 1e-13);
}

fn random_wavefunction(grid: Grid, seed: u64) -> GridWavefunction {
    let psi = sample_haar_pure(4, seed);
    let a = psi.amplitudes().to_vec();
    GridWavefunction::from_fn(grid, move |x, p| {
        let g = (-(x * x + p * p) / 3.0).exp();
        g * (a[0] + a[1] * x + a[2] * p * p + a[3] * x * p)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn clone_operator_is_hermitian_and_positive(s1 in 0u64..1000, s2 in 0u64..1000, seed in 0u64..1000) {
        let grid = Grid::symmetric(32);
        let input = InputState::pure(sample_haar_pure(3, seed));
        let op = CloneOperator::new(Arc::new(CloneKernel::from_fn(grid, |a, b| input.kernel(a, b))));
        let (u, v) = (random_wavefunction(grid, s1), random_wavefunction(grid, s2));
        let au = GridWavefunction { grid, values: op.apply(&u.values) };
        let av = GridWavefunction { grid, values: op.apply(&v.values) };
        prop_assert!((u.inner(&av) - au.inner(&v)).norm() < 1e-12);
        prop_assert!(u.inner(&au).re >= -1e-14);
    }

    #[test]
    fn kernels_are_even_and_peak_at_the_origin(seed in 0u64..1000, w1 in -4.0f64..4.0, w2 in -4.0f64..4.0) {
        let rho = sample_random_density(3, seed);
        let input = InputState::Mixed(rho.clone());
        let f = input.kernel(w1, w2);
        prop_assert!((f - input.kernel(-w1, -w2)).abs() < 1e-14);
        // Cauchy–Schwarz in the Hilbert–Schmidt product
        prop_assert!(f <= rho.purity() + 1e-12);
        prop_assert!((input.kernel(0.0, 0.0) - rho.purity()).abs() < 1e-12);
    }

    #[test]
    fn fock_bounds_grow_with_truncation(n in 0usize..4, lo in 8usize..40, extra in 2usize..30) {
        let p = |t: usize| SolverParams { n_trunc: t, ..Default::default() };
        let a = ncb_fock(&InputState::Fock(n), &p(lo), None).unwrap().bound;
        let b = ncb_fock(&InputState::Fock(n), &p(lo + extra), None).unwrap().bound;
        prop_assert!(b >= a - 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3))]

    #[test]
    fn bound_ignores_displacement_and_rotation(seed in 0u64..1000, ar in -0.5f64..0.5, ai in -0.5f64..0.5, phi in 0.0f64..std::f64::consts::TAU) {
        let psi = sample_haar_pure(3, seed);
        let p = grid_params(128);
        let base = ncb_grid(&InputState::pure(psi.clone()), &p, None).unwrap().bound;
        let moved = apply_displacement(&psi.resized(40), C64::new(ar, ai)).unwrap();
        let shifted = ncb_grid(&InputState::pure(moved), &p, None).unwrap().bound;
        prop_assert!((shifted - base).abs() < 1e-6, "displaced: {base} vs {shifted}");
        let turn = |phi: f64| {
            let a: Vec<C64> = psi.amplitudes().iter().enumerate().map(|(k, a)| a * C64::from_polar(1.0, k as f64 * phi)).collect();
            ncb_grid(&InputState::pure(FockVector::new(a).unwrap()), &p, None).unwrap().bound
        };
        // quarter turns map the square lattice onto itself; other angles converge as the grid is refined
        let quarter = turn(std::f64::consts::FRAC_PI_2);
        prop_assert!((quarter - base).abs() < 1e-12, "quarter turn: {base} vs {quarter}");
        let rotated = turn(phi);
        prop_assert!((rotated - base).abs() < 2e-5, "rotated: {base} vs {rotated}");
        prop_assert!(base < 0.6826);
    }
}
