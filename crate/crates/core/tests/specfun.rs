use noclone::specfun::*;
use proptest::prelude::*;
use statrs::function::gamma::ln_gamma as statrs_ln_gamma;

#[test]
fn low_order_polynomials_match_explicit_forms() {
    for &x in &[-1.3, 0.0, 0.4, 2.5, 7.0] {
        let l3 = (-x * x * x + 9.0 * x * x - 18.0 * x + 6.0) / 6.0;
        assert!((laguerre(3, x) - l3).abs() < 1e-12 * (1.0 + l3.abs()));
        // L_2^{(1)}(x) = (x² − 6x + 6)/2
        let l21 = (x * x - 6.0 * x + 6.0) / 2.0;
        assert!((generalized_laguerre(2, 1, x) - l21).abs() < 1e-12 * (1.0 + l21.abs()));
        let h4 = 16.0 * x.powi(4) - 48.0 * x * x + 12.0;
        assert!((hermite(4, x) - h4).abs() < 1e-10 * (1.0 + h4.abs()));
    }
}

#[test]
fn hermite_functions_are_orthonormal() {
    let rule = gauss_legendre(400);
    // map [-1, 1] to [-14, 14]
    let n = 30;
    let mut gram = vec![0.0; (n + 1) * (n + 1)];
    for (t, w) in rule.nodes.iter().zip(&rule.weights) {
        let x = 14.0 * t;
        let phi = hermite_functions(n, x);
        for a in 0..=n {
            for b in 0..=n {
                gram[a * (n + 1) + b] += 14.0 * w * phi[a] * phi[b];
            }
        }
    }
    for a in 0..=n {
        for b in 0..=n {
            let want = if a == b { 1.0 } else { 0.0 };
            assert!((gram[a * (n + 1) + b] - want).abs() < 1e-10, "({a},{b}) = {}", gram[a * (n + 1) + b]);
        }
    }
}

#[test]
fn gauss_hermite_integrates_even_moments() {
    let rule = GaussHermite::new(20);
    for k in 0..20 {
        let m: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(2 * k)).sum();
        let want = statrs_ln_gamma(k as f64 + 0.5).exp();
        assert!(((m - want) / want).abs() < 1e-11, "moment {k}: {m} vs {want}");
    }
}

#[test]
fn gauss_laguerre_integrates_factorials() {
    let rule = gauss_laguerre(15);
    for k in 0..29 {
        let m: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(k)).sum();
        let want = statrs_ln_gamma(k as f64 + 1.0).exp();
        assert!(((m - want) / want).abs() < 1e-10, "moment {k}: {m} vs {want}");
    }
}

#[test]
fn ln_factorial_matches_an_independent_gamma() {
    for n in [0usize, 1, 5, 20, 170, 1023, 1024, 5000] {
        let want = statrs_ln_gamma(n as f64 + 1.0);
        assert!((ln_factorial(n) - want).abs() < 1e-9 * want.abs().max(1.0), "{n}");
    }
}

#[test]
fn kronrod_integrates_an_oscillating_kink() {
    // ∫₀¹⁰ |sin x| dx = 6 + (1 − cos 10)... split at π, 2π, 3π
    let (v, err) = adaptive_gauss_kronrod(|x| [x.sin().abs(), x.cos()], 0.0, 10.0, 4, 1e-11, 4000).unwrap();
    let want = 6.0 + (1.0 - (10.0f64 - 3.0 * std::f64::consts::PI).cos());
    assert!((v[0] - want).abs() < 1e-9, "{} vs {want}", v[0]);
    assert!((v[1] - 10f64.sin()).abs() < 1e-12);
    assert!(err < 1e-9);
}

#[test]
fn terminating_hypergeometric_matches_its_sum() {
    // ₂F₁(−n, a; c; z) summed by hand
    let (a, n, c, z) = (1.5, 4usize, 2.25, 0.3);
    let mut term = 1.0;
    let mut s = 1.0;
    for k in 0..n {
        term *= (k as f64 - n as f64) * (a + k as f64) / ((c + k as f64) * (k as f64 + 1.0)) * z;
        s += term;
    }
    assert!((gauss_2f1_terminating(a, n, c, z).unwrap() - s).abs() < 1e-13);
}

#[test]
fn number_state_expansion_reconstructs_the_kernel() {
    for n in 0..=6 {
        let t = hermite_expansion_coeffs(n, 4 * n);
        assert!(t.max_odd() == 0.0);
        for &(x, p) in &[(0.3, -0.7), (1.9, 0.4), (-2.5, 2.2)] {
            let z: f64 = (x * x + p * p) / 2.0;
            let want = laguerre(n, z).powi(2) * (-z).exp();
            assert!((t.reconstruct(x, p) - want).abs() < 1e-8, "n = {n} at ({x}, {p})");
        }
    }
}

proptest! {
    #[test]
    fn laguerre_three_term_recurrence(n in 1usize..60, x in 0.0f64..40.0) {
        let lhs = (n as f64 + 1.0) * laguerre(n + 1, x);
        let rhs = (2.0 * n as f64 + 1.0 - x) * laguerre(n, x) - n as f64 * laguerre(n - 1, x);
        let scale = laguerre(n, x).abs() + laguerre(n - 1, x).abs() + 1.0;
        prop_assert!((lhs - rhs).abs() < 1e-9 * scale * (n as f64 + x));
    }

    #[test]
    fn scaled_hermite_agrees_with_direct(n in 0usize..40, x in -6.0f64..6.0) {
        let (m, e) = hermite_scaled(n, x);
        let direct = hermite(n, x);
        let rebuilt = m * 2f64.powi(e as i32);
        prop_assert!((rebuilt - direct).abs() <= 1e-10 * direct.abs().max(1.0));
    }

    #[test]
    fn laguerre_sequence_matches_single_evaluations(n in 0usize..30, k in 0usize..6, x in 0.0f64..20.0) {
        let seq = laguerre_sequence(n, k, x);
        let single = generalized_laguerre(n, k, x);
        prop_assert!((seq[n] - single).abs() <= 1e-9 * single.abs().max(1.0));
    }
}
