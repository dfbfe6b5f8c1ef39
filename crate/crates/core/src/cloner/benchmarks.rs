//! Reference bounds the ultimate cloner must beat: the optimal symmetric
//! Gaussian cloner and the measure-and-prepare (classical) strategy.

use crate::error::{Error, Result};
use crate::input::InputState;
use crate::specfun::{gauss_laguerre, laguerre, ln_factorial, GaussHermite};
use crate::states::{char_fn_value, displacement_matrix, CharFnPolyGauss, FockDensity, FockVector, C64};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// `(1/π) ∫ |χ(ξ)|² e^{-a|ξ|²/2} d²ξ`, the single-clone fidelity of the
/// symmetric 1→2 Gaussian cloner with added-noise parameter `a`.
/// Complete positivity of the cloning map requires `a ≥ 1`.
pub fn gaussian_cloner_fidelity(chi: &CharFnPolyGauss, a: f64) -> Result<f64> {
    if !(a >= 1.0) {
        return Err(Error::Domain(format!("noise parameter a = {a} violates positivity (a ≥ 1)")));
    }
    Ok(moment_sum(chi, 1.0 + a / 2.0))
}

/// `Σ_A Q_{A,A} A!/s^{A+1}` over the `|χ|²` polynomial.
fn moment_sum(chi: &CharFnPolyGauss, s: f64) -> f64 {
    let q = chi.abs_sqr();
    (0..=q.deg).map(|k| q.get(k, k).re * (ln_factorial(k) - (k as f64 + 1.0) * s.ln()).exp()).sum()
}

/// Best symmetric 1→2 Gaussian cloner. The fidelity falls monotonically with
/// the added noise, so the optimum sits on the positivity boundary `a = 1`.
pub fn gaussian_ncb(input: &InputState) -> Result<f64> {
    input.noisy_overlap(0.5)
}

/// Optimal 1→M Gaussian cloner, `a = (2M − 2)/M`.
pub fn gaussian_ncb_1_to_m(input: &InputState, m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::Domain(format!("number of clones M = {m} must be ≥ 2")));
    }
    let a = (2.0 * m as f64 - 2.0) / m as f64;
    input.noisy_overlap(a / 2.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalBound {
    pub bound: f64,
    #[serde(skip)]
    pub optimal_rho_t: FockDensity,
}

/// Largest support [`classical_bound`] accepts.
pub const CLASSICAL_MAX_SUPPORT: usize = 64;

/// Largest eigenvalue of the operator `Â` whose characteristic function is
/// `½ χ(ξ/√2) χ(−ξ/√2)`; its top eigenstate is the optimal state to prepare
/// after a measurement.
pub fn classical_bound(input: &InputState) -> Result<ClassicalBound> {
    if let Some(n) = input.fock_order() {
        return Ok(fock_classical_bound(n));
    }
    let rho = input.density()?;
    let d = rho.support(1e-14) + 1;
    if d > CLASSICAL_MAX_SUPPORT {
        // the quadrature grows as d² nodes, each a (2d)² displacement matrix
        return Err(Error::NotImplemented(format!("classical bound supports inputs on at most {CLASSICAL_MAX_SUPPORT} levels (this one needs {d})")));
    }
    let rho = rho.resized(d);
    let dim = 2 * d - 1;
    let k = 4 * (d - 1) + 2;
    let rule = GaussHermite::new(k);
    let sq2 = 2f64.sqrt();
    // ξ = u + iv on a tensor grid; ŵ already carries e^{u²}
    let pts: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
    let a = pts
        .par_iter()
        .map(|&(i, j)| {
            let xi = C64::new(rule.nodes[i], rule.nodes[j]);
            let w = rule.scaled_weights[i] * rule.scaled_weights[j];
            let chi_a = char_fn_value(&rho, xi / sq2) * char_fn_value(&rho, -xi / sq2) * 0.5;
            displacement_matrix(dim, dim, -xi) * (chi_a * w)
        })
        .reduce(|| DMatrix::zeros(dim, dim), |x, y| x + y)
        / C64::new(PI, 0.0);
    let herm = (&a + a.adjoint()) * C64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let (top, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.partial_cmp(y.1).unwrap())
        .expect("non-empty spectrum");
    let v: Vec<C64> = eig.eigenvectors.column(top).iter().copied().collect();
    let psi = FockVector::normalized(v)?;
    Ok(ClassicalBound { bound: value, optimal_rho_t: psi.to_density() })
}

/// For `|n⟩`, `Â` is diagonal with `a_k = ½ ∫ [L_n(t/2)]² L_k(t) e^{-t} dt`,
/// nonzero only for `k ≤ 2n`.
pub fn fock_classical_diagonal(n: usize) -> Vec<f64> {
    let rule = gauss_laguerre(2 * n + 2);
    (0..=2 * n)
        .map(|k| {
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&t, &w)| {
                    let l = laguerre(n, t / 2.0);
                    0.5 * w * l * l * laguerre(k, t)
                })
                .sum()
        })
        .collect()
}

fn fock_classical_bound(n: usize) -> ClassicalBound {
    let diag = fock_classical_diagonal(n);
    let (k, &bound) = diag.iter().enumerate().max_by(|a, b| a.1.partial_cmp(b.1).unwrap()).unwrap();
    let mut m = DMatrix::<C64>::zeros(k + 1, k + 1);
    m[(k, k)] = C64::new(1.0, 0.0);
    ClassicalBound { bound, optimal_rho_t: FockDensity::new(m).expect("projector") }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{char_fn, make_fock};

    #[test]
    fn one_photon_diagonal() {
        let d = fock_classical_diagonal(1);
        assert!((d[0] - 0.25).abs() < 1e-14 && d[1].abs() < 1e-14 && (d[2] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn fidelity_falls_with_noise() {
        let chi = char_fn(&make_fock(2).to_density());
        let f1 = gaussian_cloner_fidelity(&chi, 1.0).unwrap();
        let f2 = gaussian_cloner_fidelity(&chi, 1.5).unwrap();
        assert!(f2 < f1);
        assert!(gaussian_cloner_fidelity(&chi, 0.9).is_err());
    }
}
