//! Input states for the bound and teleportation solvers.
//!
//! Every solver asks an input for the same few things: its cloning kernel
//! `f(w₁, w₂) = Tr[ρ D(μ) ρ D(μ)†]` with `μ = (w₂ + i w₁)/√2`, its noisy
//! self-overlap `(1/π)∫|χ|² e^{-c|ξ|²} d²ξ`, and a density matrix. Number
//! states and cats get closed forms; everything else goes through the
//! Fock-basis representation.

use crate::error::{Error, Result};
use crate::specfun::{gauss_2f1_terminating, laguerre, laguerre_sequence, ln_factorial, ln_gamma, GaussHermite};
use crate::states::{
    cat_normalization, char_fn, char_fn_value, displace_density, displacement_matrix, make_cat,
    make_fock, squeeze_density, FockDensity, FockVector, C64,
};
use serde::Serialize;
use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq)]
pub enum InputState {
    /// Number state `|n⟩`.
    Fock(usize),
    /// `N(|α⟩ + γ|−α⟩)` for γ = ±1, the coherent mixture for γ = 0.
    Cat { alpha: f64, gamma: i8 },
    Pure(FockVector),
    Mixed(FockDensity),
}

/// Short machine-readable description of an input.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Descriptor {
    pub family: String,
    pub params: Vec<f64>,
}

impl InputState {
    /// A pure input with trailing empty levels removed.
    pub fn pure(psi: FockVector) -> Self {
        InputState::Pure(psi.trimmed(1e-30))
    }

    pub fn descriptor(&self) -> Descriptor {
        match self {
            InputState::Fock(n) => Descriptor { family: "fock".into(), params: vec![*n as f64] },
            InputState::Cat { alpha, gamma } => {
                Descriptor { family: "cat".into(), params: vec![*alpha, *gamma as f64] }
            }
            InputState::Pure(v) => Descriptor { family: "pure".into(), params: vec![v.dim() as f64] },
            InputState::Mixed(d) => Descriptor { family: "density".into(), params: vec![d.dim() as f64] },
        }
    }

    pub fn density(&self) -> Result<FockDensity> {
        match self {
            InputState::Fock(n) => Ok(make_fock(*n).to_density()),
            InputState::Cat { alpha, gamma } => make_cat(*alpha, *gamma),
            InputState::Pure(v) => Ok(v.to_density()),
            InputState::Mixed(d) => Ok(d.clone()),
        }
    }

    pub fn purity(&self) -> f64 {
        match self {
            InputState::Fock(_) | InputState::Pure(_) => 1.0,
            InputState::Cat { gamma, .. } if *gamma != 0 => 1.0,
            InputState::Cat { alpha, .. } => 0.5 * (1.0 + (-4.0 * alpha * alpha).exp()),
            InputState::Mixed(d) => d.purity(),
        }
    }

    /// Fock order when the input is a number state (radially symmetric kernel).
    pub fn fock_order(&self) -> Option<usize> {
        match self {
            InputState::Fock(n) => Some(*n),
            _ => None,
        }
    }

    /// True when the kernel depends on `w₁² + w₂²` only.
    pub fn is_phase_invariant(&self) -> bool {
        match self {
            InputState::Fock(_) => true,
            InputState::Cat { alpha, .. } => *alpha == 0.0,
            InputState::Pure(v) => v.amplitudes().iter().filter(|a| a.norm() > 1e-14).count() <= 1,
            InputState::Mixed(d) => d.is_diagonal(1e-14),
        }
    }

    /// Cloning kernel as a thread-safe closure of `(w₁, w₂)`.
    pub fn kernel_fn(&self) -> Arc<dyn Fn(f64, f64) -> f64 + Send + Sync> {
        match self {
            InputState::Fock(n) => {
                let n = *n;
                Arc::new(move |w1, w2| fock_kernel(n, w1, w2))
            }
            InputState::Cat { alpha, gamma } => {
                let (a, g) = (*alpha, *gamma as f64);
                Arc::new(move |w1, w2| cat_kernel(a, g, w1, w2))
            }
            InputState::Pure(v) => {
                let amps = v.amplitudes().to_vec();
                Arc::new(move |w1, w2| pure_char_value(&amps, kernel_mu(w1, w2)).norm_sqr())
            }
            InputState::Mixed(d) => {
                let d = d.clone();
                Arc::new(move |w1, w2| mixed_kernel(&d, kernel_mu(w1, w2)))
            }
        }
    }

    pub fn kernel(&self, w1: f64, w2: f64) -> f64 {
        (self.kernel_fn())(w1, w2)
    }

    /// `(1/π) ∫ |χ(ξ)|² e^{-c|ξ|²} d²ξ`, the overlap of the state with its
    /// copy after Gaussian noise. Gaussian cloners use `c = a/2`,
    /// teleportation over a two-mode squeezed vacuum uses `c = e^{-2r}`.
    pub fn noisy_overlap(&self, c: f64) -> Result<f64> {
        if !(c >= 0.0) {
            return Err(Error::Domain(format!("noise parameter {c} must be ≥ 0")));
        }
        let s = 1.0 + c;
        match self {
            InputState::Fock(n) => fock_noisy_overlap(*n, s),
            InputState::Cat { alpha, gamma } => Ok(cat_noisy_overlap(*alpha, *gamma as f64, s)),
            InputState::Pure(v) if v.dim() <= POLY_ROUTE_MAX_DIM => Ok(poly_noisy_overlap(&v.to_density(), s)),
            InputState::Mixed(d) if d.dim() <= POLY_ROUTE_MAX_DIM => Ok(poly_noisy_overlap(d, s)),
            _ => Ok(quadrature_noisy_overlap(&self.density()?, s)),
        }
    }

    /// Same observable through the exact Gaussian-moment identity on the
    /// characteristic-function polynomial, regardless of input kind.
    pub fn noisy_overlap_moments(&self, c: f64) -> Result<f64> {
        Ok(poly_noisy_overlap(&self.density()?, 1.0 + c))
    }

    /// `D(α) ρ D(α)†` as a density input on `dim` levels.
    pub fn displaced(&self, alpha: C64, dim: usize) -> Result<InputState> {
        let rho = self.density()?.resized(dim);
        Ok(InputState::Mixed(displace_density(&rho, alpha)?))
    }

    /// `S(r) ρ S(r)†` as a density input on `dim` levels.
    pub fn squeezed(&self, r: f64, dim: usize) -> Result<InputState> {
        let rho = self.density()?.resized(dim);
        Ok(InputState::Mixed(squeeze_density(&rho, r)?))
    }
}

/// Above this basis size the moment sum is replaced by quadrature; the
/// monomial coefficients start to cancel badly.
const POLY_ROUTE_MAX_DIM: usize = 10;

/// `μ = (w₂ + i w₁)/√2`, the displacement whose self-overlap is `f(w₁, w₂)`.
pub fn kernel_mu(w1: f64, w2: f64) -> C64 {
    C64::new(w2, w1) / SQRT_2
}

/// `[L_n((w₁²+w₂²)/2)]² e^{-(w₁²+w₂²)/2}`.
pub fn fock_kernel(n: usize, w1: f64, w2: f64) -> f64 {
    let z = 0.5 * (w1 * w1 + w2 * w2);
    let l = laguerre(n, z);
    l * l * (-z).exp()
}

/// Closed-form kernel of `N(|α⟩ + γ|−α⟩)`, real α (γ = 0: coherent mixture).
pub fn cat_kernel(alpha: f64, gamma: f64, w1: f64, w2: f64) -> f64 {
    let n = cat_normalization(alpha, gamma);
    let n4 = n.powi(4);
    let a2 = alpha * alpha;
    let env = -(w1 * w1 + w2 * w2) / 2.0;
    let k = 2.0 * SQRT_2 * alpha;
    // cosh(k w₂) e^{-4α²} is folded into the exponent to stay finite
    let t_cosh = 0.5 * ((env + k * w2 - 4.0 * a2).exp() + (env - k * w2 - 4.0 * a2).exp());
    let h = SQRT_2 * alpha;
    let t_cross = 0.5 * ((env + h * w2 - 2.0 * a2).exp() + (env - h * w2 - 2.0 * a2).exp()) * (h * w1).cos();
    let g2 = gamma * gamma;
    let base = env.exp();
    2.0 * n4
        * (base + t_cosh + 4.0 * gamma * t_cross + g2 * (-4.0 * a2).exp() * base + g2 * base * (k * w1).cos())
}

/// `⟨ψ|D(μ)|ψ⟩` without forming the displacement matrix.
pub fn pure_char_value(amps: &[C64], mu: C64) -> C64 {
    let dim = amps.len();
    let t = mu.norm_sqr();
    let mut s = C64::new(0.0, 0.0);
    for k in 0..dim {
        let lag = laguerre_sequence(dim - 1 - k, k, t);
        for n in 0..dim - k {
            let m = n + k;
            // ⟨m|D|n⟩ for m ≥ n, and ⟨n|D|m⟩ = (−1)^k conj-structured partner
            let up = power_term(mu, k, n, t) * lag[n];
            s += amps[m].conj() * up * amps[n];
            if k > 0 {
                let down = power_term(-mu.conj(), k, n, t) * lag[n];
                s += amps[n].conj() * down * amps[m];
            }
        }
    }
    s
}

fn power_term(base: C64, k: usize, lo: usize, t: f64) -> C64 {
    if k == 0 {
        return C64::new((-t / 2.0).exp(), 0.0);
    }
    let r = base.norm();
    if r == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let ln_mag = k as f64 * r.ln() - t / 2.0 + 0.5 * (ln_factorial(lo) - ln_factorial(lo + k));
    C64::from_polar(ln_mag.exp(), k as f64 * base.arg())
}

/// `Tr[ρ D(μ) ρ D(μ)†]`.
pub fn mixed_kernel(rho: &FockDensity, mu: C64) -> f64 {
    let d = displacement_matrix(rho.dim(), rho.dim(), mu);
    let a = rho.matrix() * &d;
    let b = &d * rho.matrix();
    // Tr[X Y†] = Σ X_ij Y*_ij with X = ρD, Y = Dρ
    a.iter().zip(b.iter()).map(|(x, y)| (x * y.conj()).re).sum()
}

/// `Γ(n+½) ₂F₁(½, −n; ½−n; (1−2/s)²) / (√π s n!)`.
pub fn fock_noisy_overlap(n: usize, s: f64) -> Result<f64> {
    let z = (1.0 - 2.0 / s).powi(2);
    let f = gauss_2f1_terminating(0.5, n, 0.5 - n as f64, z)?;
    let pre = (ln_gamma(n as f64 + 0.5) - ln_factorial(n)).exp() / PI.sqrt();
    Ok(pre * f / s)
}

/// Cat overlap `(4N⁴/s)[(1+e^{-4α²/s})/2 + 2g + g²(1+e^{4α²/s})/2]`, `g = γe^{-2α²}`.
pub fn cat_noisy_overlap(alpha: f64, gamma: f64, s: f64) -> f64 {
    let n4 = cat_normalization(alpha, gamma).powi(4);
    let a2 = alpha * alpha;
    let g = gamma * (-2.0 * a2).exp();
    // g² e^{4α²/s} = γ² e^{-4α²(1 − 1/s)}
    let g2_grow = gamma * gamma * (-4.0 * a2 * (1.0 - 1.0 / s)).exp();
    4.0 * n4 / s * (0.5 * (1.0 + (-4.0 * a2 / s).exp()) + 2.0 * g + 0.5 * (g * g + g2_grow))
}

/// `Σ_A Q_{A,A} A! / s^{A+1}` over the `|χ|²` polynomial.
pub fn poly_noisy_overlap(rho: &FockDensity, s: f64) -> f64 {
    let q = char_fn(rho).abs_sqr();
    (0..=q.deg)
        .map(|a| q.get(a, a).re * (ln_factorial(a) - (a as f64 + 1.0) * s.ln()).exp())
        .sum()
}

/// Tensor Gauss–Hermite evaluation, exact for the polynomial×Gaussian integrand.
fn quadrature_noisy_overlap(rho: &FockDensity, s: f64) -> f64 {
    let k = 2 * rho.dim() + 2;
    let rule = GaussHermite::new(k);
    let sc = s.sqrt();
    let mut acc = 0.0;
    for (i, &u) in rule.nodes.iter().enumerate() {
        for (j, &v) in rule.nodes.iter().enumerate() {
            let xi = C64::new(u, v) / sc;
            let chi = char_fn_value(rho, xi);
            // |χ|² e^{|ξ|²} is the polynomial part
            let poly = chi.norm_sqr() * xi.norm_sqr().exp();
            acc += rule.weights[i] * rule.weights[j] * poly;
        }
    }
    acc / (PI * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_cat_vector, make_superposition};

    #[test]
    fn gaussian_ncb_fractions() {
        let expect = [2.0 / 3.0, 10.0 / 27.0, 22.0 / 81.0, 490.0 / 2187.0];
        for (n, e) in expect.iter().enumerate() {
            let f = InputState::Fock(n).noisy_overlap(0.5).unwrap();
            assert!((f - e).abs() < 1e-14, "n = {n}: {f}");
        }
    }

    #[test]
    fn kernel_routes_agree_for_cat() {
        let cat = InputState::Cat { alpha: 1.0, gamma: 1 };
        let pure = InputState::pure(make_cat_vector(1.0, 1).unwrap());
        let mix = InputState::Mixed(make_cat(1.0, 0).unwrap());
        let mix_closed = InputState::Cat { alpha: 1.0, gamma: 0 };
        for &(w1, w2) in &[(0.0, 0.0), (0.7, -1.2), (2.5, 0.4), (-1.0, 3.0)] {
            assert!((cat.kernel(w1, w2) - pure.kernel(w1, w2)).abs() < 1e-12);
            assert!((mix.kernel(w1, w2) - mix_closed.kernel(w1, w2)).abs() < 1e-12);
        }
        assert!((cat.kernel(0.0, 0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_overlap_routes_agree() {
        let psi = make_superposition(C64::new(0.6, 0.0), C64::new(0.0, 0.48), C64::new(0.64, 0.0)).unwrap();
        let input = InputState::pure(psi);
        let rho = input.density().unwrap();
        for &c in &[0.0, 0.3, 1.0] {
            let a = poly_noisy_overlap(&rho, 1.0 + c);
            let b = quadrature_noisy_overlap(&rho, 1.0 + c);
            assert!((a - b).abs() < 1e-12);
        }
        let cat = InputState::Cat { alpha: 0.8, gamma: -1 };
        let dense = InputState::Mixed(cat.density().unwrap());
        for &c in &[0.2, 0.5, 2.0] {
            let a = cat.noisy_overlap(c).unwrap();
            let b = dense.noisy_overlap(c).unwrap();
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }
}
