//! Single-mode states in a truncated Fock basis and their phase-space
//! representations.
//!
//! Conventions: `x = (a + a†)/√2`, `p = (a − a†)/(i√2)`, vacuum variance ½,
//! `D(ξ) = exp(ξa† − ξ*a)` and `χ(ξ) = Tr[ρ D(ξ)]`. The Wigner function is
//! normalized over `dx dp`, so `W_vac(0, 0) = 1/π`.

use crate::error::{Error, Result};
use crate::specfun::{laguerre_sequence, ln_factorial, GaussHermite};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type C64 = Complex64;

const NORM_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-12;
/// Tail mass allowed when a constructor picks its own truncation.
pub const CONSTRUCTOR_TAIL: f64 = 1e-12;
/// Population left out by the default coherent and cat bases, small enough
/// that amplitudes (not just populations) are exact to machine precision.
pub const AMPLITUDE_TAIL: f64 = 1e-32;
/// Tail mass allowed in the top 10% of the basis after a Gaussian unitary.
pub const UNITARY_TAIL: f64 = 1e-8;

/// Pure state `Σ c_k |k⟩`, `k = 0..dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    amps: Vec<C64>,
}

impl FockVector {
    /// Wraps already-normalized amplitudes.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let v = Self { amps };
        if v.amps.is_empty() {
            return Err(Error::Domain("empty amplitude vector".into()));
        }
        if (v.norm_sqr() - 1.0).abs() > NORM_TOL {
            return Err(Error::Precondition(format!("norm² = {} (must be 1)", v.norm_sqr())));
        }
        Ok(v)
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let n: f64 = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 0.0) {
            return Err(Error::Domain("zero vector cannot be normalized".into()));
        }
        Ok(Self { amps: amps.into_iter().map(|c| c / n).collect() })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Same state in a basis of `dim` levels (zero padding or cropping).
    pub fn resized(&self, dim: usize) -> Self {
        let mut amps = self.amps.clone();
        amps.resize(dim, C64::new(0.0, 0.0));
        Self { amps }
    }

    /// Drops numerically empty top levels.
    pub fn trimmed(&self, tol: f64) -> Self {
        let mut d = self.dim();
        while d > 1 && self.amps[d - 1].norm_sqr() < tol {
            d -= 1;
        }
        self.resized(d)
    }

    /// Probability carried by the top `fraction` of the basis.
    pub fn tail_mass(&self, fraction: f64) -> f64 {
        let start = tail_start(self.dim(), fraction);
        self.amps[start..].iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn to_density(&self) -> FockDensity {
        let v = DVector::from_column_slice(&self.amps);
        FockDensity { m: &v * v.adjoint() }
    }

    pub fn inner(&self, other: &FockVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }
}

fn tail_start(dim: usize, fraction: f64) -> usize {
    let count = ((dim as f64 * fraction).ceil() as usize).clamp(1, dim);
    dim - count
}

/// Density matrix in a truncated Fock basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FockDensity {
    m: DMatrix<C64>,
}

impl FockDensity {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Dimension(format!("{}x{} density", m.nrows(), m.ncols())));
        }
        let herm = (&m - m.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if herm > HERMITIAN_TOL {
            return Err(Error::Precondition(format!("not Hermitian (defect {herm:.2e})")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::Precondition(format!("trace {tr} (must be 1)")));
        }
        let d = Self { m };
        let min = d.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -1e-10 {
            return Err(Error::Precondition(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(d)
    }

    /// Diagonal (Fock-mixture) state with the given populations.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let n = probs.len();
        let mut m = DMatrix::zeros(n, n);
        for (k, &p) in probs.iter().enumerate() {
            m[(k, k)] = C64::new(p, 0.0);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn resized(&self, dim: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        let k = dim.min(self.dim());
        m.view_mut((0, 0), (k, k)).copy_from(&self.m.view((0, 0), (k, k)));
        Self { m }
    }

    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        self.m.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.m.clone().symmetric_eigen().eigenvalues.iter().copied().collect()
    }

    /// Population in the top `fraction` of the basis.
    pub fn tail_mass(&self, fraction: f64) -> f64 {
        let start = tail_start(self.dim(), fraction);
        (start..self.dim()).map(|k| self.m[(k, k)].re).sum()
    }

    /// True when only diagonal elements are populated (phase-invariant).
    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..self.dim()).all(|i| (0..self.dim()).all(|j| i == j || self.m[(i, j)].norm() <= tol))
    }

    /// Largest level index with population above `tol`.
    pub fn support(&self, tol: f64) -> usize {
        (0..self.dim()).rev().find(|&k| self.m[(k, k)].re > tol).unwrap_or(0)
    }

    /// Convex combination `λ ρ + (1 − λ) τ`.
    pub fn mix(&self, other: &FockDensity, lambda: f64) -> Result<FockDensity> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self { m: self.m.scale(lambda) + other.m.scale(1.0 - lambda) })
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("{a} vs {b}")));
    }
    Ok(())
}

/// Number state `|n⟩` in a basis of `n + 1` levels.
pub fn make_fock(n: usize) -> FockVector {
    let mut amps = vec![C64::new(0.0, 0.0); n + 1];
    amps[n] = C64::new(1.0, 0.0);
    FockVector { amps }
}

/// Smallest basis holding a Poissonian of mean `|α|²` up to `tail`.
pub fn coherent_dimension(alpha: C64, tail: f64) -> usize {
    let mean = alpha.norm_sqr();
    // work in logs so that tiny tails and large means both stay finite
    let mut ln_p = -mean;
    let mut k = 0usize;
    while k < 100_000 {
        let ratio = mean / (k + 1) as f64;
        // mass beyond k is below a geometric series in the next term
        if ratio < 1.0 {
            let ln_rest = ln_p + ratio.ln() - (1.0 - ratio).ln();
            if ln_rest < tail.ln() {
                break;
            }
        }
        k += 1;
        ln_p += mean.ln() - (k as f64).ln();
    }
    k + 1
}

/// Coherent state amplitudes `e^{-|α|²/2} α^k / √k!` in `dim` levels.
pub fn make_coherent_in(alpha: C64, dim: usize) -> Result<FockVector> {
    let mean = alpha.norm_sqr();
    let phase = if mean > 0.0 { alpha / alpha.norm() } else { C64::new(1.0, 0.0) };
    // log magnitudes: e^{-|α|²/2} alone underflows once |α| passes ~38
    let mut amps = Vec::with_capacity(dim);
    let mut ph = C64::new(1.0, 0.0);
    for k in 0..dim {
        if k > 0 {
            ph *= phase;
        }
        let ln_mag = if mean > 0.0 { -mean / 2.0 + k as f64 * alpha.norm().ln() - 0.5 * ln_factorial(k) } else if k == 0 { 0.0 } else { f64::NEG_INFINITY };
        amps.push(ph * ln_mag.exp());
    }
    let tail = 1.0 - amps.iter().map(|c| c.norm_sqr()).sum::<f64>();
    if tail > CONSTRUCTOR_TAIL {
        return Err(Error::Truncation {
            msg: format!("coherent |{alpha}⟩ loses {tail:.2e} outside {dim} levels"),
            required: coherent_dimension(alpha, CONSTRUCTOR_TAIL),
        });
    }
    FockVector::normalized(amps)
}

/// Coherent state with an automatically chosen truncation.
pub fn make_coherent(alpha: C64) -> FockVector {
    let dim = coherent_dimension(alpha, AMPLITUDE_TAIL);
    make_coherent_in(alpha, dim).expect("dimension chosen for the tail")
}

/// `(c0|0⟩ + c1|1⟩ + c2|2⟩)` normalized.
pub fn make_superposition(c0: C64, c1: C64, c2: C64) -> Result<FockVector> {
    FockVector::normalized(vec![c0, c1, c2])
}

/// Normalization `(2 + 2γ e^{-2α²})^{-1/2}` of `|α⟩ + γ|−α⟩`.
pub fn cat_normalization(alpha: f64, gamma: f64) -> f64 {
    (2.0 + 2.0 * gamma * (-2.0 * alpha * alpha).exp()).powf(-0.5)
}

/// Pure cat `N(|α⟩ + γ|−α⟩)` for `γ = ±1`.
pub fn make_cat_vector(alpha: f64, gamma: i8) -> Result<FockVector> {
    if gamma != 1 && gamma != -1 {
        return Err(Error::Domain(format!("pure cat needs γ = ±1, got {gamma}")));
    }
    let dim = coherent_dimension(C64::new(alpha, 0.0), AMPLITUDE_TAIL).max(2);
    let g = gamma as f64;
    let mut amps = Vec::with_capacity(dim);
    for k in 0..dim {
        // α^k / √k! scaled by e^{-α²/2} so large amplitudes stay finite
        let c = if k == 0 { (-alpha * alpha / 2.0).exp() } else { (k as f64 * alpha.ln() - 0.5 * ln_factorial(k) - alpha * alpha / 2.0).exp() };
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        amps.push(C64::new(c * (1.0 + g * sign), 0.0));
    }
    // odd cat at α = 0 is the |1⟩ limit
    if amps.iter().all(|a| a.norm() < 1e-300) {
        return Ok(make_fock(1));
    }
    FockVector::normalized(amps).map(|v| v.trimmed(1e-300))
}

/// Cat state as a density matrix; `γ = 0` gives `½(|α⟩⟨α| + |−α⟩⟨−α|)`.
pub fn make_cat(alpha: f64, gamma: i8) -> Result<FockDensity> {
    match gamma {
        0 => Ok(make_coherent_mixture(alpha)),
        1 | -1 => Ok(make_cat_vector(alpha, gamma)?.to_density()),
        _ => Err(Error::Domain(format!("cat parity γ must be in {{-1, 0, 1}}, got {gamma}"))),
    }
}

/// `½(|α⟩⟨α| + |−α⟩⟨−α|)`.
pub fn make_coherent_mixture(alpha: f64) -> FockDensity {
    let a = make_coherent(C64::new(alpha, 0.0)).to_density();
    let b = make_coherent(C64::new(-alpha, 0.0)).to_density();
    a.mix(&b, 0.5).expect("same dimension")
}

/// `⟨m|D(μ)|n⟩`.
pub fn displacement_element(m: usize, n: usize, mu: C64) -> C64 {
    let t = mu.norm_sqr();
    let (lo, k) = if m >= n { (n, m - n) } else { (m, n - m) };
    let lag = laguerre_sequence(lo, k, t)[lo];
    let base = if m >= n { mu } else { -mu.conj() };
    scaled_power(base, k, lo, t) * lag
}

// (base)^k e^{-t/2} sqrt(lo!/(lo+k)!) without intermediate overflow
fn scaled_power(base: C64, k: usize, lo: usize, t: f64) -> C64 {
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

/// Matrix of `D(μ)` restricted to `rows × cols` levels.
pub fn displacement_matrix(rows: usize, cols: usize, mu: C64) -> DMatrix<C64> {
    let mut d = DMatrix::zeros(rows, cols);
    let t = mu.norm_sqr();
    for k in 0..rows {
        // m = n + k
        if cols == 0 {
            break;
        }
        let n_max = (rows - 1 - k).min(cols - 1);
        let lag = laguerre_sequence(n_max, k, t);
        for n in 0..=n_max {
            d[(n + k, n)] = scaled_power(mu, k, n, t) * lag[n];
        }
    }
    for k in 1..cols {
        // n = m + k
        if k > cols - 1 {
            break;
        }
        let m_max = (cols - 1 - k).min(rows.saturating_sub(1));
        if rows == 0 {
            break;
        }
        let lag = laguerre_sequence(m_max, k, t);
        for m in 0..=m_max {
            d[(m, m + k)] = scaled_power(-mu.conj(), k, m, t) * lag[m];
        }
    }
    d
}

/// `χ(ξ) = Tr[ρ D(ξ)]` evaluated directly from matrix elements.
pub fn char_fn_value(rho: &FockDensity, xi: C64) -> C64 {
    let d = displacement_matrix(rho.dim(), rho.dim(), xi);
    rho.m.iter().zip(d.transpose().iter()).map(|(r, e)| r * e).sum()
}

/// `⟨ψ|D(ξ)|ψ⟩`.
pub fn char_fn_value_pure(psi: &FockVector, xi: C64) -> C64 {
    let d = displacement_matrix(psi.dim(), psi.dim(), xi);
    let v = DVector::from_column_slice(psi.amplitudes());
    (v.adjoint() * d * &v)[(0, 0)]
}

/// Characteristic function `χ(ξ) = Σ p_{a,b} ξ^a ξ*^b · e^{-|ξ|²/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharFnPolyGauss {
    /// Both exponents run over `0..=deg`.
    pub deg: usize,
    coeffs: Vec<C64>,
}

impl CharFnPolyGauss {
    pub fn zeros(deg: usize) -> Self {
        Self { deg, coeffs: vec![C64::new(0.0, 0.0); (deg + 1) * (deg + 1)] }
    }

    pub fn get(&self, a: usize, b: usize) -> C64 {
        if a > self.deg || b > self.deg {
            return C64::new(0.0, 0.0);
        }
        self.coeffs[a * (self.deg + 1) + b]
    }

    fn add(&mut self, a: usize, b: usize, v: C64) {
        self.coeffs[a * (self.deg + 1) + b] += v;
    }

    pub fn eval(&self, xi: C64) -> C64 {
        let powers = |z: C64| {
            let mut out = vec![C64::new(1.0, 0.0); self.deg + 1];
            for k in 1..=self.deg {
                out[k] = out[k - 1] * z;
            }
            out
        };
        let pa = powers(xi);
        let pb = powers(xi.conj());
        let mut s = C64::new(0.0, 0.0);
        for a in 0..=self.deg {
            for b in 0..=self.deg {
                s += self.get(a, b) * pa[a] * pb[b];
            }
        }
        s * (-xi.norm_sqr() / 2.0).exp()
    }

    /// Coefficient-wise `λ χ + (1 − λ) other`.
    pub fn mix(&self, other: &Self, lambda: f64) -> Self {
        let deg = self.deg.max(other.deg);
        let mut out = Self::zeros(deg);
        for a in 0..=deg {
            for b in 0..=deg {
                out.add(a, b, self.get(a, b) * lambda + other.get(a, b) * (1.0 - lambda));
            }
        }
        out
    }

    /// Largest `|p_{b,a} − (−1)^{a+b} p*_{a,b}|`, zero for a Hermitian state.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut m = 0.0f64;
        for a in 0..=self.deg {
            for b in 0..=self.deg {
                let s = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                m = m.max((self.get(b, a) - self.get(a, b).conj() * s).norm());
            }
        }
        m
    }

    /// Coefficients `Q_{A,B}` of `|χ|² = Σ Q_{A,B} ξ^A ξ*^B e^{-|ξ|²}`.
    pub fn abs_sqr(&self) -> CharFnPolyGauss {
        let d = self.deg;
        let mut out = CharFnPolyGauss::zeros(2 * d);
        for a in 0..=d {
            for b in 0..=d {
                let p = self.get(a, b);
                if p == C64::new(0.0, 0.0) {
                    continue;
                }
                // conj(ξ^c ξ*^d) = ξ^d ξ*^c
                for c in 0..=d {
                    for dd in 0..=d {
                        let q = self.get(c, dd);
                        if q != C64::new(0.0, 0.0) {
                            out.add(a + dd, b + c, p * q.conj());
                        }
                    }
                }
            }
        }
        out
    }

    /// Reconstructs `ρ = (1/π) ∫ χ(ξ) D(−ξ) d²ξ` on `dim` levels by exact
    /// Gauss–Hermite quadrature.
    pub fn to_density_matrix(&self, dim: usize) -> DMatrix<C64> {
        let k = self.deg + dim + 2;
        let rule = GaussHermite::new(k);
        let mut out = DMatrix::zeros(dim, dim);
        for (i, &u) in rule.nodes.iter().enumerate() {
            for (j, &v) in rule.nodes.iter().enumerate() {
                let xi = C64::new(u, v);
                let w = rule.scaled_weights[i] * rule.scaled_weights[j] * (-xi.norm_sqr()).exp();
                if w == 0.0 {
                    continue;
                }
                let chi = self.eval(xi);
                let d = displacement_matrix(dim, dim, -xi);
                out += d * (chi * w);
            }
        }
        out.unscale(PI)
    }
}

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp().round()
}

/// Exact polynomial coefficients of the characteristic function.
pub fn char_fn(rho: &FockDensity) -> CharFnPolyGauss {
    let dim = rho.dim();
    let mut out = CharFnPolyGauss::zeros(dim - 1);
    for m in 0..dim {
        for n in 0..dim {
            let r = rho.get(m, n);
            if r == C64::new(0.0, 0.0) {
                continue;
            }
            // ρ_mn ⟨n|D(ξ)|m⟩
            if n >= m {
                let k = n - m;
                let pre = (0.5 * (ln_factorial(m) - ln_factorial(n))).exp();
                for j in 0..=m {
                    let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                    let c = pre * s * binom(n, m - j) / ln_factorial(j).exp();
                    out.add(k + j, j, r * c);
                }
            } else {
                let k = m - n;
                let pre = (0.5 * (ln_factorial(n) - ln_factorial(m))).exp();
                for j in 0..=n {
                    let s = if (j + k) % 2 == 0 { 1.0 } else { -1.0 };
                    let c = pre * s * binom(m, n - j) / ln_factorial(j).exp();
                    out.add(j, k + j, r * c);
                }
            }
        }
    }
    out
}

/// Wigner function `W(x, p)`, normalized over `dx dp`.
pub fn wigner(rho: &FockDensity, x: f64, p: f64) -> f64 {
    let dim = rho.dim();
    let r2 = x * x + p * p;
    let z = C64::new(x, -p) * 2f64.sqrt();
    let mut w = 0.0;
    for k in 0..dim {
        let lag = laguerre_sequence(dim - 1 - k, k, 2.0 * r2);
        for n in 0..dim - k {
            let m = n + k;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let term = scaled_zpow(z, k, n, r2) * (sign * lag[n]);
            if k == 0 {
                w += rho.get(m, n).re * term.re;
            } else {
                w += 2.0 * (rho.get(m, n) * term).re;
            }
        }
    }
    w / PI
}

// z^k e^{-r²} sqrt(n!/(n+k)!)
fn scaled_zpow(z: C64, k: usize, n: usize, r2: f64) -> C64 {
    if k == 0 {
        return C64::new((-r2).exp(), 0.0);
    }
    let r = z.norm();
    if r == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let ln_mag = k as f64 * r.ln() - r2 + 0.5 * (ln_factorial(n) - ln_factorial(n + k));
    C64::from_polar(ln_mag.exp(), k as f64 * z.arg())
}

/// Angular harmonics of the Wigner function on the circle of radius `r`
/// about the origin: `W(r cos θ, r sin θ) = Re Σ_k h_k e^{-ikθ}`.
/// Evaluating a full ring then costs one harmonic sum per angle.
pub fn wigner_ring_harmonics(rho: &FockDensity, r: f64) -> Vec<C64> {
    let dim = rho.dim();
    let r2 = r * r;
    let mut h = vec![C64::new(0.0, 0.0); dim];
    for (k, hk) in h.iter_mut().enumerate() {
        let lag = laguerre_sequence(dim - 1 - k, k, 2.0 * r2);
        let mut acc = C64::new(0.0, 0.0);
        for n in 0..dim - k {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let mag = if k == 0 {
                (-r2).exp()
            } else if r == 0.0 {
                0.0
            } else {
                (k as f64 * (2f64.sqrt() * r).ln() - r2 + 0.5 * (ln_factorial(n) - ln_factorial(n + k))).exp()
            };
            acc += rho.get(n + k, n) * (sign * lag[n] * mag);
        }
        *hk = if k == 0 { acc } else { acc * 2.0 } / PI;
    }
    h
}

pub fn purity(rho: &FockDensity) -> f64 {
    rho.purity()
}

/// `Tr{ρτ}`.
pub fn overlap_trace(rho: &FockDensity, tau: &FockDensity) -> Result<f64> {
    check_dims(rho.dim(), tau.dim())?;
    Ok(rho.m.iter().zip(tau.m.transpose().iter()).map(|(a, b)| a * b).sum::<C64>().re)
}

/// `Tr{ρτ} / sqrt(Tr{ρ²} Tr{τ²})`.
pub fn normalized_overlap(rho: &FockDensity, tau: &FockDensity) -> Result<f64> {
    let pr = rho.purity();
    let pt = tau.purity();
    if pr <= 0.0 || pt <= 0.0 {
        return Err(Error::Domain("zero purity".into()));
    }
    Ok(overlap_trace(rho, tau)? / (pr * pt).sqrt())
}

fn check_unitary_tail(tail: f64, dim: usize) -> Result<()> {
    if tail > UNITARY_TAIL {
        return Err(Error::Truncation {
            msg: format!("{tail:.2e} of the state sits in the top 10% of {dim} levels"),
            required: dim * 2,
        });
    }
    Ok(())
}

/// `D(α)|ψ⟩` on the same number of levels.
pub fn apply_displacement(psi: &FockVector, alpha: C64) -> Result<FockVector> {
    let d = displacement_matrix(psi.dim(), psi.dim(), alpha);
    let out = d * DVector::from_column_slice(psi.amplitudes());
    let v = FockVector { amps: out.iter().copied().collect() };
    check_unitary_tail(v.tail_mass(0.1), v.dim())?;
    if (v.norm_sqr() - 1.0).abs() > UNITARY_TAIL {
        return Err(Error::Truncation {
            msg: format!("displacement leaks {:.2e} outside the basis", 1.0 - v.norm_sqr()),
            required: psi.dim() * 2,
        });
    }
    FockVector::normalized(v.amps)
}

/// `D(α) ρ D(α)†` on the same number of levels.
pub fn displace_density(rho: &FockDensity, alpha: C64) -> Result<FockDensity> {
    let d = displacement_matrix(rho.dim(), rho.dim(), alpha);
    let m = &d * rho.matrix() * d.adjoint();
    let out = FockDensity { m };
    check_unitary_tail(out.tail_mass(0.1), out.dim())?;
    let tr = out.m.trace().re;
    let m = (&out.m + out.m.adjoint()).scale(0.5 / tr);
    Ok(FockDensity { m })
}

fn squeeze_matrix(dim: usize, r: f64) -> DMatrix<C64> {
    // exp((r/2)(a² − a†²)) in the truncated basis
    let mut g = DMatrix::<C64>::zeros(dim, dim);
    for n in 2..dim {
        let v = 0.5 * r * ((n * (n - 1)) as f64).sqrt();
        g[(n - 2, n)] = C64::new(v, 0.0);
        g[(n, n - 2)] = C64::new(-v, 0.0);
    }
    g.exp()
}

/// `S(r)|ψ⟩` with `S(r) = exp((r/2)(a² − a†²))`.
pub fn apply_squeeze(psi: &FockVector, r: f64) -> Result<FockVector> {
    if r == 0.0 {
        return Ok(psi.clone());
    }
    let s = squeeze_matrix(psi.dim(), r);
    let out = s * DVector::from_column_slice(psi.amplitudes());
    let v = FockVector { amps: out.iter().copied().collect() };
    check_unitary_tail(v.tail_mass(0.1), v.dim())?;
    FockVector::normalized(v.amps)
}

/// `S(r) ρ S(r)†`.
pub fn squeeze_density(rho: &FockDensity, r: f64) -> Result<FockDensity> {
    let s = squeeze_matrix(rho.dim(), r);
    let out = FockDensity { m: &s * rho.matrix() * s.adjoint() };
    check_unitary_tail(out.tail_mass(0.1), out.dim())?;
    Ok(out)
}

/// Gaussian state sharing the first and second moments of a state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianRef {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

impl GaussianRef {
    pub fn det(&self) -> f64 {
        self.cov[0][0] * self.cov[1][1] - self.cov[0][1] * self.cov[1][0]
    }

    /// `ν = sqrt(det cov)`; ½ for pure Gaussian states.
    pub fn symplectic_eigenvalue(&self) -> f64 {
        self.det().max(0.0).sqrt()
    }

    /// `cov + (i/2)σ ≥ 0`, which for one mode is `det ≥ ¼` with positive diagonal.
    pub fn is_physical(&self) -> bool {
        self.cov[0][0] > 0.0 && self.det() >= 0.25 - 1e-12
    }
}

/// First moments from `⟨a⟩`, second moments from `⟨a²⟩` and `⟨a†a⟩`.
pub fn reference_gaussian(rho: &FockDensity) -> GaussianRef {
    let dim = rho.dim();
    let mut a1 = C64::new(0.0, 0.0);
    let mut a2 = C64::new(0.0, 0.0);
    let mut nbar = 0.0;
    for m in 0..dim {
        nbar += m as f64 * rho.get(m, m).re;
        if m >= 1 {
            a1 += rho.get(m, m - 1) * (m as f64).sqrt();
        }
        if m >= 2 {
            a2 += rho.get(m, m - 2) * ((m * (m - 1)) as f64).sqrt();
        }
    }
    let sq2 = 2f64.sqrt();
    let mx = sq2 * a1.re;
    let mp = sq2 * a1.im;
    let xx = a2.re + nbar + 0.5 - mx * mx;
    let pp = -a2.re + nbar + 0.5 - mp * mp;
    let xp = a2.im - mx * mp;
    GaussianRef { mean: [mx, mp], cov: [[xx, xp], [xp, pp]] }
}

fn complex_normal(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) / 2f64.sqrt()
}

/// Ginibre-induced random density `G G† / Tr(G G†)`.
pub fn sample_random_density(dim: usize, seed: u64) -> FockDensity {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(dim, dim, |_, _| complex_normal(&mut rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = m.unscale(tr);
    FockDensity { m: (&m + m.adjoint()).scale(0.5) }
}

/// Haar-random pure state on `dim` levels.
pub fn sample_haar_pure(dim: usize, seed: u64) -> FockVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..dim).map(|_| complex_normal(&mut rng)).collect();
    FockVector::normalized(amps).expect("a Gaussian sample is nonzero")
}

/// JSON wire form `{"dim", "type", "re", "im"}` (row-major for densities).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateJson {
    pub dim: usize,
    #[serde(rename = "type")]
    pub kind: String,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

/// A state read from disk.
#[derive(Clone, Debug, PartialEq)]
pub enum StateData {
    Pure(FockVector),
    Density(FockDensity),
}

impl StateData {
    pub fn to_json(&self) -> StateJson {
        match self {
            StateData::Pure(v) => StateJson {
                dim: v.dim(),
                kind: "pure".into(),
                re: v.amps.iter().map(|c| c.re).collect(),
                im: v.amps.iter().map(|c| c.im).collect(),
            },
            StateData::Density(d) => {
                let n = d.dim();
                let flat: Vec<C64> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| d.get(i, j)).collect();
                StateJson {
                    dim: n,
                    kind: "density".into(),
                    re: flat.iter().map(|c| c.re).collect(),
                    im: flat.iter().map(|c| c.im).collect(),
                }
            }
        }
    }

    pub fn from_json(j: &StateJson) -> Result<Self> {
        if j.re.len() != j.im.len() {
            return Err(Error::Parse("re and im lengths differ".into()));
        }
        let vals: Vec<C64> = j.re.iter().zip(&j.im).map(|(&r, &i)| C64::new(r, i)).collect();
        match j.kind.as_str() {
            "pure" => {
                if vals.len() != j.dim {
                    return Err(Error::Parse(format!("pure state needs {} entries", j.dim)));
                }
                Ok(StateData::Pure(FockVector::new(vals)?))
            }
            "density" => {
                if vals.len() != j.dim * j.dim {
                    return Err(Error::Parse(format!("density needs {} entries", j.dim * j.dim)));
                }
                Ok(StateData::Density(FockDensity::new(DMatrix::from_row_slice(j.dim, j.dim, &vals))?))
            }
            other => Err(Error::Parse(format!("unknown state type {other:?}"))),
        }
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json())?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: StateJson = serde_json::from_str(s)?;
        Self::from_json(&j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn trivial_constructors() {
        let v = make_superposition(c(1.0), c(0.0), c(0.0)).unwrap();
        assert_eq!(v.amplitudes()[0], c(1.0));
        let cat = make_cat_vector(1e-9, 1).unwrap();
        assert!((cat.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
        let odd = make_cat_vector(0.0, -1).unwrap();
        assert_eq!(odd, make_fock(1));
    }

    #[test]
    fn even_cat_has_even_support() {
        let cat = make_cat_vector(1.0, 1).unwrap();
        let n = cat_normalization(1.0, 1.0);
        for (k, a) in cat.amplitudes().iter().enumerate() {
            let expect = if k % 2 == 0 {
                2.0 * n * (-0.5f64).exp() / ln_factorial(k).exp().sqrt()
            } else {
                0.0
            };
            assert!((a.re - expect).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn displacement_of_vacuum_is_coherent() {
        let alpha = C64::new(0.4, -0.3);
        let d = apply_displacement(&make_fock(0).resized(30), alpha).unwrap();
        let coh = make_coherent_in(alpha, 30).unwrap();
        for (a, b) in d.amplitudes().iter().zip(coh.amplitudes()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn coherent_truncation_error_reports_size() {
        match make_coherent_in(C64::new(3.0, 0.0), 10) {
            Err(Error::Truncation { required, .. }) => assert!(required > 10),
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn vacuum_and_one_photon_wigner_at_origin() {
        let vac = make_fock(0).to_density();
        assert!((wigner(&vac, 0.0, 0.0) - 1.0 / PI).abs() < 1e-15);
        let one = make_fock(1).to_density();
        assert!((wigner(&one, 0.0, 0.0) + 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn section_pair_overlaps() {
        let rho = FockDensity::diagonal(&[0.75, 0.25]).unwrap();
        let tau = FockDensity::diagonal(&[0.9, 0.1]).unwrap();
        assert!((overlap_trace(&rho, &tau).unwrap() - 0.7).abs() < 1e-15);
        assert!((rho.purity() - 0.625).abs() < 1e-15);
        let m = normalized_overlap(&rho, &tau).unwrap();
        assert!((m - 0.7 / (0.625f64 * 0.82).sqrt()).abs() < 1e-14);
        assert!(overlap_trace(&rho, &make_fock(2).to_density()).is_err());
    }

    #[test]
    fn one_photon_moments() {
        let g = reference_gaussian(&make_fock(1).to_density());
        assert!((g.cov[0][0] - 1.5).abs() < 1e-15 && (g.cov[1][1] - 1.5).abs() < 1e-15);
        assert_eq!(g.mean, [0.0, 0.0]);
        let v = reference_gaussian(&make_fock(0).to_density());
        assert!((v.det() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let rho = sample_random_density(3, 9);
        let s = StateData::Density(rho.clone()).to_json_string().unwrap();
        match StateData::from_json_str(&s).unwrap() {
            StateData::Density(r) => assert!((r.matrix() - rho.matrix()).norm() < 1e-15),
            _ => panic!(),
        }
        let bad = r#"{"dim":2,"type":"blob","re":[1,0],"im":[0,0]}"#;
        assert!(StateData::from_json_str(bad).is_err());
    }
}
