//! Two-mode wavefunctions on a uniform `(x₁, p₂)` grid and the matrix-free
//! action of the symmetric cloning operator `½[f(x̂₁, p̂₂) + f(x̂₂, p̂₁)]`.
//!
//! The first term is diagonal in `(x₁, p₂)`. The second is diagonal in
//! `(p₁, x₂)`, reached by a forward Fourier transform along axis 0 and an
//! inverse one along axis 1. Both transforms are centred DFTs, realised as
//! plain FFTs between `(−1)^{i+j}` modulations.

use crate::error::{Error, Result};
use crate::input::InputState;
use crate::states::{CharFnPolyGauss, C64};
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

/// `G × G` samples at `x_i = (i − G/2)·dx`; the conjugate axis has
/// spacing `dk = 2π/(G·dx)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub size: usize,
    pub dx: f64,
}

impl Grid {
    /// Grid whose conjugate axis coincides with the direct one,
    /// `dx = dk = sqrt(2π/G)`. Refining `G` then shrinks the spacing and
    /// widens the box at the same time, which is what makes eigenvalues
    /// converge.
    pub fn symmetric(size: usize) -> Self {
        assert!(size >= 4 && size.is_multiple_of(2), "grid size must be even");
        Self { size, dx: (2.0 * PI / size as f64).sqrt() }
    }

    /// Grid covering `[−L, L)` on the direct axes.
    pub fn with_extent(size: usize, extent: f64) -> Self {
        assert!(size >= 4 && size.is_multiple_of(2), "grid size must be even");
        Self { size, dx: 2.0 * extent / size as f64 }
    }

    pub fn dk(&self) -> f64 {
        2.0 * PI / (self.size as f64 * self.dx)
    }

    pub fn extent(&self) -> f64 {
        0.5 * self.size as f64 * self.dx
    }

    pub fn conj_extent(&self) -> f64 {
        0.5 * self.size as f64 * self.dk()
    }

    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - (self.size / 2) as f64) * self.dx
    }

    pub fn conj_coord(&self, i: usize) -> f64 {
        (i as f64 - (self.size / 2) as f64) * self.dk()
    }

    pub fn is_symmetric(&self) -> bool {
        (self.dx - self.dk()).abs() < 1e-12 * self.dx
    }

    pub fn len(&self) -> usize {
        self.size * self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }
}

/// Cloning kernel `f(w₁, w₂)` sampled on both the direct and the conjugate grid.
#[derive(Clone, Debug)]
pub struct CloneKernel {
    pub grid: Grid,
    /// `direct[i·G + j] = f(x_i, x_j)`.
    pub direct: Vec<f64>,
    /// `conj[r·G + s] = f(k_r, k_s)`.
    pub conj: Vec<f64>,
}

/// Largest boundary sample relative to the peak for an accepted kernel.
pub const KERNEL_EDGE_TOL: f64 = 1e-12;

/// Relative shortfall of the kernel's integral tolerated on the grid.
pub const KERNEL_MASS_TOL: f64 = 1e-8;

impl CloneKernel {
    /// Samples an arbitrary kernel without any extent check.
    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let g = grid.size;
        let sample = |coord: &(dyn Fn(usize) -> f64 + Sync)| -> Vec<f64> {
            let mut out = vec![0.0; g * g];
            out.par_chunks_mut(g).enumerate().for_each(|(i, row)| {
                let w1 = coord(i);
                for (j, v) in row.iter_mut().enumerate() {
                    *v = f(w1, coord(j));
                }
            });
            out
        };
        let direct = sample(&|i| grid.coord(i));
        let conj = if grid.is_symmetric() { direct.clone() } else { sample(&|i| grid.conj_coord(i)) };
        Self { grid, direct, conj }
    }

    /// Kernel of an input state; fails when the grid clips it.
    pub fn build(input: &InputState, grid: Grid) -> Result<Self> {
        let f = input.kernel_fn();
        let k = Self::from_fn(grid, move |a, b| f(a, b));
        k.check_extent()?;
        k.check_mass()?;
        Ok(k)
    }

    /// `∫ f dw₁ dw₂ = 2π` for every normalized input, since averaging
    /// `D ρ D†` over phase space gives the identity. A shortfall means lobes
    /// lie off the grid, which the edge test misses when they sit past it.
    pub fn check_mass(&self) -> Result<()> {
        let dx = self.grid.dx;
        let mass = self.direct.iter().sum::<f64>() * dx * dx;
        let want = 2.0 * PI;
        let rel = (mass - want).abs() / want;
        if rel > KERNEL_MASS_TOL {
            return Err(Error::Extent(format!(
                "kernel on the grid holds {:.6} of its mass (extent {:.2}); enlarge the grid",
                mass / want,
                self.grid.extent()
            )));
        }
        Ok(())
    }

    /// Kernel assembled from the characteristic-function polynomial by the
    /// closed-form Gaussian-moment transform of each monomial of `|χ|²`.
    pub fn from_char_fn(chi: &CharFnPolyGauss, grid: Grid) -> Result<Self> {
        let q = chi.abs_sqr();
        let k = Self::from_fn(grid, |a, b| char_fn_kernel(&q, a, b));
        k.check_extent()?;
        Ok(k)
    }

    /// Ratio of the largest edge sample to the peak, on both grids.
    pub fn edge_ratio(&self) -> f64 {
        let g = self.grid.size;
        let edge = |v: &Vec<f64>| {
            let mut m = 0.0f64;
            for t in 0..g {
                for &idx in &[t, (g - 1) * g + t, t * g, t * g + g - 1] {
                    m = m.max(v[idx].abs());
                }
            }
            m
        };
        let peak = self.direct.iter().chain(&self.conj).fold(0.0f64, |m, v| m.max(v.abs()));
        if peak == 0.0 {
            return 0.0;
        }
        edge(&self.direct).max(edge(&self.conj)) / peak
    }

    pub fn check_extent(&self) -> Result<()> {
        let r = self.edge_ratio();
        if r > KERNEL_EDGE_TOL {
            return Err(Error::Extent(format!(
                "kernel at the grid edge is {r:.2e} of its peak (extent {:.2}, conjugate extent {:.2})",
                self.grid.extent(),
                self.grid.conj_extent()
            )));
        }
        Ok(())
    }

    pub fn max_value(&self) -> f64 {
        self.direct.iter().fold(0.0f64, |m, v| m.max(*v))
    }
}

/// `f(w₁, w₂) = Σ Q_{A,B} G_{A,B}(κ)` with `κ = √2 w₁ − i√2 w₂` and
/// `G_{A,B}(κ) = e^{-|κ|²/4} Σ_k A!B!/(k!(A−k)!(B−k)!) (iκ/2)^{A−k} (iκ*/2)^{B−k}`,
/// the exact transform of `ξ^A ξ*^B e^{-|ξ|²}`.
pub fn char_fn_kernel(q: &CharFnPolyGauss, w1: f64, w2: f64) -> f64 {
    let kappa = C64::new(2f64.sqrt() * w1, -(2f64.sqrt()) * w2);
    let u = C64::new(0.0, 1.0) * kappa / 2.0;
    let v = C64::new(0.0, 1.0) * kappa.conj() / 2.0;
    let d = q.deg;
    let mut pu = vec![C64::new(1.0, 0.0); d + 1];
    let mut pv = vec![C64::new(1.0, 0.0); d + 1];
    for k in 1..=d {
        pu[k] = pu[k - 1] * u;
        pv[k] = pv[k - 1] * v;
    }
    let fact: Vec<f64> = (0..=d).scan(1.0, |acc, k| {
        if k > 0 {
            *acc *= k as f64;
        }
        Some(*acc)
    }).collect();
    let mut s = C64::new(0.0, 0.0);
    for a in 0..=d {
        for b in 0..=d {
            let c = q.get(a, b);
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let mut g = C64::new(0.0, 0.0);
            for k in 0..=a.min(b) {
                g += pu[a - k] * pv[b - k] * (fact[a] * fact[b] / (fact[k] * fact[a - k] * fact[b - k]));
            }
            s += c * g;
        }
    }
    s.re * (-(kappa.norm_sqr()) / 4.0).exp()
}

/// Two-mode wavefunction `ψ(x₁, p₂)`, row-major with `x₁` along rows.
/// The physical norm is `Σ|ψ|² dx²`.
#[derive(Clone, Debug)]
pub struct GridWavefunction {
    pub grid: Grid,
    pub values: Vec<C64>,
}

impl GridWavefunction {
    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn(f64, f64) -> C64 + Sync,
    {
        let g = grid.size;
        let mut values = vec![C64::new(0.0, 0.0); g * g];
        values.par_chunks_mut(g).enumerate().for_each(|(i, row)| {
            let x1 = grid.coord(i);
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(x1, grid.coord(j));
            }
        });
        Self { grid, values }.normalized()
    }

    /// `π^{-1/2} e^{-(x₁² + p₂²)/2}`.
    pub fn two_mode_vacuum(grid: Grid) -> Self {
        Self::from_fn(grid, |x, p| C64::new((-(x * x + p * p) / 2.0).exp(), 0.0))
    }

    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt() * self.grid.dx
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.values.iter_mut().for_each(|v| *v /= n);
        }
        self
    }

    pub fn inner(&self, other: &GridWavefunction) -> C64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum::<C64>() * self.grid.dx * self.grid.dx
    }

    /// Largest edge magnitude over the largest magnitude.
    pub fn boundary_ratio(&self) -> f64 {
        let g = self.grid.size;
        let mut edge = 0.0f64;
        for t in 0..g {
            for &idx in &[t, (g - 1) * g + t, t * g, t * g + g - 1] {
                edge = edge.max(self.values[idx].norm());
            }
        }
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        if peak == 0.0 {
            0.0
        } else {
            edge / peak
        }
    }
}

/// Reusable FFT plans for one grid.
pub struct CloneOperator {
    pub kernel: Arc<CloneKernel>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl CloneOperator {
    pub fn new(kernel: Arc<CloneKernel>) -> Self {
        let mut planner = FftPlanner::new();
        let g = kernel.grid.size;
        let fwd = planner.plan_fft_forward(g);
        let inv = planner.plan_fft_inverse(g);
        Self { kernel, fwd, inv }
    }

    pub fn grid(&self) -> Grid {
        self.kernel.grid
    }

    /// `ψ(x₁, p₂) ↦ ψ̃(p₁, x₂)`, stored transposed (rows indexed by `x₂`).
    pub fn to_conjugate(&self, v: &[C64]) -> Vec<C64> {
        let g = self.grid().size;
        let mut a: Vec<C64> = v.to_vec();
        modulate(&mut a, g, 1.0);
        fft_rows(&mut a, g, &self.inv);
        let mut b = vec![C64::new(0.0, 0.0); g * g];
        transpose(&a, &mut b, g);
        fft_rows(&mut b, g, &self.fwd);
        let s = 1.0 / g as f64;
        modulate(&mut b, g, s);
        b
    }

    /// Both clone terms: `(f(x̂₁, p̂₂)ψ, f(x̂₂, p̂₁)ψ)`.
    pub fn apply_parts(&self, v: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let g = self.grid().size;
        let k = &self.kernel;
        let first: Vec<C64> = v.par_iter().zip(k.direct.par_iter()).map(|(a, f)| a * f).collect();

        let mut a: Vec<C64> = v.to_vec();
        modulate(&mut a, g, 1.0);
        fft_rows(&mut a, g, &self.inv);
        let mut b = vec![C64::new(0.0, 0.0); g * g];
        transpose(&a, &mut b, g);
        fft_rows(&mut b, g, &self.fwd);
        // the output modulation of the forward pass cancels against the input
        // modulation of the inverse pass, so only the kernel is applied here
        b.par_iter_mut().zip(k.conj.par_iter()).for_each(|(x, f)| *x *= f);
        fft_rows(&mut b, g, &self.inv);
        transpose(&b, &mut a, g);
        fft_rows(&mut a, g, &self.fwd);
        let s = 1.0 / (g as f64 * g as f64);
        modulate(&mut a, g, s);
        (first, a)
    }

    /// `½[f(x̂₁, p̂₂) + f(x̂₂, p̂₁)] ψ` on raw sample vectors.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let (mut first, second) = self.apply_parts(v);
        first.par_iter_mut().zip(second.par_iter()).for_each(|(a, b)| *a = 0.5 * (*a + b));
        first
    }

    /// `(⟨f₁⟩, ⟨f₂⟩)` for a normalized wavefunction.
    pub fn expectation_parts(&self, psi: &GridWavefunction) -> (f64, f64) {
        let (f1, f2) = self.apply_parts(&psi.values);
        let dx2 = psi.grid.dx * psi.grid.dx;
        let e = |w: &Vec<C64>| psi.values.iter().zip(w).map(|(a, b)| (a.conj() * b).re).sum::<f64>() * dx2;
        (e(&f1), e(&f2))
    }

    pub fn rayleigh_quotient(&self, psi: &GridWavefunction) -> f64 {
        let (a, b) = self.expectation_parts(psi);
        let n = psi.norm();
        0.5 * (a + b) / (n * n)
    }
}

/// `½(f̂⁽¹⁾ + f̂⁽²⁾)ψ`; the output is not renormalized.
pub fn apply_clone_operator(psi: &GridWavefunction, kernel: &CloneKernel) -> Result<GridWavefunction> {
    if psi.grid != kernel.grid {
        return Err(Error::Dimension(format!("wavefunction grid {:?} vs kernel grid {:?}", psi.grid, kernel.grid)));
    }
    let op = CloneOperator::new(Arc::new(kernel.clone()));
    Ok(GridWavefunction { grid: psi.grid, values: op.apply(&psi.values) })
}

fn modulate(v: &mut [C64], g: usize, scale: f64) {
    v.par_chunks_mut(g).enumerate().for_each(|(i, row)| {
        for (j, x) in row.iter_mut().enumerate() {
            let s = if (i + j) % 2 == 0 { scale } else { -scale };
            *x *= s;
        }
    });
}

fn fft_rows(v: &mut [C64], g: usize, fft: &Arc<dyn Fft<f64>>) {
    let len = fft.get_inplace_scratch_len();
    v.par_chunks_mut(g)
        .for_each_init(|| vec![C64::new(0.0, 0.0); len], |scratch, row| fft.process_with_scratch(row, scratch));
}

fn transpose(src: &[C64], dst: &mut [C64], g: usize) {
    const B: usize = 32;
    dst.par_chunks_mut(g * B.min(g)).enumerate().for_each(|(blk, chunk)| {
        let r0 = blk * B.min(g);
        let rows = chunk.len() / g;
        for c0 in (0..g).step_by(B) {
            for r in 0..rows {
                let out = &mut chunk[r * g..(r + 1) * g];
                for c in c0..(c0 + B).min(g) {
                    out[c] = src[c * g + r0 + r];
                }
            }
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_kernel_is_identity() {
        let grid = Grid::symmetric(64);
        let k = CloneKernel::from_fn(grid, |_, _| 1.0);
        let psi = GridWavefunction::from_fn(grid, |x, p| C64::new((-(x * x + 2.0 * p * p) / 2.0).exp(), x * (-(x * x + p * p)).exp()));
        let out = apply_clone_operator(&psi, &k).unwrap();
        for (a, b) in out.values.iter().zip(&psi.values) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn conjugate_transform_is_unitary_on_asymmetric_grid() {
        let grid = Grid::with_extent(64, 9.0);
        let op = CloneOperator::new(Arc::new(CloneKernel::from_fn(grid, |_, _| 1.0)));
        let psi = GridWavefunction::from_fn(grid, |x, p| C64::new((-(x * x + p * p) / 2.0).exp(), 0.0));
        let t = op.to_conjugate(&psi.values);
        let n0: f64 = psi.values.iter().map(|c| c.norm_sqr()).sum();
        let n1: f64 = t.iter().map(|c| c.norm_sqr()).sum();
        assert!((n0 - n1).abs() < 1e-12 * n0);
    }
}
