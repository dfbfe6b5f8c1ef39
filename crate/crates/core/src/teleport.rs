//! Continuous-variable teleportation fidelities and resource requirements.
//!
//! For a resource `ρ_AB` the fidelity of teleporting a number state is the
//! expectation of `F̂_n = [L_n(Ô)]² e^{-Ô}` with the EPR operator
//! `Ô = ½(x̂_A − x̂_B)² + ½(p̂_A + p̂_B)² = n̂_A + n̂_B + 1 − (ab + a†b†)`.
//! `Ô` conserves the photon-number difference `d`, so on states
//! `Σ c_i |i, i+d⟩` everything reduces to real symmetric blocks.

use crate::error::{Error, Result};
use crate::input::InputState;
use crate::specfun::ln_factorial;
use crate::states::C64;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

/// Fidelity of teleporting `input` over a two-mode squeezed vacuum,
/// `(1/π) ∫ |χ(ξ)|² e^{-e^{-2r}|ξ|²} d²ξ`.
pub fn tmsv_fidelity(input: &InputState, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("squeezing r = {r} must be ≥ 0")));
    }
    input.noisy_overlap((-2.0 * r).exp())
}

/// Same quantity via the Gaussian-moment identity on `|χ|²`, whatever the input.
pub fn tmsv_fidelity_moments(input: &InputState, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("squeezing r = {r} must be ≥ 0")));
    }
    input.noisy_overlap_moments((-2.0 * r).exp())
}

/// `F̂_n` restricted to `span{|i, i+d⟩ : 0 ≤ i ≤ i_max}` (for negative `d`,
/// `|i−d, i⟩`, the mode-swapped block with the same matrix).
#[derive(Clone, Debug)]
pub struct TeleportOperatorBlock {
    pub n: usize,
    pub d: i64,
    pub matrix: DMatrix<f64>,
}

impl TeleportOperatorBlock {
    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn expectation(&self, c: &[C64]) -> Result<f64> {
        if c.len() != self.size() {
            return Err(Error::Dimension(format!("{} coefficients for a block of size {}", c.len(), self.size())));
        }
        let v = DVector::from_column_slice(c);
        let m = self.matrix.map(|x| C64::new(x, 0.0));
        Ok((v.adjoint() * m * &v)[(0, 0)].re)
    }
}

/// `(F₀^{(d)})_{i,l} = (i+l+d)! / (2^{i+l+d+1} √(i!(i+d)! l!(l+d)!))`,
/// the matrix of `e^{-Ô}`.
pub fn f0_element(d: usize, i: usize, l: usize) -> f64 {
    let s = i + l + d;
    let ln = ln_factorial(s) - (s as f64 + 1.0) * 2f64.ln()
        - 0.5 * (ln_factorial(i) + ln_factorial(i + d) + ln_factorial(l) + ln_factorial(l + d));
    ln.exp()
}

/// `Ô` on the block basis: diagonal `2i + d + 1`, neighbours `−√(i(i+d))`.
pub fn epr_operator_block(d: usize, size: usize) -> DMatrix<f64> {
    let mut o = DMatrix::zeros(size, size);
    for i in 0..size {
        o[(i, i)] = (2 * i + d + 1) as f64;
        if i > 0 {
            let v = -((i * (i + d)) as f64).sqrt();
            o[(i, i - 1)] = v;
            o[(i - 1, i)] = v;
        }
    }
    o
}

/// `L_n(Ô) F₀ L_n(Ô)` on indices `0..=i_max`. The three factors commute, and
/// `L_n(Ô)` is banded, so building on `i_max + n + 1` levels makes every
/// kept entry exact. Entries of `L_n(Ô)` grow like `Ô^n`; far from the
/// origin the block carries a roundoff of order `ε (2 i_max)^{2n}`.
pub fn teleport_operator_block(n: usize, d: i64, i_max: usize) -> Result<TeleportOperatorBlock> {
    if i_max < 1 {
        return Err(Error::Precondition("i_max must be at least 1".into()));
    }
    let du = d.unsigned_abs() as usize;
    let ext = i_max + n + 1;
    let o = epr_operator_block(du, ext);
    // (k+1) L_{k+1} = (2k + 1 − O) L_k − k L_{k−1}
    let id = DMatrix::<f64>::identity(ext, ext);
    let mut l_prev = id.clone();
    let mut l_cur = &id - &o;
    if n == 0 {
        l_cur = id.clone();
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((&id * (2.0 * kf + 1.0) - &o) * &l_cur - &l_prev * kf) / (kf + 1.0);
        l_prev = l_cur;
        l_cur = next;
    }
    let f0 = DMatrix::from_fn(ext, ext, |i, l| f0_element(du, i, l));
    let full = &l_cur * f0 * &l_cur;
    let m = full.view((0, 0), (i_max + 1, i_max + 1)).into_owned();
    let m = (&m + m.transpose()) * 0.5;
    Ok(TeleportOperatorBlock { n, d, matrix: m })
}

/// Two-mode teleportation resources.
#[derive(Clone, Debug)]
pub enum TwoModeResource {
    Tmsv(f64),
    /// `Σ c_i |i, i+d⟩` (or `|i−d, i⟩` for negative `d`).
    Block { d: i64, coeffs: Vec<C64> },
    /// Pure state with coefficients `V[i, j]` of `|i⟩_A |j⟩_B`.
    Pure(DMatrix<C64>),
}

impl TwoModeResource {
    /// `Σ c_i |i,i⟩` normalized.
    pub fn pnes(coeffs: &[f64]) -> Result<Self> {
        let n: f64 = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(n > 0.0) {
            return Err(Error::Domain("empty resource".into()));
        }
        Ok(TwoModeResource::Block { d: 0, coeffs: coeffs.iter().map(|c| C64::new(c / n, 0.0)).collect() })
    }

    pub fn swapped(&self) -> Self {
        match self {
            TwoModeResource::Tmsv(r) => TwoModeResource::Tmsv(*r),
            TwoModeResource::Block { d, coeffs } => TwoModeResource::Block { d: -d, coeffs: coeffs.clone() },
            TwoModeResource::Pure(v) => TwoModeResource::Pure(v.transpose()),
        }
    }

    pub fn mean_photon_number(&self) -> f64 {
        match self {
            TwoModeResource::Tmsv(r) => r.sinh().powi(2),
            TwoModeResource::Block { d, coeffs } => {
                let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
                coeffs.iter().enumerate().map(|(i, c)| c.norm_sqr() * (i as f64 + d.unsigned_abs() as f64 / 2.0)).sum::<f64>() / norm
            }
            TwoModeResource::Pure(v) => {
                let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum();
                let mut s = 0.0;
                for i in 0..v.nrows() {
                    for j in 0..v.ncols() {
                        s += v[(i, j)].norm_sqr() * (i + j) as f64 / 2.0;
                    }
                }
                s / norm
            }
        }
    }
}

/// `⟨F̂_n⟩` in the resource. Only blocks in which the resource lives contribute.
pub fn resource_fidelity(resource: &TwoModeResource, n: usize) -> Result<f64> {
    match resource {
        TwoModeResource::Tmsv(r) => tmsv_fidelity(&InputState::Fock(n), *r),
        TwoModeResource::Block { d, coeffs } => {
            let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
            if (norm - 1.0).abs() > 1e-10 {
                return Err(Error::Domain(format!("resource norm² = {norm}")));
            }
            let block = teleport_operator_block(n, *d, coeffs.len().max(2) - 1)?;
            let mut c = coeffs.clone();
            c.resize(block.size(), C64::new(0.0, 0.0));
            block.expectation(&c)
        }
        TwoModeResource::Pure(v) => {
            let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum();
            if (norm - 1.0).abs() > 1e-10 {
                return Err(Error::Domain(format!("resource norm² = {norm}")));
            }
            let (na, nb) = (v.nrows() as i64, v.ncols() as i64);
            let mut total = 0.0;
            for d in -(na - 1)..nb {
                // entries V[i, i+d] (d ≥ 0) or V[i−d, i] (d < 0)
                let coeffs: Vec<C64> = (0..)
                    .map(|i: i64| if d >= 0 { (i, i + d) } else { (i - d, i) })
                    .take_while(|&(a, b)| a < na && b < nb)
                    .map(|(a, b)| v[(a as usize, b as usize)])
                    .collect();
                if coeffs.iter().all(|c| c.norm_sqr() == 0.0) {
                    continue;
                }
                let block = teleport_operator_block(n, d, coeffs.len().max(2) - 1)?;
                let mut c = coeffs;
                c.resize(block.size(), C64::new(0.0, 0.0));
                total += block.expectation(&c)?;
            }
            Ok(total)
        }
    }
}

/// Two-mode squeezed vacuum in its `d = 0` block, `c_k = sech r tanh^k r`.
pub fn tmsv_coefficients(r: f64, i_max: usize) -> Vec<C64> {
    let (s, t) = (1.0 / r.cosh(), r.tanh());
    (0..=i_max).map(|k| C64::new(s * t.powi(k as i32), 0.0)).collect()
}

/// Smallest TMSV squeezing whose teleportation fidelity reaches `bound`.
/// Returns 0 when even the vacuum resource reaches it.
pub fn critical_squeezing(input: &InputState, bound: f64) -> Result<f64> {
    let f = |r: f64| tmsv_fidelity(input, r);
    if bound <= f(0.0)? {
        return Ok(0.0);
    }
    // the r → ∞ limit is the purity, approached but never reached
    let sup = input.noisy_overlap(0.0)?;
    if bound >= sup - 1e-12 {
        return Err(Error::Unreachable { target: bound, supremum: sup });
    }
    // scan for a bracket while certifying monotonic increase
    let step = 0.05;
    let mut lo = 0.0;
    let mut f_lo = f(0.0)?;
    let mut monotone = true;
    let mut hi = None;
    let mut r = step;
    while r <= 20.0 {
        let v = f(r)?;
        if v < f_lo {
            monotone = false;
        }
        if v >= bound {
            hi = Some(r);
            break;
        }
        lo = r;
        f_lo = v;
        r += step;
    }
    let mut hi = hi.ok_or(Error::Unreachable { target: bound, supremum: sup })?;
    if !monotone {
        // fall back to a dense scan for the first crossing
        log::warn!("teleportation fidelity is not monotone in r; using a dense scan");
        let mut r = 0.0;
        while r < hi {
            if f(r + 1e-3)? >= bound {
                lo = r;
                hi = r + 1e-3;
                break;
            }
            r += 1e-3;
        }
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? >= bound {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Debug, Serialize)]
pub struct PnesResult {
    pub lambda: f64,
    pub d: i64,
    /// Coefficients `c_i` of `|i, i+d⟩`, sign fixed so that `c_0 ≥ 0`.
    pub coeffs: Vec<f64>,
    pub fidelity: f64,
    pub n_av: f64,
}

/// Weight of the top tenth of the basis tolerated in an optimal resource.
pub const PNES_TAIL_TOL: f64 = 1e-8;

/// Top eigenvector of `F̂_n − λ(n̂_A + n̂_B)/2` on the `d` block, where the
/// energy term is `λ(i + |d|/2)`.
pub fn block_optimize(n: usize, d: i64, lambda: f64, i_max: usize) -> Result<PnesResult> {
    let block = teleport_operator_block(n, d, i_max)?;
    block_optimize_with(&block, lambda)
}

fn block_optimize_with(block: &TeleportOperatorBlock, lambda: f64) -> Result<PnesResult> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("Lagrange multiplier λ = {lambda} must be > 0")));
    }
    let size = block.size();
    let half_d = block.d.unsigned_abs() as f64 / 2.0;
    let mut g = block.matrix.clone();
    for i in 0..size {
        g[(i, i)] -= lambda * (i as f64 + half_d);
    }
    let eig = g.symmetric_eigen();
    let top = eig.eigenvalues.imax();
    let mut v: Vec<f64> = eig.eigenvectors.column(top).iter().copied().collect();
    if v[0] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let tail_start = size - (size / 10).max(1);
    let tail: f64 = v[tail_start..].iter().map(|x| x * x).sum();
    if tail > PNES_TAIL_TOL {
        return Err(Error::Truncation { msg: format!("optimal resource at λ = {lambda} keeps weight {tail:.1e} in the last levels"), required: 2 * size });
    }
    let vc: Vec<C64> = v.iter().map(|x| C64::new(*x, 0.0)).collect();
    let fidelity = block.expectation(&vc)?;
    let n_av = v.iter().enumerate().map(|(i, x)| x * x * (i as f64 + half_d)).sum();
    Ok(PnesResult { lambda, d: block.d, coeffs: v, fidelity, n_av })
}

/// Photon-number-entangled optimum (`d = 0`).
pub fn pnes_optimize(n: usize, lambda: f64, i_max: usize) -> Result<PnesResult> {
    block_optimize(n, 0, lambda, i_max)
}

/// `λ` values log-spaced over `[lo, hi]`.
pub fn lambda_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points).map(|k| (a + (b - a) * k as f64 / (points - 1).max(1) as f64).exp()).collect()
}

/// Default multiplier sweep: 200 points over `[1e−3, 1e2]`.
pub fn default_lambda_grid() -> Vec<f64> {
    lambda_grid(1e-3, 1e2, 200)
}

/// Optimal `(n_av, fidelity)` points for one block, sorted by `n_av`. Points
/// whose optimum does not fit in the basis are dropped.
pub fn block_frontier(n: usize, d: i64, lambdas: &[f64], i_max: usize) -> Result<Vec<PnesResult>> {
    let block = teleport_operator_block(n, d, i_max)?;
    let mut pts: Vec<PnesResult> = lambdas
        .par_iter()
        .filter_map(|&l| match block_optimize_with(&block, l) {
            Ok(p) => Some(p),
            Err(Error::Truncation { .. }) => None,
            Err(e) => {
                log::warn!("λ = {l}: {e}");
                None
            }
        })
        .collect();
    pts.sort_by(|a, b| a.n_av.partial_cmp(&b.n_av).unwrap());
    Ok(pts)
}

pub fn pnes_frontier(n: usize, lambdas: &[f64], i_max: usize) -> Result<Vec<PnesResult>> {
    block_frontier(n, 0, lambdas, i_max)
}

/// Linear interpolation of the first crossing of `fidelity = target` along a
/// frontier sorted by `n_av`.
pub fn frontier_crossing(frontier: &[PnesResult], target: f64) -> Result<f64> {
    if let Some(first) = frontier.first() {
        if first.fidelity >= target {
            return Ok(first.n_av);
        }
    }
    for w in frontier.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.fidelity < target && b.fidelity >= target {
            let t = (target - a.fidelity) / (b.fidelity - a.fidelity);
            return Ok(a.n_av + t * (b.n_av - a.n_av));
        }
    }
    let sup = frontier.iter().map(|p| p.fidelity).fold(f64::NEG_INFINITY, f64::max);
    Err(Error::Unreachable { target, supremum: sup })
}

/// Mean photon number per mode the optimal PNES needs to reach `ncb`.
pub fn required_photon_number(n: usize, ncb: f64, i_max: usize) -> Result<f64> {
    let frontier = pnes_frontier(n, &default_lambda_grid(), i_max)?;
    frontier_crossing(&frontier, ncb)
}

/// `(n_av = sinh² r, fidelity)` along the TMSV family.
pub fn tmsv_curve(n: usize, rs: &[f64]) -> Result<Vec<(f64, f64)>> {
    rs.iter().map(|&r| Ok((r.sinh().powi(2), tmsv_fidelity(&InputState::Fock(n), r)?))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockCurve {
    pub d: i64,
    pub points: Vec<PnesResult>,
}

impl BlockCurve {
    /// Frontier fidelity at `n_av` by linear interpolation; `None` outside its range.
    pub fn fidelity_at(&self, n_av: f64) -> Option<f64> {
        let p = &self.points;
        if p.is_empty() || n_av < p[0].n_av - 1e-12 || n_av > p[p.len() - 1].n_av {
            return None;
        }
        for w in p.windows(2) {
            if n_av <= w[1].n_av {
                let t = if w[1].n_av > w[0].n_av { (n_av - w[0].n_av) / (w[1].n_av - w[0].n_av) } else { 0.0 };
                return Some(w[0].fidelity + t.clamp(0.0, 1.0) * (w[1].fidelity - w[0].fidelity));
            }
        }
        Some(p[p.len() - 1].fidelity)
    }
}

/// Optimal-fidelity curves per photon-difference block.
pub fn block_comparison(n: usize, d_list: &[i64], lambdas: &[f64], i_max: usize) -> Result<Vec<BlockCurve>> {
    d_list.iter().map(|&d| Ok(BlockCurve { d, points: block_frontier(n, d, lambdas, i_max)? })).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f0_corner() {
        assert!((f0_element(0, 0, 0) - 0.5).abs() < 1e-15);
        let b = teleport_operator_block(0, 0, 4).unwrap();
        assert!((b.matrix[(0, 0)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn vacuum_resource_gives_half() {
        let r = TwoModeResource::pnes(&[1.0]).unwrap();
        assert!((resource_fidelity(&r, 0).unwrap() - 0.5).abs() < 1e-14);
    }
}
