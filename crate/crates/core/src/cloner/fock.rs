//! Fock-basis representation of the cloning operator on `|i⟩₁|j⟩₂`,
//! truncated to `i, j < N`.
//!
//! Writing the kernel as `e^{-(x²+p²)/2} Σ C_{ab} H_a(x/√2) H_b(p/√2)` splits
//! `f(x̂₁, p̂₂)` into products of one-mode matrices
//! `B_a(i, l) = ∫ φ_i φ_l H_a(u/√2) e^{-u²/2} du` for the position factor and
//! `Q_b(j, m) = i^{j−m} B_b(j, m)` for the momentum factor, since
//! `⟨p|m⟩ = (−i)^m φ_m(p)`. The operator is applied to the coefficient
//! matrix `V` without ever being assembled:
//! `f₁V = Σ_a B_a V R_aᵀ` with `R_a = Σ_b C_{ab} Q_b`, and
//! `f₂V = Σ_b Q_b V S_bᵀ` with `S_b = Σ_a C_{ab} B_a`.

use crate::error::{Error, Result};
use crate::input::InputState;
use crate::specfun::{hermite, hermite_expansion_coeffs, hermite_expansion_of, hermite_functions, GaussHermite, HermiteCoeffTable};
use crate::states::C64;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::f64::consts::SQRT_2;

/// Largest basis for which a generic input's kernel gets a Fock route.
/// The Hermite order grows as `4(d − 1)` in the support `d`, and beyond this
/// the expansion loses digits; the grid route handles larger supports.
pub const GENERAL_ROUTE_MAX_SUPPORT: usize = 8;

/// Largest number state with a Fock route. Its exact expansion has order
/// `4n`; past n = 10 the Lanczos residual stalls on rounding noise.
pub const NUMBER_STATE_MAX_ORDER: usize = 10;

/// Whether [`kernel_hermite_table`] accepts this input.
pub fn fock_route_supports(input: &InputState) -> bool {
    match input.fock_order() {
        Some(n) => n <= NUMBER_STATE_MAX_ORDER,
        None => input.density().is_ok_and(|rho| rho.support(1e-14) < GENERAL_ROUTE_MAX_SUPPORT),
    }
}

/// `B_a` for `a ≤ a_max` on indices `< n_trunc`, by Gauss–Hermite quadrature
/// after `u = t√(2/3)`, exact for every entry.
pub fn position_factors(a_max: usize, n_trunc: usize) -> Vec<DMatrix<f64>> {
    let k = n_trunc + a_max / 2 + 2;
    let rule = GaussHermite::new(k);
    let scale = (2.0f64 / 3.0).sqrt();
    let nodes: Vec<(f64, Vec<f64>, Vec<f64>)> = rule
        .nodes
        .iter()
        .zip(&rule.scaled_weights)
        .map(|(&t, &w)| {
            let u = t * scale;
            let phi = hermite_functions(n_trunc.saturating_sub(1), u);
            let h: Vec<f64> = (0..=a_max).map(|a| hermite(a, u / SQRT_2)).collect();
            (scale * w * (-t * t / 3.0).exp(), phi, h)
        })
        .collect();
    (0..=a_max)
        .into_par_iter()
        .map(|a| {
            let mut b = DMatrix::<f64>::zeros(n_trunc, n_trunc);
            for (w, phi, h) in &nodes {
                let wa = w * h[a];
                if wa == 0.0 {
                    continue;
                }
                for i in 0..n_trunc {
                    let wi = wa * phi[i];
                    for l in i..n_trunc {
                        b[(i, l)] += wi * phi[l];
                    }
                }
            }
            for i in 0..n_trunc {
                for l in 0..i {
                    b[(i, l)] = b[(l, i)];
                }
            }
            // parity selection rule: (i + l + a) odd vanishes identically
            for i in 0..n_trunc {
                for l in 0..n_trunc {
                    if (i + l + a) % 2 == 1 {
                        b[(i, l)] = 0.0;
                    }
                }
            }
            b
        })
        .collect()
}

/// `⟨i,j| f̂_n(x̂₁, p̂₂) |l,m⟩` for the number-state kernel.
pub fn fock_ncb_matrix_element(n: usize, i: usize, j: usize, l: usize, m: usize) -> f64 {
    if (i + l) % 2 == 1 || (j + m) % 2 == 1 {
        return 0.0;
    }
    let c = hermite_expansion_coeffs(n, 4 * n);
    let size = i.max(j).max(l).max(m) + 1;
    let b = position_factors(4 * n, size);
    let sign = if ((j as i64 - m as i64) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let mut s = 0.0;
    for a in 0..=4 * n {
        for bb in 0..=4 * n {
            let cab = c.get(a, bb);
            if cab != 0.0 {
                s += cab * b[a][(i, l)] * b[bb][(j, m)];
            }
        }
    }
    s * sign
}

/// `Q_b = E B_b E` with `E = diag((−1)^{⌊j/2⌋})`, valid on the same-parity blocks
/// that `B_b` couples.
fn momentum_factor_real(b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = b.nrows();
    DMatrix::from_fn(n, n, |j, m| {
        let s = if (j / 2 + m / 2) % 2 == 0 { 1.0 } else { -1.0 };
        s * b[(j, m)]
    })
}

/// Symmetry sector of a radially symmetric kernel: parity of mode 1, parity of
/// mode 2, and the sign of `(−1)^{⌊i/2⌋ + ⌊j/2⌋}`. The ground sector
/// `(even, even, +)` contains the two-mode vacuum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sector {
    pub parity1: usize,
    pub parity2: usize,
    pub sign: i8,
}

impl Sector {
    pub const GROUND: Sector = Sector { parity1: 0, parity2: 0, sign: 1 };

    pub fn all() -> Vec<Sector> {
        let mut v = Vec::new();
        for p1 in 0..2 {
            for p2 in 0..2 {
                for s in [1i8, -1] {
                    v.push(Sector { parity1: p1, parity2: p2, sign: s });
                }
            }
        }
        v
    }

    fn contains(&self, i: usize, j: usize) -> bool {
        let e = if (i / 2 + j / 2).is_multiple_of(2) { 1 } else { -1 };
        i % 2 == self.parity1 && j % 2 == self.parity2 && e == self.sign
    }
}

/// Real operator on one sector of a radially symmetric kernel.
pub struct RadialSectorOperator {
    pub n_trunc: usize,
    pub sector: Sector,
    idx1: Vec<usize>,
    idx2: Vec<usize>,
    /// per `a`: (B_a on mode-1 block, R_a on mode-2 block)
    first: Vec<(DMatrix<f64>, DMatrix<f64>)>,
    /// per `b`: (Q_b on mode-1 block, S_b on mode-2 block)
    second: Vec<(DMatrix<f64>, DMatrix<f64>)>,
    mask: DMatrix<f64>,
}

impl RadialSectorOperator {
    pub fn new(c: &HermiteCoeffTable, n_trunc: usize, sector: Sector) -> Self {
        let a_max = c.a_max;
        let b = position_factors(a_max, n_trunc);
        let q: Vec<DMatrix<f64>> = b.iter().map(momentum_factor_real).collect();
        let idx1: Vec<usize> = (0..n_trunc).filter(|i| i % 2 == sector.parity1).collect();
        let idx2: Vec<usize> = (0..n_trunc).filter(|j| j % 2 == sector.parity2).collect();
        let block = |m: &DMatrix<f64>, idx: &[usize]| DMatrix::from_fn(idx.len(), idx.len(), |r, s| m[(idx[r], idx[s])]);
        let combo = |mats: &[DMatrix<f64>], row: usize, by_row: bool| {
            let mut acc = DMatrix::<f64>::zeros(n_trunc, n_trunc);
            for (k, m) in mats.iter().enumerate() {
                let w = if by_row { c.get(row, k) } else { c.get(k, row) };
                if w != 0.0 {
                    acc += m * w;
                }
            }
            acc
        };
        let mut first = Vec::new();
        let mut second = Vec::new();
        for a in 0..=a_max {
            let r = combo(&q, a, true);
            if r.iter().any(|v| *v != 0.0) {
                first.push((block(&b[a], &idx1), block(&r, &idx2)));
            }
            let s = combo(&b, a, false);
            if s.iter().any(|v| *v != 0.0) {
                second.push((block(&q[a], &idx1), block(&s, &idx2)));
            }
        }
        let mask = DMatrix::from_fn(idx1.len(), idx2.len(), |r, s| if sector.contains(idx1[r], idx2[s]) { 1.0 } else { 0.0 });
        Self { n_trunc, sector, idx1, idx2, first, second, mask }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.idx1.len(), self.idx2.len())
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        let (r, c) = self.shape();
        let vm = DMatrix::from_column_slice(r, c, v.as_slice());
        let one = self.first.par_iter().map(|(b, rr)| b * &vm * rr.transpose());
        let two = self.second.par_iter().map(|(q, s)| q * &vm * s.transpose());
        let sum = one.chain(two).reduce(|| DMatrix::zeros(r, c), |a, b| a + b);
        let out = (sum * 0.5).component_mul(&self.mask);
        DVector::from_column_slice(out.as_slice())
    }

    /// Two-mode vacuum, or its projection if the sector does not contain it.
    pub fn start_vector(&self) -> DVector<f64> {
        let (r, c) = self.shape();
        let mut m = DMatrix::<f64>::zeros(r, c);
        for a in 0..r {
            for b in 0..c {
                if self.mask[(a, b)] != 0.0 {
                    m[(a, b)] = (-0.3 * (self.idx1[a] + self.idx2[b]) as f64).exp();
                }
            }
        }
        DVector::from_column_slice(m.as_slice())
    }

    /// Embeds a sector vector into the full `N × N` coefficient matrix.
    pub fn embed(&self, v: &DVector<f64>) -> DMatrix<C64> {
        let (r, c) = self.shape();
        let mut full = DMatrix::<C64>::zeros(self.n_trunc, self.n_trunc);
        for a in 0..r {
            for b in 0..c {
                full[(self.idx1[a], self.idx2[b])] = C64::new(v[a + r * b], 0.0);
            }
        }
        full
    }

    /// Restriction of a full coefficient matrix of any size to this sector.
    pub fn restrict(&self, full: &DMatrix<C64>) -> DVector<f64> {
        let (r, c) = self.shape();
        let mut v = DVector::<f64>::zeros(r * c);
        for a in 0..r {
            for b in 0..c {
                let (i, j) = (self.idx1[a], self.idx2[b]);
                if i < full.nrows() && j < full.ncols() && self.mask[(a, b)] != 0.0 {
                    v[a + r * b] = full[(i, j)].re;
                }
            }
        }
        v
    }
}

/// Complex operator on the full truncated space for kernels without radial symmetry.
pub struct GeneralFockOperator {
    pub n_trunc: usize,
    first: Vec<(DMatrix<C64>, DMatrix<C64>)>,
    second: Vec<(DMatrix<C64>, DMatrix<C64>)>,
}

impl GeneralFockOperator {
    pub fn new(c: &HermiteCoeffTable, n_trunc: usize) -> Self {
        let a_max = c.a_max;
        let b: Vec<DMatrix<C64>> = position_factors(a_max, n_trunc).into_iter().map(|m| m.map(|x| C64::new(x, 0.0))).collect();
        let phase = |d: i64| match d.rem_euclid(4) {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        let q: Vec<DMatrix<C64>> = b
            .iter()
            .map(|m| DMatrix::from_fn(n_trunc, n_trunc, |j, k| phase(j as i64 - k as i64) * m[(j, k)]))
            .collect();
        let combo = |mats: &[DMatrix<C64>], row: usize, by_row: bool| {
            let mut acc = DMatrix::<C64>::zeros(n_trunc, n_trunc);
            let mut any = false;
            for (k, m) in mats.iter().enumerate() {
                let w = if by_row { c.get(row, k) } else { c.get(k, row) };
                if w != 0.0 {
                    acc += m * C64::new(w, 0.0);
                    any = true;
                }
            }
            any.then_some(acc)
        };
        let mut first = Vec::new();
        let mut second = Vec::new();
        for a in 0..=a_max {
            if let Some(r) = combo(&q, a, true) {
                first.push((b[a].clone(), r.transpose()));
            }
            if let Some(s) = combo(&b, a, false) {
                second.push((q[a].clone(), s.transpose()));
            }
        }
        Self { n_trunc, first, second }
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        let n = self.n_trunc;
        let vm = DMatrix::from_column_slice(n, n, v.as_slice());
        let one = self.first.par_iter().map(|(b, rt)| b * &vm * rt);
        let two = self.second.par_iter().map(|(q, st)| q * &vm * st);
        let sum = one.chain(two).reduce(|| DMatrix::zeros(n, n), |a, b| a + b);
        DVector::from_column_slice((sum * C64::new(0.5, 0.0)).as_slice())
    }
}

/// Hermite table of an input's kernel polynomial `f(x, p) e^{(x²+p²)/2}`.
pub fn kernel_hermite_table(input: &InputState) -> Result<HermiteCoeffTable> {
    if let Some(n) = input.fock_order() {
        if n > NUMBER_STATE_MAX_ORDER {
            return Err(Error::NotImplemented(format!(
                "Fock route supports number states up to n = {NUMBER_STATE_MAX_ORDER} (got {n}); use the grid solver"
            )));
        }
        return Ok(hermite_expansion_coeffs(n, 4 * n));
    }
    let rho = input.density()?;
    let d = rho.support(1e-14) + 1;
    if d > GENERAL_ROUTE_MAX_SUPPORT {
        return Err(Error::NotImplemented(format!(
            "Fock route supports inputs on at most {GENERAL_ROUTE_MAX_SUPPORT} levels (this one needs {d}); use the grid solver"
        )));
    }
    let a_max = 4 * (d - 1);
    let f = input.kernel_fn();
    let mut t = hermite_expansion_of(move |x, p| f(x, p) * ((x * x + p * p) / 2.0).exp(), a_max, 4 * d + 4);
    t.n = None;
    Ok(t)
}
