//! Largest eigenpair of a Hermitian operator given only its action.
//!
//! Thick-restart Lanczos (Krylov–Schur form) with full
//! reorthogonalization. The projected matrix is kept as `Qᴴ A Q`
//! column by column, so after a restart the kept Ritz vectors simply
//! become the first columns of the new basis.

use crate::error::{Error, Result};
use nalgebra::{ComplexField, DMatrix, DVector};

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    /// Maximum basis size per cycle.
    pub krylov_dim: usize,
    /// Ritz vectors carried across a restart.
    pub keep: usize,
    /// Target for `‖A v − θ v‖` with `‖v‖ = 1`.
    pub tol: f64,
    pub max_restarts: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { krylov_dim: 60, keep: 15, tol: 1e-8, max_restarts: 400 }
    }
}

#[derive(Clone, Debug)]
pub struct EigenPair<T: ComplexField> {
    pub value: f64,
    pub vector: DVector<T>,
    /// Verified residual `‖A v − θ v‖`.
    pub residual: f64,
    pub applications: usize,
    pub restarts: usize,
    /// Leading Ritz value after each cycle.
    pub history: Vec<f64>,
}

pub fn largest_eigenpair<T, F>(op: F, start: DVector<T>, opts: &LanczosOptions) -> Result<EigenPair<T>>
where
    T: ComplexField<RealField = f64> + Copy,
    F: Fn(&DVector<T>) -> DVector<T>,
{
    let n = start.len();
    let m = opts.krylov_dim.clamp(2, n.max(2));
    let keep = opts.keep.clamp(1, m - 1);
    let norm = start.norm();
    if !(norm > 0.0) {
        return Err(Error::Domain("zero start vector".into()));
    }
    let mut basis: Vec<DVector<T>> = vec![start.unscale(norm)];
    let mut h = DMatrix::<T>::zeros(m, m);
    let mut applications = 0usize;
    let mut history = Vec::new();
    let mut last_residual = f64::INFINITY;

    for restart in 0..=opts.max_restarts {
        // expand until the basis is full or the space is exhausted
        let mut resid_vec;
        let mut beta;
        loop {
            let j = basis.len() - 1;
            let mut w = op(&basis[j]);
            applications += 1;
            let mut coeffs = vec![T::zero(); j + 1];
            for _ in 0..2 {
                for (i, q) in basis.iter().enumerate() {
                    let c = q.dotc(&w);
                    w.axpy(-c, q, T::one());
                    coeffs[i] += c;
                }
            }
            for (i, c) in coeffs.iter().enumerate() {
                h[(i, j)] = *c;
                h[(j, i)] = c.conjugate();
            }
            h[(j, j)] = T::from_real(coeffs[j].real());
            beta = w.norm();
            resid_vec = w;
            if basis.len() == m || basis.len() == n || beta < 1e-14 {
                break;
            }
            basis.push(resid_vec.unscale(beta));
        }

        let size = basis.len();
        let proj = h.view((0, 0), (size, size)).into_owned();
        let eig = proj.symmetric_eigen();
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
        let theta = eig.eigenvalues[order[0]];
        history.push(theta);
        let u0 = eig.eigenvectors.column(order[0]);
        let estimate = beta * u0[size - 1].modulus();

        if estimate < opts.tol || beta < 1e-14 {
            let mut v = DVector::<T>::zeros(n);
            for (i, q) in basis.iter().enumerate() {
                v.axpy(u0[i], q, T::one());
            }
            let vn = v.norm();
            v.unscale_mut(vn);
            let av = op(&v);
            applications += 1;
            let rq = v.dotc(&av).real();
            let residual = (&av - v.scale(rq)).norm();
            last_residual = residual;
            if residual < opts.tol {
                return Ok(EigenPair { value: rq, vector: v, residual, applications, restarts: restart, history });
            }
        } else {
            last_residual = estimate;
        }

        // restart: keep the leading Ritz vectors, then continue from the residual direction
        let k = keep.min(size.saturating_sub(1)).max(1);
        let mut kept: Vec<DVector<T>> = Vec::with_capacity(k + 1);
        for &col in order.iter().take(k) {
            let u = eig.eigenvectors.column(col);
            let mut y = DVector::<T>::zeros(n);
            for (i, q) in basis.iter().enumerate() {
                y.axpy(u[i], q, T::one());
            }
            kept.push(y);
        }
        h.fill(T::zero());
        for (i, &col) in order.iter().take(k).enumerate() {
            h[(i, i)] = T::from_real(eig.eigenvalues[col]);
        }
        if beta < 1e-14 {
            // invariant subspace without convergence: keep only Ritz vectors and re-expand
            basis = kept;
            basis.truncate(1);
            h.fill(T::zero());
            continue;
        }
        for i in 0..k {
            // coupling of kept Ritz vector i to the residual direction
            let u = eig.eigenvectors.column(order[i]);
            let c = T::from_real(beta) * u[size - 1];
            h[(k, i)] = c;
            h[(i, k)] = c.conjugate();
        }
        kept.push(resid_vec.unscale(beta));
        basis = kept;
        // the column for the residual direction is rebuilt on the next expansion;
        // rows of earlier Ritz vectors are overwritten with the same values
    }
    Err(Error::Convergence { iterations: applications, residual: last_residual })
}
