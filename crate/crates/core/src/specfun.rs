//! Orthogonal polynomials, Gaussian quadrature rules and the closed-form
//! integrals that the fidelity operators are assembled from.
//!
//! Everything here is a pure function of its arguments. Polynomials are
//! evaluated by upward three-term recurrence, which is stable in the
//! ranges the solvers need (orders up to a few hundred).

use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Laguerre polynomial `L_n(x)`.
pub fn laguerre(n: usize, x: f64) -> f64 {
    generalized_laguerre(n, 0, x)
}

/// Generalized Laguerre polynomial `L_n^{(k)}(x)`.
pub fn generalized_laguerre(n: usize, k: usize, x: f64) -> f64 {
    let k = k as f64;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + k - x;
    for m in 1..n {
        let m = m as f64;
        let next = ((2.0 * m + 1.0 + k - x) * cur - (m + k) * prev) / (m + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `L_0^{(k)}(x), ..., L_{n_max}^{(k)}(x)` in one recurrence sweep.
pub fn laguerre_sequence(n_max: usize, k: usize, x: f64) -> Vec<f64> {
    let kf = k as f64;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max >= 1 {
        out.push(1.0 + kf - x);
    }
    for m in 1..n_max {
        let mf = m as f64;
        let next = ((2.0 * mf + 1.0 + kf - x) * out[m] - (mf + kf) * out[m - 1]) / (mf + 1.0);
        out.push(next);
    }
    out
}

/// Physicists' Hermite polynomial `H_n(x)`.
///
/// Overflows `f64` somewhere past n ≈ 150 for moderate `x`; use
/// [`hermite_scaled`] there.
pub fn hermite(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for m in 1..n {
        let next = 2.0 * x * cur - 2.0 * m as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `H_n(x)` as `(mantissa, exponent)` with `H_n(x) = mantissa · 2^exponent`.
pub fn hermite_scaled(n: usize, x: f64) -> (f64, i64) {
    const BIG: f64 = 1e150;
    const SHIFT: i64 = 498; // 2^498 ≈ 1.6e150
    let shift = 2f64.powi(-(SHIFT as i32));
    let mut exp = 0i64;
    let mut prev = 1.0;
    if n == 0 {
        return (prev, 0);
    }
    let mut cur = 2.0 * x;
    for m in 1..n {
        let next = 2.0 * x * cur - 2.0 * m as f64 * prev;
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur *= shift;
            prev *= shift;
            exp += SHIFT;
        }
    }
    (cur, exp)
}

/// Normalized Hermite functions `φ_0(x), ..., φ_{n_max}(x)`,
/// `φ_k(x) = H_k(x) e^{-x²/2} / sqrt(2^k k! sqrt(π))`.
///
/// These are the position-space Fock wavefunctions with unit vacuum
/// variance ½. The recurrence never overflows.
pub fn hermite_functions(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if n_max >= 1 {
        out.push(2f64.sqrt() * x * out[0]);
    }
    for k in 1..n_max {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// `ln n!`.
pub fn ln_factorial(n: usize) -> f64 {
    const TABLE: usize = 1024;
    static LN_FACT: OnceLock<Vec<f64>> = OnceLock::new();
    if n < TABLE {
        let t = LN_FACT.get_or_init(|| {
            let mut t = vec![0.0; TABLE];
            for k in 2..TABLE {
                t[k] = t[k - 1] + (k as f64).ln();
            }
            t
        });
        return t[n];
    }
    statrs::function::gamma::ln_gamma(n as f64 + 1.0)
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Terminating Gauss hypergeometric series `₂F₁(a, −n; c; z)`.
pub fn gauss_2f1_terminating(a: f64, n: usize, c: f64, z: f64) -> Result<f64> {
    // term k carries (c)_k in the denominator; it vanishes only once (-n)_k does
    for j in 0..n {
        if (c + j as f64).abs() < 1e-12 {
            return Err(Error::Domain(format!(
                "2F1({a}, -{n}; {c}; z): denominator Pochhammer vanishes at k = {}",
                j + 1
            )));
        }
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..n {
        let kf = k as f64;
        term *= (a + kf) * (kf - n as f64) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
    }
    Ok(sum)
}

/// `∫ e^{-x²} H_a(αx) H_i(βx) H_l(βx) dx` for `α² + β² = 1`.
///
/// Closed form with `s = a + i + l` even:
/// `(−1)^{s/2−a} 2^s α^{i+l} β^a Γ((s+1)/2) ₂F₁(−i, −l; (1−s)/2; 1/(2α²))`,
/// and zero for odd `s`. The hypergeometric sum alternates, so for indices
/// much beyond 30 prefer quadrature of the Hermite functions.
pub fn hermite_triple_integral(a: usize, i: usize, l: usize, alpha: f64, beta: f64) -> Result<f64> {
    if (alpha * alpha + beta * beta - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "alpha² + beta² = {} (must be 1)",
            alpha * alpha + beta * beta
        )));
    }
    let s = a + i + l;
    if s % 2 == 1 {
        return Ok(0.0);
    }
    // sum over k of (-i)_k (-l)_k / ((c)_k k!) z^k with c = (1-s)/2
    let c = (1.0 - s as f64) / 2.0;
    let z = 1.0 / (2.0 * alpha * alpha);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..i.min(l) {
        let kf = k as f64;
        term *= (kf - i as f64) * (kf - l as f64) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
    }
    let sign = if (s / 2 + a).is_multiple_of(2) { 1.0 } else { -1.0 };
    let ln_mag = s as f64 * 2f64.ln() + ln_gamma((s as f64 + 1.0) / 2.0);
    let pow = alpha.powi((i + l) as i32) * beta.powi(a as i32);
    Ok(sign * pow * ln_mag.exp() * sum)
}

/// Nodes and weights of a Gaussian quadrature rule.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss–Hermite rule for the weight `e^{-t²}`.
#[derive(Clone, Debug)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `weights[k] · e^{t_k²}`; stays representable when the weights underflow.
    pub scaled_weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1);
        let mut jac = DMatrix::<f64>::zeros(k, k);
        for j in 1..k {
            let off = (j as f64 / 2.0).sqrt();
            jac[(j, j - 1)] = off;
            jac[(j - 1, j)] = off;
        }
        let mut nodes: Vec<f64> = SymmetricEigen::new(jac).eigenvalues.iter().copied().collect();
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut scaled = Vec::with_capacity(k);
        for t in nodes.iter_mut() {
            for _ in 0..3 {
                let phi = hermite_functions(k, *t);
                // φ_k' = sqrt(2k) φ_{k-1} - t φ_k, and φ_k(t) ≈ 0 at a root
                let dphi = (2.0 * k as f64).sqrt() * phi[k - 1] - *t * phi[k];
                if dphi != 0.0 {
                    *t -= phi[k] / dphi;
                }
            }
            let phi = hermite_functions(k - 1, *t);
            scaled.push(1.0 / phi.iter().map(|p| p * p).sum::<f64>());
        }
        // enforce exact symmetry of the rule
        for j in 0..k / 2 {
            let t = 0.5 * (nodes[k - 1 - j] - nodes[j]);
            nodes[j] = -t;
            nodes[k - 1 - j] = t;
            let w = 0.5 * (scaled[j] + scaled[k - 1 - j]);
            scaled[j] = w;
            scaled[k - 1 - j] = w;
        }
        if k % 2 == 1 {
            nodes[k / 2] = 0.0;
        }
        let weights = nodes.iter().zip(&scaled).map(|(t, w)| w * (-t * t).exp()).collect();
        Self { nodes, weights, scaled_weights: scaled }
    }
}

const GK15_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const GK15_WK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
// Gauss weights live on the odd Kronrod nodes
const GK15_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Panel {
    a: f64,
    b: f64,
    value: [f64; 2],
    error: f64,
}

fn gk15_panel<F: Fn(f64) -> [f64; 2]>(f: &F, a: f64, b: f64) -> Panel {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut k = [0.0; 2];
    let mut g = [0.0; 2];
    for (i, (&x, &wk)) in GK15_X.iter().zip(&GK15_WK).enumerate() {
        let pts = if x == 0.0 { vec![f(c)] } else { vec![f(c - h * x), f(c + h * x)] };
        for v in pts {
            for m in 0..2 {
                k[m] += wk * v[m];
                if i % 2 == 1 {
                    g[m] += GK15_WG[i / 2] * v[m];
                }
            }
        }
    }
    let error = (0..2).map(|m| (h * (k[m] - g[m])).abs()).sum();
    Panel { a, b, value: [h * k[0], h * k[1]], error }
}

/// Globally adaptive 15-point Gauss–Kronrod integration of two integrands
/// sharing their evaluations, starting from `panels` equal pieces of `[a, b]`.
/// Bisects the worst panel until the summed error estimate drops below
/// `tol`; returns the two integrals and that estimate.
pub fn adaptive_gauss_kronrod<F>(f: F, a: f64, b: f64, panels: usize, tol: f64, max_panels: usize) -> Result<([f64; 2], f64)>
where
    F: Fn(f64) -> [f64; 2],
{
    let h = (b - a) / panels.max(1) as f64;
    let mut work: Vec<Panel> = (0..panels.max(1)).map(|k| gk15_panel(&f, a + k as f64 * h, a + (k + 1) as f64 * h)).collect();
    loop {
        let err: f64 = work.iter().map(|p| p.error).sum();
        if err <= tol {
            let v = work.iter().fold([0.0; 2], |acc, p| [acc[0] + p.value[0], acc[1] + p.value[1]]);
            return Ok((v, err));
        }
        if work.len() >= max_panels {
            return Err(Error::Accuracy(format!("adaptive quadrature stalled at error {err:.2e} with {} panels", work.len())));
        }
        let worst = (0..work.len()).max_by(|&x, &y| work[x].error.total_cmp(&work[y].error)).unwrap();
        let p = work.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        work.push(gk15_panel(&f, p.a, mid));
        work.push(gk15_panel(&f, mid, p.b));
    }
}

/// Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(k: usize) -> QuadratureRule {
    assert!(k >= 1);
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    for i in 0..k.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(k, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(k, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[k - 1 - i] = x;
        weights[i] = w;
        weights[k - 1 - i] = w;
    }
    QuadratureRule { nodes, weights }
}

fn legendre_with_derivative(k: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for m in 1..k {
        let mf = m as f64;
        let p2 = ((2.0 * mf + 1.0) * x * p1 - mf * p0) / (mf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let kf = k as f64;
    (p1, kf * (x * p1 - p0) / (x * x - 1.0))
}

/// Gauss–Laguerre rule for the weight `e^{-t}` on `[0, ∞)`.
pub fn gauss_laguerre(k: usize) -> QuadratureRule {
    assert!(k >= 1);
    let mut jac = DMatrix::<f64>::zeros(k, k);
    for j in 0..k {
        jac[(j, j)] = 2.0 * j as f64 + 1.0;
        if j > 0 {
            jac[(j, j - 1)] = j as f64;
            jac[(j - 1, j)] = j as f64;
        }
    }
    let mut nodes: Vec<f64> = SymmetricEigen::new(jac).eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let kf = k as f64;
    let mut weights = Vec::with_capacity(k);
    for t in nodes.iter_mut() {
        for _ in 0..3 {
            let l = laguerre_sequence(k, 0, *t);
            // t L_k' = k (L_k - L_{k-1})
            let d = kf * (l[k] - l[k - 1]) / *t;
            if d != 0.0 {
                *t -= l[k] / d;
            }
        }
        let lk1 = generalized_laguerre(k + 1, 0, *t);
        weights.push(*t / ((kf + 1.0) * (kf + 1.0) * lk1 * lk1));
    }
    QuadratureRule { nodes, weights }
}

/// Coefficients `C_{a,b}` of the expansion
/// `g(x, p) = e^{-(x²+p²)/2} Σ_{a,b} C_{a,b} H_a(x/√2) H_b(p/√2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteCoeffTable {
    /// Fock order the table was built for, if it came from a number state.
    pub n: Option<usize>,
    pub a_max: usize,
    coeffs: Vec<f64>,
}

impl HermiteCoeffTable {
    pub fn get(&self, a: usize, b: usize) -> f64 {
        if a > self.a_max || b > self.a_max {
            return 0.0;
        }
        self.coeffs[a * (self.a_max + 1) + b]
    }

    /// Evaluates the truncated expansion at `(x, p)`.
    pub fn reconstruct(&self, x: f64, p: f64) -> f64 {
        let hx: Vec<f64> = (0..=self.a_max).map(|a| hermite(a, x / 2f64.sqrt())).collect();
        let hp: Vec<f64> = (0..=self.a_max).map(|b| hermite(b, p / 2f64.sqrt())).collect();
        let mut s = 0.0;
        for a in 0..=self.a_max {
            for b in 0..=self.a_max {
                s += self.get(a, b) * hx[a] * hp[b];
            }
        }
        s * (-(x * x + p * p) / 2.0).exp()
    }

    /// Largest absolute coefficient with an odd index, a symmetry diagnostic.
    pub fn max_odd(&self) -> f64 {
        let mut m = 0.0f64;
        for a in 0..=self.a_max {
            for b in 0..=self.a_max {
                if a % 2 == 1 || b % 2 == 1 {
                    m = m.max(self.get(a, b).abs());
                }
            }
        }
        m
    }

    /// Largest `|C_{a,b} - C_{b,a}|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut m = 0.0f64;
        for a in 0..=self.a_max {
            for b in 0..a {
                m = m.max((self.get(a, b) - self.get(b, a)).abs());
            }
        }
        m
    }
}

/// Hermite table of an arbitrary polynomial `poly(x, p)` standing in front
/// of `e^{-(x²+p²)/2}`, by tensor Gauss–Hermite quadrature with `nodes`
/// points per axis (exact once `2·nodes − 1 ≥ a_max + deg poly`).
pub fn hermite_expansion_of<F>(poly: F, a_max: usize, nodes: usize) -> HermiteCoeffTable
where
    F: Fn(f64, f64) -> f64,
{
    let rule = GaussHermite::new(nodes);
    let sq2 = 2f64.sqrt();
    // φ_a(u) at every node; orthonormal Hermite functions carry the weight
    let phis: Vec<Vec<f64>> = rule.nodes.iter().map(|&u| hermite_functions(a_max, u)).collect();
    let dim = a_max + 1;
    let mut acc = vec![0.0; dim * dim];
    for (j, &u) in rule.nodes.iter().enumerate() {
        for (k, &v) in rule.nodes.iter().enumerate() {
            // φ_a φ_b supply one e^{-(u²+v²)/2}; the weight needs the other
            let w = rule.scaled_weights[j] * rule.scaled_weights[k] * (-(u * u + v * v) / 2.0).exp() * poly(sq2 * u, sq2 * v);
            if w == 0.0 {
                continue;
            }
            for a in 0..dim {
                let wa = w * phis[j][a];
                for b in 0..dim {
                    acc[a * dim + b] += wa * phis[k][b];
                }
            }
        }
    }
    // convert from orthonormal Hermite functions back to H_a(u) H_b(v)
    let mut coeffs = vec![0.0; dim * dim];
    for a in 0..dim {
        for b in 0..dim {
            let ln_norm = 0.5 * ((a + b) as f64 * 2f64.ln() + ln_factorial(a) + ln_factorial(b));
            coeffs[a * dim + b] = acc[a * dim + b] / (PI.sqrt() * ln_norm.exp());
        }
    }
    HermiteCoeffTable { n: None, a_max, coeffs }
}

/// Hermite table of `[L_n((x²+p²)/2)]²`, the polynomial part of the
/// number-state cloning kernel. Exact when `a_max ≥ 4n`.
pub fn hermite_expansion_coeffs(n: usize, a_max: usize) -> HermiteCoeffTable {
    if a_max < 4 * n {
        log::warn!("hermite expansion for n = {n} truncated at a_max = {a_max} < 4n");
    }
    let nodes = 2 * a_max + 4 * n + 8;
    let mut t = hermite_expansion_of(
        |x, p| {
            let l = laguerre(n, (x * x + p * p) / 2.0);
            l * l
        },
        a_max,
        nodes,
    );
    // odd entries vanish identically. Even ones can be tiny yet still matter,
    // since they multiply H_a values of order 10^20 and more
    let dim = a_max + 1;
    for a in 0..dim {
        for b in 0..dim {
            if a % 2 == 1 || b % 2 == 1 {
                t.coeffs[a * dim + b] = 0.0;
            }
        }
    }
    t.n = Some(n);
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_values() {
        assert_eq!(laguerre(0, 5.0), 1.0);
        assert_eq!(laguerre(1, 2.0), -1.0);
        assert_eq!(laguerre(2, 0.0), 1.0);
        assert_eq!(generalized_laguerre(0, 3, 1.7), 1.0);
        assert_eq!(generalized_laguerre(1, 0, 2.0), -1.0);
        assert_eq!(generalized_laguerre(1, 1, 1.0), 1.0);
        assert_eq!(hermite(0, 0.3), 1.0);
        assert_eq!(hermite(1, 2.0), 4.0);
        assert_eq!(hermite(3, 1.0), 8.0 - 12.0);
    }

    #[test]
    fn scaled_hermite_matches_plain_where_both_fit() {
        for &(n, x) in &[(10usize, 1.3), (60, -2.0), (140, 4.5)] {
            let (m, e) = hermite_scaled(n, x);
            let h = hermite(n, x);
            assert!((m * 2f64.powi(e as i32) / h - 1.0).abs() < 1e-12);
        }
        let (m, e) = hermite_scaled(400, 3.0);
        assert!(m.is_finite() && e > 0);
    }

    #[test]
    fn hypergeometric_examples() {
        let z = 0.37;
        assert!((gauss_2f1_terminating(0.5, 1, -0.5, z).unwrap() - (1.0 + z)).abs() < 1e-15);
        assert_eq!(gauss_2f1_terminating(0.5, 0, 7.0, z).unwrap(), 1.0);
        // 1 + (1/2)(-2)/(-3/2) z + (1/2)(3/2)(-2)(-1)/((-3/2)(-1/2) 2) z²
        let z = 0.25;
        let expect = 1.0 + (2.0 / 3.0) * z + 1.0 * z * z;
        assert!((gauss_2f1_terminating(0.5, 2, -1.5, z).unwrap() - expect).abs() < 1e-15);
        assert!(gauss_2f1_terminating(1.0, 3, -1.0, 0.5).is_err());
    }

    #[test]
    fn gauss_hermite_integrates_moments() {
        let r = GaussHermite::new(12);
        let m4: f64 = r.nodes.iter().zip(&r.weights).map(|(t, w)| w * t.powi(4)).sum();
        assert!((m4 - 0.75 * PI.sqrt()).abs() < 1e-13);
        let big = GaussHermite::new(200);
        let m0: f64 = big.weights.iter().sum();
        assert!((m0 - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn legendre_and_laguerre_rules() {
        let r = gauss_legendre(9);
        let s: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-14);
        let r = gauss_laguerre(8);
        let s: f64 = r.nodes.iter().zip(&r.weights).map(|(t, w)| w * t.powi(5)).sum();
        assert!((s - 120.0).abs() < 1e-9);
    }

    #[test]
    fn kronrod_handles_a_kink() {
        let ([a, b], err) = adaptive_gauss_kronrod(|x| [(x - 0.3).abs(), x * x], 0.0, 1.0, 4, 1e-13, 500).unwrap();
        assert!((a - 0.29).abs() < 1e-12 && (b - 1.0 / 3.0).abs() < 1e-14 && err <= 1e-13);
    }
}
