//! Quantum non-Gaussianity: the relative-entropy measure `δ` for pure states,
//! the logarithmic Wigner negativity `W_N`, and the datasets that set them
//! against cloning bounds and critical squeezing.

use crate::cloner::{ncb_ultimate, Solver, SolverParams};
use crate::error::{Error, Result};
use crate::input::InputState;
use crate::specfun::{adaptive_gauss_kronrod, ln_factorial};
use crate::states::{
    make_cat_vector, make_fock, reference_gaussian, sample_haar_pure,
    sample_random_density, wigner_ring_harmonics, FockDensity, FockVector, C64,
};
use crate::teleport::critical_squeezing;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Entropy (nats) of a thermal state with mean occupation `x`.
pub fn thermal_entropy(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (x + 1.0) * (x + 1.0).ln() - x * x.ln()
}

/// For a pure state the relative entropy to its reference Gaussian is the
/// Gaussian's own entropy `g(ν − ½)`.
pub fn delta_pure(psi: &FockVector) -> Result<f64> {
    let g = reference_gaussian(&psi.to_density());
    let det = g.det();
    if det < 0.25 - 1e-9 {
        return Err(Error::Accuracy(format!("covariance determinant {det} below the uncertainty bound ¼")));
    }
    Ok(thermal_entropy(g.symplectic_eigenvalue() - 0.5))
}

/// Absolute error demanded of the radial integration of `∫|W|` and `∫W`.
pub const WIGNER_TOL: f64 = 1e-9;
/// Agreement demanded between `∫W` and 1.
pub const WIGNER_NORM_TOL: f64 = 1e-9;
const WIGNER_MAX_PANELS: usize = 4000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WignerIntegrals {
    pub abs: f64,
    pub total: f64,
    /// Error estimate of the radial integration.
    pub error: f64,
}

/// `∫|W|` and `∫W` over phase space. On each circle about the origin `W` is
/// a trigonometric polynomial, so its angular integrals are done exactly
/// between sign changes; the radial integral is adaptive, which copes with
/// the kinks `|W|` has where nodal lines cross a circle.
pub fn wigner_integrals(rho: &FockDensity) -> Result<WignerIntegrals> {
    let radius = cutoff_radius(rho.support(1e-16));
    let ring = |r: f64| {
        let h = wigner_ring_harmonics(rho, r);
        [r * ring_abs_integral(&h), r * 2.0 * PI * h[0].re]
    };
    let ([abs, total], error) = adaptive_gauss_kronrod(ring, 0.0, radius, 32, WIGNER_TOL, WIGNER_MAX_PANELS)?;
    Ok(WignerIntegrals { abs, total, error })
}

/// `∫₀^{2π} |Σ_k Re(h_k e^{-ikθ})| dθ`, splitting the circle at the zeros.
fn ring_abs_integral(h: &[C64]) -> f64 {
    let scale = h.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let k_max = h.iter().rposition(|c| c.norm() > 1e-17 * scale).unwrap_or(0);
    let h = &h[..=k_max];
    if k_max == 0 {
        return 2.0 * PI * h[0].re.abs();
    }
    let w = |t: f64| h.iter().enumerate().map(|(k, c)| c.re * (k as f64 * t).cos() + c.im * (k as f64 * t).sin()).sum::<f64>();
    // antiderivative of the polynomial
    let prim = |t: f64| {
        h[0].re * t + h.iter().enumerate().skip(1).map(|(k, c)| (c.re * (k as f64 * t).sin() - c.im * (k as f64 * t).cos()) / k as f64).sum::<f64>()
    };
    let dw = |t: f64| h.iter().enumerate().skip(1).map(|(k, c)| k as f64 * (c.im * (k as f64 * t).cos() - c.re * (k as f64 * t).sin())).sum::<f64>();
    // f(lo) and f(hi) differ in sign
    let bisect = |g: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64| {
        let s_lo = g(lo).signum();
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if g(mid).signum() == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    // A sign change of W inside a sample interval gives a zero. So does a
    // shallow lobe that dips across zero between samples: W' then changes
    // sign, and W at that extremum has the opposite sign.
    let samples = (32 * k_max).max(512);
    let step = 2.0 * PI / samples as f64;
    let mut cuts = vec![0.0];
    let (mut w0, mut d0) = (w(0.0), dw(0.0));
    for s in 1..=samples {
        let (t0, t1) = ((s - 1) as f64 * step, s as f64 * step);
        let (w1, d1) = (w(t1), dw(t1));
        if w0.signum() != w1.signum() {
            cuts.push(bisect(&w, t0, t1));
        } else if d0.signum() != d1.signum() {
            let te = bisect(&dw, t0, t1);
            if w(te).signum() != w0.signum() {
                cuts.push(bisect(&w, t0, te));
                cuts.push(bisect(&w, te, t1));
            }
        }
        w0 = w1;
        d0 = d1;
    }
    cuts.push(2.0 * PI);
    cuts.windows(2).map(|c| (prim(c[1]) - prim(c[0])).abs()).sum()
}

/// Smallest `R` past the peak with `(2R²)^N e^{-R²} / N! < 1e−14`.
fn cutoff_radius(n: usize) -> f64 {
    let nf = n as f64;
    let mut r = (nf.max(1.0)).sqrt();
    loop {
        let ln = nf * (2.0 * r * r).ln() - r * r - ln_factorial(n);
        if ln < (1e-14f64).ln() {
            return r;
        }
        r += 0.05;
    }
}

/// `ln ∫ |W(x, p)| dx dp`.
pub fn wigner_negativity(rho: &FockDensity) -> Result<f64> {
    let w = wigner_integrals(rho)?;
    if (w.total - 1.0).abs() > WIGNER_NORM_TOL {
        return Err(Error::Accuracy(format!("∫W = {} instead of 1", w.total)));
    }
    let wn = w.abs.ln();
    if wn < -1e-9 {
        return Err(Error::Accuracy(format!("negative log-negativity {wn}")));
    }
    Ok(wn.max(0.0))
}

/// One-parameter families and samplers of the scatter datasets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `|n⟩` for `n = 0..count`.
    Fock,
    /// `√(1−p)|a⟩ + √p|b⟩`.
    Sup01,
    Sup02,
    Sup12,
    /// Haar-random pure states on `|0⟩, |1⟩, |2⟩`.
    Random012,
    EvenCat,
    OddCat,
}

impl Family {
    pub fn all() -> [Family; 7] {
        [Family::Fock, Family::Sup01, Family::Sup02, Family::Sup12, Family::Random012, Family::EvenCat, Family::OddCat]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Fock => "fock",
            Family::Sup01 => "sup01",
            Family::Sup02 => "sup02",
            Family::Sup12 => "sup12",
            Family::Random012 => "random012",
            Family::EvenCat => "even-cat",
            Family::OddCat => "odd-cat",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::all()
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown family '{s}'")))
    }
}

/// Per-row seed from the run seed and a row counter (SplitMix64 finalizer).
pub fn row_seed(seed: u64, row: u64) -> u64 {
    let mut z = seed.wrapping_add(row.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Largest cat amplitude sampled.
pub const CAT_ALPHA_MAX: f64 = 2.0;

/// `(param, input, pure vector)` rows of a family.
pub fn family_members(family: Family, count: usize, seed: u64) -> Result<Vec<(f64, InputState, FockVector)>> {
    let sup = |a: usize, b: usize, p: f64| -> Result<FockVector> {
        let mut amps = vec![C64::new(0.0, 0.0); b + 1];
        amps[a] = C64::new((1.0 - p).sqrt(), 0.0);
        amps[b] = C64::new(p.sqrt(), 0.0);
        FockVector::new(amps)
    };
    let frac = |k: usize| (k + 1) as f64 / count as f64;
    (0..count)
        .map(|k| {
            let (param, psi) = match family {
                Family::Fock => (k as f64, make_fock(k)),
                Family::Sup01 => (frac(k), sup(0, 1, frac(k))?),
                Family::Sup02 => (frac(k), sup(0, 2, frac(k))?),
                Family::Sup12 => (frac(k), sup(1, 2, frac(k))?),
                Family::Random012 => (k as f64, sample_haar_pure(3, row_seed(seed, k as u64))),
                Family::EvenCat | Family::OddCat => {
                    let alpha = CAT_ALPHA_MAX * frac(k);
                    let g = if family == Family::EvenCat { 1 } else { -1 };
                    (alpha, make_cat_vector(alpha, g)?)
                }
            };
            let input = match family {
                Family::Fock => InputState::Fock(k),
                Family::EvenCat => InputState::Cat { alpha: param, gamma: 1 },
                Family::OddCat => InputState::Cat { alpha: param, gamma: -1 },
                _ => InputState::pure(psi.clone()),
            };
            Ok((param, input, psi))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct QngRecord {
    pub family: String,
    pub param: f64,
    pub delta: Option<f64>,
    pub wn: Option<f64>,
    pub ncb: Option<f64>,
    pub r_c: Option<f64>,
    /// Error or "unreachable" marker for rows missing a value.
    pub note: String,
}

fn record(family: &str, param: f64, input: &InputState, delta: Option<f64>, solver: Solver, params: &SolverParams) -> QngRecord {
    let mut notes = Vec::new();
    let wn = match input.density().and_then(|r| wigner_negativity(&r)) {
        Ok(v) => Some(v),
        Err(e) => {
            notes.push(format!("wn: {e}"));
            None
        }
    };
    let ncb = match ncb_ultimate(input, solver, params) {
        Ok(b) => Some(b.bound),
        Err(e) => {
            notes.push(format!("ncb: {e}"));
            None
        }
    };
    let r_c = ncb.and_then(|b| match critical_squeezing(input, b) {
        Ok(r) => Some(r),
        Err(Error::Unreachable { .. }) => {
            notes.push("unreachable".into());
            None
        }
        Err(e) => {
            notes.push(format!("r_c: {e}"));
            None
        }
    });
    QngRecord { family: family.into(), param, delta, wn, ncb, r_c, note: notes.join("; ") }
}

/// Rows of `(δ, W_N, NCB, r_c)` for pure-state families. Solver failures are
/// recorded in the row rather than aborting the table.
pub fn scatter_qng_vs_ncb(families: &[Family], sample_count: usize, seed: u64, solver: Solver, params: &SolverParams) -> Result<Vec<QngRecord>> {
    let mut rows = Vec::new();
    for &f in families {
        let members = family_members(f, sample_count, seed)?;
        let mut part: Vec<QngRecord> = members
            .par_iter()
            .map(|(param, input, psi)| {
                let delta = delta_pure(psi).ok();
                record(f.name(), *param, input, delta, solver, params)
            })
            .collect();
        rows.append(&mut part);
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct MixedScatter {
    /// First row is the vacuum reference; the rest are random densities.
    pub records: Vec<QngRecord>,
    /// Spearman rank correlation of `(W_N, r_c)` over the random rows.
    pub spearman_wn_rc: f64,
}

/// Random densities on `|0⟩, |1⟩, |2⟩`, each with its Wigner negativity and
/// the squeezing needed to teleport it at its own cloning bound.
pub fn scatter_mixed(sample_count: usize, seed: u64, solver: Solver, params: &SolverParams) -> Result<MixedScatter> {
    if sample_count == 0 {
        return Err(Error::Precondition("need at least one sample".into()));
    }
    let vacuum = record("vacuum", 0.0, &InputState::Fock(0), Some(0.0), solver, params);
    let random: Vec<QngRecord> = (0..sample_count)
        .into_par_iter()
        .map(|k| {
            let rho = sample_random_density(3, row_seed(seed, k as u64));
            record("random-mixed", k as f64, &InputState::Mixed(rho), None, solver, params)
        })
        .collect();
    let pairs: Vec<(f64, f64)> = random.iter().filter_map(|r| Some((r.wn?, r.r_c?))).collect();
    let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let spearman_wn_rc = spearman(&a, &b);
    let mut records = vec![vacuum];
    records.extend(random);
    Ok(MixedScatter { records, spearman_wn_rc })
}

/// Ranks with ties sharing their mean rank.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let mean = 0.5 * (i + j) as f64;
        for &k in &idx[i..=j] {
            out[k] = mean;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation; NaN for fewer than two pairs.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    if a.len() < 2 || a.len() != b.len() {
        return f64::NAN;
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    cov / (va * vb).sqrt()
}
