//! Datasets behind each figure.

use crate::config::RunConfig;
use crate::output::OutDir;
use crate::{solver_params, CliError};
use noclone::cloner::{gaussian_ncb, ncb_fock, ncb_grid, truncation_sweep, CloneKernel, Eigvec, Grid, Solver, SolverParams};
use noclone::iteration::{
    analytic_ansatz_fidelity, ansatz, ansatz_grid, optimal_ansatz_r, power_iterate, pz_full_range, pz_profile, PZ_BIN,
    PZ_MAX,
};
use noclone::qng::{scatter_mixed, scatter_qng_vs_ncb, Family, QngRecord};
use noclone::specfun::laguerre;
use noclone::teleport::{
    block_comparison, critical_squeezing, frontier_crossing, lambda_grid, pnes_frontier, tmsv_fidelity,
};
use noclone::InputState;
use serde::Serialize;
use serde_json::json;

pub const FIGURES: [&str; 11] = ["fig2", "fig3a", "fig3b", "fig4a", "fig4b", "s1", "s2", "s3", "s4", "s5", "s6"];

pub fn run(id: &str, cfg: &RunConfig) -> Result<std::path::PathBuf, CliError> {
    let mut out = OutDir::create(&cfg.out.join(id))?;
    let extra = match id {
        "fig2" => fig2(cfg, &mut out)?,
        "fig3a" | "fig3b" | "s4" => pure_scatter(cfg, &mut out)?,
        "fig4a" => fig4a(cfg, &mut out)?,
        "fig4b" => mixed(cfg, &mut out)?,
        "s1" => s1(cfg, &mut out)?,
        "s2" => s2(cfg, &mut out)?,
        "s3" => s3(cfg, &mut out)?,
        "s5" => s5(cfg, &mut out)?,
        "s6" => s6(cfg, &mut out)?,
        _ => return Err(CliError::Usage(format!("unknown figure id {id:?}; expected one of {}", FIGURES.join(", ")))),
    };
    out.finish(id, cfg, extra)
}

fn lambdas(cfg: &RunConfig) -> Vec<f64> {
    lambda_grid(1e-3, 1e2, cfg.lambda_points.max(2))
}

fn fock_bound(n: usize, p: &SolverParams) -> Result<f64, CliError> {
    Ok(ncb_fock(&InputState::Fock(n), p, None)?.bound)
}

/// Scatter rows use the grid unless the Fock route was asked for.
fn scatter_solver(cfg: &RunConfig) -> Solver {
    match cfg.solver {
        crate::config::SolverChoice::Fock => Solver::Fock,
        _ => Solver::Grid,
    }
}

#[derive(Serialize)]
struct FidelityRow {
    n: usize,
    r: f64,
    fidelity: f64,
}

#[derive(Serialize)]
struct ThresholdRow {
    n: usize,
    gaussian_ncb: f64,
    ultimate_ncb: f64,
    r_c_gaussian: f64,
    r_c_ultimate: f64,
}

fn fig2(cfg: &RunConfig, out: &mut OutDir) -> Result<serde_json::Value, CliError> {
    let p = solver_params(cfg);
    let mut curves = Vec::new();
    let mut thresholds = Vec::new();
    for n in 0..4 {
        let input = InputState::Fock(n);
        for k in 0..=150 {
            let r = 0.01 * k as f64;
            curves.push(FidelityRow { n, r, fidelity: tmsv_fidelity(&input, r)? });
        }
        let g = gaussian_ncb(&input)?;
        let u = fock_bound(n, &p)?;
        thresholds.push(ThresholdRow {
            n,
            gaussian_ncb: g,
            ultimate_ncb: u,
            r_c_gaussian: critical_squeezing(&input, g)?,
            r_c_ultimate: critical_squeezing(&input, u)?,
        });
    }
    out.csv("tmsv_fidelity", &curves)?;
    out.csv("thresholds", &thresholds)?;
    Ok(json!({ "ultimate_solver": "fock", "n_trunc": cfg.n_trunc }))
}

fn pure_scatter(cfg: &RunConfig, out: &mut OutDir) -> Result<serde_json::Value, CliError> {
    let rows = scatter_qng_vs_ncb(&Family::all(), cfg.samples, cfg.seed, scatter_solver(cfg), &solver_params(cfg))?;
    out.csv("scatter", &rows)?;
    Ok(json!({
        "families": Family::all().iter().map(|f| f.name()).collect::<Vec<_>>(),
        "entropy_unit": "nats",
        "failed_rows": rows.iter().filter(|r| !r.note.is_empty()).count(),
    }))
}

#[derive(Serialize)]
struct Fig4aRow {
    alpha: f64,
    ncb_even_cat: f64,
    r_c_even_cat: f64,
    ncb_mixture: f64,
    r_c_mixture: f64,
}

fn fig4a(cfg: &RunConfig, out: &mut OutDir) -> Result<serde_json::Value, CliError> {
    let p = solver_params(cfg);
    let steps = if cfg.paper_scale { 40 } else { 10 };
    let mut rows = Vec::new();
    for k in 0..=steps {
        let alpha = 2.0 * k as f64 / steps as f64;
        let cat = InputState::Cat { alpha, gamma: 1 };
        let mix = InputState::Cat { alpha, gamma: 0 };
        let (bc, bm) = (ncb_grid(&cat, &p, None)?.bound, ncb_grid(&mix, &p, None)?.bound);
        rows.push(Fig4aRow {
            alpha,
            ncb_even_cat: bc,
            r_c_even_cat: critical_squeezing(&cat, bc)?,
            ncb_mixture: bm,
            r_c_mixture: critical_squeezing(&mix, bm)?,
        });
    }
    out.csv("cat_vs_mixture", &rows)?;
    let spread = rows.iter().map(|r| r.r_c_mixture).fold(f64::NEG_INFINITY, f64::max)
        - rows.iter().map(|r| r.r_c_mixture).fold(f64::INFINITY, f64::min);
    Ok(json!({ "solver": "grid", "mixture_r_c_spread": spread }))
}

fn mixed(cfg: &RunConfig, out: &mut OutDir) -> Result<serde_json::Value, CliError> {
    let scatter = scatter_mixed(cfg.mixed_samples.max(1), cfg.seed, scatter_solver(cfg), &solver_params(cfg))?;
    out.csv("mixed", &scatter.records)?;
    let zero: Vec<f64> = scatter
        .records
        .iter()
        .skip(1)
        .filter(|r| r.wn.is_some_and(|w| w < 1e-9))
        .filter_map(|r| r.r_c)
        .collect();
    let spread = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - v.iter().cloned().fold(f64::INFINITY, f64::min);
    let all: Vec<f64> = scatter.records.iter().skip(1).filter_map(|r| r.r_c).collect();
    Ok(json!({
        "spearman_wn_rc": scatter.spearman_wn_rc,
        "zero_negativity_rows": zero.len(),
        "r_c_spread_zero_negativity": if zero.len() > 1 { spread(&zero) } else { 0.0 },
        "r_c_spread_all": if all.len() > 1 { spread(&all) } else { 0.0 },
        "failed_rows": scatter.records.iter().filter(|r: &&QngRecord| !r.note.is_empty()).count(),
    }))
}

#[derive(Serialize)]
struct SweepOut {
    n: usize,
    n_trunc: usize,
    bound: f64,
    residual: f64,
    iterations: usize,
}

fn s1(cfg: &RunConfig, out: &mut OutDir) -> Result<serde_json::Value, CliError> {
    let p = solver_params(cfg);
    let truncs: Vec<usize> = (2..=cfg.n_trunc / 10).map(|k| 10 * k).collect();
    let mut rows = Vec::new();
    for n in 1..4 {
        for r in truncation_sweep(&InputState::Fock(n), &truncs, &p)? {
            rows.push(SweepOut { n, n_trunc: r.n_trunc, bound: r.bound, residual: r.residual, iterations: r.iterations });
        }
    }
    out.csv("truncation", &rows)?;
    Ok(json!({ "truncations": truncs }))
}

#[derive(Serialize)]
struct ProfileRow {
    z: f64,
    f0: f64,
    f1: f64,
    f2: f64,
    f3: f64,
}

#[derive(Serialize)]
struct AnsatzRow {
    r: f64,
    fidelity: f64,
}

#[derive(Serialize)]
struct OptimumRow {
    n: usize,
    r_opt: f64,
    ansatz_fidelity: f64,
    ultimate_ncb: f64,
}

#[derive(Serialize)]
struct TraceRow {
    n: usize,
    step: usize,
    from_ansatz: f64,
    from_vacuum: f64,
}

fn f_n(n: usize, z: f64) -> f64 {
    laguerre(n, z).powi(2) * (-z).exp()
}

fn s2(cfg: &RunConfig, out: &mut OutDir) -> Result<serde_json::Value, CliError> {
    let p = solver_params(cfg);
    let profiles: Vec<ProfileRow> = (0..=300)
        .map(|k| {
            let z = 0.05 * k as f64;
            ProfileRow { z, f0: f_n(0, z), f1: f_n(1, z), f2: f_n(2, z), f3: f_n(3, z) }
        })
        .collect();
    out.csv("f_profiles", &profiles)?;
    let curve = (0..=300).map(|k| {
        let r = 0.01 * k as f64;
        Ok(AnsatzRow { r, fidelity: analytic_ansatz_fidelity(1, r)? })
    });
    out.csv("ansatz_n1", &curve.collect::<Result<Vec<_>, CliError>>()?)?;
    let mut optima = Vec::new();
    let mut traces = Vec::new();
    for n in 0..4 {
        let (r, f) = optimal_ansatz_r(n)?;
        optima.push(OptimumRow { n, r_opt: r, ansatz_fidelity: f, ultimate_ncb: fock_bound(n, &p)? });
        let grid = ansatz_grid(r);
        let kernel = CloneKernel::build(&InputState::Fock(n), grid)?;
        let a = power_iterate(&ansatz(r, grid)?.wavefunction, &kernel, 7)?.trace;
        let v = power_iterate(&noclone::cloner::GridWavefunction::two_mode_vacuum(grid), &kernel, 7)?.trace;
        for (step, (fa, fv)) in a.iter().zip(&v).enumerate() {
            traces.push(TraceRow { n, step, from_ansatz: *fa, from_vacuum: *fv });
        }
    }
    out.csv("ansatz_optimum", &optima)?;
    out.csv("iteration", &traces)?;
    Ok(json!({ "iteration_grid": "smallest power of two resolving the optimal ansatz" }))
}

#[derive(Serialize)]
struct PzRow {
    n: usize,
    z: f64,
    before: f64,
    after: f64,
    optimal: f64,
    f_n: f64,
}

fn s3(cfg: &RunConfig, out: &mut OutDir) -> Result<serde_json::Value, CliError> {
    let mut rows = Vec::new();
    let mut beyond = Vec::new();
    for n in 0..3 {
        let (r, _) = optimal_ansatz_r(n)?;
        let grid = ansatz_grid(r);
        let input = InputState::Fock(n);
        let kernel = CloneKernel::build(&input, grid)?;
        let start = ansatz(r, grid)?.wavefunction;
        let after = power_iterate(&start, &kernel, 7)?.state;
        let p = SolverParams { grid, ..solver_params(cfg) };
        let best = match ncb_grid(&input, &p, Some(&after))?.eigvec {
            Eigvec::Grid(psi) => psi,
            Eigvec::Fock(_) => unreachable!("grid route"),
        };
        let (pb, pa, po) = (pz_profile(&start, PZ_BIN, PZ_MAX)?, pz_profile(&after, PZ_BIN, PZ_MAX)?, pz_profile(&best, PZ_BIN, PZ_MAX)?);
        for k in 0..pb.z.len() {
            rows.push(PzRow { n, z: pb.z[k], before: pb.p1[k], after: pa.p1[k], optimal: po.p1[k], f_n: f_n(n, pb.z[k]) });
        }
        beyond.push(json!({ "n": n, "grid_size": grid.size, "mass_beyond_z_max": [pb.beyond.0, pa.beyond.0, po.beyond.0], "z_full_range": pz_full_range(&grid) }));
    }
    out.csv("pz_profiles", &rows)?;
    Ok(json!({ "dz": PZ_BIN, "z_max": PZ_MAX, "tails": beyond }))
}

#[derive(Serialize)]
struct BlockRow {
    n: usize,
    d: i64,
    lambda: f64,
    n_av: f64,
    fidelity: f64,
}

#[derive(Serialize)]
struct TmsvRow {
    n: usize,
    r: f64,
    n_av: f64,
    fidelity: f64,
}

fn tmsv_rows(n: usize, rows: &mut Vec<TmsvRow>) -> Result<(), CliError> {
    for k in 0..=150 {
        let r = 0.01 * k as f64;
        rows.push(TmsvRow { n, r, n_av: r.sinh().powi(2), fidelity: tmsv_fidelity(&InputState::Fock(n), r)? });
    }
    Ok(())
}

fn s5(cfg: &RunConfig, out: &mut OutDir) -> Result<serde_json::Value, CliError> {
    let p = solver_params(cfg);
    let mut blocks = Vec::new();
    let mut tmsv = Vec::new();
    let mut ncb = Vec::new();
    for n in [1usize, 2] {
        for c in block_comparison(n, &[0, 1, 2], &lambdas(cfg), cfg.i_max)? {
            for pt in c.points {
                blocks.push(BlockRow { n, d: c.d, lambda: pt.lambda, n_av: pt.n_av, fidelity: pt.fidelity });
            }
        }
        tmsv_rows(n, &mut tmsv)?;
        ncb.push(json!({ "n": n, "ultimate_ncb": fock_bound(n, &p)? }));
    }
    out.csv("blocks", &blocks)?;
    out.csv("tmsv", &tmsv)?;
    Ok(json!({ "i_max": cfg.i_max, "ncb": ncb }))
}

#[derive(Serialize)]
struct RequiredRow {
    n: usize,
    ultimate_ncb: f64,
    n_av_pnes: f64,
    n_av_tmsv: f64,
}

fn s6(cfg: &RunConfig, out: &mut OutDir) -> Result<serde_json::Value, CliError> {
    let p = solver_params(cfg);
    let mut frontier_rows = Vec::new();
    let mut tmsv = Vec::new();
    let mut required = Vec::new();
    for n in 0..3 {
        let frontier = pnes_frontier(n, &lambdas(cfg), cfg.i_max)?;
        let ncb = fock_bound(n, &p)?;
        let r_c = critical_squeezing(&InputState::Fock(n), ncb)?;
        required.push(RequiredRow { n, ultimate_ncb: ncb, n_av_pnes: frontier_crossing(&frontier, ncb)?, n_av_tmsv: r_c.sinh().powi(2) });
        for pt in frontier {
            frontier_rows.push(BlockRow { n, d: 0, lambda: pt.lambda, n_av: pt.n_av, fidelity: pt.fidelity });
        }
        tmsv_rows(n, &mut tmsv)?;
    }
    out.csv("pnes_frontier", &frontier_rows)?;
    out.csv("tmsv", &tmsv)?;
    out.csv("required_photon_number", &required)?;
    Ok(json!({ "i_max": cfg.i_max, "lambda_range": [1e-3, 1e2] }))
}

/// Grid for the `qng` command and the figures: symmetric unless an extent is set.
pub fn grid_of(cfg: &RunConfig) -> Grid {
    match cfg.grid_extent {
        Some(l) => Grid::with_extent(cfg.grid_size, l),
        None => Grid::symmetric(cfg.grid_size),
    }
}
