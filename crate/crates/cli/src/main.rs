//! `noclone`: cloning bounds, teleportation requirements and the datasets
//! behind each figure.
//!
//! Exit codes: 0 success, 1 I/O, 2 usage or invalid input, 3 solver
//! failure, 4 truncation or accuracy failure.

mod config;
mod figures;
mod output;
mod spec;

use clap::{Parser, Subcommand};
use config::{RunConfig, SolverChoice};
use noclone::cloner::{classical_bound, fock_route_supports, gaussian_ncb, ncb_ultimate, BoundResult, Solver, SolverParams};
use noclone::lanczos::LanczosOptions;
use noclone::qng::{scatter_mixed, scatter_qng_vs_ncb, Family};
use noclone::teleport::{critical_squeezing, tmsv_fidelity};
use noclone::InputState;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "noclone", version, about = "No-cloning bounds and teleportation requirements for non-Gaussian states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override any configuration key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Use the published truncations (N_trunc = 300, G = 512).
    #[arg(long, global = true)]
    paper_scale: bool,
    /// auto, grid or fock.
    #[arg(long, global = true)]
    solver: Option<String>,
    #[arg(long, global = true)]
    ntrunc: Option<usize>,
    #[arg(long, global = true)]
    grid_size: Option<usize>,
    /// Half-width of the grid axes, or `auto` for the symmetric grid.
    #[arg(long, global = true)]
    grid_extent: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classical, Gaussian and ultimate cloning bounds for one input.
    Bounds {
        /// fock:n | superposition:c0,c1,c2 | cat:alpha,gamma | random:seed | file:path
        spec: String,
    },
    /// Critical squeezing for teleportation to beat a cloning bound.
    Teleport {
        spec: String,
        /// ultimate, gaussian, classical, or a number.
        #[arg(long, default_value = "ultimate")]
        bound: String,
    },
    /// Regenerate the dataset behind a figure.
    Sweep {
        /// fig2 | fig3a | fig3b | fig4a | fig4b | s1 .. s6
        figure: String,
    },
    /// Non-Gaussianity scatter for one family, or `mixed` for random densities.
    Qng { family: String },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(noclone::Error),
    Io(String),
}

impl From<noclone::Error> for CliError {
    fn from(e: noclone::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use noclone::Error as E;
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                E::Domain(_) | E::Precondition(_) | E::Parse(_) | E::Dimension(_) => 2,
                E::Convergence { .. } | E::Unreachable { .. } | E::NotImplemented(_) => 3,
                E::Truncation { .. } | E::Extent(_) | E::Accuracy(_) => 4,
                E::Io(_) | E::Json(_) => 1,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        cfg.apply_text(&text, &path.display().to_string()).map_err(CliError::Usage)?;
    }
    cfg.apply_env(std::env::vars()).map_err(CliError::Usage)?;
    let mut flags: Vec<(String, String)> = Vec::new();
    for kv in &cli.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        flags.push((k.trim().into(), v.into()));
    }
    let mut push = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            flags.push((k.into(), v));
        }
    };
    push("jobs", cli.jobs.map(|v| v.to_string()));
    push("seed", cli.seed.map(|v| v.to_string()));
    push("out", cli.out.as_ref().map(|p| p.display().to_string()));
    push("solver", cli.solver.clone());
    push("n_trunc", cli.ntrunc.map(|v| v.to_string()));
    push("grid_size", cli.grid_size.map(|v| v.to_string()));
    push("grid_extent", cli.grid_extent.clone());
    if cli.paper_scale {
        flags.push(("paper_scale".into(), "true".into()));
    }
    for (k, v) in flags {
        cfg.set(&k, &v).map_err(CliError::Usage)?;
    }
    cfg.finish();
    Ok(cfg)
}

pub fn solver_params(cfg: &RunConfig) -> SolverParams {
    SolverParams {
        grid: figures::grid_of(cfg),
        n_trunc: cfg.n_trunc,
        lanczos: LanczosOptions {
            krylov_dim: cfg.krylov_dim,
            keep: (cfg.krylov_dim / 4).max(2),
            tol: cfg.lanczos_tol,
            max_restarts: cfg.max_restarts,
        },
        ..Default::default()
    }
}

fn pick_solver(cfg: &RunConfig, input: &InputState) -> Solver {
    match cfg.solver {
        SolverChoice::Grid => Solver::Grid,
        SolverChoice::Fock => Solver::Fock,
        SolverChoice::Auto if input.is_phase_invariant() && fock_route_supports(input) => Solver::Fock,
        SolverChoice::Auto => Solver::Grid,
    }
}

fn ultimate(cfg: &RunConfig, input: &InputState) -> Result<BoundResult, CliError> {
    Ok(ncb_ultimate(input, pick_solver(cfg, input), &solver_params(cfg))?)
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable report"));
}

fn write_report(cfg: &RunConfig, explicit_out: bool, name: &str, report: &serde_json::Value) -> Result<(), CliError> {
    if explicit_out {
        let mut out = output::OutDir::create(&cfg.out)?;
        out.json(name, report)?;
        out.finish(name, cfg, json!({}))?;
    }
    Ok(())
}

fn cmd_bounds(cfg: &RunConfig, spec: &str, explicit_out: bool) -> Result<(), CliError> {
    let input = spec::parse_input(spec).map_err(CliError::Usage)?;
    let u = ultimate(cfg, &input)?;
    let classical = match classical_bound(&input) {
        Ok(c) => json!(c.bound),
        Err(noclone::Error::NotImplemented(msg)) => {
            log::warn!("{msg}");
            serde_json::Value::Null
        }
        Err(e) => return Err(e.into()),
    };
    let report = json!({
        "input": input.descriptor(),
        "classical": classical,
        "gaussian": gaussian_ncb(&input)?,
        "ultimate": {
            "bound": u.bound,
            "solver": u.solver,
            "residual": u.residual,
            "operator_applications": u.iterations,
            "params": u.params,
        },
        "config": cfg.to_json(),
    });
    print_json(&report);
    write_report(cfg, explicit_out, "bounds", &report)
}

fn cmd_teleport(cfg: &RunConfig, spec: &str, bound: &str, explicit_out: bool) -> Result<(), CliError> {
    let input = spec::parse_input(spec).map_err(CliError::Usage)?;
    let value = match bound {
        "ultimate" => ultimate(cfg, &input)?.bound,
        "gaussian" => gaussian_ncb(&input)?,
        "classical" => classical_bound(&input)?.bound,
        other => other.parse::<f64>().map_err(|_| CliError::Usage(format!("--bound must be ultimate, gaussian, classical or a number, not {other:?}")))?,
    };
    let r_c = critical_squeezing(&input, value)?;
    let report = json!({
        "input": input.descriptor(),
        "bound_kind": bound,
        "bound": value,
        "r_c": r_c,
        "fidelity_at_r_c": tmsv_fidelity(&input, r_c)?,
        "fidelity_vacuum_resource": tmsv_fidelity(&input, 0.0)?,
    });
    print_json(&report);
    write_report(cfg, explicit_out, "teleport", &report)
}

fn cmd_qng(cfg: &RunConfig, family: &str) -> Result<(), CliError> {
    let solver = match cfg.solver {
        SolverChoice::Fock => Solver::Fock,
        _ => Solver::Grid,
    };
    let p = solver_params(cfg);
    let mut out = output::OutDir::create(&cfg.out.join(format!("qng-{family}")))?;
    let extra = if family == "mixed" {
        let s = scatter_mixed(cfg.mixed_samples.max(1), cfg.seed, solver, &p)?;
        out.csv("scatter", &s.records)?;
        json!({ "spearman_wn_rc": s.spearman_wn_rc })
    } else {
        let f: Family = family.parse().map_err(|e: noclone::Error| CliError::Usage(format!("{e}; expected one of {} or mixed", Family::all().map(|f| f.name()).join(", "))))?;
        let rows = scatter_qng_vs_ncb(&[f], cfg.samples, cfg.seed, solver, &p)?;
        out.csv("scatter", &rows)?;
        json!({ "family": f.name(), "entropy_unit": "nats" })
    };
    let path = out.finish(&format!("qng-{family}"), cfg, extra)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = resolve_config(&cli)?;
    if cfg.jobs > 0 {
        // a second initialization only happens in tests; keep the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build_global();
    }
    let explicit_out = cli.out.is_some();
    match &cli.command {
        Command::Bounds { spec } => cmd_bounds(&cfg, spec, explicit_out),
        Command::Teleport { spec, bound } => cmd_teleport(&cfg, spec, bound, explicit_out),
        Command::Sweep { figure } => {
            if !figures::FIGURES.contains(&figure.as_str()) {
                return Err(CliError::Usage(format!("unknown figure id {figure:?}; expected one of {}", figures::FIGURES.join(", "))));
            }
            let path = figures::run(figure, &cfg)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        Command::Qng { family } => cmd_qng(&cfg, family),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("noclone: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
