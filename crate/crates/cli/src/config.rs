//! Run configuration: defaults, then a `key=value` file, then `NOCLONE_*`
//! environment variables, then command-line flags.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverChoice {
    /// Fock route for phase-invariant inputs, grid otherwise.
    Auto,
    Grid,
    Fock,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub solver: SolverChoice,
    pub n_trunc: usize,
    pub grid_size: usize,
    /// Half-width of the direct axes; `None` for the symmetric grid.
    pub grid_extent: Option<f64>,
    pub krylov_dim: usize,
    pub lanczos_tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
    /// Members per pure-state family in the scatter datasets.
    pub samples: usize,
    /// Random densities in the mixed-state scatter.
    pub mixed_samples: usize,
    /// Largest photon index in teleportation blocks.
    pub i_max: usize,
    pub lambda_points: usize,
    pub out: PathBuf,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    pub paper_scale: bool,
    explicit: BTreeSet<&'static str>,
}

pub const KEYS: [&str; 15] = [
    "solver",
    "n_trunc",
    "grid_size",
    "grid_extent",
    "krylov_dim",
    "lanczos_tol",
    "max_restarts",
    "seed",
    "samples",
    "mixed_samples",
    "i_max",
    "lambda_points",
    "out",
    "jobs",
    "paper_scale",
];

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            solver: SolverChoice::Auto,
            n_trunc: 120,
            grid_size: 256,
            grid_extent: None,
            krylov_dim: 60,
            lanczos_tol: 1e-8,
            max_restarts: 400,
            seed: 1,
            samples: 8,
            mixed_samples: 200,
            i_max: 200,
            lambda_points: 200,
            out: PathBuf::from("out"),
            jobs: 0,
            paper_scale: false,
            explicit: BTreeSet::new(),
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("invalid value {value:?} for {key}"))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let value = value.trim();
        let key = KEYS.iter().find(|k| **k == key).ok_or_else(|| format!("unknown config key {key:?}"))?;
        match *key {
            "solver" => {
                self.solver = match value {
                    "auto" => SolverChoice::Auto,
                    "grid" => SolverChoice::Grid,
                    "fock" => SolverChoice::Fock,
                    _ => return Err(format!("solver must be auto, grid or fock, not {value:?}")),
                }
            }
            "n_trunc" => self.n_trunc = parse(key, value)?,
            "grid_size" => {
                let g: usize = parse(key, value)?;
                if g < 16 || !g.is_multiple_of(2) {
                    return Err(format!("grid_size must be an even number ≥ 16, not {g}"));
                }
                self.grid_size = g;
            }
            "grid_extent" => {
                self.grid_extent = if value == "auto" {
                    None
                } else {
                    let l: f64 = parse(key, value)?;
                    if !(l > 0.0) {
                        return Err(format!("grid_extent must be positive, not {l}"));
                    }
                    Some(l)
                }
            }
            "krylov_dim" => self.krylov_dim = parse(key, value)?,
            "lanczos_tol" => self.lanczos_tol = parse(key, value)?,
            "max_restarts" => self.max_restarts = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "samples" => self.samples = parse(key, value)?,
            "mixed_samples" => self.mixed_samples = parse(key, value)?,
            "i_max" => self.i_max = parse(key, value)?,
            "lambda_points" => self.lambda_points = parse(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "jobs" => self.jobs = parse(key, value)?,
            "paper_scale" => self.paper_scale = parse(key, value)?,
            _ => unreachable!(),
        }
        self.explicit.insert(key);
        Ok(())
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), String> {
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("{origin}:{}: expected key=value", no + 1))?;
            self.set(k.trim(), v).map_err(|e| format!("{origin}:{}: {e}", no + 1))?;
        }
        Ok(())
    }

    /// `NOCLONE_<KEY>` variables, e.g. `NOCLONE_N_TRUNC=200`.
    pub fn apply_env<I: IntoIterator<Item = (String, String)>>(&mut self, vars: I) -> Result<(), String> {
        for (name, value) in vars {
            if let Some(key) = name.strip_prefix("NOCLONE_") {
                self.set(&key.to_ascii_lowercase(), &value).map_err(|e| format!("{name}: {e}"))?;
            }
        }
        Ok(())
    }

    /// Raises resolutions not set explicitly to the published ones.
    pub fn finish(&mut self) {
        if self.paper_scale {
            if !self.explicit.contains("n_trunc") {
                self.n_trunc = 300;
            }
            if !self.explicit.contains("grid_size") {
                self.grid_size = 512;
            }
            if !self.explicit.contains("samples") {
                self.samples = 20;
            }
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for key in KEYS {
            let _ = writeln!(s, "{key} = {}", self.value_of(key));
        }
        s
    }

    fn value_of(&self, key: &str) -> String {
        match key {
            "solver" => match self.solver {
                SolverChoice::Auto => "auto".into(),
                SolverChoice::Grid => "grid".into(),
                SolverChoice::Fock => "fock".into(),
            },
            "n_trunc" => self.n_trunc.to_string(),
            "grid_size" => self.grid_size.to_string(),
            "grid_extent" => self.grid_extent.map_or("auto".into(), |l| l.to_string()),
            "krylov_dim" => self.krylov_dim.to_string(),
            "lanczos_tol" => self.lanczos_tol.to_string(),
            "max_restarts" => self.max_restarts.to_string(),
            "seed" => self.seed.to_string(),
            "samples" => self.samples.to_string(),
            "mixed_samples" => self.mixed_samples.to_string(),
            "i_max" => self.i_max.to_string(),
            "lambda_points" => self.lambda_points.to_string(),
            "out" => self.out.display().to_string(),
            "jobs" => self.jobs.to_string(),
            "paper_scale" => self.paper_scale.to_string(),
            _ => unreachable!(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        for key in KEYS {
            m.insert(key.into(), serde_json::Value::String(self.value_of(key)));
        }
        serde_json::Value::Object(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut c = RunConfig::default();
        c.apply_text("n_trunc = 80\n# comment\nsolver=grid  # trailing\n", "t").unwrap();
        let mut d = RunConfig::default();
        d.apply_text(&c.to_text(), "echo").unwrap();
        assert_eq!(c.to_text(), d.to_text());
        assert_eq!(d.n_trunc, 80);
        assert_eq!(d.solver, SolverChoice::Grid);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut c = RunConfig::default();
        assert!(c.apply_text("ntrunc = 80", "t").is_err());
        assert!(c.apply_env([("NOCLONE_BOGUS".to_string(), "1".to_string())]).is_err());
        assert!(c.apply_env([("HOME".to_string(), "/".to_string())]).is_ok());
    }

    #[test]
    fn paper_scale_respects_explicit_values() {
        let mut c = RunConfig::default();
        c.set("paper_scale", "true").unwrap();
        c.set("grid_size", "128").unwrap();
        c.finish();
        assert_eq!((c.n_trunc, c.grid_size), (300, 128));
    }
}
