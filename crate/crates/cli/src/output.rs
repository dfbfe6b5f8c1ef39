//! CSV datasets with a JSON sidecar and the echoed configuration.

use crate::config::RunConfig;
use crate::CliError;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

pub struct OutDir {
    path: PathBuf,
    files: Vec<String>,
}

impl OutDir {
    pub fn create(path: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(path)?;
        Ok(Self { path: path.to_path_buf(), files: Vec::new() })
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<(), CliError> {
        let file = format!("{name}.csv");
        let mut w = csv::Writer::from_path(self.path.join(&file)).map_err(|e| CliError::Io(e.to_string()))?;
        for r in rows {
            w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.flush()?;
        self.files.push(file);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let file = format!("{name}.json");
        fs::write(self.path.join(&file), serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))? + "\n")?;
        self.files.push(file);
        Ok(())
    }

    /// Writes `<id>.meta.json` (config, file list, notes) and `config.txt`.
    pub fn finish(self, id: &str, cfg: &RunConfig, extra: serde_json::Value) -> Result<PathBuf, CliError> {
        let meta = serde_json::json!({
            "dataset": id,
            "generator": concat!("noclone ", env!("CARGO_PKG_VERSION")),
            "config": cfg.to_json(),
            "files": self.files,
            "details": extra,
        });
        fs::write(self.path.join(format!("{id}.meta.json")), serde_json::to_string_pretty(&meta).map_err(|e| CliError::Io(e.to_string()))? + "\n")?;
        fs::write(self.path.join("config.txt"), cfg.to_text())?;
        Ok(self.path)
    }
}
