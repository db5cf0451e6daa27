//! Run configuration: defaults, overridden by a `key = value` file, then by
//! the environment, then by command-line flags.
//!
//! Recognised keys:
//!
//! | key         | default | meaning                                        |
//! |-------------|---------|------------------------------------------------|
//! | cache_dir   | cache   | root of `zeros/q{Q}/chi{INDEX}_T{T}.zc`        |
//! | threads     | 0       | worker threads, 0 = one per core               |
//! | format      | csv     | table format, `csv` or `json`                  |
//! | tolerance   | 1e-10   | zero refinement tolerance                      |
//! | mesh        | auto    | zero-scan mesh step, `auto` = mean-gap rule    |
//! | deterministic | true  | must be true; every reduction is ordered       |
//!
//! Blank lines and lines starting with `#` are ignored.

use std::path::{Path, PathBuf};

use dirichlet_pc::store::TableFormat;
use dirichlet_pc::zeros::DEFAULT_TOLERANCE;

use crate::Invalid;

pub const CACHE_ENV: &str = "DPC_CACHE_DIR";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub cache_dir: PathBuf,
    pub threads: usize,
    pub format: TableFormat,
    pub tolerance: f64,
    pub mesh: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            cache_dir: PathBuf::from("cache"),
            threads: 0,
            format: TableFormat::Csv,
            tolerance: DEFAULT_TOLERANCE,
            mesh: None,
        }
    }
}

fn bad(path: &Path, line: usize, msg: impl std::fmt::Display) -> Invalid {
    Invalid(format!("{}:{line}: {msg}", path.display()))
}

impl RunConfig {
    pub fn apply_file(&mut self, path: &Path) -> Result<(), Invalid> {
        let text = std::fs::read_to_string(path).map_err(|e| Invalid(format!("{}: {e}", path.display())))?;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(path, i + 1, "expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| v.parse::<f64>().map_err(|e| bad(path, i + 1, format!("{key}: {e}")));
            match key {
                "cache_dir" => self.cache_dir = PathBuf::from(value),
                "threads" => {
                    self.threads = value
                        .parse()
                        .map_err(|e| bad(path, i + 1, format!("threads: {e}")))?
                }
                "format" => self.format = value.parse().map_err(|e| bad(path, i + 1, e))?,
                "tolerance" => self.tolerance = num(value)?,
                "mesh" => self.mesh = if value == "auto" { None } else { Some(num(value)?) },
                "deterministic" => {
                    if value != "true" {
                        return Err(bad(path, i + 1, "only deterministic = true is supported"));
                    }
                }
                other => return Err(bad(path, i + 1, format!("unknown key `{other}`"))),
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_overrides_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dpc.conf");
        std::fs::write(&path, "# comment\ncache_dir = /tmp/z\nthreads=2\nformat = json\nmesh = 0.05\n").unwrap();
        let mut cfg = RunConfig::default();
        cfg.apply_file(&path).unwrap();
        assert_eq!(cfg.cache_dir, PathBuf::from("/tmp/z"));
        assert_eq!((cfg.threads, cfg.format, cfg.mesh), (2, TableFormat::Json, Some(0.05)));
        std::fs::write(&path, "colour = red\n").unwrap();
        assert!(cfg.apply_file(&path).is_err());
    }
}
