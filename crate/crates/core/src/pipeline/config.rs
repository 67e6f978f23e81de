use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::DEFAULT_GROUPS;
use crate::sectornet::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::spatiotemporal::DEFAULT_CELL_KM;
use crate::stats::{DEFAULT_BRIDGE_RADIUS_KM, DEFAULT_EXACT_MAX_N};

/// Parameters of one pipeline run.
///
/// Resolution order is defaults, then the config file, then command-line
/// flags. The config file holds `key = value` lines; `#` starts a comment.
/// Relative paths in a config file are taken relative to the file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    /// Directory holding `visits.csv`, `venues.csv` and `cbgs.csv`.
    pub data: Option<PathBuf>,
    pub visits: Option<PathBuf>,
    pub venues: Option<PathBuf>,
    pub cbgs: Option<PathBuf>,
    pub out: PathBuf,
    pub groups: usize,
    pub band: f64,
    pub core_k: usize,
    pub cell_km: f64,
    pub bridge_radius_km: f64,
    pub wilcoxon_exact_max: usize,
    pub seed: u64,
    pub threads: Option<usize>,
    pub eigen_tol: f64,
    pub eigen_max_iter: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data: None,
            visits: None,
            venues: None,
            cbgs: None,
            out: PathBuf::from("out"),
            groups: DEFAULT_GROUPS,
            band: 0.3,
            core_k: 10,
            cell_km: DEFAULT_CELL_KM,
            bridge_radius_km: DEFAULT_BRIDGE_RADIUS_KM,
            wilcoxon_exact_max: DEFAULT_EXACT_MAX_N,
            seed: 0,
            threads: None,
            eigen_tol: DEFAULT_TOL,
            eigen_max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// Resolved input table locations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputPaths {
    pub visits: PathBuf,
    pub venues: PathBuf,
    pub cbgs: PathBuf,
}

/// Splits a config file into `(key, value, line)` triples.
pub fn parse_config(text: &str, file: &str) -> Result<Vec<(String, String, usize)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("{file}: line {}: expected `key = value`", i + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(Error::Config(format!("{file}: line {}: empty key", i + 1)));
        }
        out.push((key.replace('-', "_"), value.to_string(), i + 1));
    }
    Ok(out)
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse {key} = \"{value}\"")))
}

impl RunConfig {
    /// Defaults overridden by the given config file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let mut cfg = RunConfig::default();
        for (key, value, line) in parse_config(&text, &path.display().to_string())? {
            cfg.set_relative(&key, &value, base)
                .map_err(|e| Error::Config(format!("{}: line {line}: {e}", path.display())))?;
        }
        Ok(cfg)
    }

    /// Sets one parameter by its config-file key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        self.set_relative(key, value, Path::new(""))
    }

    fn set_relative(&mut self, key: &str, value: &str, base: &Path) -> Result<()> {
        let path = || base.join(value);
        match key {
            "data" => self.data = Some(path()),
            "visits" => self.visits = Some(path()),
            "venues" => self.venues = Some(path()),
            "cbgs" => self.cbgs = Some(path()),
            "out" => self.out = path(),
            "groups" => self.groups = parse(key, value)?,
            "band" => self.band = parse(key, value)?,
            "core_k" => self.core_k = parse(key, value)?,
            "cell_km" => self.cell_km = parse(key, value)?,
            "bridge_radius_km" => self.bridge_radius_km = parse(key, value)?,
            "wilcoxon_exact_max" => self.wilcoxon_exact_max = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "threads" => self.threads = Some(parse(key, value)?),
            "eigen_tol" => self.eigen_tol = parse(key, value)?,
            "eigen_max_iter" => self.eigen_max_iter = parse(key, value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.groups < 2 {
            return fail(format!("groups must be at least 2, got {}", self.groups));
        }
        if !(self.band > 0.0 && self.band < 1.0) {
            return fail(format!("band must lie in (0, 1), got {}", self.band));
        }
        if self.core_k == 0 {
            return fail("core_k must be positive".into());
        }
        for (name, v) in [("cell_km", self.cell_km), ("bridge_radius_km", self.bridge_radius_km), ("eigen_tol", self.eigen_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("{name} must be positive, got {v}"));
            }
        }
        if self.eigen_max_iter == 0 {
            return fail("eigen_max_iter must be positive".into());
        }
        if self.threads == Some(0) {
            return fail("threads must be positive".into());
        }
        Ok(())
    }

    pub fn input_paths(&self) -> Result<InputPaths> {
        let pick = |explicit: &Option<PathBuf>, name: &str| -> Result<PathBuf> {
            match (explicit, &self.data) {
                (Some(p), _) => Ok(p.clone()),
                (None, Some(dir)) => Ok(dir.join(format!("{name}.csv"))),
                (None, None) => Err(Error::Config(format!("no input for {name}: set `data` or `{name}`"))),
            }
        };
        Ok(InputPaths {
            visits: pick(&self.visits, "visits")?,
            venues: pick(&self.venues, "venues")?,
            cbgs: pick(&self.cbgs, "cbgs")?,
        })
    }

    /// Parameters that influence results, in a fixed order. Output location,
    /// thread count and input paths are left out: they do not change any
    /// artifact.
    pub fn analysis_parameters(&self) -> Vec<(&'static str, String)> {
        vec![
            ("band", self.band.to_string()),
            ("bridge_radius_km", self.bridge_radius_km.to_string()),
            ("cell_km", self.cell_km.to_string()),
            ("core_k", self.core_k.to_string()),
            ("eigen_max_iter", self.eigen_max_iter.to_string()),
            ("eigen_tol", self.eigen_tol.to_string()),
            ("groups", self.groups.to_string()),
            ("seed", self.seed.to_string()),
            ("wilcoxon_exact_max", self.wilcoxon_exact_max.to_string()),
        ]
    }
}

/// SHA-256 over the analysis parameters and the bytes of each input table.
pub fn config_hash(cfg: &RunConfig, inputs: &InputPaths) -> Result<String> {
    let mut h = Sha256::new();
    for (k, v) in cfg.analysis_parameters() {
        h.update(format!("{k}={v}\n").as_bytes());
    }
    for (name, path) in [("visits", &inputs.visits), ("venues", &inputs.venues), ("cbgs", &inputs.cbgs)] {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        h.update(format!("{name} {}\n", bytes.len()).as_bytes());
        h.update(&bytes);
    }
    Ok(hex::encode(h.finalize()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_overrides_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "# comment\nband = 0.2\ncore-k = 4   # trailing\ndata = inputs\n\n").unwrap();
        let cfg = RunConfig::from_file(&path).unwrap();
        assert_eq!(cfg.band, 0.2);
        assert_eq!(cfg.core_k, 4);
        assert_eq!(cfg.groups, 5);
        assert_eq!(cfg.input_paths().unwrap().visits, dir.path().join("inputs").join("visits.csv"));
    }

    #[test]
    fn bad_files_name_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "band = 0.2\ncolour = red\n").unwrap();
        let err = RunConfig::from_file(&path).unwrap_err().to_string();
        assert!(err.contains("line 2") && err.contains("colour"), "{err}");
        std::fs::write(&path, "band 0.2\n").unwrap();
        assert!(RunConfig::from_file(&path).is_err());
        std::fs::write(&path, "band = wide\n").unwrap();
        assert!(RunConfig::from_file(&path).is_err());
    }

    #[test]
    fn validation() {
        assert!(RunConfig::default().validate().is_ok());
        assert!(RunConfig { band: 1.0, ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig { groups: 1, ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig { threads: Some(0), ..RunConfig::default() }.validate().is_err());
        assert!(RunConfig::default().input_paths().is_err());
    }
}
