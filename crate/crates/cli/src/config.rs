//! Optional TOML defaults. Command-line flags always win.

use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Radicand selector: `0` for ℚ, otherwise `d` as in the subcommands.
    pub d: Option<i64>,
    /// Clifford dimension `n` for forms built from defaults.
    pub n: Option<usize>,
    pub height: Option<u64>,
    pub tol: Option<f64>,
    pub n0: Option<f64>,
    pub l0: Option<f64>,
    /// Directory that relative output paths are resolved against.
    pub out_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let cfg: Config = toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.workers == Some(0) {
            return Err("config: workers must be at least 1".into());
        }
        if self.height == Some(0) {
            return Err("config: height must be at least 1".into());
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t < 1.0) {
                return Err("config: tol must lie in (0, 1)".into());
            }
        }
        if let Some(n) = self.n {
            if !(1..=12).contains(&n) {
                return Err("config: n must lie in 1..=12".into());
            }
        }
        if let Some(n0) = self.n0 {
            if n0 <= 2.0 {
                return Err("config: n0 must exceed 2".into());
            }
        }
        Ok(())
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        match &self.out_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates() {
        let c: Config = toml::from_str("d = 1\nheight = 4\nworkers = 2\ntol = 1e-10\nout_dir = \"out\"").unwrap();
        assert_eq!((c.d, c.height, c.workers), (Some(1), Some(4), Some(2)));
        assert!(c.validate().is_ok());
        assert_eq!(c.resolve(Path::new("a.csv")), PathBuf::from("out/a.csv"));
        assert_eq!(c.resolve(Path::new("/tmp/a.csv")), PathBuf::from("/tmp/a.csv"));
        assert!(toml::from_str::<Config>("bogus = 1").is_err());
        let bad: Config = toml::from_str("workers = 0").unwrap();
        assert!(bad.validate().is_err());
    }
}
