use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use heckekit::realization::RealizationConfig;
use serde::{Deserialize, Serialize};

pub const CACHE_ENV: &str = "HECKEKIT_CACHE";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

/// The on-disk configuration document. Every field is optional.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub realization: Option<RealizationConfig>,
    #[serde(default)]
    pub window: Option<i32>,
    #[serde(default)]
    pub subset: Option<String>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub cache: Option<PathBuf>,
    #[serde(default)]
    pub jobs: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Overrides taken from the command line.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub cartan_type: Option<String>,
    pub field: Option<String>,
    pub window: Option<i32>,
    pub subset: Option<String>,
    pub format: Option<Format>,
    pub cache: Option<PathBuf>,
    pub jobs: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub realization: RealizationConfig,
    pub window: i32,
    pub subset: Option<String>,
    pub format: Format,
    pub cache: Option<PathBuf>,
    pub jobs: usize,
}

impl RunConfig {
    pub fn resolve(file: Option<FileConfig>, o: Overrides) -> Result<Self> {
        let file = file.unwrap_or_default();
        let mut realization = file.realization.unwrap_or_default();
        if let Some(t) = o.cartan_type {
            realization = RealizationConfig { cartan_type: Some(t), field: realization.field, ..Default::default() };
        }
        if let Some(f) = o.field {
            realization.field = Some(f);
        }
        if realization.cartan_type.is_none() && realization.coxeter_matrix.is_none() {
            realization.cartan_type = Some("A2".into());
        }
        let window = o.window.or(file.window).unwrap_or(4);
        if window < 0 {
            bail!("window must be non-negative, got {window}");
        }
        let cache = o.cache.or(file.cache).or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from));
        let jobs = o.jobs.or(file.jobs).unwrap_or(1).max(1);
        Ok(RunConfig {
            realization,
            window,
            subset: o.subset.or(file.subset),
            format: o.format.or(file.format).unwrap_or(Format::Text),
            cache,
            jobs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_the_file() {
        let file: FileConfig = serde_json::from_str(r#"{"realization": {"type": "B2"}, "window": 2, "jobs": 3}"#).unwrap();
        let o = Overrides { window: Some(5), ..Default::default() };
        let cfg = RunConfig::resolve(Some(file), o).unwrap();
        assert_eq!(cfg.window, 5);
        assert_eq!(cfg.jobs, 3);
        assert_eq!(cfg.realization.cartan_type.as_deref(), Some("B2"));
    }

    #[test]
    fn negative_window_is_rejected() {
        let o = Overrides { window: Some(-1), ..Default::default() };
        assert!(RunConfig::resolve(None, o).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<FileConfig>(r#"{"windw": 2}"#).is_err());
    }
}
