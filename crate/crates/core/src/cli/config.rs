//! Settings resolution: built-in defaults, then `weightlab.toml`, then flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub depth: u32,
    pub radius: f64,
    pub p: f64,
    pub seed: u64,
    /// Worker threads; `0` means one per core.
    pub jobs: usize,
    pub out: PathBuf,
    pub format: Format,
    pub plots: bool,
    pub trials: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            depth: 10,
            radius: 8.0,
            p: 2.0,
            seed: 20240611,
            jobs: 0,
            out: PathBuf::from("out"),
            format: Format::Json,
            plots: true,
            trials: 50,
        }
    }
}

/// Keys accepted in the config file; all optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub depth: Option<u32>,
    pub radius: Option<f64>,
    pub p: Option<f64>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub plots: Option<bool>,
    pub trials: Option<usize>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// Values given on the command line; `None` defers to the file or default.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct CommonFlags {
    /// Grid depth k (2^k cells).
    #[arg(long, global = true)]
    pub depth: Option<u32>,
    /// Half-width R of the symmetric domain [-R, R].
    #[arg(long, global = true)]
    pub radius: Option<f64>,
    /// Exponent p.
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Skip SVG output.
    #[arg(long, global = true)]
    pub no_plots: bool,
    /// Random trials for operator-norm estimates.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Config file (defaults to ./weightlab.toml when present).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

impl Settings {
    pub fn resolve(flags: &CommonFlags) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => FileConfig::load(path)?,
            None => {
                let local = Path::new("weightlab.toml");
                if local.is_file() {
                    FileConfig::load(local)?
                } else {
                    FileConfig::default()
                }
            }
        };
        Ok(Self::merge(file, flags))
    }

    pub fn merge(file: FileConfig, flags: &CommonFlags) -> Self {
        let d = Settings::default();
        Settings {
            depth: flags.depth.or(file.depth).unwrap_or(d.depth),
            radius: flags.radius.or(file.radius).unwrap_or(d.radius),
            p: flags.p.or(file.p).unwrap_or(d.p),
            seed: flags.seed.or(file.seed).unwrap_or(d.seed),
            jobs: flags.jobs.or(file.jobs).unwrap_or(d.jobs),
            out: flags.out.clone().or(file.out).unwrap_or(d.out),
            format: flags.format.or(file.format).unwrap_or(d.format),
            plots: if flags.no_plots { false } else { file.plots.unwrap_or(d.plots) },
            trials: flags.trials.or(file.trials).unwrap_or(d.trials),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = FileConfig::parse("depth = 7\nseed = 3\nplots = false\n").unwrap();
        let flags = CommonFlags { depth: Some(9), ..Default::default() };
        let s = Settings::merge(file, &flags);
        assert_eq!(s.depth, 9);
        assert_eq!(s.seed, 3);
        assert!(!s.plots);
        assert_eq!(s.p, 2.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(FileConfig::parse("dept = 7").is_err());
    }
}
