//! Pipeline configuration: defaults, TOML config files, and validation.
//!
//! Resolution order is CLI flag > config file > built-in default; the CLI
//! layer owns the flag plumbing and calls [`PipelineConfig::merge_file`]
//! before applying its overrides. Validation happens once, after merging.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dump::Compression;
use crate::synth::SynthSpec;
use crate::{Error, Result};

/// Inclusive range of cluster counts to scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KRange {
    pub min: usize,
    pub max: usize,
}

impl std::str::FromStr for KRange {
    type Err = Error;

    /// Accepts `A..B` (inclusive) or a single `K`.
    fn from_str(s: &str) -> Result<Self> {
        let parse = |digits: &str| -> Result<usize> {
            digits.parse().map_err(|_| {
                Error::Invalid(format!("k range: {digits:?} is not a count"))
            })
        };
        let range = match s.split_once("..") {
            Some((lo, hi)) => KRange {
                min: parse(lo)?,
                max: parse(hi)?,
            },
            None => {
                let k = parse(s)?;
                KRange { min: k, max: k }
            }
        };
        if range.min > range.max {
            return Err(Error::Invalid(format!("k range {range} is inverted")));
        }
        Ok(range)
    }
}

impl std::fmt::Display for KRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}..{}", self.min, self.max)
    }
}

/// Fully resolved pipeline settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Dump file for `ingest` (positional argument normally).
    pub input: Option<PathBuf>,
    pub compression: Compression,
    /// Namespace whitelist; `None` keeps every namespace.
    pub namespaces: Option<Vec<i32>>,
    /// Contributors need strictly more edits than this to be kept.
    pub min_edits: u64,
    pub k_range: KRange,
    pub out_dir: PathBuf,
    pub bot_list: Option<PathBuf>,
    /// Seed for synthetic cohorts.
    pub seed: u64,
    /// Worker threads; `None` lets the runtime decide.
    pub threads: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: None,
            compression: Compression::Auto,
            namespaces: None,
            min_edits: 100,
            k_range: KRange { min: 2, max: 10 },
            out_dir: PathBuf::from("."),
            bot_list: None,
            seed: 1,
            threads: None,
        }
    }
}

/// On-disk config file: every key optional, unknown keys rejected.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub compression: Option<Compression>,
    pub namespaces: Option<Vec<i32>>,
    pub min_edits: Option<u64>,
    /// `[min, max]`, inclusive.
    pub k_range: Option<[usize; 2]>,
    pub out_dir: Option<PathBuf>,
    pub bot_list: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

impl PipelineConfig {
    /// Overlay `file` onto `self` (file values win where present).
    #[must_use]
    pub fn merge_file(mut self, file: FileConfig) -> Self {
        if let Some(input) = file.input {
            self.input = Some(input);
        }
        if let Some(compression) = file.compression {
            self.compression = compression;
        }
        if let Some(namespaces) = file.namespaces {
            self.namespaces = Some(namespaces);
        }
        if let Some(min_edits) = file.min_edits {
            self.min_edits = min_edits;
        }
        if let Some([min, max]) = file.k_range {
            self.k_range = KRange { min, max };
        }
        if let Some(out_dir) = file.out_dir {
            self.out_dir = out_dir;
        }
        if let Some(bot_list) = file.bot_list {
            self.bot_list = Some(bot_list);
        }
        if let Some(seed) = file.seed {
            self.seed = seed;
        }
        if let Some(threads) = file.threads {
            self.threads = Some(threads);
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_edits < 1 {
            return Err(Error::Invalid("min_edits must be ≥ 1".into()));
        }
        let KRange { min, max } = self.k_range;
        if min < 2 || max > 50 || min > max {
            return Err(Error::Invalid(format!(
                "k_range {min}..{max} must satisfy 2 ≤ min ≤ max ≤ 50"
            )));
        }
        Ok(())
    }
}

fn toml_error_line(text: &str, err: &toml::de::Error) -> u64 {
    err.span()
        .map(|span| {
            let newlines = text[..span.start.min(text.len())]
                .bytes()
                .filter(|&b| b == b'\n')
                .count();
            newlines as u64 + 1
        })
        .unwrap_or(0)
}

/// Parse a TOML config file.
pub fn load_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| {
        Error::schema(
            path.display().to_string(),
            toml_error_line(&text, &e),
            "config",
            e.message().to_string(),
        )
    })
}

/// Parse a TOML synthetic-cohort spec (see `configs/synth_default.toml`).
pub fn load_synth_spec(path: &Path) -> Result<SynthSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| {
        Error::schema(
            path.display().to_string(),
            toml_error_line(&text, &e),
            "synth spec",
            e.message().to_string(),
        )
    })
}
