//! Optional run configuration files. Every key mirrors a command-line flag;
//! when both are given and disagree, the file wins and a warning is logged.

use std::fmt::Display;
use std::path::Path;

use bimod_core::synthgen::BlockCycleSpec;
use bimod_core::{Error, Result};
use serde::de::DeserializeOwned;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub components: Option<usize>,
    pub clusters: Option<usize>,
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    pub dense: Option<bool>,
    pub format: Option<OutputFormat>,
    pub symmetrize: Option<bool>,
    pub top: Option<usize>,
    pub bins: Option<usize>,
    pub strip_self_loops: Option<bool>,
    pub spectrum_size: Option<usize>,
}

/// Partial generator spec; missing keys fall back to flags or defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateConfig {
    pub n_blocks: Option<usize>,
    pub nodes_per_block: Option<usize>,
    pub p_self: Option<f64>,
    pub p_con: Option<f64>,
    pub p_dir: Option<f64>,
    pub structure: Option<bimod_core::synthgen::BlockStructure>,
    pub seed: Option<u64>,
}

pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))
    } else {
        toml::from_str(&text).map_err(|e| {
            let line = e.span().map_or(0, |s| text[..s.start].lines().count().max(1));
            Error::parse(path, line, e.message().to_string())
        })
    }
}

/// Resolves one setting from the config file, the flag and a default.
pub fn pick<T: PartialEq + Display + Clone>(key: &str, file: Option<T>, flag: Option<T>, default: T) -> T {
    match (file, flag) {
        (Some(f), Some(c)) => {
            if f != c {
                log::warn!("config sets {key} = {f}, overriding --{} {c}", key.replace('_', "-"));
            }
            f
        }
        (Some(f), None) => f,
        (None, Some(c)) => c,
        (None, None) => default,
    }
}

impl Display for OutputFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        })
    }
}

impl GenerateConfig {
    pub fn resolve(self, flags: GenerateConfig) -> BlockCycleSpec {
        let d = BlockCycleSpec::four_block_cycle(0);
        let structure = match (self.structure, flags.structure) {
            (Some(s), _) | (None, Some(s)) => s,
            (None, None) => d.structure,
        };
        BlockCycleSpec {
            n_blocks: pick("n_blocks", self.n_blocks, flags.n_blocks, d.n_blocks),
            nodes_per_block: pick("nodes_per_block", self.nodes_per_block, flags.nodes_per_block, d.nodes_per_block),
            p_self: pick("p_self", self.p_self, flags.p_self, d.p_self),
            p_con: pick("p_con", self.p_con, flags.p_con, d.p_con),
            p_dir: pick("p_dir", self.p_dir, flags.p_dir, d.p_dir),
            structure,
            seed: pick("seed", self.seed, flags.seed, d.seed),
        }
    }
}
