use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::RunConfig;

pub const TOOL: &str = "qwalk";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Stamp embedded in every output file.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_sha256: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        Ok(Self {
            tool: TOOL,
            version: VERSION,
            config_sha256: cfg.sha256()?,
            seed: cfg.seed,
        })
    }

    /// Single comment line for text outputs, without the leading `# `.
    pub fn comment(&self) -> String {
        format!(
            "{} {} config_sha256={} seed={}",
            self.tool, self.version, self.config_sha256, self.seed
        )
    }
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    provenance: &'a Provenance,
    #[serde(flatten)]
    body: &'a T,
}

pub fn to_json<T: Serialize>(prov: &Provenance, body: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(&Stamped { provenance: prov, body })?;
    text.push('\n');
    Ok(text)
}

pub fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, prov: &Provenance, body: &T) -> Result<()> {
    write_file(path, to_json(prov, body)?.as_bytes())
}

/// Resolved configuration, prefixed with the provenance comment.
pub fn write_config_echo(dir: &Path, prov: &Provenance, cfg: &RunConfig) -> Result<()> {
    let text = format!("# {}\n{}", prov.comment(), cfg.to_toml()?);
    write_file(&dir.join("config.toml"), text.as_bytes())
}
