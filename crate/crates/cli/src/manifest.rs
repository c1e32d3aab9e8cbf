use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// Git-style object hash: SHA-256 of `"blob <len>\0"` followed by the bytes.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}

pub fn file_hash(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(content_hash(&bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seeds {
    pub split: u64,
    pub train: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub config: RunConfig,
    pub seeds: Seeds,
    /// File name to content hash.
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    #[serde(default)]
    pub stats: serde_json::Map<String, serde_json::Value>,
}

impl Manifest {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Manifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            seeds: Seeds {
                split: config.seed_split,
                train: config.seed_train,
            },
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            stats: serde_json::Map::new(),
        }
    }

    pub fn file_name(command: &str) -> String {
        format!("{command}.manifest.json")
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        self.inputs.insert(path.display().to_string(), file_hash(path)?);
        Ok(())
    }

    pub fn output(&mut self, path: &Path) -> Result<()> {
        self.outputs.insert(path.display().to_string(), file_hash(path)?);
        Ok(())
    }

    pub fn stat(&mut self, key: &str, value: impl Serialize) {
        self.stats
            .insert(key.to_string(), serde_json::to_value(value).expect("stat serializes"));
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(Self::file_name(&self.command));
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn read(dir: &Path, command: &str) -> Result<Self> {
        let path = dir.join(Self::file_name(command));
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading {} (was `{command}` run into this directory?)", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Hash recorded for a file whose name ends with `name`.
    fn recorded<'a>(map: &'a BTreeMap<String, String>, name: &str) -> Option<&'a String> {
        map.iter()
            .find(|(k, _)| Path::new(k).file_name().is_some_and(|f| f == name))
            .map(|(_, v)| v)
    }

    /// Refuses when `path` differs from the file this manifest recorded
    /// under the same name (as input or output).
    pub fn verify(&self, path: &Path, as_output: bool) -> Result<()> {
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        let map = if as_output { &self.outputs } else { &self.inputs };
        let Some(expected) = Self::recorded(map, name) else {
            bail!("the {} manifest has no record of {name}", self.command);
        };
        let actual = file_hash(path)?;
        if &actual != expected {
            bail!(
                "hash mismatch for {}: the {} manifest recorded {expected}, found {actual}; refusing to run",
                path.display(),
                self.command
            );
        }
        Ok(())
    }
}
