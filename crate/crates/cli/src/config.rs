use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use pitchseq::ingest::{DATA_SOURCE_ENV, DEFAULT_BASE_URL};
use pitchseq::models::ModelKind;
use pitchseq::train_eval::TrainOptions;
use serde::{Deserialize, Serialize};

/// Fully resolved settings of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data_source: String,
    pub cache_dir: PathBuf,
    pub competition: String,
    pub seasons: Vec<String>,
    pub seed_split: u64,
    pub seed_train: u64,
    pub context: usize,
    pub model: String,
    /// Unset training options fall back to the per-model defaults.
    pub learning_rate: Option<f64>,
    pub batch_size: Option<usize>,
    pub epochs: Option<usize>,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data_source: DEFAULT_BASE_URL.to_string(),
            cache_dir: PathBuf::from("cache"),
            competition: "FA Women's Super League".into(),
            seasons: vec!["2018/2019".into(), "2019/2020".into(), "2020/2021".into()],
            seed_split: 0,
            seed_train: 0,
            context: 9,
            model: "transformer-large".into(),
            learning_rate: None,
            batch_size: None,
            epochs: None,
            out: PathBuf::from("out"),
        }
    }
}

/// Values given on the command line; `None` leaves the lower layers alone.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub data_source: Option<String>,
    pub cache_dir: Option<PathBuf>,
    pub competition: Option<String>,
    pub seasons: Option<Vec<String>>,
    pub seed_split: Option<u64>,
    pub seed_train: Option<u64>,
    pub context: Option<usize>,
    pub model: Option<String>,
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub learning_rate: Option<f64>,
    pub out: Option<PathBuf>,
}

/// Parses a JSON or TOML config. A run manifest is accepted too: its
/// `config` section is used.
pub fn read_config_file(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let is_toml = path.extension().is_some_and(|e| e == "toml");
    let value: serde_json::Value = if is_toml {
        let t: toml::Value =
            toml::from_str(&text).with_context(|| format!("parsing TOML config {}", path.display()))?;
        serde_json::to_value(t)?
    } else {
        serde_json::from_str(&text).with_context(|| format!("parsing JSON config {}", path.display()))?
    };
    let value = match value.get("config") {
        Some(inner) if value.get("command").is_some() => inner.clone(),
        _ => value,
    };
    serde_json::from_value(value).with_context(|| format!("invalid config {}", path.display()))
}

/// Defaults, then the file, then the environment, then flags.
pub fn resolve(file: Option<&Path>, flags: &Overrides) -> Result<RunConfig> {
    let mut c = match file {
        Some(p) => read_config_file(p)?,
        None => RunConfig::default(),
    };
    if let Ok(v) = std::env::var(DATA_SOURCE_ENV) {
        if !v.is_empty() {
            c.data_source = v;
        }
    }
    let f = flags.clone();
    if let Some(v) = f.data_source {
        c.data_source = v;
    }
    if let Some(v) = f.cache_dir {
        c.cache_dir = v;
    }
    if let Some(v) = f.competition {
        c.competition = v;
    }
    if let Some(v) = f.seasons {
        c.seasons = v;
    }
    if let Some(v) = f.seed_split {
        c.seed_split = v;
    }
    if let Some(v) = f.seed_train {
        c.seed_train = v;
    }
    if let Some(v) = f.context {
        c.context = v;
    }
    if let Some(v) = f.model {
        c.model = v;
    }
    if f.epochs.is_some() {
        c.epochs = f.epochs;
    }
    if f.batch_size.is_some() {
        c.batch_size = f.batch_size;
    }
    if f.learning_rate.is_some() {
        c.learning_rate = f.learning_rate;
    }
    if let Some(v) = f.out {
        c.out = v;
    }
    c.kind()?;
    if c.context == 0 {
        bail!("context must be at least 1");
    }
    Ok(c)
}

impl RunConfig {
    pub fn kind(&self) -> Result<ModelKind> {
        Ok(self.model.parse::<ModelKind>()?)
    }

    pub fn train_options(&self) -> Result<TrainOptions> {
        let base = TrainOptions::for_kind(self.kind()?);
        Ok(TrainOptions {
            learning_rate: self.learning_rate.unwrap_or(base.learning_rate),
            batch_size: self.batch_size.unwrap_or(base.batch_size),
            epochs: self.epochs.unwrap_or(base.epochs),
            seed: self.seed_train,
            shuffle: true,
        })
    }
}
