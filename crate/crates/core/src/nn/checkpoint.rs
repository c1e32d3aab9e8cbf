//! Checkpoint layout: `<stem>.json` manifest (names, shapes, dtype, model
//! config and its hash) plus `<stem>.bin` holding every parameter as raw
//! little-endian values, concatenated in manifest order.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

use super::{ParamStore, Scalar, Tensor};

pub const CHECKPOINT_FORMAT: &str = "pitchseq-checkpoint-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamEntry {
    pub name: String,
    pub shape: Vec<usize>,
    /// Offset in elements from the start of the blob.
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointManifest {
    pub format: String,
    pub dtype: String,
    pub config: Value,
    pub config_hash: String,
    pub params: Vec<ParamEntry>,
}

/// SHA-256 of the compact JSON form (object keys are sorted).
pub fn config_hash(config: &Value) -> String {
    let text = serde_json::to_string(config).expect("json value serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn save_checkpoint<T: Scalar>(dir: &Path, stem: &str, store: &ParamStore<T>, config: &Value) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut blob = Vec::with_capacity(store.scalar_count() * T::BYTES);
    let mut params = Vec::with_capacity(store.len());
    let mut offset = 0;
    for p in store.iter() {
        params.push(ParamEntry {
            name: p.name.clone(),
            shape: p.value.shape().to_vec(),
            offset,
        });
        offset += p.value.len();
        for &v in p.value.data() {
            v.write_le(&mut blob);
        }
    }
    let manifest = CheckpointManifest {
        format: CHECKPOINT_FORMAT.into(),
        dtype: T::DTYPE.into(),
        config: config.clone(),
        config_hash: config_hash(config),
        params,
    };
    let bin = dir.join(format!("{stem}.bin"));
    std::fs::write(&bin, blob).map_err(|e| Error::io(&bin, e))?;
    let json = dir.join(format!("{stem}.json"));
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&json, text).map_err(|e| Error::io(&json, e))
}

pub fn read_manifest(dir: &Path, stem: &str) -> Result<CheckpointManifest> {
    let json = dir.join(format!("{stem}.json"));
    let text = std::fs::read_to_string(&json).map_err(|e| Error::io(&json, e))?;
    let manifest: CheckpointManifest = serde_json::from_str(&text).map_err(|e| Error::Parse {
        record: json.display().to_string(),
        message: e.to_string(),
    })?;
    if manifest.format != CHECKPOINT_FORMAT {
        return Err(Error::Parse {
            record: json.display().to_string(),
            message: format!("unknown checkpoint format {:?}", manifest.format),
        });
    }
    if config_hash(&manifest.config) != manifest.config_hash {
        return Err(Error::Validation(format!(
            "{}: config hash mismatch (manifest says {}, config hashes to {})",
            json.display(),
            manifest.config_hash,
            config_hash(&manifest.config)
        )));
    }
    Ok(manifest)
}

/// Loads parameters and the stored model config.
pub fn load_checkpoint<T: Scalar>(dir: &Path, stem: &str) -> Result<(ParamStore<T>, Value)> {
    let manifest = read_manifest(dir, stem)?;
    if manifest.dtype != T::DTYPE {
        return Err(Error::Validation(format!(
            "checkpoint dtype {} but {} requested",
            manifest.dtype,
            T::DTYPE
        )));
    }
    let bin = dir.join(format!("{stem}.bin"));
    let blob = std::fs::read(&bin).map_err(|e| Error::io(&bin, e))?;
    let mut store = ParamStore::new();
    for p in &manifest.params {
        let n: usize = p.shape.iter().product();
        let start = p.offset * T::BYTES;
        let end = start + n * T::BYTES;
        if end > blob.len() {
            return Err(Error::Parse {
                record: bin.display().to_string(),
                message: format!("parameter {} extends past end of blob", p.name),
            });
        }
        let data = blob[start..end].chunks_exact(T::BYTES).map(T::read_le).collect();
        store.add(&p.name, Tensor::new(&p.shape, data)?)?;
    }
    Ok((store, manifest.config))
}
