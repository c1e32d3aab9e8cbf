//! Validation accuracy as a function of dataset size, context length and
//! parameter count. Every grid point retrains the base config from scratch
//! with a single axis changed.

use std::collections::HashSet;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::{make_windows, subsample, TokenSequence};
use crate::error::{Error, Result};
use crate::models::{ModelConfig, TransformerConfig};
use crate::par;

use super::{evaluate, train, TrainOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    DatasetSize,
    ContextSize,
    Parameters,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::DatasetSize => "dataset_size",
            Axis::ContextSize => "context_size",
            Axis::Parameters => "parameters",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Architecture {
    pub heads: usize,
    pub blocks: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingGrid {
    /// Fractions of the training matches, each in (0, 1].
    #[serde(default)]
    pub dataset_fractions: Vec<f64>,
    #[serde(default)]
    pub context_sizes: Vec<usize>,
    #[serde(default)]
    pub architectures: Vec<Architecture>,
}

impl ScalingGrid {
    pub fn is_empty(&self) -> bool {
        self.dataset_fractions.is_empty() && self.context_sizes.is_empty() && self.architectures.is_empty()
    }
}

/// `value` is the number of training windows (dataset size), the context
/// length, or the trainable parameter count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub axis: Axis,
    pub value: f64,
    pub val_accuracy: f64,
    pub seed: u64,
    /// Reason the point was not trained (infeasible config).
    pub skipped: Option<String>,
}

pub struct ScalingCorpus<'a> {
    pub train: &'a [TokenSequence],
    pub val: &'a [TokenSequence],
}

enum Point {
    Fraction(f64),
    Context(usize),
    Arch(Architecture),
}

pub fn scaling_run(
    grid: &ScalingGrid,
    base: TransformerConfig,
    corpus: &ScalingCorpus<'_>,
    options: &TrainOptions,
    subsample_seed: u64,
) -> Result<Vec<ScalingRecord>> {
    if grid.is_empty() {
        return Err(Error::Validation("scaling grid has no points".into()));
    }
    base.validate()?;
    let mut points: Vec<Point> = grid.dataset_fractions.iter().map(|&f| Point::Fraction(f)).collect();
    points.extend(grid.context_sizes.iter().map(|&k| Point::Context(k)));
    points.extend(grid.architectures.iter().map(|&a| Point::Arch(a)));

    let match_ids: Vec<u64> = {
        let set: HashSet<u64> = corpus.train.iter().map(|s| s.match_id).collect();
        let mut ids: Vec<u64> = set.into_iter().collect();
        ids.sort_unstable();
        ids
    };

    let run = |point: &Point| -> Result<ScalingRecord> {
        let (axis, config, train_seqs): (Axis, TransformerConfig, Vec<TokenSequence>) = match *point {
            Point::Fraction(f) => {
                let keep: HashSet<u64> = subsample(&match_ids, f, subsample_seed)?.into_iter().collect();
                let seqs = corpus
                    .train
                    .iter()
                    .filter(|s| keep.contains(&s.match_id))
                    .cloned()
                    .collect();
                (Axis::DatasetSize, base, seqs)
            }
            Point::Context(k) => (
                Axis::ContextSize,
                TransformerConfig { context: k, ..base },
                corpus.train.to_vec(),
            ),
            Point::Arch(a) => (
                Axis::Parameters,
                TransformerConfig {
                    heads: a.heads,
                    blocks: a.blocks,
                    ..base
                },
                corpus.train.to_vec(),
            ),
        };
        if let Err(e) = config.validate() {
            log::warn!("skipping scaling point: {e}");
            return Ok(ScalingRecord {
                axis,
                value: config.count_parameters() as f64,
                val_accuracy: f64::NAN,
                seed: options.seed,
                skipped: Some(e.to_string()),
            });
        }
        let train_windows = make_windows(&train_seqs, config.context);
        let val_windows = make_windows(corpus.val, config.context);
        let outcome = train::<f32>(ModelConfig::Transformer(config), &train_windows, options)?;
        let metrics = evaluate(&outcome.network, &val_windows, "val", "transformer")?;
        let value = match axis {
            Axis::DatasetSize => train_windows.len() as f64,
            Axis::ContextSize => config.context as f64,
            Axis::Parameters => config.count_parameters() as f64,
        };
        Ok(ScalingRecord {
            axis,
            value,
            val_accuracy: metrics.accuracy,
            seed: options.seed,
            skipped: None,
        })
    };
    par::map(&points, run).into_iter().collect()
}

pub const SCALING_CSV_HEADER: &str = "axis,value,val_accuracy,seed";

/// Skipped points are omitted.
pub fn write_scaling_csv<W: Write>(mut w: W, records: &[ScalingRecord]) -> std::io::Result<()> {
    writeln!(w, "{SCALING_CSV_HEADER}")?;
    for r in records.iter().filter(|r| r.skipped.is_none()) {
        writeln!(w, "{},{},{},{}", r.axis, r.value, r.val_accuracy, r.seed)?;
    }
    Ok(())
}

pub fn read_scaling_csv(text: &str) -> Result<Vec<ScalingRecord>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim_end) != Some(SCALING_CSV_HEADER) {
        return Err(Error::Parse {
            record: "scaling csv header".into(),
            message: format!("expected {SCALING_CSV_HEADER:?}"),
        });
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let bad = |m: &str| Error::Parse {
                record: format!("scaling csv line {}", i + 2),
                message: m.to_string(),
            };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(bad("expected 4 fields"));
            }
            let axis = match f[0] {
                "dataset_size" => Axis::DatasetSize,
                "context_size" => Axis::ContextSize,
                "parameters" => Axis::Parameters,
                _ => return Err(bad("unknown axis")),
            };
            Ok(ScalingRecord {
                axis,
                value: f[1].parse().map_err(|_| bad("value"))?,
                val_accuracy: f[2].parse().map_err(|_| bad("val_accuracy"))?,
                seed: f[3].parse().map_err(|_| bad("seed"))?,
                skipped: None,
            })
        })
        .collect()
}
