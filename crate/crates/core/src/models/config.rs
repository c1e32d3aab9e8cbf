use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const D_MODEL: usize = 50;
pub const FFN_HIDDEN: usize = 500;
pub const MLP_EMBED: usize = 128;
pub const MLP_HIDDEN: usize = 1024;
pub const MLP_LAYERS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformerConfig {
    pub d_model: usize,
    pub heads: usize,
    pub blocks: usize,
    pub ffn_hidden: usize,
    pub vocab_size: usize,
    pub context: usize,
}

impl TransformerConfig {
    /// 2 heads, 1 decoder block.
    pub fn small(vocab_size: usize, context: usize) -> Self {
        TransformerConfig {
            d_model: D_MODEL,
            heads: 2,
            blocks: 1,
            ffn_hidden: FFN_HIDDEN,
            vocab_size,
            context,
        }
    }

    /// 5 heads, 4 decoder blocks.
    pub fn large(vocab_size: usize, context: usize) -> Self {
        TransformerConfig {
            heads: 5,
            blocks: 4,
            ..Self::small(vocab_size, context)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.heads == 0 || !self.d_model.is_multiple_of(self.heads) {
            return Err(Error::Config(format!(
                "d_model {} not divisible by {} heads",
                self.d_model, self.heads
            )));
        }
        if !self.d_model.is_multiple_of(2) {
            return Err(Error::Config(format!("d_model {} must be even", self.d_model)));
        }
        if self.vocab_size == 0 || self.context == 0 || self.blocks == 0 || self.ffn_hidden == 0 {
            return Err(Error::Config(format!("degenerate transformer config {self:?}")));
        }
        Ok(())
    }

    /// Trainable scalars in one decoder block.
    pub fn block_parameters(&self) -> usize {
        let d = self.d_model;
        let f = self.ffn_hidden;
        4 * (d * d + d) + (d * f + f) + (f * d + d) + 2 * (2 * d)
    }

    pub fn count_parameters(&self) -> usize {
        let (v, d) = (self.vocab_size, self.d_model);
        v * d + self.blocks * self.block_parameters() + (d * v + v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub d_embed: usize,
    pub hidden: usize,
    /// Affine layers including the output layer.
    pub layers: usize,
    pub vocab_size: usize,
    pub context: usize,
}

impl MlpConfig {
    pub fn new(vocab_size: usize, context: usize) -> Self {
        MlpConfig {
            d_embed: MLP_EMBED,
            hidden: MLP_HIDDEN,
            layers: MLP_LAYERS,
            vocab_size,
            context,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers < 2 {
            return Err(Error::Config(format!(
                "MLP needs at least 2 layers, got {}",
                self.layers
            )));
        }
        if !self.d_embed.is_multiple_of(2) {
            return Err(Error::Config(format!("d_embed {} must be even", self.d_embed)));
        }
        if self.vocab_size == 0 || self.context == 0 || self.hidden == 0 {
            return Err(Error::Config(format!("degenerate MLP config {self:?}")));
        }
        Ok(())
    }

    pub fn count_parameters(&self) -> usize {
        let (v, e, h) = (self.vocab_size, self.d_embed, self.hidden);
        v * e + (self.context * e * h + h) + (self.layers - 2) * (h * h + h) + (h * v + v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelConfig {
    Transformer(TransformerConfig),
    Mlp(MlpConfig),
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelConfig::Transformer(c) => c.validate(),
            ModelConfig::Mlp(c) => c.validate(),
        }
    }

    pub fn count_parameters(&self) -> usize {
        match self {
            ModelConfig::Transformer(c) => c.count_parameters(),
            ModelConfig::Mlp(c) => c.count_parameters(),
        }
    }

    pub fn vocab_size(&self) -> usize {
        match self {
            ModelConfig::Transformer(c) => c.vocab_size,
            ModelConfig::Mlp(c) => c.vocab_size,
        }
    }

    pub fn context(&self) -> usize {
        match self {
            ModelConfig::Transformer(c) => c.context,
            ModelConfig::Mlp(c) => c.context,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

/// Model families selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Markov,
    Mlp,
    TransformerSmall,
    TransformerLarge,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Markov => "markov",
            ModelKind::Mlp => "mlp",
            ModelKind::TransformerSmall => "transformer-small",
            ModelKind::TransformerLarge => "transformer-large",
        }
    }

    /// Network config for the neural kinds; `None` for the Markov model.
    pub fn config(self, vocab_size: usize, context: usize) -> Option<ModelConfig> {
        match self {
            ModelKind::Markov => None,
            ModelKind::Mlp => Some(ModelConfig::Mlp(MlpConfig::new(vocab_size, context))),
            ModelKind::TransformerSmall => {
                Some(ModelConfig::Transformer(TransformerConfig::small(vocab_size, context)))
            }
            ModelKind::TransformerLarge => {
                Some(ModelConfig::Transformer(TransformerConfig::large(vocab_size, context)))
            }
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            ModelKind::Markov,
            ModelKind::Mlp,
            ModelKind::TransformerSmall,
            ModelKind::TransformerLarge,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::Config(format!("unknown model {s:?}")))
    }
}
