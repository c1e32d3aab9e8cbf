use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nn::{
    causal_self_attention, normal, sinusoidal_positions, AttentionWeights, LayerNorm, Linear, ParamId, ParamStore,
    Scalar, Tape, Tensor, Var,
};

use super::TransformerConfig;

#[derive(Debug, Clone, Copy)]
struct Block {
    attention: AttentionWeights,
    norm1: LayerNorm,
    ff_in: Linear,
    ff_out: Linear,
    norm2: LayerNorm,
}

/// Decoder-only transformer whose classification head reads only the last
/// context position.
///
/// Each block is post-norm: `x = norm1(x + attn(x))`, then
/// `x = norm2(x + W2·relu(W1·x))`.
#[derive(Debug, Clone)]
pub struct Transformer<T> {
    config: TransformerConfig,
    store: ParamStore<T>,
    embed: ParamId,
    blocks: Vec<Block>,
    head: Linear,
    positions: Tensor<T>,
}

/// Forward outputs: per-block hidden states `[B, k, d]` and logits `[B, V]`.
pub struct TransformerForward {
    pub embedded: Var,
    pub hidden: Vec<Var>,
    pub logits: Var,
}

impl<T: Scalar> Transformer<T> {
    pub fn new(config: TransformerConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut store = ParamStore::new();
        let d = config.d_model;
        store.add("embed.weight", normal(&mut rng, &[config.vocab_size, d], 0.02))?;
        for i in 0..config.blocks {
            let p = format!("blocks.{i}");
            AttentionWeights::new(&mut store, &mut rng, &format!("{p}.attention"), d)?;
            LayerNorm::new(&mut store, &format!("{p}.norm1"), d)?;
            Linear::new(&mut store, &mut rng, &format!("{p}.ff_in"), d, config.ffn_hidden)?;
            Linear::new(&mut store, &mut rng, &format!("{p}.ff_out"), config.ffn_hidden, d)?;
            LayerNorm::new(&mut store, &format!("{p}.norm2"), d)?;
        }
        Linear::new(&mut store, &mut rng, "head", d, config.vocab_size)?;
        Self::from_store(config, store)
    }

    /// Binds a loaded parameter store by name and checks every shape.
    pub fn from_store(config: TransformerConfig, store: ParamStore<T>) -> Result<Self> {
        config.validate()?;
        let (d, f, v) = (config.d_model, config.ffn_hidden, config.vocab_size);
        let expect = |name: &str, shape: &[usize]| -> Result<ParamId> {
            let id = store.id(name)?;
            let got = store.value(id).shape();
            if got != shape {
                return Err(Error::shape("transformer parameter", got, shape));
            }
            Ok(id)
        };
        let linear = |name: &str, i: usize, o: usize| -> Result<Linear> {
            Ok(Linear {
                weight: expect(&format!("{name}.weight"), &[i, o])?,
                bias: expect(&format!("{name}.bias"), &[o])?,
            })
        };
        let norm = |name: &str| -> Result<LayerNorm> {
            Ok(LayerNorm {
                gain: expect(&format!("{name}.gain"), &[d])?,
                bias: expect(&format!("{name}.bias"), &[d])?,
            })
        };
        let embed = expect("embed.weight", &[v, d])?;
        let mut blocks = Vec::with_capacity(config.blocks);
        for i in 0..config.blocks {
            let p = format!("blocks.{i}");
            let a = format!("{p}.attention");
            blocks.push(Block {
                attention: AttentionWeights {
                    query: linear(&format!("{a}.query"), d, d)?,
                    key: linear(&format!("{a}.key"), d, d)?,
                    value: linear(&format!("{a}.value"), d, d)?,
                    output: linear(&format!("{a}.output"), d, d)?,
                },
                norm1: norm(&format!("{p}.norm1"))?,
                ff_in: linear(&format!("{p}.ff_in"), d, f)?,
                ff_out: linear(&format!("{p}.ff_out"), f, d)?,
                norm2: norm(&format!("{p}.norm2"))?,
            });
        }
        let head = linear("head", d, v)?;
        if store.scalar_count() != config.count_parameters() {
            return Err(Error::Config(format!(
                "store holds {} scalars, config implies {}",
                store.scalar_count(),
                config.count_parameters()
            )));
        }
        Ok(Transformer {
            positions: sinusoidal_positions(config.context, d)?,
            config,
            store,
            embed,
            blocks,
            head,
        })
    }

    pub fn config(&self) -> &TransformerConfig {
        &self.config
    }

    pub fn store(&self) -> &ParamStore<T> {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut ParamStore<T> {
        &mut self.store
    }

    pub fn embedding_id(&self) -> ParamId {
        self.embed
    }

    pub fn forward<'p>(&'p self, tape: &mut Tape<'p, T>, contexts: &[&[u32]]) -> Result<TransformerForward> {
        let k = self.config.context;
        let batch = contexts.len();
        let mut ids = Vec::with_capacity(batch * k);
        for c in contexts {
            if c.len() != k {
                return Err(Error::shape("transformer context", &[c.len()], &[k]));
            }
            ids.extend_from_slice(c);
        }
        let table = tape.param(self.embed);
        let emb = tape.embedding(table, &ids, &[batch, k])?;
        let pe = tape.input(self.positions.clone());
        let mut x = tape.add(emb, pe)?;
        let embedded = x;
        let mut hidden = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let a = causal_self_attention(tape, x, batch, k, self.config.heads, &b.attention)?;
            let r = tape.add(x, a)?;
            x = b.norm1.forward(tape, r)?;
            let h = b.ff_in.forward(tape, x)?;
            let h = tape.relu(h)?;
            let h = b.ff_out.forward(tape, h)?;
            let r = tape.add(x, h)?;
            x = b.norm2.forward(tape, r)?;
            hidden.push(x);
        }
        let last: Vec<usize> = (0..batch).map(|i| i * k + k - 1).collect();
        let last = tape.rows(x, &last)?;
        let logits = self.head.forward(tape, last)?;
        Ok(TransformerForward {
            embedded,
            hidden,
            logits,
        })
    }
}
