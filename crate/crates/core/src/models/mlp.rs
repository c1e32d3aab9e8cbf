use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nn::{normal, sinusoidal_positions, Linear, ParamId, ParamStore, Scalar, Tape, Tensor, Var};

use super::MlpConfig;

/// Embeds and position-encodes the context, flattens it and applies
/// `layers` affine maps with ReLU between them.
#[derive(Debug, Clone)]
pub struct Mlp<T> {
    config: MlpConfig,
    store: ParamStore<T>,
    embed: ParamId,
    layers: Vec<Linear>,
    positions: Tensor<T>,
}

impl<T: Scalar> Mlp<T> {
    pub fn new(config: MlpConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut store = ParamStore::new();
        store.add(
            "embed.weight",
            normal(&mut rng, &[config.vocab_size, config.d_embed], 0.02),
        )?;
        for (i, (fan_in, fan_out)) in Self::widths(&config).into_iter().enumerate() {
            Linear::new(&mut store, &mut rng, &format!("layers.{i}"), fan_in, fan_out)?;
        }
        Self::from_store(config, store)
    }

    fn widths(c: &MlpConfig) -> Vec<(usize, usize)> {
        let mut w = vec![(c.context * c.d_embed, c.hidden)];
        w.extend(std::iter::repeat_n((c.hidden, c.hidden), c.layers - 2));
        w.push((c.hidden, c.vocab_size));
        w
    }

    pub fn from_store(config: MlpConfig, store: ParamStore<T>) -> Result<Self> {
        config.validate()?;
        let expect = |name: &str, shape: &[usize]| -> Result<ParamId> {
            let id = store.id(name)?;
            let got = store.value(id).shape();
            if got != shape {
                return Err(Error::shape("mlp parameter", got, shape));
            }
            Ok(id)
        };
        let embed = expect("embed.weight", &[config.vocab_size, config.d_embed])?;
        let layers = Self::widths(&config)
            .into_iter()
            .enumerate()
            .map(|(i, (a, b))| {
                Ok(Linear {
                    weight: expect(&format!("layers.{i}.weight"), &[a, b])?,
                    bias: expect(&format!("layers.{i}.bias"), &[b])?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if store.scalar_count() != config.count_parameters() {
            return Err(Error::Config(format!(
                "store holds {} scalars, config implies {}",
                store.scalar_count(),
                config.count_parameters()
            )));
        }
        Ok(Mlp {
            positions: sinusoidal_positions(config.context, config.d_embed)?,
            config,
            store,
            embed,
            layers,
        })
    }

    pub fn config(&self) -> &MlpConfig {
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

    /// Logits `[B, V]`.
    pub fn forward<'p>(&'p self, tape: &mut Tape<'p, T>, contexts: &[&[u32]]) -> Result<Var> {
        let (k, e) = (self.config.context, self.config.d_embed);
        let batch = contexts.len();
        let mut ids = Vec::with_capacity(batch * k);
        for c in contexts {
            if c.len() != k {
                return Err(Error::shape("mlp context", &[c.len()], &[k]));
            }
            ids.extend_from_slice(c);
        }
        let table = tape.param(self.embed);
        let emb = tape.embedding(table, &ids, &[batch, k])?;
        let pe = tape.input(self.positions.clone());
        let x = tape.add(emb, pe)?;
        let mut x = tape.reshape(x, &[batch, k * e])?;
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            x = layer.forward(tape, x)?;
            if i < last {
                x = tape.relu(x)?;
            }
        }
        Ok(x)
    }
}
