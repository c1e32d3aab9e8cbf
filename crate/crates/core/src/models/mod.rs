//! Neural next-token models: the decoder-only transformer and the MLP
//! baseline, behind a common [`Network`] wrapper.

mod config;
mod mlp;
mod transformer;

use std::path::Path;

pub use config::{
    MlpConfig, ModelConfig, ModelKind, TransformerConfig, D_MODEL, FFN_HIDDEN, MLP_EMBED, MLP_HIDDEN, MLP_LAYERS,
};
pub use mlp::Mlp;
pub use transformer::{Transformer, TransformerForward};

use crate::error::{Error, Result};
use crate::nn::{load_checkpoint, log_softmax_in_place, save_checkpoint, ParamStore, Scalar, Tape, Tensor, Var};
use crate::train_eval::Predictor;

pub const CHECKPOINT_STEM: &str = "model";

#[derive(Debug, Clone)]
pub enum Network<T> {
    Transformer(Transformer<T>),
    Mlp(Mlp<T>),
}

impl<T: Scalar> Network<T> {
    pub fn new(config: ModelConfig, seed: u64) -> Result<Self> {
        Ok(match config {
            ModelConfig::Transformer(c) => Network::Transformer(Transformer::new(c, seed)?),
            ModelConfig::Mlp(c) => Network::Mlp(Mlp::new(c, seed)?),
        })
    }

    pub fn from_store(config: ModelConfig, store: ParamStore<T>) -> Result<Self> {
        Ok(match config {
            ModelConfig::Transformer(c) => Network::Transformer(Transformer::from_store(c, store)?),
            ModelConfig::Mlp(c) => Network::Mlp(Mlp::from_store(c, store)?),
        })
    }

    pub fn config(&self) -> ModelConfig {
        match self {
            Network::Transformer(m) => ModelConfig::Transformer(*m.config()),
            Network::Mlp(m) => ModelConfig::Mlp(*m.config()),
        }
    }

    pub fn store(&self) -> &ParamStore<T> {
        match self {
            Network::Transformer(m) => m.store(),
            Network::Mlp(m) => m.store(),
        }
    }

    pub fn store_mut(&mut self) -> &mut ParamStore<T> {
        match self {
            Network::Transformer(m) => m.store_mut(),
            Network::Mlp(m) => m.store_mut(),
        }
    }

    /// Logits `[B, V]` recorded on `tape`.
    pub fn forward<'p>(&'p self, tape: &mut Tape<'p, T>, contexts: &[&[u32]]) -> Result<Var> {
        match self {
            Network::Transformer(m) => Ok(m.forward(tape, contexts)?.logits),
            Network::Mlp(m) => m.forward(tape, contexts),
        }
    }

    pub fn logits(&self, contexts: &[&[u32]]) -> Result<Tensor<T>> {
        let mut tape = Tape::with_params(self.store());
        let out = self.forward(&mut tape, contexts)?;
        Ok(tape.value(out).clone())
    }

    /// Token embedding matrix `[V, d]`.
    pub fn embeddings(&self) -> &Tensor<T> {
        let id = match self {
            Network::Transformer(m) => m.embedding_id(),
            Network::Mlp(m) => m.embedding_id(),
        };
        self.store().value(id)
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        save_checkpoint(dir, CHECKPOINT_STEM, self.store(), &self.config().to_json())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let (store, config) = load_checkpoint(dir, CHECKPOINT_STEM)?;
        let config: ModelConfig = serde_json::from_value(config).map_err(|e| Error::Parse {
            record: "checkpoint config".into(),
            message: e.to_string(),
        })?;
        Self::from_store(config, store)
    }
}

impl<T: Scalar> Predictor for Network<T> {
    fn context_len(&self) -> Option<usize> {
        Some(self.config().context())
    }

    fn vocab_size(&self) -> usize {
        self.config().vocab_size()
    }

    fn log_probs(&self, contexts: &[&[u32]]) -> Result<Vec<f64>> {
        let mut out = self.logits(contexts)?.to_f64();
        for row in out.chunks_mut(self.vocab_size()) {
            log_softmax_in_place(row);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tiny_transformer(v: usize, k: usize) -> TransformerConfig {
        TransformerConfig {
            d_model: 8,
            heads: 2,
            blocks: 2,
            ffn_hidden: 12,
            vocab_size: v,
            context: k,
        }
    }

    fn tiny_mlp(v: usize, k: usize) -> MlpConfig {
        MlpConfig {
            d_embed: 6,
            hidden: 10,
            layers: 4,
            vocab_size: v,
            context: k,
        }
    }

    #[test]
    fn output_shapes() {
        let t = Network::<f64>::new(ModelConfig::Transformer(tiny_transformer(11, 4)), 1).unwrap();
        assert_eq!(t.logits(&[&[0, 1, 2, 3], &[4, 5, 6, 7]]).unwrap().shape(), &[2, 11]);
        let m = Network::<f64>::new(ModelConfig::Mlp(tiny_mlp(11, 3)), 1).unwrap();
        assert_eq!(m.logits(&[&[0, 1, 2]]).unwrap().shape(), &[1, 11]);
        assert!(matches!(m.logits(&[&[0, 1]]), Err(Error::Shape { .. })));
        assert!(matches!(t.logits(&[&[0, 1, 2, 3, 4]]), Err(Error::Shape { .. })));
    }

    #[test]
    fn optimizer_sees_exactly_the_counted_parameters() {
        for cfg in [
            ModelConfig::Transformer(TransformerConfig::small(30, 9)),
            ModelConfig::Transformer(TransformerConfig::large(30, 9)),
            ModelConfig::Mlp(MlpConfig::new(30, 9)),
        ] {
            let n = Network::<f32>::new(cfg, 0).unwrap();
            assert_eq!(n.store().scalar_count(), cfg.count_parameters());
        }
    }

    #[test]
    fn first_context_position_reaches_the_logits() {
        let t = Network::<f64>::new(ModelConfig::Transformer(tiny_transformer(9, 4)), 3).unwrap();
        let a = t.logits(&[&[1, 2, 3, 4]]).unwrap();
        let b = t.logits(&[&[5, 2, 3, 4]]).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn head_bias_alone_sets_the_logits() {
        let mut t = Network::<f64>::new(ModelConfig::Transformer(tiny_transformer(5, 3)), 0).unwrap();
        let bias: Vec<f64> = vec![0.5, -1.0, 2.0, 0.0, 3.5];
        for p in t.store_mut().iter_mut() {
            let v = if p.name == "head.bias" {
                bias.clone()
            } else {
                vec![0.0; p.value.len()]
            };
            p.value.data_mut().copy_from_slice(&v);
        }
        for ctx in [[0u32, 1, 2], [4, 4, 4]] {
            assert_eq!(t.logits(&[&ctx]).unwrap().data(), &bias[..]);
        }
    }

    #[test]
    fn zero_mlp_predicts_uniformly() {
        let mut m = Network::<f64>::new(ModelConfig::Mlp(tiny_mlp(7, 3)), 0).unwrap();
        for p in m.store_mut().iter_mut() {
            p.value.data_mut().iter_mut().for_each(|x| *x = 0.0);
        }
        let lp = m.log_probs(&[&[1, 2, 3]]).unwrap();
        assert!(lp.iter().all(|&l| (l + 7f64.ln()).abs() < 1e-12));
    }

    #[test]
    fn mlp_is_order_sensitive() {
        let m = Network::<f64>::new(ModelConfig::Mlp(tiny_mlp(9, 3)), 5).unwrap();
        let a = m.logits(&[&[1, 2, 3]]).unwrap();
        let b = m.logits(&[&[3, 2, 1]]).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn checkpoint_round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for cfg in [
            ModelConfig::Transformer(tiny_transformer(13, 5)),
            ModelConfig::Mlp(tiny_mlp(13, 5)),
        ] {
            let net = Network::<f32>::new(cfg, 4).unwrap();
            net.save(dir.path()).unwrap();
            let back = Network::<f32>::load(dir.path()).unwrap();
            let ctx: Vec<u32> = (0..5).map(|_| rng.gen_range(0..13)).collect();
            assert_eq!(net.logits(&[&ctx]).unwrap(), back.logits(&[&ctx]).unwrap());
            assert_eq!(back.config(), cfg);
        }
    }

    #[test]
    fn tampered_config_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        let net = Network::<f32>::new(ModelConfig::Mlp(tiny_mlp(5, 2)), 0).unwrap();
        net.save(dir.path()).unwrap();
        let path = dir.path().join("model.json");
        let text = std::fs::read_to_string(&path)
            .unwrap()
            .replace("\"hidden\": 10", "\"hidden\": 11");
        std::fs::write(&path, text).unwrap();
        let err = Network::<f32>::load(dir.path()).unwrap_err();
        assert!(err.to_string().contains("hash mismatch"), "{err}");
    }
}
