use rand::Rng;

use crate::error::Result;

use super::params::{constant, uniform};
use super::{ParamId, ParamStore, Scalar, Tape, Var};

/// Affine map `x · W + b` with `W: [fan_in, fan_out]`.
#[derive(Debug, Clone, Copy)]
pub struct Linear {
    pub weight: ParamId,
    pub bias: ParamId,
}

impl Linear {
    /// Weights uniform in ±1/√fan_in, bias zero.
    pub fn new<T: Scalar, R: Rng>(
        store: &mut ParamStore<T>,
        rng: &mut R,
        name: &str,
        fan_in: usize,
        fan_out: usize,
    ) -> Result<Self> {
        let bound = 1.0 / (fan_in as f64).sqrt();
        Ok(Linear {
            weight: store.add(&format!("{name}.weight"), uniform(rng, &[fan_in, fan_out], bound))?,
            bias: store.add(&format!("{name}.bias"), constant(&[fan_out], 0.0))?,
        })
    }

    pub fn forward<T: Scalar>(&self, tape: &mut Tape<'_, T>, x: Var) -> Result<Var> {
        let w = tape.param(self.weight);
        let b = tape.param(self.bias);
        let y = tape.matmul(x, w)?;
        tape.add(y, b)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LayerNorm {
    pub gain: ParamId,
    pub bias: ParamId,
}

impl LayerNorm {
    pub fn new<T: Scalar>(store: &mut ParamStore<T>, name: &str, d: usize) -> Result<Self> {
        Ok(LayerNorm {
            gain: store.add(&format!("{name}.gain"), constant(&[d], 1.0))?,
            bias: store.add(&format!("{name}.bias"), constant(&[d], 0.0))?,
        })
    }

    pub fn forward<T: Scalar>(&self, tape: &mut Tape<'_, T>, x: Var) -> Result<Var> {
        let g = tape.param(self.gain);
        let b = tape.param(self.bias);
        tape.layer_norm(x, g, b)
    }
}

/// Query, key, value and output projections of one attention layer.
#[derive(Debug, Clone, Copy)]
pub struct AttentionWeights {
    pub query: Linear,
    pub key: Linear,
    pub value: Linear,
    pub output: Linear,
}

impl AttentionWeights {
    pub fn new<T: Scalar, R: Rng>(store: &mut ParamStore<T>, rng: &mut R, name: &str, d: usize) -> Result<Self> {
        Ok(AttentionWeights {
            query: Linear::new(store, rng, &format!("{name}.query"), d, d)?,
            key: Linear::new(store, rng, &format!("{name}.key"), d, d)?,
            value: Linear::new(store, rng, &format!("{name}.value"), d, d)?,
            output: Linear::new(store, rng, &format!("{name}.output"), d, d)?,
        })
    }
}

/// Causal multi-head self-attention over `x: [batch, seq, d]` (or
/// `[batch * seq, d]`), head width `d / heads`, scores scaled by
/// `1/√(d / heads)`.
pub fn causal_self_attention<T: Scalar>(
    tape: &mut Tape<'_, T>,
    x: Var,
    batch: usize,
    seq: usize,
    heads: usize,
    w: &AttentionWeights,
) -> Result<Var> {
    let q = w.query.forward(tape, x)?;
    let k = w.key.forward(tape, x)?;
    let v = w.value.forward(tape, x)?;
    let mixed = tape.causal_attention(q, k, v, batch, seq, heads)?;
    w.output.forward(tape, mixed)
}
