//! Numerical core: tensors, reverse-mode gradients, layers and Adam.

mod adam;
mod checkpoint;
mod kernels;
mod layers;
mod params;
mod positional;
mod scalar;
mod tape;
mod tensor;

pub use adam::Adam;
pub use checkpoint::{
    config_hash, load_checkpoint, read_manifest, save_checkpoint, CheckpointManifest, ParamEntry, CHECKPOINT_FORMAT,
};
pub use kernels::{matmul, matmul_at, matmul_bt};
pub use layers::{causal_self_attention, AttentionWeights, LayerNorm, Linear};
pub use params::{constant, normal, uniform, ParamId, ParamStore, Parameter};
pub use positional::sinusoidal_positions;
pub use scalar::Scalar;
pub use tape::{Gradients, ParamGrads, Tape, Var, LAYER_NORM_EPS};
pub use tensor::Tensor;

pub(crate) use tape::log_softmax_in_place;
