//! Next-action sequence modeling for soccer event streams.
//!
//! Event data is converted to simplified SPADL actions, discretized into
//! tokens on a 10×10 pitch grid and used to train a smoothed 2-gram model, an
//! MLP and a decoder-only transformer on next-token prediction.

pub mod corpus;
pub mod error;
pub mod generate;
pub mod ingest;
pub mod markov;
pub mod models;
pub mod nn;
pub mod par;
pub mod synth;
pub mod tokenizer;
pub mod train_eval;
pub mod viz;

pub use error::{Error, Result};
