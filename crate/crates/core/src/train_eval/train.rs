use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Window;
use crate::error::{Error, Result};
use crate::models::{ModelConfig, ModelKind, Network};
use crate::nn::{Adam, Scalar, Tape};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub shuffle: bool,
}

impl TrainOptions {
    /// lr 0.0002, batch 32, 6 epochs.
    pub fn transformer() -> Self {
        TrainOptions {
            learning_rate: 2e-4,
            batch_size: 32,
            epochs: 6,
            seed: 0,
            shuffle: true,
        }
    }

    /// lr 0.0002, batch 100, 3 epochs.
    pub fn mlp() -> Self {
        TrainOptions {
            batch_size: 100,
            epochs: 3,
            ..Self::transformer()
        }
    }

    pub fn for_kind(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Mlp => Self::mlp(),
            _ => Self::transformer(),
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        TrainOptions { seed, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub epoch: usize,
    pub mean_loss: f64,
}

pub struct TrainOutcome<T> {
    pub network: Network<T>,
    pub history: Vec<EpochLoss>,
}

/// Initializes a network from `options.seed` and trains it.
pub fn train<T: Scalar>(config: ModelConfig, windows: &[Window], options: &TrainOptions) -> Result<TrainOutcome<T>> {
    let mut network = Network::new(config, options.seed)?;
    let history = train_network(&mut network, windows, options)?;
    Ok(TrainOutcome { network, history })
}

/// Mini-batch Adam on mean cross-entropy; the final partial batch is kept.
/// Returns the mean training loss of each epoch.
pub fn train_network<T: Scalar>(
    network: &mut Network<T>,
    windows: &[Window],
    options: &TrainOptions,
) -> Result<Vec<EpochLoss>> {
    if windows.is_empty() {
        return Err(Error::Config("no training windows".into()));
    }
    if options.batch_size == 0 || !(options.learning_rate > 0.0) {
        return Err(Error::Config(format!("invalid training options {options:?}")));
    }
    let config = network.config();
    let (k, v) = (config.context(), config.vocab_size());
    if let Some(w) = windows.iter().find(|w| w.context.len() != k) {
        return Err(Error::Config(format!(
            "window context length {} but model expects {k}",
            w.context.len()
        )));
    }
    if let Some(w) = windows
        .iter()
        .find(|w| w.target as usize >= v || w.context.iter().any(|&c| c as usize >= v))
    {
        return Err(Error::Config(format!("window ids exceed vocabulary size {v}: {:?}", w)));
    }

    let adam = Adam::new(options.learning_rate);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    rng.set_stream(1);
    let mut order: Vec<usize> = (0..windows.len()).collect();
    let mut history = Vec::with_capacity(options.epochs);
    for epoch in 1..=options.epochs {
        if options.shuffle {
            order.shuffle(&mut rng);
        }
        let mut total = 0.0;
        for batch in order.chunks(options.batch_size) {
            let contexts: Vec<&[u32]> = batch.iter().map(|&i| windows[i].context.as_slice()).collect();
            let targets: Vec<u32> = batch.iter().map(|&i| windows[i].target).collect();
            let (loss, grads) = {
                let mut tape = Tape::with_params(network.store());
                let logits = network.forward(&mut tape, &contexts)?;
                let loss = tape.cross_entropy(logits, &targets)?;
                let value = tape.value(loss).data()[0].as_f64();
                let grads = tape.backward(loss)?;
                (value, tape.param_grads(grads))
            };
            let store = network.store_mut();
            store.zero_grad();
            store.accumulate(grads);
            adam.step(store)?;
            total += loss * batch.len() as f64;
        }
        let mean_loss = total / windows.len() as f64;
        log::info!("epoch {epoch}: mean training loss {mean_loss:.4}");
        history.push(EpochLoss { epoch, mean_loss });
    }
    Ok(history)
}

/// One JSON object per line: `{"epoch": n, "mean_loss": x}`.
pub fn write_loss_history<W: Write>(mut w: W, history: &[EpochLoss]) -> std::io::Result<()> {
    for e in history {
        writeln!(w, "{}", serde_json::to_string(e).expect("epoch record serializes"))?;
    }
    Ok(())
}
