//! Training, evaluation metrics and the scaling sweep.

mod metrics;
mod scaling;
mod train;

pub use metrics::{argmax, evaluate, write_metrics_csv, MetricsRecord, Predictor, METRICS_CSV_HEADER};
pub use scaling::{
    read_scaling_csv, scaling_run, write_scaling_csv, Architecture, Axis, ScalingCorpus, ScalingGrid, ScalingRecord,
    SCALING_CSV_HEADER,
};
pub use train::{train, train_network, write_loss_history, EpochLoss, TrainOptions, TrainOutcome};
