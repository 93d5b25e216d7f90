//! Listwise training and inference-time ranking under a sense map.

mod loss;
mod rank;
mod train;

pub use loss::{listwise_loss, listwise_loss_on_tape};
pub use rank::{evaluate_lists, rank, rerank, sweep_lambda, SweepConfig, SweepRow, SWEEP_HEADER};
pub use train::{
    batch_gradient, build_examples, train, train_epoch, train_with, NegativeSource, TrainConfig, TrainExample,
};
