//! The Backpack network: sense vectors, contextualization weights, output
//! aggregation with optional per-sense reweighting, and the output heads.

mod checkpoint;
mod config;
mod model;

pub use checkpoint::{Checkpoint, MAGIC};
pub use config::{BackpackConfig, Pooling};
pub use model::{pack_pair, Backpack, BoundParams, ContextWeights};
