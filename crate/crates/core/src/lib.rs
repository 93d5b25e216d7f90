pub mod backpack;
pub mod corpus;
pub mod error;
pub mod metrics;
pub mod numkernel;
pub mod ranker;
pub mod scalar;
pub mod senses;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Tensor64 = numkernel::Tensor<f64>;
pub type Tensor32 = numkernel::Tensor<f32>;
pub type Backpack64 = backpack::Backpack<f64>;
pub type Backpack32 = backpack::Backpack<f32>;
