//! Dense tensors, reverse-mode differentiation and numeric utilities.

mod check;
pub mod rng;
pub mod snapshot;
mod tape;
mod tensor;

pub use check::{cosine_similarity, finite_diff_check};
pub use rng::SplitMix64;
pub use tape::{Tape, Var};
pub use tensor::Tensor;

pub(crate) use tensor::kernels;
