//! Binary tensor snapshot format.
//!
//! Little-endian layout:
//!
//! ```text
//! u32        rank
//! u64 x rank dimensions
//! f64 x N    row-major values (N = product of dimensions)
//! ```
//!
//! Values are always stored as `f64`, so `f32` tensors round-trip exactly.

use std::io::{Read, Write};

use super::tensor::Tensor;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_RANK: u32 = 8;

pub fn write_tensor<T: Scalar, W: Write>(out: &mut W, t: &Tensor<T>) -> std::io::Result<()> {
    out.write_all(&(t.shape().len() as u32).to_le_bytes())?;
    for &d in t.shape() {
        out.write_all(&(d as u64).to_le_bytes())?;
    }
    for &v in t.data() {
        out.write_all(&v.as_f64().to_le_bytes())?;
    }
    Ok(())
}

pub fn read_tensor<T: Scalar, R: Read>(input: &mut R) -> Result<Tensor<T>> {
    let rank = read_u32(input)?;
    if rank > MAX_RANK {
        return Err(Error::Checkpoint(format!("tensor rank {rank} exceeds {MAX_RANK}")));
    }
    let mut shape = Vec::with_capacity(rank as usize);
    for _ in 0..rank {
        shape.push(read_u64(input)? as usize);
    }
    let numel: usize = shape.iter().product();
    let mut data = Vec::with_capacity(numel);
    let mut b = [0u8; 8];
    for _ in 0..numel {
        input.read_exact(&mut b).map_err(truncated)?;
        data.push(T::of(f64::from_le_bytes(b)));
    }
    Tensor::new(shape, data)
}

pub(crate) fn read_u32<R: Read>(input: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    input.read_exact(&mut b).map_err(truncated)?;
    Ok(u32::from_le_bytes(b))
}

pub(crate) fn read_u64<R: Read>(input: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    input.read_exact(&mut b).map_err(truncated)?;
    Ok(u64::from_le_bytes(b))
}

pub(crate) fn truncated(e: std::io::Error) -> Error {
    Error::Checkpoint(format!("truncated snapshot: {e}"))
}
