//! Checkpoint files.
//!
//! ```text
//! 8 bytes    magic "BKPCKPT1"
//! u64        header length in bytes
//! header     UTF-8 JSON: config, vocab, epochs_trained, loss_history, tensor names
//! tensors    one snapshot per name, in header order
//! ```
//!
//! All integers are little-endian. Tensor values are stored as `f64`.

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::config::BackpackConfig;
use super::model::Backpack;
use crate::corpus::Vocab;
use crate::error::{Error, Result};
use crate::numkernel::snapshot::{read_tensor, read_u64, truncated, write_tensor};
use crate::scalar::Scalar;

pub const MAGIC: &[u8; 8] = b"BKPCKPT1";

/// A model together with its vocabulary and training progress.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint<T> {
    pub model: Backpack<T>,
    pub vocab: Vocab,
    pub epochs_trained: usize,
    /// Mean training loss of every optimizer step so far.
    pub loss_history: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    config: BackpackConfig,
    vocab: Vocab,
    epochs_trained: usize,
    loss_history: Vec<f64>,
    tensors: Vec<String>,
}

impl<T: Scalar> Checkpoint<T> {
    pub fn new(model: Backpack<T>, vocab: Vocab) -> Result<Self> {
        if vocab.len() != model.config().vocab_size {
            return Err(Error::Checkpoint(format!(
                "vocabulary has {} entries but the model expects {}",
                vocab.len(),
                model.config().vocab_size
            )));
        }
        Ok(Checkpoint { model, vocab, epochs_trained: 0, loss_history: Vec::new() })
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        let header = Header {
            config: self.model.config().clone(),
            vocab: self.vocab.clone(),
            epochs_trained: self.epochs_trained,
            loss_history: self.loss_history.clone(),
            tensors: self.model.params().keys().cloned().collect(),
        };
        let json = serde_json::to_vec(&header).map_err(|e| Error::Checkpoint(e.to_string()))?;
        let io = |e: std::io::Error| Error::Checkpoint(e.to_string());
        out.write_all(MAGIC).map_err(io)?;
        out.write_all(&(json.len() as u64).to_le_bytes()).map_err(io)?;
        out.write_all(&json).map_err(io)?;
        for t in self.model.params().values() {
            write_tensor(out, t).map_err(io)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic).map_err(truncated)?;
        if &magic != MAGIC {
            return Err(Error::Checkpoint("not a checkpoint file (bad magic)".into()));
        }
        let len = read_u64(input)? as usize;
        let mut json = vec![0u8; len];
        input.read_exact(&mut json).map_err(truncated)?;
        let header: Header = serde_json::from_slice(&json).map_err(|e| Error::Checkpoint(format!("bad header: {e}")))?;
        let mut params = IndexMap::new();
        for name in header.tensors {
            let t = read_tensor(input)?;
            params.insert(name, t);
        }
        let model = Backpack::from_params(header.config, params)?;
        let mut ckpt = Checkpoint::new(model, header.vocab)?;
        ckpt.epochs_trained = header.epochs_trained;
        ckpt.loss_history = header.loss_history;
        Ok(ckpt)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w)?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(&mut BufReader::new(file))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ckpt() -> Checkpoint<f64> {
        let vocab = Vocab::from_tokens(["a", "b", "c"]);
        let model = Backpack::new(BackpackConfig::toy(vocab.len()), 5).unwrap();
        let mut c = Checkpoint::new(model, vocab).unwrap();
        c.epochs_trained = 2;
        c.loss_history = vec![1.5, 0.25];
        c
    }

    #[test]
    fn round_trip_in_memory() {
        let c = ckpt();
        let mut buf = Vec::new();
        c.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..8], MAGIC);
        let back = Checkpoint::<f64>::read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_garbage_and_truncation() {
        assert!(matches!(Checkpoint::<f64>::read_from(&mut &b"NOTACKPT........"[..]), Err(Error::Checkpoint(_))));
        let mut buf = Vec::new();
        ckpt().write_to(&mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(Checkpoint::<f64>::read_from(&mut buf.as_slice()).is_err());
    }

    #[test]
    fn vocab_size_must_match() {
        let model = Backpack::<f64>::new(BackpackConfig::toy(10), 0).unwrap();
        assert!(Checkpoint::new(model, Vocab::new()).is_err());
    }
}
