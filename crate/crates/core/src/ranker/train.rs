use std::str::FromStr;

use log::{debug, info, warn};

use super::loss::listwise_loss_on_tape;
use crate::backpack::{pack_pair, Backpack, Checkpoint};
use crate::corpus::{Collection, KeyValues, RankedList, Vocab};
use crate::error::{Error, Result};
use crate::numkernel::{SplitMix64, Tape};
use crate::scalar::Scalar;

/// One query with a list of labelled candidates.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainExample {
    pub query_id: String,
    pub query: Vec<usize>,
    pub candidates: Vec<(String, Vec<usize>)>,
    pub labels: Vec<f64>,
}

/// Where training negatives come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NegativeSource {
    /// Non-relevant documents of the query's candidate pool.
    Pool,
    /// Any document of the collection not judged relevant for the query.
    Random,
}

impl FromStr for NegativeSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pool" => Ok(NegativeSource::Pool),
            "random" => Ok(NegativeSource::Random),
            other => Err(Error::config("negative_source", format!("expected `pool` or `random`, got `{other}`"))),
        }
    }
}

impl std::fmt::Display for NegativeSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NegativeSource::Pool => "pool",
            NegativeSource::Random => "random",
        })
    }
}

/// Plain SGD settings.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
    pub negatives: usize,
    pub negative_source: NegativeSource,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 4,
            learning_rate: 1e-5,
            batch_size: 8,
            seed: 0,
            negatives: 7,
            negative_source: NegativeSource::Pool,
        }
    }
}

const KEYS: &[&str] = &["epochs", "learning_rate", "batch_size", "seed", "negatives", "negative_source"];

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::config("epochs", "must be at least 1"));
        }
        if !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::config("learning_rate", "must be finite and nonnegative"));
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch_size", "must be positive"));
        }
        if self.negatives == 0 {
            return Err(Error::config("negatives", "must be positive"));
        }
        Ok(())
    }

    /// Reads the known keys from `kv`, ignoring any others.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        let d = Self::default();
        let source: String = kv.get_or("negative_source", d.negative_source.to_string())?;
        let cfg = TrainConfig {
            epochs: kv.get_or("epochs", d.epochs)?,
            learning_rate: kv.get_or("learning_rate", d.learning_rate)?,
            batch_size: kv.get_or("batch_size", d.batch_size)?,
            seed: kv.get_or("seed", d.seed)?,
            negatives: kv.get_or("negatives", d.negatives)?,
            negative_source: source.parse()?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn keys() -> &'static [&'static str] {
        KEYS
    }
}

/// One list per judged-relevant document: the positive followed by up to
/// `cfg.negatives` seeded negatives. Queries without a relevant document in
/// their pool are skipped with a warning.
pub fn build_examples(
    collection: &Collection,
    vocab: &Vocab,
    pools: &[RankedList],
    cfg: &TrainConfig,
) -> Result<Vec<TrainExample>> {
    let mut rng = SplitMix64::derive(cfg.seed, u64::MAX);
    let all_docs: Vec<&String> = collection.docs.keys().collect();
    let mut out = Vec::new();
    let mut skipped = 0;
    for pool in pools {
        let qid = &pool.query_id;
        let query = collection
            .queries
            .get(qid)
            .ok_or_else(|| Error::Domain(format!("pool query `{qid}` is not in the query set")))?;
        let is_relevant = |d: &str| collection.qrels.get(qid, d).is_some_and(|g| g > 0);
        let positives: Vec<&str> = pool.entries.iter().map(|(d, _)| d.as_str()).filter(|d| is_relevant(d)).collect();
        let negatives: Vec<&str> = match cfg.negative_source {
            NegativeSource::Pool => pool.entries.iter().map(|(d, _)| d.as_str()).filter(|d| !is_relevant(d)).collect(),
            NegativeSource::Random => all_docs.iter().map(|d| d.as_str()).filter(|d| !is_relevant(d)).collect(),
        };
        if positives.is_empty() || negatives.is_empty() {
            skipped += 1;
            continue;
        }
        let encode = |d: &str| -> Result<(String, Vec<usize>)> {
            let tokens = collection.doc(d).ok_or_else(|| Error::Domain(format!("pool document `{d}` is not in the corpus")))?;
            Ok((d.to_string(), vocab.encode(tokens)))
        };
        for pos in positives {
            let grade = collection.qrels.get(qid, pos).unwrap_or(1) as f64;
            let mut candidates = vec![encode(pos)?];
            let mut labels = vec![grade];
            for i in rng.sample_indices(negatives.len(), cfg.negatives) {
                candidates.push(encode(negatives[i])?);
                labels.push(0.0);
            }
            out.push(TrainExample { query_id: qid.clone(), query: vocab.encode(query), candidates, labels });
        }
    }
    if skipped > 0 {
        warn!("skipped {skipped} queries without both a relevant and a non-relevant candidate");
    }
    Ok(out)
}

/// Mean listwise loss of a batch and its gradient, one entry per parameter
/// (`None` where no gradient flows).
pub fn batch_gradient<T: Scalar>(model: &Backpack<T>, batch: &[&TrainExample]) -> Result<(f64, Vec<Option<Vec<T>>>)> {
    let mut tape = Tape::new();
    let p = model.bind(&mut tape, true);
    let max_len = model.config().max_seq_len;
    let mut total = None;
    for ex in batch {
        let mut logits = Vec::with_capacity(ex.candidates.len());
        for (_, doc) in &ex.candidates {
            let tokens = pack_pair(&ex.query, doc, max_len);
            logits.push(model.relevance_logit_on_tape(&mut tape, &p, &tokens, None)?);
        }
        let row = tape.concat_cols(&logits)?;
        let labels: Vec<T> = ex.labels.iter().map(|&y| T::of(y)).collect();
        let loss = listwise_loss_on_tape(&mut tape, row, &labels)?;
        total = Some(match total {
            None => loss,
            Some(t) => tape.add(t, loss)?,
        });
    }
    let total = total.ok_or_else(|| Error::Domain("empty training batch".into()))?;
    let mean = tape.scale(total, T::of(1.0 / batch.len() as f64));
    tape.backward(mean)?;
    let loss = tape.value(mean).item()?.as_f64();
    let grads = p.iter().map(|(_, v)| tape.grad(v).map(<[T]>::to_vec)).collect();
    Ok((loss, grads))
}

/// One pass over `dataset` in a seeded order; returns the loss of each step.
pub fn train_epoch<T: Scalar>(
    model: &mut Backpack<T>,
    dataset: &[TrainExample],
    cfg: &TrainConfig,
    epoch: usize,
) -> Result<Vec<f64>> {
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    SplitMix64::derive(cfg.seed, epoch as u64).shuffle(&mut order);
    let lr = T::of(cfg.learning_rate);
    let mut losses = Vec::with_capacity(dataset.len().div_ceil(cfg.batch_size));
    for chunk in order.chunks(cfg.batch_size) {
        let batch: Vec<&TrainExample> = chunk.iter().map(|&i| &dataset[i]).collect();
        let (loss, grads) = batch_gradient(model, &batch)?;
        if !loss.is_finite() {
            return Err(Error::Domain(format!("training loss became {loss} in epoch {epoch}")));
        }
        for ((_, param), grad) in model.params_mut().zip(grads) {
            if let Some(g) = grad {
                for (w, gi) in param.data_mut().iter_mut().zip(g) {
                    *w -= lr * gi;
                }
            }
        }
        losses.push(loss);
    }
    Ok(losses)
}

fn check_dataset(dataset: &[TrainExample], vocab_size: usize) -> Result<()> {
    if dataset.is_empty() {
        return Err(Error::Domain("empty training set".into()));
    }
    for ex in dataset {
        if ex.candidates.len() != ex.labels.len() {
            return Err(Error::Shape(format!("query `{}`: labels do not match candidates", ex.query_id)));
        }
        let oov = ex.query.iter().chain(ex.candidates.iter().flat_map(|(_, d)| d)).any(|&t| t >= vocab_size);
        if oov {
            return Err(Error::Domain(format!("query `{}` has token ids outside the vocabulary", ex.query_id)));
        }
    }
    Ok(())
}

/// Trains from `epochs_trained` up to `cfg.epochs`, extending the loss
/// history. Each epoch draws from its own seeded stream, so stopping and
/// resuming gives the same result as an uninterrupted run.
pub fn train<T: Scalar>(ckpt: &mut Checkpoint<T>, dataset: &[TrainExample], cfg: &TrainConfig) -> Result<()> {
    train_with(ckpt, dataset, cfg, |_| Ok(()))
}

/// As [`train`], calling `after_epoch` once every epoch completes.
pub fn train_with<T, F>(ckpt: &mut Checkpoint<T>, dataset: &[TrainExample], cfg: &TrainConfig, mut after_epoch: F) -> Result<()>
where
    T: Scalar,
    F: FnMut(&Checkpoint<T>) -> Result<()>,
{
    cfg.validate()?;
    check_dataset(dataset, ckpt.model.config().vocab_size)?;
    if ckpt.epochs_trained >= cfg.epochs {
        info!("checkpoint already trained for {} epochs; nothing to do", ckpt.epochs_trained);
    }
    for epoch in ckpt.epochs_trained..cfg.epochs {
        let losses = train_epoch(&mut ckpt.model, dataset, cfg, epoch)?;
        let mean = losses.iter().sum::<f64>() / losses.len() as f64;
        info!("epoch {} of {}: mean loss {mean:.6}", epoch + 1, cfg.epochs);
        debug!("epoch {} step losses: {losses:?}", epoch + 1);
        ckpt.loss_history.extend(losses);
        ckpt.epochs_trained = epoch + 1;
        after_epoch(ckpt)?;
    }
    Ok(())
}
