//! Collections, TREC files, BM25 and the synthetic generator.

mod bm25;
mod collection;
mod kv;
mod synth;
mod text;
mod trec;

pub use bm25::{Bm25Index, Bm25Params};
pub use collection::{read_tsv, write_tsv, Collection};
pub use kv::KeyValues;
pub use synth::{generate_synthetic, SynthConfig, SyntheticCorpus};
pub use text::{tokenize, Vocab};
pub use trec::{
    format_qrels, format_run, group_run, parse_qrels, parse_run, read_qrels, read_run, write_qrels, write_run,
    QrelsLoad, RankedList, RunRecord,
};
