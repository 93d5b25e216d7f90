//! Okapi BM25 first-stage retrieval.
//!
//! ```text
//! score(q, d) = Σ_{t ∈ q} idf(t) · tf(t,d)·(k1 + 1) / (tf(t,d) + k1·(1 - b + b·|d|/avgdl))
//! idf(t)      = max(0, ln((N - df(t) + 0.5) / (df(t) + 0.5)))
//! ```
//!
//! Query terms are counted once each. Documents scoring zero are not returned.

use std::collections::{BTreeSet, HashMap};

use indexmap::IndexMap;

use super::trec::RankedList;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 0.9, b: 0.4 }
    }
}

#[derive(Clone, Debug)]
pub struct Bm25Index {
    doc_ids: Vec<String>,
    doc_len: Vec<f64>,
    avg_len: f64,
    /// term -> (doc index, term frequency)
    postings: HashMap<String, Vec<(usize, u32)>>,
    params: Bm25Params,
}

impl Bm25Index {
    pub fn build(docs: &IndexMap<String, Vec<String>>, params: Bm25Params) -> Self {
        let mut postings: HashMap<String, Vec<(usize, u32)>> = HashMap::new();
        let mut doc_len = Vec::with_capacity(docs.len());
        for (i, tokens) in docs.values().enumerate() {
            doc_len.push(tokens.len() as f64);
            let mut tf: HashMap<&str, u32> = HashMap::new();
            for t in tokens {
                *tf.entry(t).or_default() += 1;
            }
            for (t, c) in tf {
                postings.entry(t.to_string()).or_default().push((i, c));
            }
        }
        let avg_len = if doc_len.is_empty() { 0.0 } else { doc_len.iter().sum::<f64>() / doc_len.len() as f64 };
        Bm25Index { doc_ids: docs.keys().cloned().collect(), doc_len, avg_len, postings, params }
    }

    pub fn num_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn idf(&self, term: &str) -> f64 {
        let n = self.num_docs() as f64;
        let df = self.postings.get(term).map_or(0, Vec::len) as f64;
        ((n - df + 0.5) / (df + 0.5)).ln().max(0.0)
    }

    fn term_weight(&self, tf: f64, len: f64) -> f64 {
        let Bm25Params { k1, b } = self.params;
        let norm = if self.avg_len > 0.0 { len / self.avg_len } else { 0.0 };
        tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * norm))
    }

    /// Scores every document matching at least one query term.
    pub fn scores<S: AsRef<str>>(&self, query: &[S]) -> HashMap<usize, f64> {
        let terms: BTreeSet<&str> = query.iter().map(AsRef::as_ref).collect();
        let mut acc: HashMap<usize, f64> = HashMap::new();
        for term in terms {
            let Some(posts) = self.postings.get(term) else { continue };
            let idf = self.idf(term);
            for &(doc, tf) in posts {
                *acc.entry(doc).or_default() += idf * self.term_weight(tf as f64, self.doc_len[doc]);
            }
        }
        acc
    }

    /// Top `top_n` documents by score, ties broken by document id.
    pub fn retrieve<S: AsRef<str>>(&self, query_id: &str, query: &[S], top_n: usize) -> RankedList {
        let scored = self
            .scores(query)
            .into_iter()
            .filter(|&(_, s)| s > 0.0)
            .map(|(d, s)| (self.doc_ids[d].clone(), s))
            .collect();
        let mut list = RankedList::from_scores(query_id, scored);
        list.entries.truncate(top_n);
        list
    }
}
