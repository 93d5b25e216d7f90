use std::collections::BTreeMap;

use indexmap::IndexMap;
use log::warn;

use crate::corpus::RankedList;

/// Relevance judgments, grouped by query in file order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Qrels {
    by_query: IndexMap<String, IndexMap<String, u32>>,
}

impl Qrels {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets a grade and returns the previous one for the pair, if any.
    pub fn insert(&mut self, query_id: &str, doc_id: &str, grade: u32) -> Option<u32> {
        self.by_query.entry(query_id.to_string()).or_default().insert(doc_id.to_string(), grade)
    }

    pub fn get(&self, query_id: &str, doc_id: &str) -> Option<u32> {
        self.by_query.get(query_id)?.get(doc_id).copied()
    }

    pub fn query(&self, query_id: &str) -> Option<&IndexMap<String, u32>> {
        self.by_query.get(query_id)
    }

    pub fn query_ids(&self) -> impl Iterator<Item = &str> {
        self.by_query.keys().map(String::as_str)
    }

    /// `(query_id, doc_id, grade)` in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, u32)> {
        self.by_query
            .iter()
            .flat_map(|(q, docs)| docs.iter().map(move |(d, &g)| (q.as_str(), d.as_str(), g)))
    }

    pub fn len(&self) -> usize {
        self.by_query.values().map(IndexMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Documents judged relevant (grade > 0) for a query.
    pub fn relevant(&self, query_id: &str) -> impl Iterator<Item = &str> {
        self.by_query
            .get(query_id)
            .into_iter()
            .flat_map(|docs| docs.iter().filter(|(_, &g)| g > 0).map(|(d, _)| d.as_str()))
    }
}

/// Reciprocal rank of the first relevant document within the top `k`.
pub fn mrr_at_k<S: AsRef<str>>(ranked: &[S], judgments: Option<&IndexMap<String, u32>>, k: usize) -> f64 {
    assert!(k >= 1, "cutoff must be at least 1");
    let Some(judged) = judgments else { return 0.0 };
    ranked
        .iter()
        .take(k)
        .position(|d| judged.get(d.as_ref()).is_some_and(|&g| g > 0))
        .map_or(0.0, |i| 1.0 / (i + 1) as f64)
}

/// NDCG@k with gain `2^rel - 1` and discount `log2(i + 1)`.
///
/// Returns 0 when the query has no relevant document.
pub fn ndcg_at_k<S: AsRef<str>>(ranked: &[S], judgments: Option<&IndexMap<String, u32>>, k: usize) -> f64 {
    assert!(k >= 1, "cutoff must be at least 1");
    let Some(judged) = judgments else { return 0.0 };
    let gain = |g: u32| 2f64.powi(g as i32) - 1.0;
    let discount = |i: usize| ((i + 2) as f64).log2();

    let dcg: f64 = ranked
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, d)| gain(judged.get(d.as_ref()).copied().unwrap_or(0)) / discount(i))
        .sum();

    let mut ideal: Vec<u32> = judged.values().copied().filter(|&g| g > 0).collect();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg: f64 = ideal.iter().take(k).enumerate().map(|(i, &g)| gain(g) / discount(i)).sum();
    if idcg == 0.0 {
        0.0
    } else {
        dcg / idcg
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EffectivenessRow {
    pub cutoff: usize,
    pub mrr: f64,
    pub ndcg: f64,
    pub queries: usize,
}

/// Mean MRR@k and NDCG@k over the queries present in `lists`.
///
/// Queries are summed in query-id order; a query without judgments counts as
/// zero.
pub fn evaluate_effectiveness(lists: &[RankedList], qrels: &Qrels, cutoffs: &[usize]) -> Vec<EffectivenessRow> {
    let ordered: BTreeMap<&str, &RankedList> = lists.iter().map(|l| (l.query_id.as_str(), l)).collect();
    let missing = ordered.keys().filter(|q| qrels.query(q).is_none()).count();
    if missing > 0 {
        warn!("{missing} ranked queries have no relevance judgments; they score 0");
    }
    cutoffs
        .iter()
        .map(|&k| {
            let (mut mrr, mut ndcg) = (0.0, 0.0);
            for (qid, list) in &ordered {
                let ids = list.doc_ids();
                mrr += mrr_at_k(&ids, qrels.query(qid), k);
                ndcg += ndcg_at_k(&ids, qrels.query(qid), k);
            }
            let n = ordered.len().max(1) as f64;
            EffectivenessRow { cutoff: k, mrr: mrr / n, ndcg: ndcg / n, queries: ordered.len() }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn judged(pairs: &[(&str, u32)]) -> IndexMap<String, u32> {
        pairs.iter().map(|(d, g)| (d.to_string(), *g)).collect()
    }

    #[test]
    fn mrr_examples() {
        let j = judged(&[("a", 1)]);
        assert_eq!(mrr_at_k(&["a", "b"], Some(&j), 10), 1.0);
        assert_eq!(mrr_at_k(&["x", "y", "a"], Some(&j), 10), 1.0 / 3.0);
        let mut ranked: Vec<String> = (0..10).map(|i| format!("n{i}")).collect();
        ranked.push("a".into());
        assert_eq!(mrr_at_k(&ranked, Some(&j), 10), 0.0);
        assert_eq!(mrr_at_k(&["a"], None, 10), 0.0);
    }

    #[test]
    fn ndcg_examples() {
        let j = judged(&[("a", 1), ("b", 0)]);
        assert_eq!(ndcg_at_k(&["a", "b"], Some(&j), 10), 1.0);
        let v = ndcg_at_k(&["b", "a"], Some(&j), 10);
        assert!((v - 1.0 / 3f64.log2()).abs() < 1e-15);
        assert!((v - 0.6309).abs() < 1e-4);
        let none = judged(&[("a", 0)]);
        assert_eq!(ndcg_at_k(&["a"], Some(&none), 10), 0.0);
    }

    #[test]
    fn graded_ideal_ordering_is_one() {
        let j = judged(&[("a", 1), ("b", 3), ("c", 2), ("d", 0)]);
        assert!((ndcg_at_k(&["b", "c", "a", "d"], Some(&j), 10) - 1.0).abs() < 1e-15);
        assert!(ndcg_at_k(&["a", "c", "b", "d"], Some(&j), 10) < 1.0);
    }

    #[test]
    fn qrels_last_value_wins() {
        let mut q = Qrels::new();
        assert_eq!(q.insert("1", "d7", 1), None);
        assert_eq!(q.insert("1", "d7", 0), Some(1));
        assert_eq!(q.get("1", "d7"), Some(0));
        assert_eq!(q.len(), 1);
    }
}
