use std::collections::BTreeSet;

use log::info;

use crate::backpack::{pack_pair, Backpack};
use crate::corpus::{Collection, RankedList, Vocab};
use crate::error::{Error, Result};
use crate::metrics::{bias_report, evaluate_effectiveness, filter_gendered_queries, BiasRow, GenderLexicon, MagnitudeOptions};
use crate::numkernel::kernels::sigmoid;
use crate::scalar::Scalar;
use crate::senses::{build_sense_map, AttributeScores, SenseMap};

/// Orders candidates by model score, best first, ties by document id.
///
/// Sorting uses the relevance logit; the reported score is its sigmoid.
pub fn rank<T: Scalar>(
    model: &Backpack<T>,
    query_id: &str,
    query: &[usize],
    candidates: &[(String, Vec<usize>)],
    map: Option<&SenseMap>,
) -> Result<RankedList> {
    if candidates.is_empty() {
        return Err(Error::Domain(format!("query `{query_id}` has no candidates to rank")));
    }
    let max_len = model.config().max_seq_len;
    let mut scored = Vec::with_capacity(candidates.len());
    for (id, doc) in candidates {
        let logit = model.relevance_logit(&pack_pair(query, doc, max_len), map)?;
        scored.push((id.clone(), logit));
    }
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite logits").then_with(|| a.0.cmp(&b.0)));
    Ok(RankedList {
        query_id: query_id.to_string(),
        entries: scored.into_iter().map(|(id, l)| (id, sigmoid(l).as_f64())).collect(),
    })
}

/// Reranks every candidate list (e.g. a BM25 run) of the collection.
pub fn rerank<T: Scalar>(
    model: &Backpack<T>,
    vocab: &Vocab,
    collection: &Collection,
    candidates: &[RankedList],
    map: Option<&SenseMap>,
) -> Result<Vec<RankedList>> {
    candidates
        .iter()
        .filter(|list| !list.is_empty())
        .map(|list| {
            let query = collection
                .queries
                .get(&list.query_id)
                .ok_or_else(|| Error::Domain(format!("run query `{}` is not in the query set", list.query_id)))?;
            let docs = list
                .entries
                .iter()
                .map(|(d, _)| {
                    let tokens = collection.doc(d).ok_or_else(|| Error::Domain(format!("run document `{d}` is not in the corpus")))?;
                    Ok((d.clone(), vocab.encode(tokens)))
                })
                .collect::<Result<Vec<_>>>()?;
            rank(model, &list.query_id, &vocab.encode(query), &docs, map)
        })
        .collect()
}

/// Settings of a λ sweep.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub lambdas: Vec<f64>,
    /// Number of suppressed senses.
    pub top_senses: usize,
    pub cutoffs: Vec<usize>,
    pub lexicon: GenderLexicon,
    pub magnitude: MagnitudeOptions,
    /// Drop queries that contain a gender term before evaluating.
    pub filter_gendered: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            lambdas: vec![1.0, 0.7, 0.5],
            top_senses: 2,
            cutoffs: vec![10, 20, 30, 40],
            lexicon: GenderLexicon::default(),
            magnitude: MagnitudeOptions::default(),
            filter_gendered: true,
        }
    }
}

/// One `(λ, cutoff)` row of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub mrr_at_10: f64,
    pub ndcg_at_10: f64,
    pub bias: BiasRow,
}

pub const SWEEP_HEADER: &str = "lambda,mrr@10,ndcg@10,rab_tf,arab_tf,rab_bool,arab_bool,cutoff";

impl SweepRow {
    pub fn to_csv(&self) -> String {
        let b = &self.bias;
        format!(
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{}",
            self.lambda, self.mrr_at_10, self.ndcg_at_10, b.rab_tf, b.arab_tf, b.rab_bool, b.arab_bool, b.cutoff
        )
    }
}

/// Evaluation of already ranked lists: MRR@10, NDCG@10 and bias per cutoff.
pub fn evaluate_lists(lists: &[RankedList], collection: &Collection, cfg: &SweepConfig, lambda: f64) -> Result<Vec<SweepRow>> {
    let eff = evaluate_effectiveness(lists, &collection.qrels, &[10]);
    let report = bias_report(lists, |d| collection.doc(d), &cfg.lexicon, &cfg.cutoffs, &cfg.magnitude)?;
    Ok(report
        .rows
        .into_iter()
        .map(|bias| SweepRow { lambda, mrr_at_10: eff[0].mrr, ndcg_at_10: eff[0].ndcg, bias })
        .collect())
}

/// Reranks `candidates` under each λ and evaluates the result.
///
/// Rows come out grouped by λ in the given order, then by cutoff.
pub fn sweep_lambda<T: Scalar>(
    model: &Backpack<T>,
    vocab: &Vocab,
    collection: &Collection,
    candidates: &[RankedList],
    scores: &AttributeScores,
    cfg: &SweepConfig,
) -> Result<Vec<SweepRow>> {
    if let Some(l) = cfg.lambdas.iter().find(|&&l| !(l > 0.0 && l <= 1.0)) {
        return Err(Error::Domain(format!("lambda must lie in (0, 1], got {l}")));
    }
    let lists: Vec<RankedList> = if cfg.filter_gendered {
        let filter = filter_gendered_queries(collection.queries.iter().map(|(q, t)| (q.as_str(), t.as_slice())), &cfg.lexicon);
        if filter.dropped > 0 {
            info!("evaluating {} queries; dropped {} with gender terms", filter.kept.len(), filter.dropped);
        }
        let kept: BTreeSet<&str> = filter.kept.iter().map(String::as_str).collect();
        candidates.iter().filter(|l| kept.contains(l.query_id.as_str())).cloned().collect()
    } else {
        candidates.to_vec()
    };
    let mut rows = Vec::new();
    for &lambda in &cfg.lambdas {
        let map = build_sense_map(scores, lambda, cfg.top_senses)?;
        let ranked = rerank(model, vocab, collection, &lists, Some(&map))?;
        rows.extend(evaluate_lists(&ranked, collection, cfg, lambda)?);
    }
    Ok(rows)
}
