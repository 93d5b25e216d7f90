//! Effectiveness (MRR@k, NDCG@k) and gender-bias (RaB, ARaB) evaluation.

mod bias;
mod effectiveness;

pub use bias::{
    arab, arab_from_biases, bias_report, doc_bias, filter_gendered_queries, mag_bool, mag_tf, rab, rab_from_biases,
    BiasReport, BiasRow, GenderLexicon, MagnitudeOptions, QueryFilter, Variant,
};
pub use effectiveness::{evaluate_effectiveness, mrr_at_k, ndcg_at_k, EffectivenessRow, Qrels};
