//! Document gender magnitudes and the rank-bias measures RaB / ARaB.
//!
//! For a document `d` and a term set `G`:
//!
//! ```text
//! mag_tf(d)   = Σ_{w ∈ G, #(w,d) > 0} log #(w,d)
//! mag_bool(d) = 1 if any w ∈ G occurs in d, else 0
//! RaB_t(q)    = (1/t) Σ_{i=1..t} (mag_f(d_i) - mag_m(d_i))
//! ARaB_t(q)   = (1/t) Σ_{x=1..t} RaB_x(q)
//! ```
//!
//! Positive values lean female, negative values lean male.

use std::collections::{BTreeMap, BTreeSet};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::corpus::RankedList;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenderLexicon {
    female: BTreeSet<String>,
    male: BTreeSet<String>,
}

impl Default for GenderLexicon {
    fn default() -> Self {
        let set = |ws: &[&str]| ws.iter().map(|w| w.to_string()).collect();
        GenderLexicon { female: set(&["she", "woman", "her"]), male: set(&["he", "man", "him"]) }
    }
}

impl GenderLexicon {
    pub fn new<I, J, S>(female: I, male: J) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let female: BTreeSet<String> = female.into_iter().map(|s| s.as_ref().to_lowercase()).collect();
        let male: BTreeSet<String> = male.into_iter().map(|s| s.as_ref().to_lowercase()).collect();
        if female.is_empty() || male.is_empty() {
            return Err(Error::Domain("gender term sets must be non-empty".into()));
        }
        if let Some(w) = female.intersection(&male).next() {
            return Err(Error::Domain(format!("term `{w}` is in both gender sets")));
        }
        Ok(GenderLexicon { female, male })
    }

    pub fn female(&self) -> &BTreeSet<String> {
        &self.female
    }

    pub fn male(&self) -> &BTreeSet<String> {
        &self.male
    }

    /// The same lexicon with the two term sets exchanged.
    pub fn swapped(&self) -> Self {
        GenderLexicon { female: self.male.clone(), male: self.female.clone() }
    }

    pub fn is_gendered<S: AsRef<str>>(&self, tokens: &[S]) -> bool {
        tokens.iter().any(|t| self.female.contains(t.as_ref()) || self.male.contains(t.as_ref()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    Tf,
    Bool,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Tf, Variant::Bool];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Tf => "tf",
            Variant::Bool => "bool",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagnitudeOptions {
    /// Logarithm base of the TF magnitude; natural log by default.
    pub log_base: f64,
    /// Use `log(1 + #(w,d))` instead of `log #(w,d)`. Off by default, which
    /// makes a single occurrence contribute zero.
    pub tf_log_one_plus: bool,
}

impl Default for MagnitudeOptions {
    fn default() -> Self {
        MagnitudeOptions { log_base: std::f64::consts::E, tf_log_one_plus: false }
    }
}

impl MagnitudeOptions {
    fn log(&self, x: f64) -> f64 {
        if self.log_base == std::f64::consts::E {
            x.ln()
        } else {
            x.ln() / self.log_base.ln()
        }
    }
}

fn count<S: AsRef<str>>(doc: &[S], term: &str) -> usize {
    doc.iter().filter(|t| t.as_ref() == term).count()
}

pub fn mag_tf<S: AsRef<str>>(doc: &[S], terms: &BTreeSet<String>, opts: &MagnitudeOptions) -> f64 {
    let mut total = 0.0;
    for term in terms {
        let c = count(doc, term);
        if c > 0 {
            let c = if opts.tf_log_one_plus { c + 1 } else { c };
            total += opts.log(c as f64);
        }
    }
    total
}

pub fn mag_bool<S: AsRef<str>>(doc: &[S], terms: &BTreeSet<String>) -> f64 {
    if doc.iter().any(|t| terms.contains(t.as_ref())) {
        1.0
    } else {
        0.0
    }
}

/// `mag_f(d) - mag_m(d)` under the chosen variant.
pub fn doc_bias<S: AsRef<str>>(doc: &[S], lexicon: &GenderLexicon, variant: Variant, opts: &MagnitudeOptions) -> f64 {
    match variant {
        Variant::Tf => mag_tf(doc, &lexicon.female, opts) - mag_tf(doc, &lexicon.male, opts),
        Variant::Bool => mag_bool(doc, &lexicon.female) - mag_bool(doc, &lexicon.male),
    }
}

fn effective_cutoff(len: usize, t: usize) -> Result<usize> {
    if t == 0 {
        return Err(Error::Domain("rank-bias cutoff must be at least 1".into()));
    }
    if t > len {
        warn!("cutoff {t} exceeds ranked list of {len}; using the available prefix");
    }
    Ok(t.min(len))
}

/// RaB over per-rank document biases (`mag_f - mag_m` of the i-th document).
pub fn rab_from_biases(biases: &[f64], t: usize) -> Result<f64> {
    let t = effective_cutoff(biases.len(), t)?;
    if t == 0 {
        return Ok(0.0);
    }
    Ok(biases[..t].iter().sum::<f64>() / t as f64)
}

/// ARaB over per-rank document biases; the mean of RaB_1 .. RaB_t.
pub fn arab_from_biases(biases: &[f64], t: usize) -> Result<f64> {
    let t = effective_cutoff(biases.len(), t)?;
    if t == 0 {
        return Ok(0.0);
    }
    let mut prefix = 0.0;
    let mut total = 0.0;
    for (x, &b) in biases[..t].iter().enumerate() {
        prefix += b;
        total += prefix / (x + 1) as f64;
    }
    Ok(total / t as f64)
}

pub fn rab<S: AsRef<str>>(
    ranked_docs: &[&[S]],
    t: usize,
    lexicon: &GenderLexicon,
    variant: Variant,
    opts: &MagnitudeOptions,
) -> Result<f64> {
    let biases: Vec<f64> = ranked_docs.iter().map(|d| doc_bias(d, lexicon, variant, opts)).collect();
    rab_from_biases(&biases, t)
}

pub fn arab<S: AsRef<str>>(
    ranked_docs: &[&[S]],
    t: usize,
    lexicon: &GenderLexicon,
    variant: Variant,
    opts: &MagnitudeOptions,
) -> Result<f64> {
    let biases: Vec<f64> = ranked_docs.iter().map(|d| doc_bias(d, lexicon, variant, opts)).collect();
    arab_from_biases(&biases, t)
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryFilter {
    pub kept: Vec<String>,
    pub dropped: usize,
}

/// Keeps the queries that contain no term from either gender set.
pub fn filter_gendered_queries<'q, I, S>(queries: I, lexicon: &GenderLexicon) -> QueryFilter
where
    I: IntoIterator<Item = (&'q str, &'q [S])>,
    S: AsRef<str> + 'q,
{
    let mut kept = Vec::new();
    let mut dropped = 0;
    for (id, tokens) in queries {
        if lexicon.is_gendered(tokens) {
            dropped += 1;
        } else {
            kept.push(id.to_string());
        }
    }
    QueryFilter { kept, dropped }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BiasRow {
    pub cutoff: usize,
    pub rab_tf: f64,
    pub arab_tf: f64,
    pub rab_bool: f64,
    pub arab_bool: f64,
}

impl BiasRow {
    pub fn get(&self, variant: Variant) -> (f64, f64) {
        match variant {
            Variant::Tf => (self.rab_tf, self.arab_tf),
            Variant::Bool => (self.rab_bool, self.arab_bool),
        }
    }
}

/// Mean RaB_t and ARaB_t per cutoff over the evaluated queries.
#[derive(Clone, Debug, PartialEq)]
pub struct BiasReport {
    pub rows: Vec<BiasRow>,
    pub queries: usize,
}

/// Averages RaB/ARaB over `lists`, summing in query-id order.
///
/// `doc_tokens` resolves a document id to its lowercase word tokens; an
/// unresolvable id is a domain error.
pub fn bias_report<'d, F>(
    lists: &[RankedList],
    doc_tokens: F,
    lexicon: &GenderLexicon,
    cutoffs: &[usize],
    opts: &MagnitudeOptions,
) -> Result<BiasReport>
where
    F: Fn(&str) -> Option<&'d [String]>,
{
    let ordered: BTreeMap<&str, &RankedList> = lists.iter().map(|l| (l.query_id.as_str(), l)).collect();
    let mut per_query = Vec::with_capacity(ordered.len());
    for list in ordered.values() {
        let mut tf = Vec::with_capacity(list.len());
        let mut boolean = Vec::with_capacity(list.len());
        for (doc_id, _) in &list.entries {
            let tokens = doc_tokens(doc_id)
                .ok_or_else(|| Error::Domain(format!("ranked document `{doc_id}` is not in the corpus")))?;
            tf.push(doc_bias(tokens, lexicon, Variant::Tf, opts));
            boolean.push(doc_bias(tokens, lexicon, Variant::Bool, opts));
        }
        per_query.push((tf, boolean));
    }
    let n = per_query.len().max(1) as f64;
    let mut rows = Vec::with_capacity(cutoffs.len());
    for &t in cutoffs {
        let mut row = BiasRow { cutoff: t, rab_tf: 0.0, arab_tf: 0.0, rab_bool: 0.0, arab_bool: 0.0 };
        for (tf, boolean) in &per_query {
            row.rab_tf += rab_from_biases(tf, t)?;
            row.arab_tf += arab_from_biases(tf, t)?;
            row.rab_bool += rab_from_biases(boolean, t)?;
            row.arab_bool += arab_from_biases(boolean, t)?;
        }
        row.rab_tf /= n;
        row.arab_tf /= n;
        row.rab_bool /= n;
        row.arab_bool /= n;
        rows.push(row);
    }
    Ok(BiasReport { rows, queries: per_query.len() })
}
