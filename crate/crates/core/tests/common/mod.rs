//! Independent reference implementations used by several test targets.

#![allow(dead_code)]

use std::collections::HashMap;

use backrank::backpack::{Backpack, BackpackConfig};
use backrank::corpus::{generate_synthetic, SynthConfig, SyntheticCorpus, Vocab};
use backrank::metrics::GenderLexicon;
use backrank::numkernel::{finite_diff_check, SplitMix64, Tape, Var};
use backrank::ranker::{build_examples, TrainConfig, TrainExample};
use backrank::senses::{default_polarity_lexicon, plant_attribute_direction, PolarityPair, SenseMap};

pub const FEMALE: [&str; 3] = ["her", "she", "woman"];
pub const MALE: [&str; 3] = ["he", "him", "man"];

/// Gender magnitude by direct counting; terms visited in sorted order.
pub fn magnitude(doc: &[String], terms: &[&str], boolean: bool) -> f64 {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in doc {
        *counts.entry(t.as_str()).or_default() += 1;
    }
    let mut sorted = terms.to_vec();
    sorted.sort_unstable();
    if boolean {
        return if sorted.iter().any(|t| counts.contains_key(t)) { 1.0 } else { 0.0 };
    }
    let mut m = 0.0;
    for t in sorted {
        if let Some(&c) = counts.get(t) {
            m += (c as f64).ln();
        }
    }
    m
}

pub fn rab_direct(docs: &[Vec<String>], t: usize, boolean: bool) -> f64 {
    let t = t.min(docs.len());
    let mut s = 0.0;
    for d in &docs[..t] {
        s += magnitude(d, &FEMALE, boolean) - magnitude(d, &MALE, boolean);
    }
    s / t as f64
}

pub fn arab_direct(docs: &[Vec<String>], t: usize, boolean: bool) -> f64 {
    let t = t.min(docs.len());
    let mut s = 0.0;
    for x in 1..=t {
        s += rab_direct(docs, x, boolean);
    }
    s / t as f64
}

pub fn mrr_direct(ranked: &[&str], relevant: &[&str], k: usize) -> f64 {
    for (i, d) in ranked.iter().take(k).enumerate() {
        if relevant.contains(d) {
            return 1.0 / (i as f64 + 1.0);
        }
    }
    0.0
}

/// Binary-gain NDCG written from the textbook definition.
pub fn ndcg_direct(ranked: &[&str], grades: &HashMap<&str, u32>, k: usize) -> f64 {
    let gain = |g: u32| 2f64.powf(g as f64) - 1.0;
    let dcg: f64 = ranked
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, d)| gain(*grades.get(d).unwrap_or(&0)) / (i as f64 + 2.0).log2())
        .sum();
    let mut ideal: Vec<u32> = grades.values().copied().collect();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg: f64 = ideal.iter().take(k).enumerate().map(|(i, &g)| gain(g) / (i as f64 + 2.0).log2()).sum();
    if idcg == 0.0 {
        0.0
    } else {
        dcg / idcg
    }
}

/// A random document over a small vocabulary that includes gender terms.
pub fn random_doc(rng: &mut SplitMix64) -> Vec<String> {
    const WORDS: [&str; 10] = ["she", "her", "woman", "he", "him", "man", "cat", "tree", "road", "sky"];
    let len = 1 + rng.below(12);
    (0..len).map(|_| WORDS[rng.below(WORDS.len())].to_string()).collect()
}

/// Eq. 1 evaluated with explicit loops over `i`, `j` and `ℓ`, from the
/// model's own sense vectors and contextualization weights.
pub fn forward_triple_loop(model: &Backpack<f64>, tokens: &[usize], weights: Option<&[f64]>) -> Vec<Vec<f64>> {
    let (d, k) = (model.config().embed_dim, model.config().num_senses);
    let n = tokens.len();
    let alpha = model.contextualize(tokens).unwrap();
    let senses: Vec<_> = tokens.iter().map(|&t| model.sense_vectors(t).unwrap()).collect();
    let mut out = vec![vec![0.0; d]; n];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, c) in senses.iter().enumerate() {
            for l in 0..k {
                let w = weights.map_or(1.0, |w| w[l]) * alpha.get(l, i, j);
                for (e, o) in row.iter_mut().enumerate() {
                    *o += w * c.get(&[e, l]);
                }
            }
        }
    }
    out
}

/// A small random model; one attention head so any width is allowed.
pub fn small_model(seed: u64, vocab: usize, d: usize, k: usize, causal: bool) -> Backpack<f64> {
    let mut c = BackpackConfig::toy(vocab);
    c.embed_dim = d;
    c.num_senses = k;
    c.context_heads = 1;
    c.causal = causal;
    c.sense_hidden = 2 * d;
    c.head_hidden = d;
    Backpack::new(c, seed).unwrap()
}

pub fn random_tokens(rng: &mut SplitMix64, vocab: usize, n: usize) -> Vec<usize> {
    (0..n).map(|_| 3 + rng.below(vocab - 3)).collect()
}

/// Toy model with a gender direction planted into sense `sense`.
pub fn planted_fixture(seed: u64, sense: usize) -> (Backpack<f64>, Vocab, Vec<PolarityPair>) {
    let pairs = default_polarity_lexicon(None).pairs;
    let words = pairs.iter().flat_map(|p| [p.negative.clone(), p.positive.clone()]);
    let vocab = Vocab::from_tokens(words.chain((0..10).map(|i| format!("w{i}"))));
    let mut model = Backpack::new(BackpackConfig::toy(vocab.len()), seed).unwrap();
    plant_attribute_direction(&mut model, &vocab, &pairs, sense, 2.0, seed).unwrap();
    (model, vocab, pairs)
}

/// Small synthetic collection with its vocabulary and training lists.
pub fn tiny_training_set(queries: usize, seed: u64) -> (SyntheticCorpus, Vocab, Vec<TrainExample>) {
    let lex = GenderLexicon::default();
    let cfg = SynthConfig { num_queries: queries, docs_per_query: 8, seed, ..Default::default() };
    let syn = generate_synthetic(&cfg, &lex).unwrap();
    let vocab = Vocab::from_tokens(syn.collection.vocabulary_tokens(&lex));
    let tcfg = TrainConfig { seed, negatives: 3, ..Default::default() };
    let examples = build_examples(&syn.collection, &vocab, &syn.pools, &tcfg).unwrap();
    (syn, vocab, examples)
}

/// Gradient of `sigmoid(logit)` with respect to every parameter, checked
/// against central differences; returns the worst relative error.
pub fn relevance_gradient_error(model: &Backpack<f64>, tokens: &[usize], map: Option<&SenseMap>) -> f64 {
    let mut worst: f64 = 0.0;
    for name in model.params().keys() {
        let f = |tape: &mut Tape<'_, f64>, v: Var| -> backrank::Result<Var> {
            let mut p = model.bind_copied(tape, false);
            p.replace(name, v)?;
            let y = model.relevance_logit_on_tape(tape, &p, tokens, map)?;
            Ok(tape.sigmoid(y))
        };
        let err = finite_diff_check(f, model.param(name).unwrap(), 1e-5).unwrap();
        worst = worst.max(err);
    }
    worst
}
