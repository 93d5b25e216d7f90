//! Sense-attribute alignment and the suppression policy.
//!
//! Each sense `ℓ` is scored by the mean cosine similarity between the
//! `ℓ`-th sense vectors of the two words of every polarity pair. The most
//! negative scores mark the senses that separate the pair most, and those
//! receive the weight `λ` in the resulting [`SenseMap`].
//!
//! Sense indices are zero-based throughout the library.

use std::collections::HashSet;
use std::path::Path;

use log::warn;

use crate::backpack::Backpack;
use crate::corpus::Vocab;
use crate::error::{Error, Result};
use crate::numkernel::{cosine_similarity, SplitMix64};
use crate::scalar::Scalar;

/// Built-in English pair list.
pub const DEFAULT_POLARITY_PAIRS: &str = include_str!("../data/polarity_pairs.txt");

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolarityPair {
    pub negative: String,
    pub positive: String,
}

impl PolarityPair {
    pub fn new(negative: impl Into<String>, positive: impl Into<String>) -> Self {
        PolarityPair { negative: negative.into(), positive: positive.into() }
    }
}

/// Parsed pair list and how many pairs were dropped as out of vocabulary.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarityLexicon {
    pub pairs: Vec<PolarityPair>,
    pub dropped: usize,
}

/// Parses `negative positive` lines, skipping blanks and `#` comments.
///
/// Duplicates keep their first occurrence. With a vocabulary, pairs with a
/// missing word are dropped and counted.
pub fn parse_polarity_lexicon(text: &str, source: &Path, vocab: Option<&Vocab>) -> Result<PolarityLexicon> {
    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    let mut dropped = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 2 {
            return Err(Error::parse(source, i + 1, format!("expected two words, found {}", f.len())));
        }
        let (neg, pos) = (f[0].to_lowercase(), f[1].to_lowercase());
        if neg == pos {
            return Err(Error::parse(source, i + 1, format!("pair `{neg}` repeats the same word")));
        }
        let pair = PolarityPair::new(neg, pos);
        if !seen.insert(pair.clone()) {
            continue;
        }
        if let Some(v) = vocab {
            if !v.contains(&pair.negative) || !v.contains(&pair.positive) {
                dropped += 1;
                continue;
            }
        }
        pairs.push(pair);
    }
    if dropped > 0 {
        warn!("{}: dropped {dropped} polarity pairs with out-of-vocabulary words", source.display());
    }
    Ok(PolarityLexicon { pairs, dropped })
}

pub fn load_polarity_lexicon(path: impl AsRef<Path>, vocab: Option<&Vocab>) -> Result<PolarityLexicon> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_polarity_lexicon(&text, path, vocab)
}

pub fn default_polarity_lexicon(vocab: Option<&Vocab>) -> PolarityLexicon {
    parse_polarity_lexicon(DEFAULT_POLARITY_PAIRS, Path::new("<builtin>"), vocab).expect("built-in lexicon parses")
}

/// Cosine between sense `sense` of two tokens; 0 (with a warning) when
/// either sense vector is zero.
pub fn sense_similarity<T: Scalar>(model: &Backpack<T>, x: usize, y: usize, sense: usize) -> Result<f64> {
    let k = model.config().num_senses;
    if sense >= k {
        return Err(Error::Domain(format!("sense {sense} out of range for {k} senses")));
    }
    let cx = model.sense_vectors(x)?;
    let cy = model.sense_vectors(y)?;
    Ok(column_cosine(&cx, &cy, sense, k, (x, y)))
}

fn column_cosine<T: Scalar>(
    cx: &crate::numkernel::Tensor<T>,
    cy: &crate::numkernel::Tensor<T>,
    sense: usize,
    k: usize,
    ids: (usize, usize),
) -> f64 {
    let col = |t: &crate::numkernel::Tensor<T>| -> Vec<f64> { t.data().iter().skip(sense).step_by(k).map(|v| v.as_f64()).collect() };
    match cosine_similarity(&col(cx), &col(cy)) {
        Ok(c) => c,
        Err(_) => {
            warn!("zero sense vector for sense {sense} of tokens {} / {}; similarity taken as 0", ids.0, ids.1);
            0.0
        }
    }
}

/// Mean polarity-pair similarity per sense.
#[derive(Clone, Debug, PartialEq)]
pub struct AttributeScores {
    pub scores: Vec<f64>,
}

impl AttributeScores {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if scores.iter().any(|s| !(-1.0..=1.0).contains(s)) {
            return Err(Error::Domain("attribute scores must lie in [-1, 1]".into()));
        }
        Ok(AttributeScores { scores })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Sense indices from most to least sensitive; ties go to the lower index.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.scores.len()).collect();
        idx.sort_by(|&a, &b| self.scores[a].total_cmp(&self.scores[b]).then(a.cmp(&b)));
        idx
    }
}

/// Scores every sense against the pairs. Per-sense similarities are summed
/// in sorted order, so the result does not depend on pair order.
pub fn attribute_scores<T: Scalar>(model: &Backpack<T>, vocab: &Vocab, pairs: &[PolarityPair]) -> Result<AttributeScores> {
    if pairs.is_empty() {
        return Err(Error::Domain("no polarity pairs".into()));
    }
    let k = model.config().num_senses;
    let mut sims = vec![Vec::with_capacity(pairs.len()); k];
    for pair in pairs {
        let lookup = |w: &str| vocab.id(w).ok_or_else(|| Error::Domain(format!("polarity word `{w}` is not in the vocabulary")));
        let (x, y) = (lookup(&pair.negative)?, lookup(&pair.positive)?);
        let (cx, cy) = (model.sense_vectors(x)?, model.sense_vectors(y)?);
        for (l, s) in sims.iter_mut().enumerate() {
            s.push(column_cosine(&cx, &cy, l, k, (x, y)));
        }
    }
    let scores = sims
        .into_iter()
        .map(|mut s| {
            s.sort_by(f64::total_cmp);
            s.iter().sum::<f64>() / s.len() as f64
        })
        .collect();
    AttributeScores::new(scores)
}

/// Positive per-sense multipliers `M_s`.
#[derive(Clone, Debug, PartialEq)]
pub struct SenseMap {
    weights: Vec<f64>,
    lambda: f64,
    suppressed: Vec<usize>,
}

impl SenseMap {
    /// All-ones map over `k` senses.
    pub fn identity(k: usize) -> Self {
        SenseMap { weights: vec![1.0; k], lambda: 1.0, suppressed: Vec::new() }
    }

    /// Arbitrary positive weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::Domain(format!("sense weight {w} is not positive")));
        }
        Ok(SenseMap { weights, lambda: 1.0, suppressed: Vec::new() })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Suppressed sense indices, most sensitive first.
    pub fn suppressed(&self) -> &[usize] {
        &self.suppressed
    }

    pub fn is_identity(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    /// Elementwise product of two maps.
    pub fn compose(&self, other: &SenseMap) -> Result<SenseMap> {
        if self.weights.len() != other.weights.len() {
            return Err(Error::Shape(format!("maps over {} and {} senses", self.weights.len(), other.weights.len())));
        }
        SenseMap::from_weights(self.weights.iter().zip(&other.weights).map(|(a, b)| a * b).collect())
    }
}

/// Rewrites a model so that exactly one sense separates every polarity pair.
///
/// Pair words get embeddings `b ± strength·g` with `b ⟂ g` for a shared
/// random unit direction `g`. Sense `sense` projects mostly onto `g`, the
/// other senses project `g` away, so only that sense sees the pairs as
/// opposites. The sense network's residual branch is zeroed. Intended for
/// testing detection.
pub fn plant_attribute_direction<T: Scalar>(
    model: &mut Backpack<T>,
    vocab: &Vocab,
    pairs: &[PolarityPair],
    sense: usize,
    strength: f64,
    seed: u64,
) -> Result<()> {
    let (d, k) = (model.config().embed_dim, model.config().num_senses);
    if sense >= k {
        return Err(Error::Domain(format!("sense {sense} out of range for {k} senses")));
    }
    let mut rng = SplitMix64::new(seed);
    let mut g: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    g.iter_mut().for_each(|v| *v /= norm);
    let orthogonal = |v: &mut [f64]| {
        let dot: f64 = v.iter().zip(&g).map(|(a, b)| a * b).sum();
        v.iter_mut().zip(&g).for_each(|(a, b)| *a -= dot * b);
    };

    let embed = model.param_mut("tok_embed").expect("token embeddings");
    for pair in pairs {
        let lookup = |w: &str| vocab.id(w).ok_or_else(|| Error::Domain(format!("polarity word `{w}` is not in the vocabulary")));
        let (x, y) = (lookup(&pair.negative)?, lookup(&pair.positive)?);
        let mut b: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
        orthogonal(&mut b);
        for (token, sign) in [(x, 1.0), (y, -1.0)] {
            for i in 0..d {
                embed.data_mut()[token * d + i] = T::of(b[i] + sign * strength * g[i]);
            }
        }
    }
    model.param_mut("sense.w2").expect("sense network").data_mut().iter_mut().for_each(|w| *w = T::zero());

    // Block ℓ of the projection is (I - ggᵀ)R_ℓ, plus 3·ggᵀ for the planted sense.
    let proj = model.param_mut("sense.proj").expect("sense projection");
    for l in 0..k {
        let r: Vec<f64> = (0..d * d).map(|_| rng.normal() / (d as f64).sqrt()).collect();
        let (keep, rest) = if l == sense { (3.0, 0.3) } else { (0.0, 1.0) };
        for i in 0..d {
            for j in 0..d {
                // Row i of (I - ggᵀ) times column j of R.
                let mut v: f64 = (0..d).map(|m| (f64::from(u8::from(i == m)) - g[i] * g[m]) * r[m * d + j]).sum();
                v = rest * v + keep * g[i] * g[j];
                proj.data_mut()[i * k * d + l * d + j] = T::of(v);
            }
        }
    }
    Ok(())
}

/// Gives the `m` most negative senses weight `lambda` and the rest 1.
pub fn build_sense_map(scores: &AttributeScores, lambda: f64, m: usize) -> Result<SenseMap> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::Domain(format!("lambda must lie in (0, 1], got {lambda}")));
    }
    let k = scores.len();
    if m > k {
        return Err(Error::Domain(format!("cannot suppress {m} of {k} senses")));
    }
    let suppressed: Vec<usize> = scores.ranking().into_iter().take(m).collect();
    let mut weights = vec![1.0; k];
    for &l in &suppressed {
        weights[l] = lambda;
    }
    Ok(SenseMap { weights, lambda, suppressed })
}
