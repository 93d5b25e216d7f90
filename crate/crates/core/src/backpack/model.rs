use indexmap::IndexMap;

use super::config::{BackpackConfig, Pooling};
use crate::corpus::Vocab;
use crate::error::{Error, Result};
use crate::numkernel::{SplitMix64, Tape, Tensor, Var};
use crate::scalar::Scalar;
use crate::senses::SenseMap;

const LN_EPS: f64 = 1e-5;

/// Contextualization weights α for one input, shape `[k, n, n]`.
///
/// Entry `(ℓ, i, j)` is the weight of sense `ℓ` of token `j` in output `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextWeights<T> {
    alpha: Tensor<T>,
}

impl<T: Scalar> ContextWeights<T> {
    pub fn new(alpha: Tensor<T>) -> Result<Self> {
        let s = alpha.shape();
        if s.len() != 3 || s[1] != s[2] || s[0] == 0 || s[1] == 0 {
            return Err(Error::Shape(format!("context weights must be [k, n, n], got {s:?}")));
        }
        if alpha.data().iter().any(|&a| a < T::zero()) {
            return Err(Error::Domain("context weights must be nonnegative".into()));
        }
        Ok(ContextWeights { alpha })
    }

    pub fn num_senses(&self) -> usize {
        self.alpha.shape()[0]
    }

    pub fn len(&self) -> usize {
        self.alpha.shape()[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, sense: usize, i: usize, j: usize) -> T {
        self.alpha.get(&[sense, i, j])
    }

    /// The `n × n` weight matrix of one sense.
    pub fn sense(&self, sense: usize) -> Tensor<T> {
        let n = self.len();
        let start = sense * n * n;
        Tensor::new(vec![n, n], self.alpha.data()[start..start + n * n].to_vec()).expect("square block")
    }

    pub fn tensor(&self) -> &Tensor<T> {
        &self.alpha
    }
}

/// Tape handles for every model parameter.
#[derive(Clone, Debug)]
pub struct BoundParams {
    vars: IndexMap<String, Var>,
}

impl BoundParams {
    pub fn get(&self, name: &str) -> Var {
        *self.vars.get(name).unwrap_or_else(|| panic!("no parameter named `{name}`"))
    }

    /// Substitutes another tape variable for a parameter, e.g. to
    /// differentiate with respect to a perturbed copy.
    pub fn replace(&mut self, name: &str, var: Var) -> Result<()> {
        match self.vars.get_mut(name) {
            Some(v) => {
                *v = var;
                Ok(())
            }
            None => Err(Error::Domain(format!("no parameter named `{name}`"))),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Var)> {
        self.vars.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

/// Packs `query ⧺ [SEP] ⧺ doc`, dropping document tail tokens first and then
/// query tail tokens until the result fits in `max_len`.
pub fn pack_pair(query: &[usize], doc: &[usize], max_len: usize) -> Vec<usize> {
    let q = query.len().min(max_len.saturating_sub(1));
    let room = max_len.saturating_sub(q + 1);
    let mut out = Vec::with_capacity(q + 1 + doc.len().min(room));
    out.extend_from_slice(&query[..q]);
    if max_len > 0 {
        out.push(Vocab::SEP);
    }
    out.extend_from_slice(&doc[..doc.len().min(room)]);
    out
}

/// The Backpack network with its relevance and language-model heads.
///
/// Sense vectors come from a per-token network over the token embedding:
/// `s = e + tanh(e·W1 + b1)·W2`, then `C(x) = reshape(s·P)` with `k` blocks
/// of width `d`. A small pre-norm transformer over token and position
/// embeddings produces a representation `z`, and each sense gets its own
/// softmax-normalized attention map `α_ℓ = softmax(Q_ℓ K_ℓᵀ / √d)` from `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct Backpack<T> {
    config: BackpackConfig,
    params: IndexMap<String, Tensor<T>>,
}

impl<T: Scalar> Backpack<T> {
    /// Random initialization: zero biases, matrices drawn from
    /// `N(0, 1/fan_in)`, embeddings from `N(0, 1)`.
    pub fn new(config: BackpackConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = SplitMix64::new(seed);
        let mut params = IndexMap::new();
        for (name, shape) in config.parameter_shapes() {
            let t = if shape.len() == 1 {
                Tensor::zeros(&shape)
            } else {
                let mut std = if name.ends_with("_embed") { 1.0 } else { 1.0 / (shape[0] as f64).sqrt() };
                if name == "alpha.qk" {
                    std *= config.alpha_init_scale;
                }
                Tensor::from_fn(&shape, |_| T::of(rng.normal() * std))
            };
            params.insert(name, t);
        }
        Ok(Backpack { config, params })
    }

    /// Builds a model from named tensors, checking names and shapes.
    pub fn from_params(config: BackpackConfig, mut params: IndexMap<String, Tensor<T>>) -> Result<Self> {
        config.validate()?;
        let mut ordered = IndexMap::new();
        for (name, shape) in config.parameter_shapes() {
            let t = params.shift_remove(&name).ok_or_else(|| Error::Checkpoint(format!("missing parameter `{name}`")))?;
            if t.shape() != shape.as_slice() {
                return Err(Error::Checkpoint(format!("parameter `{name}` has shape {:?}, expected {shape:?}", t.shape())));
            }
            ordered.insert(name, t);
        }
        if let Some(extra) = params.keys().next() {
            return Err(Error::Checkpoint(format!("unexpected parameter `{extra}`")));
        }
        Ok(Backpack { config, params: ordered })
    }

    pub fn config(&self) -> &BackpackConfig {
        &self.config
    }

    pub fn params(&self) -> &IndexMap<String, Tensor<T>> {
        &self.params
    }

    pub fn param(&self, name: &str) -> Option<&Tensor<T>> {
        self.params.get(name)
    }

    pub fn param_mut(&mut self, name: &str) -> Option<&mut Tensor<T>> {
        self.params.get_mut(name)
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = (&str, &mut Tensor<T>)> {
        self.params.iter_mut().map(|(k, v)| (k.as_str(), v))
    }

    pub fn num_parameters(&self) -> usize {
        self.params.values().map(Tensor::numel).sum()
    }

    /// Registers every parameter on `tape` by reference.
    pub fn bind<'a>(&'a self, tape: &mut Tape<'a, T>, trainable: bool) -> BoundParams {
        let vars = self.params.iter().map(|(k, t)| (k.clone(), tape.param(t, trainable))).collect();
        BoundParams { vars }
    }

    /// Registers copies of every parameter, for tapes that may outlive `self`.
    pub fn bind_copied(&self, tape: &mut Tape<'_, T>, trainable: bool) -> BoundParams {
        let vars = self.params.iter().map(|(k, t)| (k.clone(), tape.leaf(t.clone(), trainable))).collect();
        BoundParams { vars }
    }

    fn check_tokens(&self, tokens: &[usize]) -> Result<()> {
        if tokens.is_empty() {
            return Err(Error::Domain("empty token sequence".into()));
        }
        if tokens.len() > self.config.max_seq_len {
            return Err(Error::Domain(format!(
                "sequence of {} tokens exceeds max_seq_len {}",
                tokens.len(),
                self.config.max_seq_len
            )));
        }
        if let Some(&t) = tokens.iter().find(|&&t| t >= self.config.vocab_size) {
            return Err(Error::Domain(format!("token id {t} outside vocabulary of {}", self.config.vocab_size)));
        }
        Ok(())
    }

    fn check_map(&self, map: &SenseMap) -> Result<Vec<T>> {
        let k = self.config.num_senses;
        if map.weights().len() != k {
            return Err(Error::Domain(format!("sense map has {} weights for {k} senses", map.weights().len())));
        }
        if let Some(w) = map.weights().iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::Domain(format!("sense weight {w} is not positive")));
        }
        Ok(map.weights().iter().map(|&w| T::of(w)).collect())
    }

    /// Sense vectors of a token sequence: `k` matrices of shape `n × d`,
    /// row `j` of matrix `ℓ` being `C(x_j)_ℓ`.
    pub fn senses_on_tape(&self, tape: &mut Tape<'_, T>, p: &BoundParams, tokens: &[usize]) -> Result<Vec<Var>> {
        let d = self.config.embed_dim;
        let e = tape.gather_rows(p.get("tok_embed"), tokens)?;
        let h = tape.matmul(e, p.get("sense.w1"))?;
        let h = tape.add_row(h, p.get("sense.b1"))?;
        let h = tape.tanh(h);
        let h = tape.matmul(h, p.get("sense.w2"))?;
        let s = tape.add(e, h)?;
        let flat = tape.matmul(s, p.get("sense.proj"))?;
        (0..self.config.num_senses).map(|l| tape.slice_cols(flat, l * d, d)).collect()
    }

    fn context_encoder(&self, tape: &mut Tape<'_, T>, p: &BoundParams, tokens: &[usize]) -> Result<Var> {
        let c = &self.config;
        let d = c.embed_dim;
        let n = tokens.len();
        let dh = d / c.context_heads;
        let eps = T::of(LN_EPS);
        let positions: Vec<usize> = (0..n).collect();
        let tok = tape.gather_rows(p.get("tok_embed"), tokens)?;
        let pos = tape.gather_rows(p.get("pos_embed"), &positions)?;
        let mut h = tape.add(tok, pos)?;
        for l in 0..c.context_layers {
            let a = tape.layer_norm_rows(h, eps);
            let qkv = tape.matmul(a, p.get(&format!("ctx.{l}.qkv")))?;
            let mut heads = Vec::with_capacity(c.context_heads);
            for hd in 0..c.context_heads {
                let q = tape.slice_cols(qkv, hd * dh, dh)?;
                let k = tape.slice_cols(qkv, d + hd * dh, dh)?;
                let v = tape.slice_cols(qkv, 2 * d + hd * dh, dh)?;
                let scores = tape.matmul_bt(q, k)?;
                let scores = tape.scale(scores, T::of(1.0 / (dh as f64).sqrt()));
                let att = tape.softmax_rows(scores, c.causal)?;
                heads.push(tape.matmul(att, v)?);
            }
            let cat = if heads.len() == 1 { heads[0] } else { tape.concat_cols(&heads)? };
            let proj = tape.matmul(cat, p.get(&format!("ctx.{l}.out")))?;
            h = tape.add(h, proj)?;
            let b = tape.layer_norm_rows(h, eps);
            let f = tape.matmul(b, p.get(&format!("ctx.{l}.ff1")))?;
            let f = tape.add_row(f, p.get(&format!("ctx.{l}.ff1_b")))?;
            let f = tape.tanh(f);
            let f = tape.matmul(f, p.get(&format!("ctx.{l}.ff2")))?;
            let f = tape.add_row(f, p.get(&format!("ctx.{l}.ff2_b")))?;
            h = tape.add(h, f)?;
        }
        Ok(tape.layer_norm_rows(h, eps))
    }

    /// Per-sense `n × n` weight matrices α_ℓ.
    pub fn alpha_on_tape(&self, tape: &mut Tape<'_, T>, p: &BoundParams, tokens: &[usize]) -> Result<Vec<Var>> {
        let (d, k) = (self.config.embed_dim, self.config.num_senses);
        let z = self.context_encoder(tape, p, tokens)?;
        let qk = tape.matmul(z, p.get("alpha.qk"))?;
        let scale = T::of(1.0 / (d as f64).sqrt());
        (0..k)
            .map(|l| {
                let q = tape.slice_cols(qk, l * d, d)?;
                let kk = tape.slice_cols(qk, (k + l) * d, d)?;
                let s = tape.matmul_bt(q, kk)?;
                let s = tape.scale(s, scale);
                tape.softmax_rows(s, self.config.causal)
            })
            .collect()
    }

    /// `o = Σ_ℓ w_ℓ · α_ℓ · C_ℓ`; `weights = None` is the plain aggregation.
    pub fn aggregate_on_tape(
        &self,
        tape: &mut Tape<'_, T>,
        alphas: &[Var],
        senses: &[Var],
        weights: Option<&[T]>,
    ) -> Result<Var> {
        if alphas.len() != senses.len() || alphas.is_empty() {
            return Err(Error::Shape(format!("{} weight maps for {} senses", alphas.len(), senses.len())));
        }
        let mut acc: Option<Var> = None;
        for (l, (&a, &c)) in alphas.iter().zip(senses).enumerate() {
            let mut term = tape.matmul(a, c)?;
            if let Some(w) = weights {
                if w[l] != T::one() {
                    term = tape.scale(term, w[l]);
                }
            }
            acc = Some(match acc {
                None => term,
                Some(prev) => tape.add(prev, term)?,
            });
        }
        Ok(acc.expect("at least one sense"))
    }

    /// Output vectors `o_{1:n}` (`n × d`), optionally reweighted per sense.
    pub fn output_on_tape(
        &self,
        tape: &mut Tape<'_, T>,
        p: &BoundParams,
        tokens: &[usize],
        map: Option<&SenseMap>,
    ) -> Result<Var> {
        self.check_tokens(tokens)?;
        let weights = map.map(|m| self.check_map(m)).transpose()?;
        let senses = self.senses_on_tape(tape, p, tokens)?;
        let alphas = self.alpha_on_tape(tape, p, tokens)?;
        self.aggregate_on_tape(tape, &alphas, &senses, weights.as_deref())
    }

    /// Relevance logit (`1 × 1`) of an already packed sequence.
    pub fn relevance_logit_on_tape(
        &self,
        tape: &mut Tape<'_, T>,
        p: &BoundParams,
        tokens: &[usize],
        map: Option<&SenseMap>,
    ) -> Result<Var> {
        let o = self.output_on_tape(tape, p, tokens, map)?;
        let pooled = match self.config.pooling {
            Pooling::Last => tape.row(o, tokens.len() - 1)?,
            Pooling::Mean => tape.mean_rows(o),
        };
        let h = tape.matmul(pooled, p.get("head.w1"))?;
        let h = tape.add_row(h, p.get("head.b1"))?;
        let h = tape.tanh(h);
        let y = tape.matmul(h, p.get("head.w2"))?;
        tape.add_row(y, p.get("head.b2"))
    }

    /// `C(x)` as a `d × k` matrix whose column `ℓ` is sense `ℓ`.
    pub fn sense_vectors(&self, token: usize) -> Result<Tensor<T>> {
        if token >= self.config.vocab_size {
            return Err(Error::Domain(format!("token id {token} outside vocabulary of {}", self.config.vocab_size)));
        }
        let mut tape = Tape::new();
        let p = self.bind(&mut tape, false);
        let senses = self.senses_on_tape(&mut tape, &p, &[token])?;
        let (d, k) = (self.config.embed_dim, self.config.num_senses);
        let mut out = Tensor::zeros(&[d, k]);
        for (l, &s) in senses.iter().enumerate() {
            let v = tape.value(s).data();
            for i in 0..d {
                out.data_mut()[i * k + l] = v[i];
            }
        }
        Ok(out)
    }

    pub fn contextualize(&self, tokens: &[usize]) -> Result<ContextWeights<T>> {
        self.check_tokens(tokens)?;
        let mut tape = Tape::new();
        let p = self.bind(&mut tape, false);
        let alphas = self.alpha_on_tape(&mut tape, &p, tokens)?;
        let n = tokens.len();
        let mut data = Vec::with_capacity(alphas.len() * n * n);
        for a in alphas {
            data.extend_from_slice(tape.value(a).data());
        }
        ContextWeights::new(Tensor::new(vec![self.config.num_senses, n, n], data)?)
    }

    /// Output vectors `o_{1:n}` as an `n × d` matrix.
    pub fn forward(&self, tokens: &[usize]) -> Result<Tensor<T>> {
        self.forward_inner(tokens, None)
    }

    /// Output vectors with each sense scaled by its map weight. α is
    /// computed from the unmodified input and is not renormalized.
    pub fn forward_reweighted(&self, tokens: &[usize], map: &SenseMap) -> Result<Tensor<T>> {
        self.forward_inner(tokens, Some(map))
    }

    fn forward_inner(&self, tokens: &[usize], map: Option<&SenseMap>) -> Result<Tensor<T>> {
        let mut tape = Tape::new();
        let p = self.bind(&mut tape, false);
        let o = self.output_on_tape(&mut tape, &p, tokens, map)?;
        Ok(tape.value(o).clone())
    }

    /// Aggregation with externally supplied weights α.
    pub fn forward_with_alpha(
        &self,
        tokens: &[usize],
        alpha: &ContextWeights<T>,
        map: Option<&SenseMap>,
    ) -> Result<Tensor<T>> {
        self.check_tokens(tokens)?;
        if alpha.len() != tokens.len() || alpha.num_senses() != self.config.num_senses {
            return Err(Error::Shape(format!(
                "context weights {:?} for {} tokens and {} senses",
                alpha.tensor().shape(),
                tokens.len(),
                self.config.num_senses
            )));
        }
        let weights = map.map(|m| self.check_map(m)).transpose()?;
        let mut tape = Tape::new();
        let p = self.bind(&mut tape, false);
        let senses = self.senses_on_tape(&mut tape, &p, tokens)?;
        let alphas: Vec<Var> = (0..alpha.num_senses()).map(|l| tape.constant(alpha.sense(l))).collect();
        let o = self.aggregate_on_tape(&mut tape, &alphas, &senses, weights.as_deref())?;
        Ok(tape.value(o).clone())
    }

    /// Relevance logit of a packed sequence.
    pub fn relevance_logit(&self, tokens: &[usize], map: Option<&SenseMap>) -> Result<T> {
        let mut tape = Tape::new();
        let p = self.bind(&mut tape, false);
        let y = self.relevance_logit_on_tape(&mut tape, &p, tokens, map)?;
        tape.value(y).item()
    }

    /// Packs the pair and returns `sigmoid(logit)`, strictly inside (0, 1)
    /// for finite logits of moderate size.
    pub fn relevance_score(&self, query: &[usize], doc: &[usize], map: Option<&SenseMap>) -> Result<T> {
        let tokens = pack_pair(query, doc, self.config.max_seq_len);
        let logit = self.relevance_logit(&tokens, map)?;
        Ok(crate::numkernel::kernels::sigmoid(logit))
    }

    /// Raw LM logits `o · E`, shape `n × |V|`.
    pub fn lm_logits(&self, tokens: &[usize]) -> Result<Tensor<T>> {
        let mut tape = Tape::new();
        let p = self.bind(&mut tape, false);
        let o = self.output_on_tape(&mut tape, &p, tokens, None)?;
        let logits = tape.matmul(o, p.get("lm_head"))?;
        Ok(tape.value(logits).clone())
    }

    /// Per-position next-token distribution, each row summing to one.
    pub fn lm_distribution(&self, tokens: &[usize]) -> Result<Tensor<T>> {
        self.lm_logits(tokens)?.softmax(1)
    }

    /// Casts every parameter to another scalar type.
    pub fn cast<U: Scalar>(&self) -> Backpack<U> {
        Backpack {
            config: self.config.clone(),
            params: self.params.iter().map(|(k, v)| (k.clone(), v.cast())).collect(),
        }
    }
}
