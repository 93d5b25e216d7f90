use serde::{Deserialize, Serialize};

use crate::corpus::KeyValues;
use crate::error::{Error, Result};

/// Which output position feeds the relevance head.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pooling {
    /// Output of the final sequence position.
    Last,
    /// Mean of all output positions.
    Mean,
}

impl std::str::FromStr for Pooling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "last" => Ok(Pooling::Last),
            "mean" => Ok(Pooling::Mean),
            other => Err(Error::config("pooling", format!("expected `last` or `mean`, got `{other}`"))),
        }
    }
}

const KEYS: &[&str] = &[
    "embed_dim",
    "num_senses",
    "context_layers",
    "context_heads",
    "max_seq_len",
    "causal",
    "sense_hidden",
    "head_hidden",
    "pooling",
    "alpha_init_scale",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackpackConfig {
    pub vocab_size: usize,
    pub embed_dim: usize,
    pub num_senses: usize,
    pub context_layers: usize,
    pub context_heads: usize,
    pub max_seq_len: usize,
    pub causal: bool,
    /// Hidden width of the per-token sense network.
    pub sense_hidden: usize,
    /// Hidden width of the relevance head.
    pub head_hidden: usize,
    pub pooling: Pooling,
    /// Multiplier on the initial spread of the contextualization weights.
    /// Values above 1 give sharper, less uniform initial attention, so the
    /// senses receive different gradients from the first step.
    #[serde(default = "unit_scale")]
    pub alpha_init_scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

impl BackpackConfig {
    /// Small desk-scale configuration for a given vocabulary size.
    pub fn toy(vocab_size: usize) -> Self {
        BackpackConfig {
            vocab_size,
            embed_dim: 16,
            num_senses: 4,
            context_layers: 1,
            context_heads: 2,
            max_seq_len: 32,
            causal: true,
            sense_hidden: 32,
            head_hidden: 16,
            pooling: Pooling::Mean,
            alpha_init_scale: 4.0,
        }
    }

    /// Overrides the [`toy`](Self::toy) defaults with any known keys of `kv`,
    /// ignoring the rest.
    pub fn from_key_values(kv: &KeyValues, vocab_size: usize) -> Result<Self> {
        let d = Self::toy(vocab_size);
        let pooling: String = kv.get_or("pooling", format!("{:?}", d.pooling).to_lowercase())?;
        let cfg = BackpackConfig {
            vocab_size,
            embed_dim: kv.get_or("embed_dim", d.embed_dim)?,
            num_senses: kv.get_or("num_senses", d.num_senses)?,
            context_layers: kv.get_or("context_layers", d.context_layers)?,
            context_heads: kv.get_or("context_heads", d.context_heads)?,
            max_seq_len: kv.get_or("max_seq_len", d.max_seq_len)?,
            causal: kv.get_or("causal", d.causal)?,
            sense_hidden: kv.get_or("sense_hidden", d.sense_hidden)?,
            head_hidden: kv.get_or("head_hidden", d.head_hidden)?,
            pooling: pooling.parse()?,
            alpha_init_scale: kv.get_or("alpha_init_scale", d.alpha_init_scale)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn keys() -> &'static [&'static str] {
        KEYS
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("vocab_size", self.vocab_size),
            ("embed_dim", self.embed_dim),
            ("num_senses", self.num_senses),
            ("context_layers", self.context_layers),
            ("context_heads", self.context_heads),
            ("max_seq_len", self.max_seq_len),
            ("sense_hidden", self.sense_hidden),
            ("head_hidden", self.head_hidden),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::config(name, "must be positive"));
            }
        }
        if !(self.alpha_init_scale > 0.0 && self.alpha_init_scale.is_finite()) {
            return Err(Error::config("alpha_init_scale", "must be finite and positive"));
        }
        if !self.embed_dim.is_multiple_of(self.context_heads) {
            return Err(Error::config(
                "context_heads",
                format!("{} does not divide embed_dim {}", self.context_heads, self.embed_dim),
            ));
        }
        Ok(())
    }

    /// Names and shapes of every parameter, in checkpoint order.
    pub fn parameter_shapes(&self) -> Vec<(String, Vec<usize>)> {
        let (v, d, k) = (self.vocab_size, self.embed_dim, self.num_senses);
        let mut out = vec![
            ("tok_embed".to_string(), vec![v, d]),
            ("pos_embed".to_string(), vec![self.max_seq_len, d]),
            ("sense.w1".to_string(), vec![d, self.sense_hidden]),
            ("sense.b1".to_string(), vec![self.sense_hidden]),
            ("sense.w2".to_string(), vec![self.sense_hidden, d]),
            ("sense.proj".to_string(), vec![d, k * d]),
        ];
        for l in 0..self.context_layers {
            out.push((format!("ctx.{l}.qkv"), vec![d, 3 * d]));
            out.push((format!("ctx.{l}.out"), vec![d, d]));
            out.push((format!("ctx.{l}.ff1"), vec![d, 2 * d]));
            out.push((format!("ctx.{l}.ff1_b"), vec![2 * d]));
            out.push((format!("ctx.{l}.ff2"), vec![2 * d, d]));
            out.push((format!("ctx.{l}.ff2_b"), vec![d]));
        }
        out.push(("alpha.qk".to_string(), vec![d, 2 * k * d]));
        out.push(("head.w1".to_string(), vec![d, self.head_hidden]));
        out.push(("head.b1".to_string(), vec![self.head_hidden]));
        out.push(("head.w2".to_string(), vec![self.head_hidden, 1]));
        out.push(("head.b2".to_string(), vec![1]));
        out.push(("lm_head".to_string(), vec![d, v]));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heads_must_divide_width() {
        let mut c = BackpackConfig::toy(10);
        c.validate().unwrap();
        c.context_heads = 3;
        assert!(matches!(c.validate(), Err(Error::Config { ref field, .. }) if field == "context_heads"));
        c.context_heads = 2;
        c.num_senses = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn key_values_override_defaults() {
        let kv = KeyValues::parse("num_senses = 8\npooling = last\nother = 1\n", std::path::Path::new("m")).unwrap();
        let c = BackpackConfig::from_key_values(&kv, 30).unwrap();
        assert_eq!((c.num_senses, c.pooling, c.embed_dim), (8, Pooling::Last, 16));
        let kv = KeyValues::parse("context_heads = 3\n", std::path::Path::new("m")).unwrap();
        assert!(matches!(BackpackConfig::from_key_values(&kv, 30), Err(Error::Config { .. })));
    }

    #[test]
    fn pooling_parses() {
        assert_eq!("mean".parse::<Pooling>().unwrap(), Pooling::Mean);
        assert!("max".parse::<Pooling>().is_err());
    }
}
