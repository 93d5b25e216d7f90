//! Seeded synthetic test collection with a controllable gender skew.
//!
//! Each query belongs to one of `num_topics` topics and uses `query_len`
//! words of that topic. Its candidate pool holds `relevant_per_query`
//! relevant documents (query words plus other topic words) and non-relevant
//! documents that are either same-topic "hard" negatives without the query
//! words or documents about another topic. Relevance is therefore topical.
//!
//! Gender terms are injected independently of content: a document carries
//! gender terms with probability `gender_rate`; given that, a relevant
//! document is male-marked with probability `rho` and a non-relevant one is
//! female-marked with probability `rho`. At `rho = 0.5` gender carries no
//! relevance signal. A marked document repeats one lexicon term 1 to
//! `max_gender_mentions` times.

use indexmap::IndexMap;

use super::collection::Collection;
use super::kv::KeyValues;
use super::trec::RankedList;
use crate::error::{Error, Result};
use crate::metrics::{GenderLexicon, Qrels};
use crate::numkernel::SplitMix64;

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub num_queries: usize,
    pub docs_per_query: usize,
    pub relevant_per_query: usize,
    pub num_topics: usize,
    pub topic_words: usize,
    pub filler_words: usize,
    pub query_len: usize,
    pub doc_len: usize,
    /// Fraction of non-relevant pool documents drawn from the query's own topic.
    pub hard_negative_rate: f64,
    pub rho: f64,
    pub gender_rate: f64,
    pub max_gender_mentions: usize,
    /// Probability that a query gets an explicit gender term appended.
    pub gendered_query_rate: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            num_queries: 500,
            docs_per_query: 20,
            relevant_per_query: 2,
            num_topics: 10,
            topic_words: 20,
            filler_words: 200,
            query_len: 3,
            doc_len: 12,
            hard_negative_rate: 0.5,
            rho: 0.5,
            gender_rate: 1.0,
            max_gender_mentions: 3,
            gendered_query_rate: 0.0,
            seed: 0,
        }
    }
}

const KEYS: &[&str] = &[
    "num_queries",
    "docs_per_query",
    "relevant_per_query",
    "num_topics",
    "topic_words",
    "filler_words",
    "query_len",
    "doc_len",
    "hard_negative_rate",
    "rho",
    "gender_rate",
    "max_gender_mentions",
    "gendered_query_rate",
    "seed",
];

impl SynthConfig {
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        kv.reject_unknown(KEYS)?;
        let d = Self::default();
        let cfg = SynthConfig {
            num_queries: kv.get_or("num_queries", d.num_queries)?,
            docs_per_query: kv.get_or("docs_per_query", d.docs_per_query)?,
            relevant_per_query: kv.get_or("relevant_per_query", d.relevant_per_query)?,
            num_topics: kv.get_or("num_topics", d.num_topics)?,
            topic_words: kv.get_or("topic_words", d.topic_words)?,
            filler_words: kv.get_or("filler_words", d.filler_words)?,
            query_len: kv.get_or("query_len", d.query_len)?,
            doc_len: kv.get_or("doc_len", d.doc_len)?,
            hard_negative_rate: kv.get_or("hard_negative_rate", d.hard_negative_rate)?,
            rho: kv.get_or("rho", d.rho)?,
            gender_rate: kv.get_or("gender_rate", d.gender_rate)?,
            max_gender_mentions: kv.get_or("max_gender_mentions", d.max_gender_mentions)?,
            gendered_query_rate: kv.get_or("gendered_query_rate", d.gendered_query_rate)?,
            seed: kv.get_or("seed", d.seed)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_key_values(&self) -> KeyValues {
        let mut kv = KeyValues::default();
        kv.insert("num_queries", self.num_queries);
        kv.insert("docs_per_query", self.docs_per_query);
        kv.insert("relevant_per_query", self.relevant_per_query);
        kv.insert("num_topics", self.num_topics);
        kv.insert("topic_words", self.topic_words);
        kv.insert("filler_words", self.filler_words);
        kv.insert("query_len", self.query_len);
        kv.insert("doc_len", self.doc_len);
        kv.insert("hard_negative_rate", self.hard_negative_rate);
        kv.insert("rho", self.rho);
        kv.insert("gender_rate", self.gender_rate);
        kv.insert("max_gender_mentions", self.max_gender_mentions);
        kv.insert("gendered_query_rate", self.gendered_query_rate);
        kv.insert("seed", self.seed);
        kv
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::config(name, format!("must lie in [0, 1], got {v}")))
            }
        };
        let positive = |name: &str, v: usize| {
            if v > 0 {
                Ok(())
            } else {
                Err(Error::config(name, "must be positive"))
            }
        };
        unit("rho", self.rho)?;
        unit("gender_rate", self.gender_rate)?;
        unit("hard_negative_rate", self.hard_negative_rate)?;
        unit("gendered_query_rate", self.gendered_query_rate)?;
        positive("num_queries", self.num_queries)?;
        positive("docs_per_query", self.docs_per_query)?;
        positive("relevant_per_query", self.relevant_per_query)?;
        positive("num_topics", self.num_topics)?;
        positive("topic_words", self.topic_words)?;
        positive("filler_words", self.filler_words)?;
        positive("query_len", self.query_len)?;
        positive("max_gender_mentions", self.max_gender_mentions)?;
        if self.relevant_per_query > self.docs_per_query {
            return Err(Error::config("relevant_per_query", "exceeds docs_per_query"));
        }
        if self.query_len > self.topic_words {
            return Err(Error::config("query_len", "exceeds topic_words"));
        }
        if self.doc_len < self.query_len.min(2) + 1 {
            return Err(Error::config("doc_len", "too short to hold query and topic words"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticCorpus {
    pub collection: Collection,
    /// Candidate pool of each query, in generation order, as a zero-scored run.
    pub pools: Vec<RankedList>,
    /// Topic index of each query.
    pub query_topics: IndexMap<String, usize>,
}

fn topic_word(topic: usize, i: usize) -> String {
    format!("t{topic}w{i}")
}

fn filler_word(i: usize) -> String {
    format!("f{i}")
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Relevant,
    Hard,
    Easy,
}

pub fn generate_synthetic(cfg: &SynthConfig, lexicon: &GenderLexicon) -> Result<SyntheticCorpus> {
    cfg.validate()?;
    let mut rng = SplitMix64::new(cfg.seed);
    let female: Vec<&String> = lexicon.female().iter().collect();
    let male: Vec<&String> = lexicon.male().iter().collect();

    let mut docs = IndexMap::new();
    let mut queries = IndexMap::new();
    let mut qrels = Qrels::new();
    let mut pools = Vec::with_capacity(cfg.num_queries);
    let mut query_topics = IndexMap::new();
    let mut next_doc = 0usize;

    // Words per content slot of a document.
    let query_in_doc = cfg.query_len.min(2);
    let topical = (cfg.doc_len / 2).max(query_in_doc + 1);

    for q in 0..cfg.num_queries {
        let qid = format!("q{q}");
        let topic = rng.below(cfg.num_topics);
        let query_word_ids = rng.sample_indices(cfg.topic_words, cfg.query_len);
        let mut query: Vec<String> = query_word_ids.iter().map(|&w| topic_word(topic, w)).collect();
        if cfg.gendered_query_rate > 0.0 && rng.bernoulli(cfg.gendered_query_rate) {
            let set = if rng.bernoulli(0.5) { &female } else { &male };
            query.push((*rng.choose(set)).clone());
        }

        let mut kinds: Vec<Kind> = (0..cfg.docs_per_query)
            .map(|i| {
                if i < cfg.relevant_per_query {
                    Kind::Relevant
                } else if rng.bernoulli(cfg.hard_negative_rate) {
                    Kind::Hard
                } else {
                    Kind::Easy
                }
            })
            .collect();
        rng.shuffle(&mut kinds);

        let mut pool = Vec::with_capacity(kinds.len());
        for kind in kinds {
            let mut tokens = Vec::with_capacity(cfg.doc_len + cfg.max_gender_mentions);
            let other_topic_words: Vec<usize> =
                (0..cfg.topic_words).filter(|w| !query_word_ids.contains(w)).collect();
            match kind {
                Kind::Relevant => {
                    for &w in rng.sample_indices(cfg.query_len, query_in_doc).iter() {
                        tokens.push(topic_word(topic, query_word_ids[w]));
                    }
                    for _ in query_in_doc..topical {
                        let w = if other_topic_words.is_empty() {
                            *rng.choose(&query_word_ids)
                        } else {
                            *rng.choose(&other_topic_words)
                        };
                        tokens.push(topic_word(topic, w));
                    }
                }
                Kind::Hard => {
                    for _ in 0..topical {
                        let w = if other_topic_words.is_empty() {
                            rng.below(cfg.topic_words)
                        } else {
                            *rng.choose(&other_topic_words)
                        };
                        tokens.push(topic_word(topic, w));
                    }
                }
                Kind::Easy => {
                    let other = if cfg.num_topics > 1 {
                        (topic + 1 + rng.below(cfg.num_topics - 1)) % cfg.num_topics
                    } else {
                        topic
                    };
                    for _ in 0..topical {
                        tokens.push(topic_word(other, rng.below(cfg.topic_words)));
                    }
                }
            }
            while tokens.len() < cfg.doc_len {
                tokens.push(filler_word(rng.below(cfg.filler_words)));
            }

            let relevant = kind == Kind::Relevant;
            if rng.bernoulli(cfg.gender_rate) {
                let skewed = rng.bernoulli(cfg.rho);
                let male_marked = if relevant { skewed } else { !skewed };
                let set = if male_marked { &male } else { &female };
                let term = (*rng.choose(set)).clone();
                let mentions = 1 + rng.below(cfg.max_gender_mentions);
                for _ in 0..mentions {
                    tokens.push(term.clone());
                }
            }
            rng.shuffle(&mut tokens);

            let doc_id = format!("d{next_doc}");
            next_doc += 1;
            qrels.insert(&qid, &doc_id, u32::from(relevant));
            pool.push((doc_id.clone(), 0.0));
            docs.insert(doc_id, tokens);
        }
        pools.push(RankedList { query_id: qid.clone(), entries: pool });
        query_topics.insert(qid.clone(), topic);
        queries.insert(qid, query);
    }

    Ok(SyntheticCorpus { collection: Collection { docs, queries, qrels }, pools, query_topics })
}
