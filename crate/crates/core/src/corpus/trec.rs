//! TREC run and qrels files.
//!
//! Run lines are `qid Q0 docid rank score tag`, written with single spaces
//! and scores fixed at six decimals. Qrels lines are `qid 0 docid rel`.

use std::fmt::Write as _;
use std::path::Path;

use indexmap::IndexMap;
use log::warn;

use crate::error::{Error, Result};
use crate::metrics::Qrels;

/// Documents for one query, best first.
#[derive(Clone, Debug, PartialEq)]
pub struct RankedList {
    pub query_id: String,
    pub entries: Vec<(String, f64)>,
}

impl RankedList {
    /// Sorts by score descending, ties broken by document id ascending.
    pub fn from_scores(query_id: impl Into<String>, mut scored: Vec<(String, f64)>) -> Self {
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        RankedList { query_id: query_id.into(), entries: scored }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn doc_ids(&self) -> Vec<&str> {
        self.entries.iter().map(|(d, _)| d.as_str()).collect()
    }

    pub fn to_records(&self, tag: &str) -> Vec<RunRecord> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, (doc, score))| RunRecord {
                query_id: self.query_id.clone(),
                iteration: "Q0".into(),
                doc_id: doc.clone(),
                rank: i as u64 + 1,
                score: *score,
                tag: tag.to_string(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub query_id: String,
    pub iteration: String,
    pub doc_id: String,
    pub rank: u64,
    pub score: f64,
    pub tag: String,
}

/// Groups run records per query (first-appearance order), each ordered by rank.
pub fn group_run(records: &[RunRecord]) -> Vec<RankedList> {
    let mut groups: IndexMap<&str, Vec<&RunRecord>> = IndexMap::new();
    for r in records {
        groups.entry(r.query_id.as_str()).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(q, mut rs)| {
            rs.sort_by_key(|r| r.rank);
            RankedList {
                query_id: q.to_string(),
                entries: rs.iter().map(|r| (r.doc_id.clone(), r.score)).collect(),
            }
        })
        .collect()
}

pub fn parse_run(text: &str, source: &Path) -> Result<Vec<RunRecord>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 6 {
            return Err(Error::parse(source, i + 1, format!("expected 6 fields, found {}", f.len())));
        }
        let rank = f[3].parse().map_err(|_| Error::parse(source, i + 1, format!("bad rank `{}`", f[3])))?;
        let score: f64 = f[4].parse().map_err(|_| Error::parse(source, i + 1, format!("bad score `{}`", f[4])))?;
        if !score.is_finite() {
            return Err(Error::parse(source, i + 1, "score is not finite"));
        }
        out.push(RunRecord {
            query_id: f[0].into(),
            iteration: f[1].into(),
            doc_id: f[2].into(),
            rank,
            score,
            tag: f[5].into(),
        });
    }
    Ok(out)
}

pub fn format_run(records: &[RunRecord]) -> String {
    let mut s = String::new();
    for r in records {
        let _ = writeln!(s, "{} {} {} {} {:.6} {}", r.query_id, r.iteration, r.doc_id, r.rank, r.score, r.tag);
    }
    s
}

pub fn read_run(path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_run(&text, path)
}

pub fn write_run(path: impl AsRef<Path>, records: &[RunRecord]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_run(records)).map_err(|e| Error::io(path, e))
}

/// Parsed qrels plus the number of duplicate `(qid, docid)` lines overridden.
#[derive(Clone, Debug, PartialEq)]
pub struct QrelsLoad {
    pub qrels: Qrels,
    pub duplicates: usize,
}

pub fn parse_qrels(text: &str, source: &Path) -> Result<QrelsLoad> {
    let mut qrels = Qrels::new();
    let mut duplicates = 0;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 4 {
            return Err(Error::parse(source, i + 1, format!("expected 4 fields, found {}", f.len())));
        }
        let rel: u32 = f[3]
            .parse()
            .map_err(|_| Error::parse(source, i + 1, format!("relevance `{}` is not a non-negative integer", f[3])))?;
        if qrels.insert(f[0], f[2], rel).is_some() {
            warn!("{}:{}: duplicate judgment for ({}, {}); keeping the last", source.display(), i + 1, f[0], f[2]);
            duplicates += 1;
        }
    }
    Ok(QrelsLoad { qrels, duplicates })
}

pub fn format_qrels(qrels: &Qrels) -> String {
    let mut s = String::new();
    for (q, d, g) in qrels.iter() {
        let _ = writeln!(s, "{q} 0 {d} {g}");
    }
    s
}

pub fn read_qrels(path: impl AsRef<Path>) -> Result<QrelsLoad> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_qrels(&text, path)
}

pub fn write_qrels(path: impl AsRef<Path>, qrels: &Qrels) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_qrels(qrels)).map_err(|e| Error::io(path, e))
}
