use std::fmt::Write as _;
use std::path::Path;

use indexmap::IndexMap;

use super::text::tokenize;
use super::trec::{read_qrels, write_qrels};
use crate::error::{Error, Result};
use crate::metrics::{GenderLexicon, Qrels};

/// Documents, queries and judgments, all tokenized.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Collection {
    pub docs: IndexMap<String, Vec<String>>,
    pub queries: IndexMap<String, Vec<String>>,
    pub qrels: Qrels,
}

impl Collection {
    /// Checks that every judged query and document exists.
    pub fn validate(&self) -> Result<()> {
        for (q, d, _) in self.qrels.iter() {
            if !self.queries.contains_key(q) {
                return Err(Error::Domain(format!("qrels query `{q}` is not in the query set")));
            }
            if !self.docs.contains_key(d) {
                return Err(Error::Domain(format!("qrels document `{d}` is not in the corpus")));
            }
        }
        Ok(())
    }

    pub fn load(corpus: &Path, queries: &Path, qrels: &Path) -> Result<Self> {
        let c = Collection { docs: read_tsv(corpus)?, queries: read_tsv(queries)?, qrels: read_qrels(qrels)?.qrels };
        c.validate()?;
        Ok(c)
    }

    pub fn save(&self, corpus: &Path, queries: &Path, qrels: &Path) -> Result<()> {
        write_tsv(corpus, &self.docs)?;
        write_tsv(queries, &self.queries)?;
        write_qrels(qrels, &self.qrels)
    }

    pub fn doc(&self, id: &str) -> Option<&[String]> {
        self.docs.get(id).map(Vec::as_slice)
    }

    /// Every distinct token of documents and queries in first-seen order,
    /// followed by any lexicon terms that never occur.
    pub fn vocabulary_tokens(&self, lexicon: &GenderLexicon) -> Vec<String> {
        let mut seen = indexmap::IndexSet::new();
        for tokens in self.queries.values().chain(self.docs.values()) {
            for t in tokens {
                seen.insert(t.clone());
            }
        }
        for t in lexicon.female().iter().chain(lexicon.male()) {
            seen.insert(t.clone());
        }
        seen.into_iter().collect()
    }
}

/// Reads `id<TAB>text` lines and tokenizes the text.
pub fn read_tsv(path: &Path) -> Result<IndexMap<String, Vec<String>>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = IndexMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (id, body) = line.split_once('\t').ok_or_else(|| Error::parse(path, i + 1, "expected `id<TAB>text`"))?;
        if id.is_empty() {
            return Err(Error::parse(path, i + 1, "empty id"));
        }
        if out.insert(id.to_string(), tokenize(body)).is_some() {
            return Err(Error::parse(path, i + 1, format!("duplicate id `{id}`")));
        }
    }
    Ok(out)
}

pub fn write_tsv(path: &Path, rows: &IndexMap<String, Vec<String>>) -> Result<()> {
    let mut s = String::new();
    for (id, tokens) in rows {
        let _ = writeln!(s, "{id}\t{}", tokens.join(" "));
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsv_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.tsv");
        std::fs::write(&p, "d1\tShe said Hi!\nd2\tco-op\n").unwrap();
        let rows = read_tsv(&p).unwrap();
        assert_eq!(rows["d1"], vec!["she", "said", "hi"]);
        write_tsv(&p, &rows).unwrap();
        assert_eq!(read_tsv(&p).unwrap(), rows);

        std::fs::write(&p, "d1\ta\nd1\tb\n").unwrap();
        assert!(matches!(read_tsv(&p), Err(Error::Parse { line: 2, .. })));
        std::fs::write(&p, "no tab here\n").unwrap();
        assert!(matches!(read_tsv(&p), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn validate_catches_dangling_judgments() {
        let mut c = Collection::default();
        c.queries.insert("q".into(), vec!["x".into()]);
        c.qrels.insert("q", "missing", 1);
        assert!(c.validate().is_err());
        c.docs.insert("missing".into(), vec![]);
        assert!(c.validate().is_ok());
    }
}
