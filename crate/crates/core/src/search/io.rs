//! JSON Lines persistence for corpora.
//!
//! The first line is a header carrying the format tag, the space, and the
//! search metadata; each following line is one [`TestCase`]. Path signatures
//! are written as 16-digit hex strings so they survive JSON number handling.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{SearchStats, SearchType, TestCase, TestCorpus};
use crate::error::{Error, Result};
use crate::learners::LearnerKind;
use crate::space::HyperparameterSpace;

pub const CORPUS_FORMAT: &str = "parfait-corpus";
pub const CORPUS_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusHeader {
    pub format: String,
    pub version: u32,
    pub learner: LearnerKind,
    pub dataset: String,
    pub search_type: SearchType,
    pub seed: u64,
    pub epsilon: f64,
    pub default_accuracy: f64,
    pub stats: SearchStats,
    pub space: HyperparameterSpace,
}

pub(crate) mod hex_signature {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<u64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_str(&format!("{x:016x}")),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<u64>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| u64::from_str_radix(&s, 16).map_err(serde::de::Error::custom))
            .transpose()
    }
}

impl TestCorpus {
    pub fn header(&self) -> CorpusHeader {
        CorpusHeader {
            format: CORPUS_FORMAT.into(),
            version: CORPUS_VERSION,
            learner: self.learner,
            dataset: self.dataset.clone(),
            search_type: self.search_type,
            seed: self.seed,
            epsilon: self.epsilon,
            default_accuracy: self.default_accuracy,
            stats: self.stats.clone(),
            space: self.space.clone(),
        }
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let ctx = |e: serde_json::Error| Error::format("corpus", e);
        let mut out = serde_json::to_string(&self.header()).map_err(ctx)?;
        out.push('\n');
        for c in &self.cases {
            out.push_str(&serde_json::to_string(c).map_err(ctx)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_jsonl(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let (_, first) = lines
            .next()
            .ok_or_else(|| Error::format("corpus", "empty file"))?;
        let first = first.map_err(|e| Error::format("corpus", e))?;
        let header: CorpusHeader =
            serde_json::from_str(&first).map_err(|e| Error::format("corpus header", e))?;
        if header.format != CORPUS_FORMAT || header.version != CORPUS_VERSION {
            return Err(Error::format(
                "corpus header",
                format!("unsupported format {:?} version {}", header.format, header.version),
            ));
        }
        header.space.validate()?;
        let mut cases = Vec::new();
        for (i, line) in lines {
            let line = line.map_err(|e| Error::format("corpus", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let case: TestCase = serde_json::from_str(&line)
                .map_err(|e| Error::format(format!("corpus line {}", i + 1), e))?;
            cases.push(case);
        }
        if cases.is_empty() {
            return Err(Error::format("corpus", "no test cases after the header"));
        }
        let seen_paths = cases.iter().filter_map(|c| c.path_sig).collect();
        Ok(TestCorpus {
            learner: header.learner,
            space: header.space,
            dataset: header.dataset,
            search_type: header.search_type,
            seed: header.seed,
            epsilon: header.epsilon,
            cases,
            default_accuracy: header.default_accuracy,
            seen_paths,
            stats: header.stats,
        })
    }
}

pub fn write_corpus(corpus: &TestCorpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = corpus.to_jsonl()?;
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_corpus(path: impl AsRef<Path>) -> Result<TestCorpus> {
    let path = path.as_ref();
    let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    TestCorpus::from_jsonl(BufReader::new(f))
}
