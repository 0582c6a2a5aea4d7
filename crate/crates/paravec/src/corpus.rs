//! Corpus ingestion: tokenization, frequency-cutoff vocabulary, and
//! documents as dense token-id sequences.
//!
//! The on-disk corpus format is UTF-8, one document per line:
//! `title<TAB>category<TAB>text`. The category field may be empty.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

/// A document as raw text plus metadata, before encoding.
#[derive(Debug, Clone)]
pub struct RawDocument {
    pub title: String,
    pub text: String,
    pub category: Option<String>,
}

/// A document encoded against a vocabulary. Out-of-vocabulary tokens are
/// dropped, so `tokens` may be empty; such documents are kept but are not
/// trainable.
#[derive(Debug, Clone)]
pub struct Document {
    pub id: usize,
    pub title: String,
    pub tokens: Vec<u32>,
    pub category: Option<String>,
}

impl Document {
    pub fn is_trainable(&self) -> bool {
        !self.tokens.is_empty()
    }
}

/// Word/id association after lower-casing and a minimum-frequency cutoff.
/// Ids are dense `0..len()`, assigned by descending corpus frequency with
/// lexicographic tie-breaking.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, u32>,
    min_count: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn count(&self, id: u32) -> u64 {
        self.counts[id as usize]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn min_count(&self) -> usize {
        self.min_count
    }

    /// Rebuild a vocabulary from its serialized parts (id order preserved).
    pub fn from_parts(words: Vec<String>, counts: Vec<u64>, min_count: usize) -> Self {
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        Vocabulary {
            words,
            counts,
            index,
            min_count,
        }
    }
}

/// An encoded corpus: documents with dense ids `0..N`, the vocabulary they
/// are encoded against, and the total token count. Immutable once built.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub vocabulary: Vocabulary,
    pub total_tokens: usize,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn titles(&self) -> Vec<String> {
        self.documents.iter().map(|d| d.title.clone()).collect()
    }
}

/// Lower-case and split on maximal runs of non-alphanumeric characters.
/// Digits are kept; empty tokens are dropped.
pub fn tokenize(raw: &str) -> Vec<String> {
    raw.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

/// Build a vocabulary from token streams, keeping words with corpus
/// frequency >= `min_count`.
pub fn build_vocabulary(streams: &[Vec<String>], min_count: usize) -> Result<Vocabulary> {
    let mut freq: HashMap<&str, u64> = HashMap::new();
    for stream in streams {
        for token in stream {
            *freq.entry(token.as_str()).or_insert(0) += 1;
        }
    }
    if freq.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let mut entries: Vec<(&str, u64)> = freq
        .into_iter()
        .filter(|&(_, c)| c as usize >= min_count)
        .collect();
    if entries.is_empty() {
        return Err(Error::EmptyVocabulary { min_count });
    }
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let words: Vec<String> = entries.iter().map(|(w, _)| w.to_string()).collect();
    let counts: Vec<u64> = entries.iter().map(|&(_, c)| c).collect();
    Ok(Vocabulary::from_parts(words, counts, min_count))
}

/// Tokenize and encode raw documents, building the vocabulary on the way.
/// Out-of-vocabulary tokens are dropped from documents.
pub fn encode_corpus(raw_docs: &[RawDocument], min_count: usize) -> Result<Corpus> {
    if raw_docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let streams: Vec<Vec<String>> = raw_docs.iter().map(|d| tokenize(&d.text)).collect();
    let vocabulary = build_vocabulary(&streams, min_count)?;

    let mut total_tokens = 0;
    let documents = raw_docs
        .iter()
        .zip(&streams)
        .enumerate()
        .map(|(id, (raw, stream))| {
            let tokens: Vec<u32> = stream.iter().filter_map(|t| vocabulary.id(t)).collect();
            total_tokens += tokens.len();
            Document {
                id,
                title: raw.title.clone(),
                tokens,
                category: raw.category.clone(),
            }
        })
        .collect();

    Ok(Corpus {
        documents,
        vocabulary,
        total_tokens,
    })
}

/// Parse the TAB-separated corpus format. Lines with fewer than three
/// fields are rejected with a line-numbered error; duplicate titles are
/// rejected because titles are the public document keys.
pub fn read_corpus_file(path: &Path) -> Result<Vec<RawDocument>> {
    let file = File::open(path).map_err(|e| {
        Error::Parse {
            line: 0,
            message: format!("no such corpus file {:?}: {}", path, e),
        }
    })?;
    let reader = BufReader::new(file);
    let mut docs = Vec::new();
    let mut seen = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        let mut parts = line.splitn(3, '\t');
        let title = parts.next().unwrap_or("");
        let category = parts.next();
        let text = parts.next();
        let (category, text) = match (category, text) {
            (Some(c), Some(t)) => (c, t),
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    message: "expected 3 TAB-separated fields (title, category, text)".into(),
                })
            }
        };
        if title.is_empty() {
            return Err(Error::Parse {
                line: lineno,
                message: "empty title".into(),
            });
        }
        if let Some(first) = seen.insert(title.to_string(), lineno) {
            return Err(Error::Parse {
                line: lineno,
                message: format!("duplicate title {:?} (first seen at line {})", title, first),
            });
        }
        docs.push(RawDocument {
            title: title.to_string(),
            text: text.to_string(),
            category: if category.is_empty() {
                None
            } else {
                Some(category.to_string())
            },
        });
    }
    Ok(docs)
}

/// Read and encode a corpus file in one step.
pub fn load_corpus(path: &Path, min_count: usize) -> Result<Corpus> {
    let raw = read_corpus_file(path)?;
    encode_corpus(&raw, min_count)
}
