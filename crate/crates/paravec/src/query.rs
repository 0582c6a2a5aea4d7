//! Similarity metrics, exact nearest-neighbor search over document
//! vectors, and vector-arithmetic queries against a trained model.

use std::collections::HashSet;

use crate::baselines::hellinger;
use crate::error::{Error, Result};
use crate::pv::EmbeddingModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Cosine,
    Hellinger,
}

/// A ranked search hit. `score` is cosine similarity, or negated Hellinger
/// distance, so larger is always better.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub id: usize,
    pub title: String,
    pub score: f64,
}

/// Cosine similarity of two nonzero vectors.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Shape {
            expected: u.len(),
            actual: v.len(),
        });
    }
    let mut dot = 0.0;
    let mut nu = 0.0;
    let mut nv = 0.0;
    for (&a, &b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(dot / (nu.sqrt() * nv.sqrt()))
}

/// An immutable search index over document vectors. For the cosine metric,
/// zero-norm rows are unmatchable and never returned.
#[derive(Debug, Clone)]
pub struct VectorIndex {
    ids: Vec<usize>,
    titles: Vec<String>,
    rows: Vec<Vec<f64>>,
    norms: Vec<f64>,
    metric: Metric,
}

impl VectorIndex {
    pub fn new(
        ids: Vec<usize>,
        titles: Vec<String>,
        rows: Vec<Vec<f64>>,
        metric: Metric,
    ) -> Result<Self> {
        if ids.len() != rows.len() || ids.len() != titles.len() {
            return Err(Error::Shape {
                expected: ids.len(),
                actual: rows.len(),
            });
        }
        let mut seen = HashSet::new();
        for &id in &ids {
            if !seen.insert(id) {
                return Err(Error::EvaluationInput(format!("duplicate index id {id}")));
            }
        }
        if let Some(first) = rows.first() {
            let d = first.len();
            if rows.iter().any(|r| r.len() != d) {
                return Err(Error::Shape {
                    expected: d,
                    actual: rows.iter().find(|r| r.len() != d).unwrap().len(),
                });
            }
        }
        let norms = rows
            .iter()
            .map(|r| r.iter().map(|x| x * x).sum::<f64>().sqrt())
            .collect();
        Ok(VectorIndex {
            ids,
            titles,
            rows,
            norms,
            metric,
        })
    }

    /// Index the paragraph vectors of a model under cosine similarity.
    pub fn from_paragraph_vectors(model: &EmbeddingModel) -> Result<Self> {
        let n = model.doc_count();
        let rows = (0..n)
            .map(|i| {
                model
                    .paragraph_vectors
                    .row(i)
                    .iter()
                    .map(|&x| x as f64)
                    .collect()
            })
            .collect();
        VectorIndex::new(
            (0..n).collect(),
            model.doc_titles.clone(),
            rows,
            Metric::Cosine,
        )
    }

    /// Index per-document topic proportions under Hellinger distance.
    pub fn from_topic_proportions(titles: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let ids = (0..rows.len()).collect();
        VectorIndex::new(ids, titles, rows, Metric::Hellinger)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }
}

/// Exact top-`k` search: full scan, scores descending, ties broken by
/// ascending id. Excluded ids and (for cosine) zero-norm rows are skipped;
/// if fewer than `k` candidates exist, all are returned.
pub fn nearest_neighbors(
    index: &VectorIndex,
    query: &[f64],
    k: usize,
    exclude: &HashSet<usize>,
) -> Result<Vec<Neighbor>> {
    if index.is_empty() {
        return Ok(Vec::new());
    }
    if query.len() != index.dim() {
        return Err(Error::Shape {
            expected: index.dim(),
            actual: query.len(),
        });
    }

    let mut scored: Vec<(usize, f64)> = Vec::with_capacity(index.len());
    match index.metric {
        Metric::Cosine => {
            let qnorm = query.iter().map(|x| x * x).sum::<f64>().sqrt();
            if qnorm == 0.0 {
                return Err(Error::ZeroVector);
            }
            for (i, row) in index.rows.iter().enumerate() {
                let id = index.ids[i];
                if exclude.contains(&id) || index.norms[i] == 0.0 {
                    continue;
                }
                let dot: f64 = row.iter().zip(query).map(|(a, b)| a * b).sum();
                scored.push((i, dot / (index.norms[i] * qnorm)));
            }
        }
        Metric::Hellinger => {
            for (i, row) in index.rows.iter().enumerate() {
                let id = index.ids[i];
                if exclude.contains(&id) {
                    continue;
                }
                scored.push((i, -hellinger(query, row)?));
            }
        }
    }

    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("scores are finite")
            .then_with(|| index.ids[a.0].cmp(&index.ids[b.0]))
    });
    scored.truncate(k);

    Ok(scored
        .into_iter()
        .map(|(i, score)| Neighbor {
            id: index.ids[i],
            title: index.titles[i].clone(),
            score,
        })
        .collect())
}

/// Vector-arithmetic query: start from a document's paragraph vector,
/// subtract and add word vectors, and rank the remaining documents.
/// Word arguments are lower-cased to match the corpus pipeline.
pub fn analogy_query(
    model: &EmbeddingModel,
    index: &VectorIndex,
    anchor_doc: usize,
    minus_words: &[String],
    plus_words: &[String],
    k: usize,
) -> Result<Vec<Neighbor>> {
    let mut query: Vec<f64> = model
        .doc_vector(anchor_doc)?
        .iter()
        .map(|&x| x as f64)
        .collect();
    for word in minus_words {
        let row = model.word_vector(&word.to_lowercase())?;
        for (q, &x) in query.iter_mut().zip(row) {
            *q -= x as f64;
        }
    }
    for word in plus_words {
        let row = model.word_vector(&word.to_lowercase())?;
        for (q, &x) in query.iter_mut().zip(row) {
            *q += x as f64;
        }
    }
    let mut exclude = HashSet::new();
    exclude.insert(anchor_doc);
    nearest_neighbors(index, &query, k, &exclude)
}

/// Render neighbors as an aligned two-column table: title, then score to
/// three decimals.
pub fn format_neighbors(neighbors: &[Neighbor]) -> String {
    let width = neighbors
        .iter()
        .map(|n| n.title.chars().count())
        .max()
        .unwrap_or(0)
        .max(7);
    let mut out = String::new();
    for n in neighbors {
        out.push_str(&format!("{:<width$}  {:>6.3}\n", n.title, n.score));
    }
    out
}
