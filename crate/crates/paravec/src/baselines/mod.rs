//! Comparison models: TF-IDF bag-of-words with cosine similarity,
//! averaged word embeddings, and LDA topic proportions compared with
//! Hellinger distance.

mod lda;

pub use lda::{lda_infer, lda_train, lda_train_with, LdaModel, TopicProportions};

use std::collections::HashMap;

use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};
use crate::pv::EmbeddingModel;

/// A sparse TF-IDF document vector: `(word id, weight)` entries sorted by
/// word id, with the Euclidean norm cached.
#[derive(Debug, Clone)]
pub struct TfidfVector {
    entries: Vec<(u32, f64)>,
    norm: f64,
}

impl TfidfVector {
    fn new(mut entries: Vec<(u32, f64)>) -> Self {
        entries.sort_by_key(|&(id, _)| id);
        let norm = entries.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt();
        TfidfVector { entries, norm }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Cosine similarity via a merge join over the sparse entries.
    pub fn cosine(&self, other: &TfidfVector) -> Result<f64> {
        if self.norm == 0.0 || other.norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let mut dot = 0.0;
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() && j < other.entries.len() {
            let (a, wa) = self.entries[i];
            let (b, wb) = other.entries[j];
            match a.cmp(&b) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    dot += wa * wb;
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(dot / (self.norm * other.norm))
    }
}

/// TF-IDF vectors for every document: `weight(w, d) = tf(w, d) * idf(w)`
/// with the smoothed inverse document frequency `ln((1+N)/(1+df)) + 1`.
pub fn tfidf_vectorize(corpus: &Corpus) -> Result<Vec<TfidfVector>> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let v = corpus.vocabulary.len();
    let n = corpus.len();

    let mut df = vec![0u32; v];
    let mut per_doc_tf: Vec<HashMap<u32, u32>> = Vec::with_capacity(n);
    for doc in &corpus.documents {
        let mut tf: HashMap<u32, u32> = HashMap::new();
        for &t in &doc.tokens {
            *tf.entry(t).or_insert(0) += 1;
        }
        for &t in tf.keys() {
            df[t as usize] += 1;
        }
        per_doc_tf.push(tf);
    }

    let idf: Vec<f64> = df
        .iter()
        .map(|&d| ((1.0 + n as f64) / (1.0 + d as f64)).ln() + 1.0)
        .collect();

    Ok(per_doc_tf
        .into_iter()
        .map(|tf| {
            TfidfVector::new(
                tf.into_iter()
                    .map(|(id, count)| (id, count as f64 * idf[id as usize]))
                    .collect(),
            )
        })
        .collect())
}

/// Componentwise mean of the word vectors of the document's tokens
/// (with multiplicity).
pub fn average_word_embeddings(model: &EmbeddingModel, doc: &Document) -> Result<Vec<f64>> {
    if doc.tokens.is_empty() {
        return Err(Error::InferenceInput);
    }
    let d = model.dim();
    let mut mean = vec![0f64; d];
    for &t in &doc.tokens {
        for (m, &x) in mean.iter_mut().zip(model.word_vectors.row(t as usize)) {
            *m += x as f64;
        }
    }
    let inv = 1.0 / doc.tokens.len() as f64;
    for m in mean.iter_mut() {
        *m *= inv;
    }
    Ok(mean)
}

/// Hellinger distance `(1/sqrt(2)) * ||sqrt(p) - sqrt(q)||` between two
/// probability distributions; ranges over `[0, 1]`.
pub fn hellinger(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Shape {
            expected: p.len(),
            actual: q.len(),
        });
    }
    let sum: f64 = p
        .iter()
        .zip(q)
        .map(|(&a, &b)| {
            let d = a.sqrt() - b.sqrt();
            d * d
        })
        .sum();
    Ok(std::f64::consts::FRAC_1_SQRT_2 * sum.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{encode_corpus, RawDocument};
    use crate::pv::{init_model, TrainConfig};
    use proptest::prelude::*;

    fn raw(title: &str, text: &str) -> RawDocument {
        RawDocument {
            title: title.to_string(),
            text: text.to_string(),
            category: None,
        }
    }

    #[test]
    fn single_document_weights_are_proportional_to_counts() {
        let corpus = encode_corpus(&[raw("d", "aa aa aa bb bb cc")], 1).unwrap();
        let vecs = tfidf_vectorize(&corpus).unwrap();
        let entries = vecs[0].entries();
        // idf identical for all terms, so weights are tf * constant
        let aa = corpus.vocabulary.id("aa").unwrap();
        let bb = corpus.vocabulary.id("bb").unwrap();
        let cc = corpus.vocabulary.id("cc").unwrap();
        let weight = |id: u32| entries.iter().find(|&&(e, _)| e == id).unwrap().1;
        assert!((weight(aa) / weight(cc) - 3.0).abs() < 1e-12);
        assert!((weight(bb) / weight(cc) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ubiquitous_words_get_smaller_idf() {
        let corpus = encode_corpus(
            &[
                raw("d0", "common rare0"),
                raw("d1", "common x1"),
                raw("d2", "common x1"),
            ],
            1,
        )
        .unwrap();
        let vecs = tfidf_vectorize(&corpus).unwrap();
        let common = corpus.vocabulary.id("common").unwrap();
        let rare = corpus.vocabulary.id("rare0").unwrap();
        let w = |v: &TfidfVector, id: u32| {
            v.entries()
                .iter()
                .find(|&&(e, _)| e == id)
                .map(|&(_, w)| w)
                .unwrap()
        };
        // both have tf 1 in doc 0, so the weights compare as the idfs do
        assert!(w(&vecs[0], common) < w(&vecs[0], rare));
    }

    #[test]
    fn identical_token_multisets_have_cosine_one() {
        let corpus = encode_corpus(&[raw("d0", "aa bb aa"), raw("d1", "bb aa aa")], 1).unwrap();
        let vecs = tfidf_vectorize(&corpus).unwrap();
        let c = vecs[0].cosine(&vecs[1]).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
        assert!((vecs[0].cosine(&vecs[0]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_document_vector_has_no_cosine() {
        let corpus = encode_corpus(&[raw("d0", "aa aa"), raw("d1", "zz")], 2).unwrap();
        let vecs = tfidf_vectorize(&corpus).unwrap();
        assert!(matches!(
            vecs[1].cosine(&vecs[0]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn averaging_recovers_single_row() {
        let corpus = encode_corpus(&[raw("d0", "aa bb"), raw("d1", "aa")], 1).unwrap();
        let config = TrainConfig {
            dim: 4,
            seed: 11,
            ..TrainConfig::default()
        };
        let model = init_model(&corpus, config).unwrap();
        let avg = average_word_embeddings(&model, &corpus.documents[1]).unwrap();
        let aa = corpus.vocabulary.id("aa").unwrap() as usize;
        let row = model.word_vectors.row(aa);
        for (a, &r) in avg.iter().zip(row) {
            assert_eq!(*a, r as f64);
        }

        let avg2 = average_word_embeddings(&model, &corpus.documents[0]).unwrap();
        let bb = corpus.vocabulary.id("bb").unwrap() as usize;
        for (i, a) in avg2.iter().enumerate() {
            let want =
                (model.word_vectors.row(aa)[i] as f64 + model.word_vectors.row(bb)[i] as f64) / 2.0;
            assert!((a - want).abs() < 1e-12);
        }
    }

    #[test]
    fn averaging_an_empty_document_fails() {
        let corpus = encode_corpus(&[raw("d0", "aa aa"), raw("d1", "zz")], 2).unwrap();
        let model = init_model(
            &corpus,
            TrainConfig {
                dim: 4,
                ..TrainConfig::default()
            },
        );
        // vocabulary has one word; build a 2-word corpus instead
        assert!(model.is_err());
        let corpus = encode_corpus(&[raw("d0", "aa aa bb bb"), raw("d1", "zz")], 2).unwrap();
        let model = init_model(
            &corpus,
            TrainConfig {
                dim: 4,
                ..TrainConfig::default()
            },
        )
        .unwrap();
        assert!(matches!(
            average_word_embeddings(&model, &corpus.documents[1]),
            Err(Error::InferenceInput)
        ));
    }

    #[test]
    fn hellinger_known_values() {
        assert_eq!(hellinger(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert!((hellinger(&[1.0, 0.0], &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-12);
        let h = hellinger(&[0.5, 0.5], &[0.9, 0.1]).unwrap();
        assert!((h - 0.3249).abs() < 1e-4, "got {h}");
    }

    #[test]
    fn hellinger_rejects_mismatched_lengths() {
        assert!(matches!(
            hellinger(&[1.0], &[0.5, 0.5]),
            Err(Error::Shape { .. })
        ));
    }

    fn random_simplex(dim: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(1e-6f64..1.0, dim).prop_map(|mut v| {
            let s: f64 = v.iter().sum();
            for x in v.iter_mut() {
                *x /= s;
            }
            v
        })
    }

    proptest! {
        #[test]
        fn hellinger_is_a_metric(
            p in random_simplex(6),
            q in random_simplex(6),
            r in random_simplex(6),
        ) {
            let hpq = hellinger(&p, &q).unwrap();
            let hqp = hellinger(&q, &p).unwrap();
            let hpr = hellinger(&p, &r).unwrap();
            let hqr = hellinger(&q, &r).unwrap();
            prop_assert!(hpq >= 0.0);
            prop_assert!(hpq <= 1.0 + 1e-9);
            prop_assert!((hpq - hqp).abs() < 1e-12);
            prop_assert!(hellinger(&p, &p).unwrap() < 1e-12);
            prop_assert!(hpr <= hpq + hqr + 1e-9);
        }
    }
}
