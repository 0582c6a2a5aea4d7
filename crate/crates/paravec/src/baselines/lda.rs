//! Latent Dirichlet Allocation trained by collapsed Gibbs sampling.
//!
//! Topic assignments are resampled one token at a time from
//! `P(z = k | rest) ∝ (n_dk + α) · (n_kw + β) / (n_k + Vβ)`, with the
//! token's own counts removed before sampling and restored after. The
//! per-document posterior topic proportions are the smoothed count
//! fractions `(n_dk + α) / (len_d + Kα)`.

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use crate::corpus::{Corpus, Vocabulary};
use crate::error::{Error, Result};

/// Per-document topic distribution; entries are nonnegative and sum to 1.
pub type TopicProportions = Vec<f64>;

/// Counts and assignments of a collapsed Gibbs sampler for LDA.
#[derive(Debug, Clone, PartialEq)]
pub struct LdaModel {
    k: usize,
    alpha: f64,
    beta: f64,
    vocab_size: usize,
    /// K x V, row major.
    topic_word_counts: Vec<u32>,
    /// N x K, row major.
    doc_topic_counts: Vec<u32>,
    topic_totals: Vec<u64>,
    /// Per document, per token: the assigned topic.
    assignments: Vec<Vec<u32>>,
}

impl LdaModel {
    pub fn topics(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn doc_count(&self) -> usize {
        self.assignments.len()
    }

    fn init(corpus: &Corpus, k: usize, alpha: f64, beta: f64, rng: &mut ChaCha12Rng) -> Self {
        let v = corpus.vocabulary.len();
        let n = corpus.len();
        let mut model = LdaModel {
            k,
            alpha,
            beta,
            vocab_size: v,
            topic_word_counts: vec![0; k * v],
            doc_topic_counts: vec![0; n * k],
            topic_totals: vec![0; k],
            assignments: Vec::with_capacity(n),
        };
        for doc in &corpus.documents {
            let mut z = Vec::with_capacity(doc.tokens.len());
            for &w in &doc.tokens {
                let topic = rng.gen_range(0..k as u32);
                z.push(topic);
                model.add_token(doc.id, w, topic);
            }
            model.assignments.push(z);
        }
        model
    }

    #[inline]
    fn add_token(&mut self, doc: usize, word: u32, topic: u32) {
        self.topic_word_counts[topic as usize * self.vocab_size + word as usize] += 1;
        self.doc_topic_counts[doc * self.k + topic as usize] += 1;
        self.topic_totals[topic as usize] += 1;
    }

    #[inline]
    fn remove_token(&mut self, doc: usize, word: u32, topic: u32) {
        self.topic_word_counts[topic as usize * self.vocab_size + word as usize] -= 1;
        self.doc_topic_counts[doc * self.k + topic as usize] -= 1;
        self.topic_totals[topic as usize] -= 1;
    }

    /// One full Gibbs sweep over every token of the corpus.
    fn sweep(&mut self, corpus: &Corpus, rng: &mut ChaCha12Rng, weights: &mut Vec<f64>) {
        let v_beta = self.vocab_size as f64 * self.beta;
        for doc in &corpus.documents {
            for (i, &w) in doc.tokens.iter().enumerate() {
                let old = self.assignments[doc.id][i];
                self.remove_token(doc.id, w, old);

                weights.clear();
                let mut total = 0.0;
                for k in 0..self.k {
                    let p = (self.doc_topic_counts[doc.id * self.k + k] as f64 + self.alpha)
                        * (self.topic_word_counts[k * self.vocab_size + w as usize] as f64
                            + self.beta)
                        / (self.topic_totals[k] as f64 + v_beta);
                    total += p;
                    weights.push(p);
                }

                let mut u = rng.gen::<f64>() * total;
                let mut new = self.k - 1;
                for (k, &p) in weights.iter().enumerate() {
                    if u < p {
                        new = k;
                        break;
                    }
                    u -= p;
                }

                self.assignments[doc.id][i] = new as u32;
                self.add_token(doc.id, w, new as u32);
            }
        }
    }

    /// Verify the count bookkeeping against the corpus.
    pub fn check_counts(&self, corpus: &Corpus) -> Result<()> {
        for k in 0..self.k {
            let sum: u64 = self.topic_word_counts[k * self.vocab_size..(k + 1) * self.vocab_size]
                .iter()
                .map(|&c| c as u64)
                .sum();
            if sum != self.topic_totals[k] {
                return Err(Error::EvaluationInput(format!(
                    "topic {k} word counts sum to {sum}, total says {}",
                    self.topic_totals[k]
                )));
            }
        }
        for doc in &corpus.documents {
            let sum: usize = self.doc_topic_counts[doc.id * self.k..(doc.id + 1) * self.k]
                .iter()
                .map(|&c| c as usize)
                .sum();
            if sum != doc.tokens.len() {
                return Err(Error::EvaluationInput(format!(
                    "document {} topic counts sum to {sum}, length is {}",
                    doc.id,
                    doc.tokens.len()
                )));
            }
        }
        Ok(())
    }

    /// Smoothed posterior topic proportions for a training document.
    pub fn proportions(&self, doc_id: usize) -> Result<TopicProportions> {
        if doc_id >= self.doc_count() {
            return Err(Error::DocOutOfRange {
                id: doc_id,
                len: self.doc_count(),
            });
        }
        let counts = &self.doc_topic_counts[doc_id * self.k..(doc_id + 1) * self.k];
        let len: f64 = counts.iter().map(|&c| c as f64).sum();
        let denom = len + self.k as f64 * self.alpha;
        Ok(counts
            .iter()
            .map(|&c| (c as f64 + self.alpha) / denom)
            .collect())
    }

    /// The `n` most frequent word ids of a topic (count descending, word id
    /// ascending on ties).
    pub fn top_words(&self, topic: usize, n: usize) -> Vec<u32> {
        let row = &self.topic_word_counts[topic * self.vocab_size..(topic + 1) * self.vocab_size];
        let mut ids: Vec<u32> = (0..self.vocab_size as u32).collect();
        ids.sort_by(|&a, &b| {
            row[b as usize]
                .cmp(&row[a as usize])
                .then_with(|| a.cmp(&b))
        });
        ids.truncate(n);
        ids
    }
}

/// Train an LDA model and observe it after every Gibbs sweep.
pub fn lda_train_with(
    corpus: &Corpus,
    k: usize,
    alpha: f64,
    beta: f64,
    iterations: usize,
    seed: u64,
    mut observer: impl FnMut(&LdaModel),
) -> Result<LdaModel> {
    if k == 0 {
        return Err(Error::Config("topic count must be >= 1".into()));
    }
    if !alpha.is_finite() || alpha <= 0.0 || !beta.is_finite() || beta <= 0.0 {
        return Err(Error::Config("alpha and beta must be > 0".into()));
    }
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut model = LdaModel::init(corpus, k, alpha, beta, &mut rng);
    let mut weights = Vec::with_capacity(k);
    for _ in 0..iterations {
        model.sweep(corpus, &mut rng, &mut weights);
        observer(&model);
    }
    Ok(model)
}

/// Train an LDA model by collapsed Gibbs sampling.
pub fn lda_train(
    corpus: &Corpus,
    k: usize,
    alpha: f64,
    beta: f64,
    iterations: usize,
    seed: u64,
) -> Result<LdaModel> {
    lda_train_with(corpus, k, alpha, beta, iterations, seed, |_| {})
}

/// Fold in an unseen document: sample topics for its tokens while holding
/// the trained topic-word counts fixed, then return smoothed proportions.
pub fn lda_infer(
    model: &LdaModel,
    vocabulary: &Vocabulary,
    tokens: &[String],
    iterations: usize,
    seed: u64,
) -> Result<TopicProportions> {
    let ids: Vec<u32> = tokens.iter().filter_map(|t| vocabulary.id(t)).collect();
    if ids.is_empty() {
        return Err(Error::InferenceInput);
    }

    let k = model.k;
    let v_beta = model.vocab_size as f64 * model.beta;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut local = vec![0u32; k];
    let mut z: Vec<u32> = Vec::with_capacity(ids.len());
    for _ in &ids {
        let topic = rng.gen_range(0..k as u32);
        local[topic as usize] += 1;
        z.push(topic);
    }

    let mut weights = vec![0f64; k];
    for _ in 0..iterations {
        for (i, &w) in ids.iter().enumerate() {
            let old = z[i] as usize;
            local[old] -= 1;

            let mut total = 0.0;
            for (topic, weight) in weights.iter_mut().enumerate() {
                let p = (local[topic] as f64 + model.alpha)
                    * (model.topic_word_counts[topic * model.vocab_size + w as usize] as f64
                        + model.beta)
                    / (model.topic_totals[topic] as f64 + v_beta);
                *weight = p;
                total += p;
            }

            let mut u = rng.gen::<f64>() * total;
            let mut new = k - 1;
            for (topic, &p) in weights.iter().enumerate() {
                if u < p {
                    new = topic;
                    break;
                }
                u -= p;
            }
            z[i] = new as u32;
            local[new] += 1;
        }
    }

    let denom = ids.len() as f64 + k as f64 * model.alpha;
    Ok(local
        .iter()
        .map(|&c| (c as f64 + model.alpha) / denom)
        .collect())
}
