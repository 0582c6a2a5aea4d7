//! Paragraph vector training (PV-DBOW and PV-DM) with jointly trained
//! skip-gram word vectors, and frozen-parameter inference for unseen
//! documents.
//!
//! Each token position yields one hierarchical-softmax SGD step with the
//! paragraph vector as input (DBOW) or the paragraph vector combined with
//! context word vectors (DM). With `joint_words` on, DBOW additionally runs
//! skip-gram steps where every context word predicts the center word
//! through the same tree, sharing the classifier parameters.
//!
//! Multi-worker training is hogwild style: workers partition documents and
//! update shared parameters through relaxed atomics without locking. Lost
//! updates are tolerated; bit-reproducibility is guaranteed only for
//! `workers = 1`.

use std::ops::Range;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use crate::corpus::{Corpus, Document, Vocabulary};
use crate::error::{Error, Result};
use crate::hsoftmax::{sigmoid, HuffmanTree};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainMode {
    Dbow,
    Dm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmCombine {
    Average,
    Concatenate,
}

/// Hyperparameters for paragraph-vector training.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub dim: usize,
    pub epochs: usize,
    pub initial_lr: f32,
    pub min_lr: f32,
    pub window: usize,
    pub joint_words: bool,
    pub mode: TrainMode,
    pub dm_combine: DmCombine,
    pub seed: u64,
    pub workers: usize,
    /// Frequency-subsampling threshold; 0 disables subsampling.
    pub subsample_t: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 100,
            epochs: 10,
            initial_lr: 0.025,
            min_lr: 1e-4,
            window: 5,
            joint_words: true,
            mode: TrainMode::Dbow,
            dm_combine: DmCombine::Average,
            seed: 1,
            workers: 1,
            subsample_t: 0.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("dim must be >= 1".into()));
        }
        if self.window == 0 {
            return Err(Error::Config("window must be >= 1".into()));
        }
        if !self.initial_lr.is_finite() || self.initial_lr <= 0.0 {
            return Err(Error::Config("initial_lr must be > 0".into()));
        }
        if !self.min_lr.is_finite() || self.min_lr < 0.0 || self.min_lr > self.initial_lr {
            return Err(Error::Config("require 0 <= min_lr <= initial_lr".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        if self.subsample_t < 0.0 {
            return Err(Error::Config("subsample_t must be >= 0".into()));
        }
        Ok(())
    }

    /// Input width of the classifier: `dim` except in DM-concatenate mode,
    /// where the paragraph vector and `2 * window` context slots are laid
    /// out side by side.
    pub fn node_dim(&self) -> usize {
        match (self.mode, self.dm_combine) {
            (TrainMode::Dm, DmCombine::Concatenate) => self.dim * (1 + 2 * self.window),
            _ => self.dim,
        }
    }
}

/// A trained (or initialized) embedding model: word vectors, paragraph
/// vectors, and the hierarchical-softmax classifier over the vocabulary.
#[derive(Debug, Clone)]
pub struct EmbeddingModel {
    pub word_vectors: Matrix<f32>,
    pub paragraph_vectors: Matrix<f32>,
    pub node_params: Matrix<f32>,
    pub tree: HuffmanTree,
    pub vocabulary: Vocabulary,
    pub doc_titles: Vec<String>,
    pub config: TrainConfig,
}

impl EmbeddingModel {
    pub fn dim(&self) -> usize {
        self.config.dim
    }

    pub fn doc_count(&self) -> usize {
        self.paragraph_vectors.rows()
    }

    pub fn doc_vector(&self, id: usize) -> Result<&[f32]> {
        if id >= self.paragraph_vectors.rows() {
            return Err(Error::DocOutOfRange {
                id,
                len: self.paragraph_vectors.rows(),
            });
        }
        Ok(self.paragraph_vectors.row(id))
    }

    pub fn word_vector(&self, word: &str) -> Result<&[f32]> {
        let id = self
            .vocabulary
            .id(word)
            .ok_or_else(|| Error::VocabularyMiss { word: word.into() })?;
        Ok(self.word_vectors.row(id as usize))
    }

    pub fn doc_id_by_title(&self, title: &str) -> Option<usize> {
        self.doc_titles.iter().position(|t| t == title)
    }
}

/// Build a model over a corpus: word and paragraph vectors drawn uniformly
/// from `[-0.5/d, 0.5/d]` under the config seed, classifier weights zero,
/// Huffman tree from the vocabulary counts.
pub fn init_model(corpus: &Corpus, config: TrainConfig) -> Result<EmbeddingModel> {
    config.validate()?;
    let v = corpus.vocabulary.len();
    if v < 2 {
        return Err(Error::DegenerateVocabulary { size: v });
    }
    if !corpus.documents.iter().any(|d| d.is_trainable()) {
        return Err(Error::EmptyCorpus);
    }
    let tree = HuffmanTree::from_counts(corpus.vocabulary.counts())?;

    let d = config.dim;
    let bound = 0.5 / d as f32;
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut word_vectors = Matrix::<f32>::zeros(v, d);
    for r in 0..v {
        for x in word_vectors.row_mut(r) {
            *x = rng.gen_range(-bound..bound);
        }
    }
    let n = corpus.len();
    let mut paragraph_vectors = Matrix::<f32>::zeros(n, d);
    for r in 0..n {
        for x in paragraph_vectors.row_mut(r) {
            *x = rng.gen_range(-bound..bound);
        }
    }
    let node_params = Matrix::<f32>::zeros(v - 1, config.node_dim());

    Ok(EmbeddingModel {
        word_vectors,
        paragraph_vectors,
        node_params,
        tree,
        vocabulary: corpus.vocabulary.clone(),
        doc_titles: corpus.titles(),
        config,
    })
}

// ---------------------------------------------------------------------------
// Shared parameter storage for hogwild updates.

#[repr(transparent)]
struct SharedF32(AtomicU32);

impl SharedF32 {
    fn new(v: f32) -> Self {
        SharedF32(AtomicU32::new(v.to_bits()))
    }

    #[inline]
    fn get(&self) -> f32 {
        f32::from_bits(self.0.load(Ordering::Relaxed))
    }

    #[inline]
    fn set(&self, v: f32) {
        self.0.store(v.to_bits(), Ordering::Relaxed);
    }

    #[inline]
    fn add(&self, v: f32) {
        self.set(self.get() + v);
    }
}

struct SharedMatrix {
    cols: usize,
    cells: Vec<SharedF32>,
}

impl SharedMatrix {
    fn from_matrix(m: &Matrix<f32>) -> Self {
        SharedMatrix {
            cols: m.cols(),
            cells: m.as_slice().iter().map(|&x| SharedF32::new(x)).collect(),
        }
    }

    fn to_matrix(&self, rows: usize) -> Matrix<f32> {
        Matrix::from_vec(
            rows,
            self.cols,
            self.cells.iter().map(SharedF32::get).collect(),
        )
    }

    #[inline]
    fn row(&self, r: usize) -> &[SharedF32] {
        &self.cells[r * self.cols..(r + 1) * self.cols]
    }
}

/// Linear decay from `initial` to `min` over `total` scheduled updates.
struct LrSchedule {
    initial: f64,
    min: f64,
    total: u64,
}

impl LrSchedule {
    fn new(config: &TrainConfig, total: u64) -> Self {
        LrSchedule {
            initial: config.initial_lr as f64,
            min: config.min_lr as f64,
            total,
        }
    }

    #[inline]
    fn at(&self, slot: u64) -> f32 {
        if self.total == 0 {
            return self.initial as f32;
        }
        let frac = (slot as f64 / self.total as f64).min(1.0);
        (self.initial - (self.initial - self.min) * frac).max(self.min) as f32
    }
}

/// Number of context positions in the window around `pos` (excluding
/// `pos` itself) for a document of length `len`.
#[inline]
fn context_count(pos: usize, len: usize, window: usize) -> usize {
    let lo = pos.saturating_sub(window);
    let hi = (pos + window).min(len - 1);
    hi - lo
}

fn scheduled_updates(corpus: &Corpus, config: &TrainConfig) -> u64 {
    let per_epoch: u64 = corpus
        .documents
        .iter()
        .map(|doc| {
            let len = doc.tokens.len();
            let mut slots = len as u64;
            if config.mode == TrainMode::Dbow && config.joint_words {
                slots += (0..len)
                    .map(|p| context_count(p, len, config.window) as u64)
                    .sum::<u64>();
            }
            slots
        })
        .sum();
    per_epoch * config.epochs as u64
}

/// Per-word keep probability for frequency subsampling, or `None` when
/// subsampling is off.
fn subsample_table(vocabulary: &Vocabulary, total_tokens: usize, t: f64) -> Option<Vec<f64>> {
    if t <= 0.0 || total_tokens == 0 {
        return None;
    }
    Some(
        vocabulary
            .counts()
            .iter()
            .map(|&c| {
                let f = c as f64 / total_tokens as f64;
                if f > t {
                    (t / f).sqrt()
                } else {
                    1.0
                }
            })
            .collect(),
    )
}

/// One fused hierarchical-softmax SGD step: predict `target` from the
/// shared `input` row, updating the input row and the classifier rows on
/// the target's path. Equivalent to a step of plain SGD on `hsoftmax::loss_grad`.
fn hs_step(
    input: &[SharedF32],
    target: usize,
    nodes: &SharedMatrix,
    tree: &HuffmanTree,
    lr: f32,
    delta: &mut [f32],
) {
    delta.fill(0.0);
    for (&bit, &node) in tree.code(target).iter().zip(tree.path(target)) {
        let row = nodes.row(node as usize);
        let mut x = 0f32;
        for (a, b) in input.iter().zip(row) {
            x += a.get() * b.get();
        }
        let s = sigmoid(x);
        let t = if bit == 0 { 1.0 } else { 0.0 };
        let g = (t - s) * lr;
        for (d, b) in delta.iter_mut().zip(row) {
            *d += g * b.get();
        }
        for (b, a) in row.iter().zip(input.iter()) {
            b.add(g * a.get());
        }
    }
    for (a, d) in input.iter().zip(delta.iter()) {
        a.add(*d);
    }
}

/// DM variant: the combined input lives in a private buffer; classifier
/// rows are updated in place and the input delta is returned in `delta`
/// for the caller to distribute to the contributors.
fn hs_step_composite(
    input: &[f32],
    target: usize,
    nodes: &SharedMatrix,
    tree: &HuffmanTree,
    lr: f32,
    delta: &mut [f32],
) {
    delta.fill(0.0);
    for (&bit, &node) in tree.code(target).iter().zip(tree.path(target)) {
        let row = nodes.row(node as usize);
        let mut x = 0f32;
        for (a, b) in input.iter().zip(row) {
            x += a * b.get();
        }
        let s = sigmoid(x);
        let t = if bit == 0 { 1.0 } else { 0.0 };
        let g = (t - s) * lr;
        for (d, b) in delta.iter_mut().zip(row) {
            *d += g * b.get();
        }
        for (b, &a) in row.iter().zip(input.iter()) {
            b.add(g * a);
        }
    }
}

/// Frozen-parameter step used at inference: only the input vector moves.
fn hs_step_frozen(
    input: &mut [f32],
    target: usize,
    params: &Matrix<f32>,
    tree: &HuffmanTree,
    lr: f32,
    delta: &mut [f32],
) {
    delta.fill(0.0);
    for (&bit, &node) in tree.code(target).iter().zip(tree.path(target)) {
        let row = params.row(node as usize);
        let mut x = 0f32;
        for (a, b) in input.iter().zip(row) {
            x += a * b;
        }
        let s = sigmoid(x);
        let t = if bit == 0 { 1.0 } else { 0.0 };
        let g = (t - s) * lr;
        for (d, &b) in delta.iter_mut().zip(row) {
            *d += g * b;
        }
    }
    for (a, d) in input.iter_mut().zip(delta.iter()) {
        *a += *d;
    }
}

struct SharedParams<'a> {
    wv: SharedMatrix,
    pv: SharedMatrix,
    nodes: SharedMatrix,
    tree: &'a HuffmanTree,
    schedule: LrSchedule,
    slot: AtomicU64,
    keep_prob: Option<Vec<f64>>,
}

fn worker_ranges(n: usize, workers: usize) -> Vec<Range<usize>> {
    (0..workers)
        .map(|w| (w * n / workers)..((w + 1) * n / workers))
        .collect()
}

/// Apply subsampling to a document, writing surviving tokens to `out`.
fn effective_tokens<'a>(
    doc: &'a Document,
    keep_prob: &Option<Vec<f64>>,
    rng: &mut ChaCha12Rng,
    out: &'a mut Vec<u32>,
) -> &'a [u32] {
    match keep_prob {
        None => &doc.tokens,
        Some(table) => {
            out.clear();
            for &t in &doc.tokens {
                let p = table[t as usize];
                if p >= 1.0 || rng.gen::<f64>() < p {
                    out.push(t);
                }
            }
            out
        }
    }
}

#[allow(clippy::needless_range_loop)] // window positions skip the center index
fn dbow_worker(
    corpus: &Corpus,
    config: &TrainConfig,
    shared: &SharedParams<'_>,
    range: Range<usize>,
    worker_id: usize,
) {
    let mut delta = vec![0f32; config.dim];
    let mut buf = Vec::new();
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed ^ ((worker_id as u64 + 1) << 32));
    let window = config.window;

    for _epoch in 0..config.epochs {
        for di in range.clone() {
            let doc = &corpus.documents[di];
            let tokens = effective_tokens(doc, &shared.keep_prob, &mut rng, &mut buf);
            let len = tokens.len();
            let pv_row = shared.pv.row(di);
            for pos in 0..len {
                let target = tokens[pos] as usize;
                let ctx = if config.joint_words {
                    context_count(pos, len, window)
                } else {
                    0
                };
                let base = shared.slot.fetch_add(1 + ctx as u64, Ordering::Relaxed);
                hs_step(
                    pv_row,
                    target,
                    &shared.nodes,
                    shared.tree,
                    shared.schedule.at(base),
                    &mut delta,
                );
                if config.joint_words {
                    let lo = pos.saturating_sub(window);
                    let hi = (pos + window).min(len - 1);
                    let mut slot = base + 1;
                    for c in lo..=hi {
                        if c == pos {
                            continue;
                        }
                        hs_step(
                            shared.wv.row(tokens[c] as usize),
                            target,
                            &shared.nodes,
                            shared.tree,
                            shared.schedule.at(slot),
                            &mut delta,
                        );
                        slot += 1;
                    }
                }
            }
        }
    }
}

/// Write the DM input for one position into `input`: the mean of the
/// paragraph vector and context word vectors, or their concatenation with
/// absent slots zero-filled (layout: paragraph vector, then context words
/// by offset `-window..=window` excluding 0).
#[allow(clippy::needless_range_loop)]
fn build_dm_input(
    pv_row: &[SharedF32],
    wv: &SharedMatrix,
    tokens: &[u32],
    pos: usize,
    config: &TrainConfig,
    input: &mut [f32],
) -> usize {
    let d = config.dim;
    match config.dm_combine {
        DmCombine::Average => {
            for (x, p) in input.iter_mut().zip(pv_row) {
                *x = p.get();
            }
            let lo = pos.saturating_sub(config.window);
            let hi = (pos + config.window).min(tokens.len() - 1);
            let mut n = 1usize;
            for c in lo..=hi {
                if c == pos {
                    continue;
                }
                let row = wv.row(tokens[c] as usize);
                for (x, w) in input.iter_mut().zip(row) {
                    *x += w.get();
                }
                n += 1;
            }
            let inv = 1.0 / n as f32;
            for x in input.iter_mut() {
                *x *= inv;
            }
            n
        }
        DmCombine::Concatenate => {
            input.fill(0.0);
            for (x, p) in input[..d].iter_mut().zip(pv_row) {
                *x = p.get();
            }
            let mut n = 1usize;
            let w = config.window as isize;
            for (slot, offset) in (-w..=w).filter(|&o| o != 0).enumerate() {
                let c = pos as isize + offset;
                if c < 0 || c as usize >= tokens.len() {
                    continue;
                }
                let seg = &mut input[(slot + 1) * d..(slot + 2) * d];
                let row = wv.row(tokens[c as usize] as usize);
                for (x, v) in seg.iter_mut().zip(row) {
                    *x = v.get();
                }
                n += 1;
            }
            n
        }
    }
}

#[allow(clippy::needless_range_loop)] // window positions skip the center index
fn dm_worker(
    corpus: &Corpus,
    config: &TrainConfig,
    shared: &SharedParams<'_>,
    range: Range<usize>,
    worker_id: usize,
) {
    let node_dim = config.node_dim();
    let d = config.dim;
    let mut input = vec![0f32; node_dim];
    let mut delta = vec![0f32; node_dim];
    let mut buf = Vec::new();
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed ^ ((worker_id as u64 + 1) << 32));
    let w = config.window as isize;

    for _epoch in 0..config.epochs {
        for di in range.clone() {
            let doc = &corpus.documents[di];
            let tokens = effective_tokens(doc, &shared.keep_prob, &mut rng, &mut buf);
            let len = tokens.len();
            let pv_row = shared.pv.row(di);
            for pos in 0..len {
                let target = tokens[pos] as usize;
                let slot = shared.slot.fetch_add(1, Ordering::Relaxed);
                let lr = shared.schedule.at(slot);
                let contributors =
                    build_dm_input(pv_row, &shared.wv, tokens, pos, config, &mut input);
                hs_step_composite(&input, target, &shared.nodes, shared.tree, lr, &mut delta);

                match config.dm_combine {
                    DmCombine::Average => {
                        let scale = 1.0 / contributors as f32;
                        for (p, dv) in pv_row.iter().zip(delta.iter()) {
                            p.add(dv * scale);
                        }
                        if config.joint_words {
                            let lo = pos.saturating_sub(config.window);
                            let hi = (pos + config.window).min(len - 1);
                            for c in lo..=hi {
                                if c == pos {
                                    continue;
                                }
                                let row = shared.wv.row(tokens[c] as usize);
                                for (v, dv) in row.iter().zip(delta.iter()) {
                                    v.add(dv * scale);
                                }
                            }
                        }
                    }
                    DmCombine::Concatenate => {
                        for (p, dv) in pv_row.iter().zip(delta[..d].iter()) {
                            p.add(*dv);
                        }
                        if config.joint_words {
                            for (slot_idx, offset) in (-w..=w).filter(|&o| o != 0).enumerate() {
                                let c = pos as isize + offset;
                                if c < 0 || c as usize >= len {
                                    continue;
                                }
                                let row = shared.wv.row(tokens[c as usize] as usize);
                                let seg = &delta[(slot_idx + 1) * d..(slot_idx + 2) * d];
                                for (v, dv) in row.iter().zip(seg) {
                                    v.add(*dv);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

fn check_model_matches_corpus(model: &EmbeddingModel, corpus: &Corpus) -> Result<()> {
    if model.paragraph_vectors.rows() != corpus.len()
        || model.word_vectors.rows() != corpus.vocabulary.len()
    {
        return Err(Error::Config(
            "model was not initialized over this corpus".into(),
        ));
    }
    Ok(())
}

fn run_training(model: EmbeddingModel, corpus: &Corpus) -> Result<EmbeddingModel> {
    check_model_matches_corpus(&model, corpus)?;
    let config = model.config.clone();
    if config.epochs == 0 {
        return Ok(model);
    }

    let shared = SharedParams {
        wv: SharedMatrix::from_matrix(&model.word_vectors),
        pv: SharedMatrix::from_matrix(&model.paragraph_vectors),
        nodes: SharedMatrix::from_matrix(&model.node_params),
        tree: &model.tree,
        schedule: LrSchedule::new(&config, scheduled_updates(corpus, &config)),
        slot: AtomicU64::new(0),
        keep_prob: subsample_table(&corpus.vocabulary, corpus.total_tokens, config.subsample_t),
    };

    let worker = |range: Range<usize>, id: usize| match config.mode {
        TrainMode::Dbow => dbow_worker(corpus, &config, &shared, range, id),
        TrainMode::Dm => dm_worker(corpus, &config, &shared, range, id),
    };

    if config.workers == 1 {
        worker(0..corpus.len(), 0);
    } else {
        let ranges = worker_ranges(corpus.len(), config.workers);
        std::thread::scope(|s| {
            for (id, range) in ranges.into_iter().enumerate() {
                let worker = &worker;
                s.spawn(move || worker(range, id));
            }
        });
    }

    Ok(EmbeddingModel {
        word_vectors: shared.wv.to_matrix(model.word_vectors.rows()),
        paragraph_vectors: shared.pv.to_matrix(model.paragraph_vectors.rows()),
        node_params: shared.nodes.to_matrix(model.node_params.rows()),
        ..model
    })
}

/// Train a PV-DBOW model: every token is predicted from its paragraph
/// vector once per epoch, plus skip-gram word steps when `joint_words` is on.
pub fn train_pvdbow(model: EmbeddingModel, corpus: &Corpus) -> Result<EmbeddingModel> {
    if model.config.mode != TrainMode::Dbow {
        return Err(Error::Config("model mode is not DBOW".into()));
    }
    run_training(model, corpus)
}

/// Train a PV-DM model: each center word is predicted from the paragraph
/// vector combined with its context word vectors.
pub fn train_pvdm(model: EmbeddingModel, corpus: &Corpus) -> Result<EmbeddingModel> {
    if model.config.mode != TrainMode::Dm {
        return Err(Error::Config("model mode is not DM".into()));
    }
    run_training(model, corpus)
}

/// Train according to the model's configured mode.
pub fn train(model: EmbeddingModel, corpus: &Corpus) -> Result<EmbeddingModel> {
    match model.config.mode {
        TrainMode::Dbow => train_pvdbow(model, corpus),
        TrainMode::Dm => train_pvdm(model, corpus),
    }
}

/// Infer a vector for unseen text: a fresh, seeded paragraph vector is
/// tuned by SGD against the frozen model (word vectors and classifier
/// parameters unchanged). Mirrors the model's training architecture except
/// that only the new vector moves.
#[allow(clippy::needless_range_loop)] // window positions skip the center index
pub fn infer_vector(
    model: &EmbeddingModel,
    tokens: &[String],
    infer_epochs: usize,
    seed: u64,
) -> Result<Vec<f32>> {
    let ids: Vec<u32> = tokens
        .iter()
        .filter_map(|t| model.vocabulary.id(t))
        .collect();
    if ids.is_empty() {
        return Err(Error::InferenceInput);
    }

    let d = model.config.dim;
    let bound = 0.5 / d as f32;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut vector: Vec<f32> = (0..d).map(|_| rng.gen_range(-bound..bound)).collect();

    let schedule = LrSchedule::new(&model.config, (infer_epochs * ids.len()) as u64);
    let mut slot = 0u64;

    match model.config.mode {
        TrainMode::Dbow => {
            let mut delta = vec![0f32; d];
            for _ in 0..infer_epochs {
                for &t in &ids {
                    hs_step_frozen(
                        &mut vector,
                        t as usize,
                        &model.node_params,
                        &model.tree,
                        schedule.at(slot),
                        &mut delta,
                    );
                    slot += 1;
                }
            }
        }
        TrainMode::Dm => {
            // frozen context word vectors join the input; only the new
            // vector receives its share of the gradient
            let node_dim = model.config.node_dim();
            let mut input = vec![0f32; node_dim];
            let mut delta = vec![0f32; node_dim];
            let window = model.config.window;
            for _ in 0..infer_epochs {
                for pos in 0..ids.len() {
                    let lr = schedule.at(slot);
                    slot += 1;
                    let lo = pos.saturating_sub(window);
                    let hi = (pos + window).min(ids.len() - 1);
                    let contributors = hi - lo + 1; // context plus the vector itself
                    match model.config.dm_combine {
                        DmCombine::Average => {
                            input.copy_from_slice(&vector);
                            for c in lo..=hi {
                                if c == pos {
                                    continue;
                                }
                                let row = model.word_vectors.row(ids[c] as usize);
                                for (x, w) in input.iter_mut().zip(row) {
                                    *x += w;
                                }
                            }
                            let inv = 1.0 / contributors as f32;
                            for x in input.iter_mut() {
                                *x *= inv;
                            }
                        }
                        DmCombine::Concatenate => {
                            input.fill(0.0);
                            input[..d].copy_from_slice(&vector);
                            let w = window as isize;
                            for (slot_idx, offset) in (-w..=w).filter(|&o| o != 0).enumerate() {
                                let c = pos as isize + offset;
                                if c < 0 || c as usize >= ids.len() {
                                    continue;
                                }
                                let row = model.word_vectors.row(ids[c as usize] as usize);
                                input[(slot_idx + 1) * d..(slot_idx + 2) * d]
                                    .copy_from_slice(row);
                            }
                        }
                    }

                    delta.fill(0.0);
                    for (&bit, &node) in model
                        .tree
                        .code(ids[pos] as usize)
                        .iter()
                        .zip(model.tree.path(ids[pos] as usize))
                    {
                        let row = model.node_params.row(node as usize);
                        let mut x = 0f32;
                        for (a, b) in input.iter().zip(row) {
                            x += a * b;
                        }
                        let s = sigmoid(x);
                        let t = if bit == 0 { 1.0 } else { 0.0 };
                        let g = (t - s) * lr;
                        for (dv, &b) in delta.iter_mut().zip(row) {
                            *dv += g * b;
                        }
                    }
                    match model.config.dm_combine {
                        DmCombine::Average => {
                            let scale = 1.0 / contributors as f32;
                            for (v, dv) in vector.iter_mut().zip(delta.iter()) {
                                *v += dv * scale;
                            }
                        }
                        DmCombine::Concatenate => {
                            for (v, dv) in vector.iter_mut().zip(delta[..d].iter()) {
                                *v += *dv;
                            }
                        }
                    }
                }
            }
        }
    }

    Ok(vector)
}
