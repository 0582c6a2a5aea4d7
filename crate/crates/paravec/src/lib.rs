//! Document embeddings with paragraph vectors.
//!
//! This crate trains paragraph vectors — distributed bag of words
//! (PV-DBOW) by default, with an optional distributed-memory (PV-DM)
//! mode — jointly with skip-gram word vectors over a hierarchical
//! softmax built as a Huffman tree. It also implements the classical
//! baselines those embeddings are usually compared against (TF-IDF bag
//! of words, averaged word embeddings, and LDA trained by collapsed
//! Gibbs sampling with Hellinger distance), a nearest-neighbor and
//! vector-arithmetic query layer, and a triplet benchmark harness that
//! scores every method on category-based document similarity.
//!
//! Typical flow: [`corpus::load_corpus`] → [`pv::init_model`] →
//! [`pv::train`] → query with [`query::VectorIndex`] or benchmark with
//! [`eval::dimension_sweep`]. Models persist via [`model_file`].

pub mod baselines;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod hsoftmax;
pub mod matrix;
pub mod model_file;
pub mod pv;
pub mod query;

pub use error::{Error, Result};
