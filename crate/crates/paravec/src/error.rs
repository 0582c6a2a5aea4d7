use thiserror::Error;

/// Errors shared across the corpus, training, baseline, and query layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("no word survives the frequency cutoff (min_count = {min_count})")]
    EmptyVocabulary { min_count: usize },

    #[error("vocabulary has {size} word(s); at least 2 are required")]
    DegenerateVocabulary { size: usize },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("cosine similarity is undefined for a zero vector")]
    ZeroVector,

    #[error("inference input has no in-vocabulary tokens")]
    InferenceInput,

    #[error("word not in vocabulary: {word:?}")]
    VocabularyMiss { word: String },

    #[error("document id {id} out of range (corpus has {len} documents)")]
    DocOutOfRange { id: usize, len: usize },

    #[error("category structure cannot produce triplets: need a category with >= 2 documents and a document outside it")]
    InsufficientCategories,

    #[error("evaluation input error: {0}")]
    EvaluationInput(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("sweep cell {method} (dims {dims:?}) failed: {source}")]
    SweepCell {
        method: String,
        dims: Option<usize>,
        #[source]
        source: Box<Error>,
    },

    #[error("model file error: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
