//! Triplet-based similarity benchmarking: generate (anchor, positive,
//! negative) document triples from category labels, score any
//! document-representation method by the fraction of triplets it orders
//! correctly, and sweep accuracy against embedding dimensionality.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use crate::baselines::{average_word_embeddings, lda_train, tfidf_vectorize};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::pv::{init_model, train, DmCombine, TrainConfig, TrainMode};
use crate::query::cosine;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripletSource {
    Hand,
    Generated,
}

/// Three distinct document ids: the anchor and positive share a category,
/// the negative shares none with the anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triplet {
    pub anchor: usize,
    pub positive: usize,
    pub negative: usize,
    pub source: TripletSource,
}

#[derive(Debug, Clone)]
pub struct TripletSet {
    pub triplets: Vec<Triplet>,
}

impl TripletSet {
    pub fn len(&self) -> usize {
        self.triplets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triplets.is_empty()
    }
}

/// Draw `n` triplets with a seeded generator: anchors uniform over
/// documents with a same-category partner and at least one non-sharing
/// document, positives uniform over same-category partners, negatives
/// uniform over documents sharing no category with the anchor.
pub fn generate_triplets(corpus: &Corpus, n: usize, seed: u64) -> Result<TripletSet> {
    let mut by_category: HashMap<&str, Vec<usize>> = HashMap::new();
    for doc in &corpus.documents {
        if let Some(cat) = &doc.category {
            by_category.entry(cat).or_default().push(doc.id);
        }
    }

    // per category: the documents that do NOT carry it (candidates for
    // the negative)
    let total = corpus.len();
    let mut anchors = Vec::new();
    let mut negatives_for: HashMap<&str, Vec<usize>> = HashMap::new();
    for (&cat, members) in &by_category {
        if members.len() < 2 {
            continue;
        }
        let outside: Vec<usize> = (0..total)
            .filter(|id| corpus.documents[*id].category.as_deref() != Some(cat))
            .collect();
        if outside.is_empty() {
            continue;
        }
        anchors.extend(members.iter().copied());
        negatives_for.insert(cat, outside);
    }
    if anchors.is_empty() {
        return Err(Error::InsufficientCategories);
    }
    anchors.sort_unstable();

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut triplets = Vec::with_capacity(n);
    for _ in 0..n {
        let anchor = anchors[rng.gen_range(0..anchors.len())];
        let cat = corpus.documents[anchor].category.as_deref().unwrap();
        let members = &by_category[cat];
        let positive = loop {
            let p = members[rng.gen_range(0..members.len())];
            if p != anchor {
                break p;
            }
        };
        let outside = &negatives_for[cat];
        let negative = outside[rng.gen_range(0..outside.len())];
        triplets.push(Triplet {
            anchor,
            positive,
            negative,
            source: TripletSource::Generated,
        });
    }
    Ok(TripletSet { triplets })
}

/// Fraction of triplets where the anchor is more similar to the positive
/// than to the negative. Exact ties count as failures.
pub fn triplet_accuracy<F>(mut sim: F, triplets: &TripletSet) -> Result<f64>
where
    F: FnMut(usize, usize) -> Result<f64>,
{
    if triplets.is_empty() {
        return Err(Error::EvaluationInput("no triplets to evaluate".into()));
    }
    let mut correct = 0usize;
    for t in &triplets.triplets {
        let pos = sim(t.anchor, t.positive)?;
        let neg = sim(t.anchor, t.negative)?;
        if pos > neg {
            correct += 1;
        }
    }
    Ok(correct as f64 / triplets.len() as f64)
}

/// Read a triplet file: one `anchor<TAB>positive<TAB>negative` line of
/// document titles per line.
pub fn read_triplet_file(path: &Path, corpus: &Corpus) -> Result<TripletSet> {
    let by_title: HashMap<&str, usize> = corpus
        .documents
        .iter()
        .map(|d| (d.title.as_str(), d.id))
        .collect();
    let file = File::open(path)?;
    let mut triplets = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: i + 1,
                message: "expected 3 TAB-separated titles".into(),
            });
        }
        let mut ids = [0usize; 3];
        for (slot, title) in ids.iter_mut().zip(&fields) {
            *slot = *by_title.get(*title).ok_or_else(|| {
                Error::EvaluationInput(format!("triplet title not in corpus: {title:?}"))
            })?;
        }
        triplets.push(Triplet {
            anchor: ids[0],
            positive: ids[1],
            negative: ids[2],
            source: TripletSource::Hand,
        });
    }
    Ok(TripletSet { triplets })
}

/// The document-representation methods the benchmark compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    PvDbow,
    PvDm,
    Lda,
    AvgWv,
    Bow,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::PvDbow,
        Method::PvDm,
        Method::Lda,
        Method::AvgWv,
        Method::Bow,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::PvDbow => "pv-dbow",
            Method::PvDm => "pv-dm",
            Method::Lda => "lda",
            Method::AvgWv => "avg-wv",
            Method::Bow => "bow",
        }
    }

    /// Bag of words has a single dimensionless cell in a sweep.
    pub fn uses_dims(&self) -> bool {
        !matches!(self, Method::Bow)
    }

    fn ordinal(&self) -> u64 {
        match self {
            Method::PvDbow => 0,
            Method::PvDm => 1,
            Method::Lda => 2,
            Method::AvgWv => 3,
            Method::Bow => 4,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s {
            "pv-dbow" => Ok(Method::PvDbow),
            "pv-dm" => Ok(Method::PvDm),
            "lda" => Ok(Method::Lda),
            "avg-wv" => Ok(Method::AvgWv),
            "bow" => Ok(Method::Bow),
            other => Err(Error::Config(format!(
                "unknown method {other:?} (expected pv-dbow, pv-dm, lda, avg-wv, or bow)"
            ))),
        }
    }
}

/// One `(method, dims, accuracy)` cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub method: Method,
    pub dims: Option<usize>,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// CSV with header `method,dims,accuracy`; accuracy has 4 digits, the
    /// dims field is empty for dimensionless methods.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,dims,accuracy\n");
        for row in &self.rows {
            let dims = row.dims.map(|d| d.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{:.4}\n", row.method, dims, row.accuracy));
        }
        out
    }
}

/// Shared settings for sweep cells. `train.dim` and `train.seed` are
/// overridden per cell.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub train: TrainConfig,
    pub lda_alpha: f64,
    pub lda_beta: f64,
    pub lda_iterations: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            train: TrainConfig::default(),
            lda_alpha: 0.1,
            lda_beta: 0.01,
            lda_iterations: 500,
            seed: 1,
        }
    }
}

/// Seed for a cell, derived from the cell identity rather than its
/// position so that permuting the dims list only permutes result rows.
fn cell_seed(base: u64, method: Method, dims: Option<usize>) -> u64 {
    base.wrapping_add(method.ordinal().wrapping_mul(1_000_003))
        .wrapping_add(dims.unwrap_or(0) as u64)
}

/// Train and score one method at one dimensionality.
pub fn evaluate_method(
    corpus: &Corpus,
    triplets: &TripletSet,
    method: Method,
    dims: Option<usize>,
    config: &SweepConfig,
) -> Result<f64> {
    let seed = cell_seed(config.seed, method, dims);
    let run = || -> Result<f64> {
        match method {
            Method::PvDbow | Method::PvDm => {
                let train_config = TrainConfig {
                    dim: dims.ok_or_else(|| Error::Config("method needs --dims".into()))?,
                    mode: if method == Method::PvDbow {
                        TrainMode::Dbow
                    } else {
                        TrainMode::Dm
                    },
                    dm_combine: config.train.dm_combine,
                    seed,
                    ..config.train.clone()
                };
                let model = train(init_model(corpus, train_config)?, corpus)?;
                let rows: Vec<Vec<f64>> = (0..model.doc_count())
                    .map(|i| {
                        model
                            .paragraph_vectors
                            .row(i)
                            .iter()
                            .map(|&x| x as f64)
                            .collect()
                    })
                    .collect();
                triplet_accuracy(|a, b| cosine(&rows[a], &rows[b]), triplets)
            }
            Method::AvgWv => {
                // joint word training is what produces the word vectors here
                let train_config = TrainConfig {
                    dim: dims.ok_or_else(|| Error::Config("method needs --dims".into()))?,
                    mode: TrainMode::Dbow,
                    dm_combine: DmCombine::Average,
                    joint_words: true,
                    seed,
                    ..config.train.clone()
                };
                let model = train(init_model(corpus, train_config)?, corpus)?;
                let rows: Vec<Option<Vec<f64>>> = corpus
                    .documents
                    .iter()
                    .map(|d| average_word_embeddings(&model, d).ok())
                    .collect();
                triplet_accuracy(
                    |a, b| match (&rows[a], &rows[b]) {
                        (Some(u), Some(v)) => cosine(u, v),
                        _ => Err(Error::EvaluationInput(format!(
                            "no word vectors for document {}",
                            if rows[a].is_none() { a } else { b }
                        ))),
                    },
                    triplets,
                )
            }
            Method::Lda => {
                let k = dims.ok_or_else(|| Error::Config("method needs --dims".into()))?;
                let model = lda_train(
                    corpus,
                    k,
                    config.lda_alpha,
                    config.lda_beta,
                    config.lda_iterations,
                    seed,
                )?;
                let props: Vec<Vec<f64>> = (0..corpus.len())
                    .map(|d| model.proportions(d))
                    .collect::<Result<_>>()?;
                triplet_accuracy(
                    |a, b| crate::baselines::hellinger(&props[a], &props[b]).map(|h| -h),
                    triplets,
                )
            }
            Method::Bow => {
                let vectors = tfidf_vectorize(corpus)?;
                triplet_accuracy(|a, b| vectors[a].cosine(&vectors[b]), triplets)
            }
        }
    };
    run().map_err(|e| Error::SweepCell {
        method: method.name().to_string(),
        dims,
        source: Box::new(e),
    })
}

/// Evaluate every `(method, dims)` cell; bag of words contributes a single
/// dimensionless row regardless of the dims list.
pub fn dimension_sweep(
    corpus: &Corpus,
    triplets: &TripletSet,
    methods: &[Method],
    dims: &[usize],
    config: &SweepConfig,
) -> Result<SweepResult> {
    if dims.is_empty() {
        return Err(Error::Config("dims list may not be empty".into()));
    }
    let mut rows = Vec::new();
    for &method in methods {
        if method.uses_dims() {
            for &d in dims {
                let accuracy = evaluate_method(corpus, triplets, method, Some(d), config)?;
                rows.push(SweepRow {
                    method,
                    dims: Some(d),
                    accuracy,
                });
            }
        } else {
            let accuracy = evaluate_method(corpus, triplets, method, None, config)?;
            rows.push(SweepRow {
                method,
                dims: None,
                accuracy,
            });
        }
    }
    Ok(SweepResult { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{encode_corpus, RawDocument};

    fn raw(title: &str, text: &str, category: Option<&str>) -> RawDocument {
        RawDocument {
            title: title.to_string(),
            text: text.to_string(),
            category: category.map(str::to_string),
        }
    }

    /// Three categories with disjoint word sets, four documents each.
    pub(crate) fn labeled_corpus() -> Corpus {
        let themes = [
            ("stars", "star planet orbit galaxy comet nebula"),
            ("cells", "cell enzyme protein gene membrane nucleus"),
            ("chords", "chord melody rhythm tempo scale harmony"),
        ];
        let mut docs = Vec::new();
        for (cat, words) in themes {
            for i in 0..4 {
                let text = words.split_whitespace().cycle().skip(i).take(12)
                    .collect::<Vec<_>>().join(" ");
                docs.push(raw(&format!("{cat}-{i}"), &text, Some(cat)));
            }
        }
        encode_corpus(&docs, 1).unwrap()
    }

    #[test]
    fn single_category_cannot_generate() {
        let docs = vec![
            raw("a", "x y", Some("only")),
            raw("b", "x z", Some("only")),
        ];
        let corpus = encode_corpus(&docs, 1).unwrap();
        assert!(matches!(
            generate_triplets(&corpus, 10, 1),
            Err(Error::InsufficientCategories)
        ));
    }

    #[test]
    fn generated_triplets_respect_category_constraints() {
        let corpus = labeled_corpus();
        let set = generate_triplets(&corpus, 200, 5).unwrap();
        assert_eq!(set.len(), 200);
        for t in &set.triplets {
            assert_ne!(t.anchor, t.positive);
            assert_ne!(t.anchor, t.negative);
            assert_ne!(t.positive, t.negative);
            let cat = |id: usize| corpus.documents[id].category.clone();
            assert_eq!(cat(t.anchor), cat(t.positive));
            assert_ne!(cat(t.anchor), cat(t.negative));
            assert_eq!(t.source, TripletSource::Generated);
        }
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let corpus = labeled_corpus();
        let a = generate_triplets(&corpus, 50, 9).unwrap();
        let b = generate_triplets(&corpus, 50, 9).unwrap();
        assert_eq!(a.triplets, b.triplets);
        let c = generate_triplets(&corpus, 50, 10).unwrap();
        assert_ne!(a.triplets, c.triplets);
    }

    #[test]
    fn oracle_similarity_scores_one_and_zero() {
        let corpus = labeled_corpus();
        let set = generate_triplets(&corpus, 100, 2).unwrap();
        let same_cat = |a: usize, b: usize| {
            corpus.documents[a].category == corpus.documents[b].category
        };
        let perfect = triplet_accuracy(
            |a, b| Ok(if same_cat(a, b) { 1.0 } else { 0.0 }),
            &set,
        )
        .unwrap();
        assert_eq!(perfect, 1.0);
        let inverted = triplet_accuracy(
            |a, b| Ok(if same_cat(a, b) { 0.0 } else { 1.0 }),
            &set,
        )
        .unwrap();
        assert_eq!(inverted, 0.0);
    }

    #[test]
    fn ties_count_as_failures() {
        let corpus = labeled_corpus();
        let set = generate_triplets(&corpus, 20, 3).unwrap();
        let acc = triplet_accuracy(|_, _| Ok(0.5), &set).unwrap();
        assert_eq!(acc, 0.0);
    }

    #[test]
    fn accuracy_is_invariant_under_monotone_transforms() {
        use rand::prelude::*;
        use rand_chacha::ChaCha12Rng;
        let corpus = labeled_corpus();
        let set = generate_triplets(&corpus, 150, 4).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let vectors: Vec<Vec<f64>> = (0..corpus.len())
            .map(|_| (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let raw = triplet_accuracy(|a, b| cosine(&vectors[a], &vectors[b]), &set).unwrap();
        let squashed = triplet_accuracy(
            |a, b| cosine(&vectors[a], &vectors[b]).map(|c| (3.0 * c).exp()),
            &set,
        )
        .unwrap();
        assert_eq!(raw, squashed);
    }

    #[test]
    fn accuracy_is_invariant_under_global_scaling() {
        use rand::prelude::*;
        use rand_chacha::ChaCha12Rng;
        let corpus = labeled_corpus();
        let set = generate_triplets(&corpus, 150, 6).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let vectors: Vec<Vec<f64>> = (0..corpus.len())
            .map(|_| (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        // power-of-two scaling keeps every float operation exact
        let scaled: Vec<Vec<f64>> = vectors
            .iter()
            .map(|v| v.iter().map(|x| 4.0 * x).collect())
            .collect();
        let pattern = |vs: &[Vec<f64>]| -> Vec<bool> {
            set.triplets
                .iter()
                .map(|t| {
                    cosine(&vs[t.anchor], &vs[t.positive]).unwrap()
                        > cosine(&vs[t.anchor], &vs[t.negative]).unwrap()
                })
                .collect()
        };
        assert_eq!(pattern(&vectors), pattern(&scaled));
    }

    #[test]
    fn missing_vector_is_an_evaluation_error() {
        let corpus = labeled_corpus();
        let set = generate_triplets(&corpus, 5, 1).unwrap();
        let result = triplet_accuracy(
            |a, _| {
                if a == set.triplets[0].anchor {
                    Err(Error::EvaluationInput("no vector".into()))
                } else {
                    Ok(0.0)
                }
            },
            &set,
        );
        assert!(matches!(result, Err(Error::EvaluationInput(_))));
    }

    #[test]
    fn triplet_file_round_trip_and_missing_titles() {
        let corpus = labeled_corpus();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("triplets.tsv");
        std::fs::write(&path, "stars-0\tstars-1\tcells-0\n").unwrap();
        let set = read_triplet_file(&path, &corpus).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.triplets[0].source, TripletSource::Hand);

        std::fs::write(&path, "stars-0\tnope\tcells-0\n").unwrap();
        match read_triplet_file(&path, &corpus) {
            Err(Error::EvaluationInput(msg)) => assert!(msg.contains("nope")),
            other => panic!("expected evaluation error, got {other:?}"),
        }
    }

    fn quick_sweep_config() -> SweepConfig {
        SweepConfig {
            train: TrainConfig {
                epochs: 3,
                ..TrainConfig::default()
            },
            lda_iterations: 30,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn bow_has_a_single_dimensionless_row() {
        let corpus = labeled_corpus();
        let set = generate_triplets(&corpus, 30, 1).unwrap();
        let result = dimension_sweep(
            &corpus,
            &set,
            &[Method::Bow],
            &[8, 16],
            &quick_sweep_config(),
        )
        .unwrap();
        assert_eq!(result.rows.len(), 1);
        assert_eq!(result.rows[0].dims, None);
    }

    #[test]
    fn permuting_dims_only_permutes_rows() {
        let corpus = labeled_corpus();
        let set = generate_triplets(&corpus, 30, 1).unwrap();
        let config = quick_sweep_config();
        let a = dimension_sweep(&corpus, &set, &[Method::PvDbow], &[4, 8], &config).unwrap();
        let b = dimension_sweep(&corpus, &set, &[Method::PvDbow], &[8, 4], &config).unwrap();
        let mut a_rows = a.rows.clone();
        let mut b_rows = b.rows.clone();
        a_rows.sort_by_key(|r| r.dims);
        b_rows.sort_by_key(|r| r.dims);
        assert_eq!(a_rows, b_rows);
    }

    #[test]
    fn failing_cells_are_tagged() {
        let corpus = labeled_corpus();
        let set = generate_triplets(&corpus, 10, 1).unwrap();
        let err = dimension_sweep(
            &corpus,
            &set,
            &[Method::Lda],
            &[0], // zero topics is a config error inside the cell
            &quick_sweep_config(),
        )
        .unwrap_err();
        match err {
            Error::SweepCell { method, dims, .. } => {
                assert_eq!(method, "lda");
                assert_eq!(dims, Some(0));
            }
            other => panic!("expected tagged cell error, got {other:?}"),
        }
    }

    #[test]
    fn csv_format_matches_contract() {
        let result = SweepResult {
            rows: vec![
                SweepRow {
                    method: Method::PvDbow,
                    dims: Some(100),
                    accuracy: 0.93004,
                },
                SweepRow {
                    method: Method::Bow,
                    dims: None,
                    accuracy: 0.5,
                },
            ],
        };
        assert_eq!(
            result.to_csv(),
            "method,dims,accuracy\npv-dbow,100,0.9300\nbow,,0.5000\n"
        );
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::from_str(m.name()).unwrap(), m);
        }
        assert!(Method::from_str("svd").is_err());
    }
}
