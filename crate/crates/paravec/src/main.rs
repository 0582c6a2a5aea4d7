//! Command-line interface: train models, query neighbors and analogies,
//! run triplet benchmarks, and export vectors.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use paravec::corpus::{load_corpus, tokenize, Corpus};
use paravec::eval::{
    dimension_sweep, evaluate_method, generate_triplets, read_triplet_file, triplet_accuracy,
    Method, SweepConfig, TripletSet,
};
use paravec::model_file::{load_model, save_model};
use paravec::pv::{
    infer_vector, init_model, train, DmCombine, EmbeddingModel, TrainConfig, TrainMode,
};
use paravec::query::{
    analogy_query, cosine, format_neighbors, nearest_neighbors, VectorIndex,
};

#[derive(Parser)]
#[command(
    name = "paravec",
    version,
    about = "Paragraph-vector document embeddings: train, query, benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model on a corpus file and save it
    Train(TrainArgs),
    /// Nearest neighbors of a document or of inferred text
    Nn(NnArgs),
    /// Vector arithmetic: document minus/plus word vectors
    Analogy(AnalogyArgs),
    /// Triplet benchmark for one method or a dimension sweep
    Eval(EvalArgs),
    /// Export paragraph or word vectors as text
    Export(ExportArgs),
    /// Infer a vector for new text against a frozen model
    Infer(InferArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Dbow,
    Dm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CombineArg {
    Average,
    Concatenate,
}

/// Training flags shared by `train` and `eval`. Unset flags fall back to
/// the config file (if given), then to defaults.
#[derive(Args, Default)]
struct TrainFlags {
    /// Embedding dimensionality
    #[arg(long)]
    dim: Option<usize>,

    /// Training epochs
    #[arg(long)]
    epochs: Option<usize>,

    /// Initial learning rate
    #[arg(long)]
    lr: Option<f32>,

    /// Final learning rate of the linear decay
    #[arg(long)]
    min_lr: Option<f32>,

    /// Context window radius
    #[arg(long)]
    window: Option<usize>,

    /// Training architecture
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,

    /// How PV-DM combines the paragraph vector with context words
    #[arg(long, value_enum)]
    dm_combine: Option<CombineArg>,

    /// Jointly train skip-gram word vectors (DBOW)
    #[arg(long)]
    joint_words: Option<bool>,

    /// Seed for all randomness
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads (1 = deterministic)
    #[arg(long)]
    workers: Option<usize>,

    /// Vocabulary frequency cutoff
    #[arg(long)]
    min_count: Option<usize>,

    /// Frequency-subsampling threshold (0 = off)
    #[arg(long)]
    subsample: Option<f64>,
}

/// The same knobs, as an optional TOML file.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    dim: Option<usize>,
    epochs: Option<usize>,
    lr: Option<f32>,
    min_lr: Option<f32>,
    window: Option<usize>,
    mode: Option<String>,
    dm_combine: Option<String>,
    joint_words: Option<bool>,
    seed: Option<u64>,
    workers: Option<usize>,
    min_count: Option<usize>,
    subsample: Option<f64>,
}

fn read_file_config(path: Option<&Path>) -> anyhow::Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("cannot read config file {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("invalid config file {}", p.display()))
        }
    }
}

/// Command-line flags override file values, which override defaults.
fn resolve_config(flags: &TrainFlags, file: &FileConfig) -> anyhow::Result<(TrainConfig, usize)> {
    let defaults = TrainConfig::default();
    let mode = match (&flags.mode, &file.mode) {
        (Some(ModeArg::Dbow), _) => TrainMode::Dbow,
        (Some(ModeArg::Dm), _) => TrainMode::Dm,
        (None, Some(s)) => match s.as_str() {
            "dbow" => TrainMode::Dbow,
            "dm" => TrainMode::Dm,
            other => bail!("invalid config: unknown mode {other:?}"),
        },
        (None, None) => defaults.mode,
    };
    let dm_combine = match (&flags.dm_combine, &file.dm_combine) {
        (Some(CombineArg::Average), _) => DmCombine::Average,
        (Some(CombineArg::Concatenate), _) => DmCombine::Concatenate,
        (None, Some(s)) => match s.as_str() {
            "average" => DmCombine::Average,
            "concatenate" => DmCombine::Concatenate,
            other => bail!("invalid config: unknown dm_combine {other:?}"),
        },
        (None, None) => defaults.dm_combine,
    };
    let config = TrainConfig {
        dim: flags.dim.or(file.dim).unwrap_or(defaults.dim),
        epochs: flags.epochs.or(file.epochs).unwrap_or(defaults.epochs),
        initial_lr: flags.lr.or(file.lr).unwrap_or(defaults.initial_lr),
        min_lr: flags.min_lr.or(file.min_lr).unwrap_or(defaults.min_lr),
        window: flags.window.or(file.window).unwrap_or(defaults.window),
        joint_words: flags
            .joint_words
            .or(file.joint_words)
            .unwrap_or(defaults.joint_words),
        mode,
        dm_combine,
        seed: flags.seed.or(file.seed).unwrap_or(defaults.seed),
        workers: flags.workers.or(file.workers).unwrap_or(defaults.workers),
        subsample_t: flags.subsample.or(file.subsample).unwrap_or(0.0),
    };
    let min_count = flags.min_count.or(file.min_count).unwrap_or(5);
    Ok((config, min_count))
}

#[derive(Args)]
struct TrainArgs {
    /// Corpus file: one `title<TAB>category<TAB>text` document per line
    #[arg(long)]
    corpus: PathBuf,

    /// Where to write the model
    #[arg(long)]
    out: PathBuf,

    /// TOML config file; command-line flags override its values
    #[arg(long)]
    config: Option<PathBuf>,

    #[command(flatten)]
    flags: TrainFlags,
}

#[derive(Args)]
struct NnArgs {
    #[arg(long)]
    model: PathBuf,

    /// Title of an indexed document
    #[arg(long, conflicts_with = "text")]
    doc: Option<String>,

    /// Free text to embed via inference
    #[arg(long)]
    text: Option<String>,

    #[arg(short, default_value_t = 10)]
    k: usize,

    /// Inference epochs for --text
    #[arg(long, default_value_t = 10)]
    infer_epochs: usize,

    /// Inference seed for --text
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct AnalogyArgs {
    #[arg(long)]
    model: PathBuf,

    /// Anchor document title
    #[arg(long)]
    doc: String,

    /// Words whose vectors are subtracted
    #[arg(long, num_args = 1..)]
    minus: Vec<String>,

    /// Words whose vectors are added
    #[arg(long, num_args = 1..)]
    plus: Vec<String>,

    #[arg(short, default_value_t = 10)]
    k: usize,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    corpus: PathBuf,

    /// Evaluate a saved model instead of training in-process
    #[arg(long, conflicts_with = "method")]
    model: Option<PathBuf>,

    /// Method to train and evaluate (pv-dbow, pv-dm, lda, avg-wv, bow)
    #[arg(long)]
    method: Option<String>,

    /// Triplet file of `anchor<TAB>positive<TAB>negative` titles
    #[arg(long, conflicts_with = "generate")]
    triplets: Option<PathBuf>,

    /// Generate this many triplets from category labels
    #[arg(long)]
    generate: Option<usize>,

    /// Run every (method, dims) cell and emit CSV
    #[arg(long, requires = "methods", requires = "dims", requires = "csv")]
    sweep: bool,

    /// Comma-separated method list for --sweep
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,

    /// Comma-separated dimension list for --sweep (and the dims of --method)
    #[arg(long, value_delimiter = ',')]
    dims: Vec<usize>,

    /// CSV output path for --sweep
    #[arg(long)]
    csv: Option<PathBuf>,

    /// LDA Gibbs iterations
    #[arg(long, default_value_t = 500)]
    lda_iterations: usize,

    /// LDA document-topic prior
    #[arg(long, default_value_t = 0.1)]
    lda_alpha: f64,

    /// LDA topic-word prior
    #[arg(long, default_value_t = 0.01)]
    lda_beta: f64,

    /// TOML config file for training flags
    #[arg(long)]
    config: Option<PathBuf>,

    #[command(flatten)]
    flags: TrainFlags,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportWhat {
    Pv,
    Wv,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    model: PathBuf,

    /// Which matrix to export
    #[arg(long, value_enum)]
    what: ExportWhat,

    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InferArgs {
    #[arg(long)]
    model: PathBuf,

    /// Text to embed
    #[arg(long)]
    text: String,

    /// Inference epochs
    #[arg(long, default_value_t = 10)]
    epochs: usize,

    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Nn(args) => cmd_nn(args),
        Command::Analogy(args) => cmd_analogy(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Export(args) => cmd_export(args),
        Command::Infer(args) => cmd_infer(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn load_corpus_checked(path: &Path, min_count: usize) -> anyhow::Result<Corpus> {
    if !path.exists() {
        bail!("no such corpus file: {}", path.display());
    }
    Ok(load_corpus(path, min_count)?)
}

fn cmd_train(args: TrainArgs) -> anyhow::Result<()> {
    let file = read_file_config(args.config.as_deref())?;
    let (config, min_count) = resolve_config(&args.flags, &file)?;
    let corpus = load_corpus_checked(&args.corpus, min_count)?;
    let start = Instant::now();
    let model = train(init_model(&corpus, config)?, &corpus)?;
    save_model(&model, &args.out)?;
    println!(
        "trained {} docs, vocab {}, dim {}, {} epochs in {:.1}s -> {}",
        model.doc_count(),
        model.vocabulary.len(),
        model.dim(),
        model.config.epochs,
        start.elapsed().as_secs_f64(),
        args.out.display()
    );
    Ok(())
}

/// Edit distance used only for "did you mean" suggestions.
fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let cost = usize::from(ca != cb);
            cur[j + 1] = (prev[j] + cost).min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn find_doc(model: &EmbeddingModel, title: &str) -> anyhow::Result<usize> {
    if let Some(id) = model.doc_id_by_title(title) {
        return Ok(id);
    }
    let query = title.to_lowercase();
    let mut ranked: Vec<(usize, &String)> = model
        .doc_titles
        .iter()
        .map(|t| (levenshtein(&t.to_lowercase(), &query), t))
        .collect();
    ranked.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1)));
    let suggestions: Vec<&str> = ranked.iter().take(3).map(|(_, t)| t.as_str()).collect();
    bail!(
        "no document titled {:?}; nearest titles: {}",
        title,
        suggestions.join(", ")
    )
}

fn cmd_nn(args: NnArgs) -> anyhow::Result<()> {
    let model = load_model(&args.model)?;
    let index = VectorIndex::from_paragraph_vectors(&model)?;
    let (query, exclude) = match (&args.doc, &args.text) {
        (Some(title), None) => {
            let id = find_doc(&model, title)?;
            let q: Vec<f64> = model.doc_vector(id)?.iter().map(|&x| x as f64).collect();
            (q, HashSet::from([id]))
        }
        (None, Some(text)) => {
            let tokens = tokenize(text);
            let v = infer_vector(&model, &tokens, args.infer_epochs, args.seed)?;
            (v.iter().map(|&x| x as f64).collect(), HashSet::new())
        }
        _ => bail!("exactly one of --doc or --text is required"),
    };
    let hits = nearest_neighbors(&index, &query, args.k, &exclude)?;
    print!("{}", format_neighbors(&hits));
    Ok(())
}

fn cmd_analogy(args: AnalogyArgs) -> anyhow::Result<()> {
    let model = load_model(&args.model)?;
    let index = VectorIndex::from_paragraph_vectors(&model)?;
    let anchor = find_doc(&model, &args.doc)?;
    let hits = analogy_query(&model, &index, anchor, &args.minus, &args.plus, args.k)?;
    print!("{}", format_neighbors(&hits));
    Ok(())
}

fn eval_triplets(args: &EvalArgs, corpus: &Corpus, seed: u64) -> anyhow::Result<TripletSet> {
    match (&args.triplets, args.generate) {
        (Some(path), None) => Ok(read_triplet_file(path, corpus)?),
        (None, Some(n)) => Ok(generate_triplets(corpus, n, seed)?),
        _ => bail!("exactly one of --triplets or --generate is required"),
    }
}

fn cmd_eval(args: EvalArgs) -> anyhow::Result<()> {
    let file = read_file_config(args.config.as_deref())?;
    let (train_config, min_count) = resolve_config(&args.flags, &file)?;
    let corpus = load_corpus_checked(&args.corpus, min_count)?;
    let seed = train_config.seed;
    let triplets = eval_triplets(&args, &corpus, seed)?;
    let sweep_config = SweepConfig {
        train: train_config,
        lda_alpha: args.lda_alpha,
        lda_beta: args.lda_beta,
        lda_iterations: args.lda_iterations,
        seed,
    };

    if args.sweep {
        let methods: Vec<Method> = args
            .methods
            .iter()
            .map(|m| Method::from_str(m))
            .collect::<Result<_, _>>()?;
        let result = dimension_sweep(&corpus, &triplets, &methods, &args.dims, &sweep_config)?;
        for row in &result.rows {
            let dims = row.dims.map(|d| d.to_string()).unwrap_or_else(|| "-".into());
            println!("{} {} {:.4}", row.method, dims, row.accuracy);
        }
        let csv_path = args.csv.as_ref().expect("clap enforces --csv with --sweep");
        atomic_write(csv_path, result.to_csv().as_bytes())?;
        return Ok(());
    }

    if let Some(model_path) = &args.model {
        let model = load_model(model_path)?;
        if model.doc_count() != corpus.len() {
            bail!(
                "model indexes {} documents but the corpus has {}",
                model.doc_count(),
                corpus.len()
            );
        }
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
        let accuracy = triplet_accuracy(|a, b| cosine(&rows[a], &rows[b]), &triplets)?;
        let name = match model.config.mode {
            TrainMode::Dbow => "pv-dbow",
            TrainMode::Dm => "pv-dm",
        };
        println!("{} {} {:.4}", name, model.dim(), accuracy);
        return Ok(());
    }

    let method_name = args
        .method
        .as_deref()
        .ok_or_else(|| anyhow!("one of --model, --method, or --sweep is required"))?;
    let method = Method::from_str(method_name)?;
    let dims = if method.uses_dims() {
        Some(*args.dims.first().unwrap_or(&sweep_config.train.dim))
    } else {
        None
    };
    let accuracy = evaluate_method(&corpus, &triplets, method, dims, &sweep_config)?;
    println!(
        "{} {} {:.4}",
        method,
        dims.map(|d| d.to_string()).unwrap_or_else(|| "-".into()),
        accuracy
    );
    Ok(())
}

/// Six significant digits, plain decimal notation.
fn fmt_sig(x: f32) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (5 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

fn atomic_write(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot write in {}", dir.display()))?;
    std::io::Write::write_all(&mut tmp, bytes)?;
    tmp.persist(path)
        .map_err(|e| anyhow!("cannot replace {}: {}", path.display(), e.error))?;
    Ok(())
}

fn cmd_export(args: ExportArgs) -> anyhow::Result<()> {
    let model = load_model(&args.model)?;
    let mut out = String::new();
    match args.what {
        ExportWhat::Pv => {
            for (i, title) in model.doc_titles.iter().enumerate() {
                let values: Vec<String> = model
                    .paragraph_vectors
                    .row(i)
                    .iter()
                    .map(|&x| fmt_sig(x))
                    .collect();
                out.push_str(&format!("{title}\t{}\n", values.join(" ")));
            }
        }
        ExportWhat::Wv => {
            for id in 0..model.vocabulary.len() as u32 {
                let values: Vec<String> = model
                    .word_vectors
                    .row(id as usize)
                    .iter()
                    .map(|&x| fmt_sig(x))
                    .collect();
                out.push_str(&format!(
                    "{}\t{}\n",
                    model.vocabulary.word(id),
                    values.join(" ")
                ));
            }
        }
    }
    atomic_write(&args.out, out.as_bytes())?;
    Ok(())
}

fn cmd_infer(args: InferArgs) -> anyhow::Result<()> {
    let model = load_model(&args.model)?;
    let tokens = tokenize(&args.text);
    let vector = infer_vector(&model, &tokens, args.epochs, args.seed)?;
    let values: Vec<String> = vector.iter().map(|&x| fmt_sig(x)).collect();
    println!("{}", values.join(" "));
    Ok(())
}
