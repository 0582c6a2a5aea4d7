//! End-to-end tests of the command-line interface, driving the built
//! binary the way a user would.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn paravec() -> Command {
    Command::new(env!("CARGO_BIN_EXE_paravec"))
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("failed to spawn paravec")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Three categories with separated vocabularies, eight documents each.
fn write_corpus(path: &Path) {
    let themes = [
        ("sky", "star planet orbit comet nebula cosmos meteor lunar"),
        ("sea", "wave tide coral reef shark kelp current harbor"),
        ("farm", "wheat barley tractor harvest barn silo plough meadow"),
    ];
    let mut lines = String::new();
    for (cat, words) in themes {
        for i in 0..8 {
            let words: Vec<&str> = words.split_whitespace().collect();
            let mut text = Vec::new();
            for j in 0..24 {
                text.push(words[(i + j) % words.len()]);
            }
            lines.push_str(&format!("{cat} doc {i}\t{cat}\t{}\n", text.join(" ")));
        }
    }
    std::fs::write(path, lines).unwrap();
}

struct Fixture {
    _dir: tempfile::TempDir,
    corpus: PathBuf,
    model: PathBuf,
}

fn trained_fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.tsv");
    let model = dir.path().join("model.pvec");
    write_corpus(&corpus);
    let out = run(paravec()
        .args(["train", "--corpus"])
        .arg(&corpus)
        .arg("--out")
        .arg(&model)
        .args(["--dim", "16", "--epochs", "8", "--seed", "7", "--min-count", "1"]));
    assert!(out.status.success(), "train failed: {}", stderr(&out));
    Fixture {
        _dir: dir,
        corpus,
        model,
    }
}

#[test]
fn train_writes_a_loadable_model_and_summary() {
    let fixture = trained_fixture();
    assert!(fixture.model.exists());
    let loaded = paravec::model_file::load_model(&fixture.model).unwrap();
    assert_eq!(loaded.doc_count(), 24);
    assert_eq!(loaded.dim(), 16);
}

#[test]
fn train_reports_missing_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(paravec()
        .args(["train", "--corpus"])
        .arg(dir.path().join("absent.tsv"))
        .arg("--out")
        .arg(dir.path().join("m.pvec")));
    assert!(!out.status.success());
    assert!(stderr(&out).contains("no such corpus"));
}

#[test]
fn train_rejects_zero_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.tsv");
    write_corpus(&corpus);
    let out = run(paravec()
        .args(["train", "--corpus"])
        .arg(&corpus)
        .arg("--out")
        .arg(dir.path().join("m.pvec"))
        .args(["--dim", "0", "--min-count", "1"]));
    assert!(!out.status.success());
    assert!(stderr(&out).contains("config"));
}

#[test]
fn config_file_supplies_flags_and_cli_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.tsv");
    let config = dir.path().join("train.toml");
    let model = dir.path().join("m.pvec");
    write_corpus(&corpus);
    std::fs::write(&config, "dim = 12\nepochs = 2\nmin_count = 1\n").unwrap();

    let out = run(paravec()
        .args(["train", "--corpus"])
        .arg(&corpus)
        .arg("--out")
        .arg(&model)
        .arg("--config")
        .arg(&config));
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(paravec::model_file::load_model(&model).unwrap().dim(), 12);

    let out = run(paravec()
        .args(["train", "--corpus"])
        .arg(&corpus)
        .arg("--out")
        .arg(&model)
        .arg("--config")
        .arg(&config)
        .args(["--dim", "20"]));
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(paravec::model_file::load_model(&model).unwrap().dim(), 20);
}

#[test]
fn nn_by_title_prints_k_rows() {
    let fixture = trained_fixture();
    let out = run(paravec()
        .arg("nn")
        .arg("--model")
        .arg(&fixture.model)
        .args(["--doc", "sky doc 0", "-k", "3"]));
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3);
    assert!(!text.contains("sky doc 0"), "self should be excluded:\n{text}");
}

#[test]
fn nn_with_oversized_k_lists_everyone_else() {
    let fixture = trained_fixture();
    let out = run(paravec()
        .arg("nn")
        .arg("--model")
        .arg(&fixture.model)
        .args(["--doc", "sea doc 1", "-k", "500"]));
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 23);
}

#[test]
fn nn_suggests_titles_on_miss() {
    let fixture = trained_fixture();
    let out = run(paravec()
        .arg("nn")
        .arg("--model")
        .arg(&fixture.model)
        .args(["--doc", "sky dok 0"]));
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("nearest titles"), "{err}");
    assert!(err.contains("sky doc 0"), "{err}");
}

#[test]
fn nn_text_with_no_known_words_fails() {
    let fixture = trained_fixture();
    let out = run(paravec()
        .arg("nn")
        .arg("--model")
        .arg(&fixture.model)
        .args(["--text", "xylophone quetzal"]));
    assert!(!out.status.success());
    assert!(stderr(&out).contains("no in-vocabulary tokens"));
}

#[test]
fn nn_text_routes_through_inference() {
    let fixture = trained_fixture();
    let out = run(paravec()
        .arg("nn")
        .arg("--model")
        .arg(&fixture.model)
        .args(["--text", "wave tide coral reef shark", "-k", "1"]));
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("sea"), "expected a sea doc:\n{}", stdout(&out));
}

#[test]
fn analogy_without_offsets_matches_nn() {
    let fixture = trained_fixture();
    let nn = run(paravec()
        .arg("nn")
        .arg("--model")
        .arg(&fixture.model)
        .args(["--doc", "farm doc 2", "-k", "5"]));
    let analogy = run(paravec()
        .arg("analogy")
        .arg("--model")
        .arg(&fixture.model)
        .args(["--doc", "farm doc 2", "-k", "5"]));
    assert!(nn.status.success() && analogy.status.success());
    assert_eq!(stdout(&nn), stdout(&analogy));
}

#[test]
fn analogy_rejects_unknown_words() {
    let fixture = trained_fixture();
    let out = run(paravec()
        .arg("analogy")
        .arg("--model")
        .arg(&fixture.model)
        .args(["--doc", "farm doc 2", "--plus", "spaceship"]));
    assert!(!out.status.success());
    assert!(stderr(&out).contains("spaceship"));
}

#[test]
fn analogy_scores_are_sorted_descending() {
    let fixture = trained_fixture();
    let out = run(paravec()
        .arg("analogy")
        .arg("--model")
        .arg(&fixture.model)
        .args(["--doc", "sky doc 3", "--minus", "star", "--plus", "wave", "-k", "10"]));
    assert!(out.status.success(), "{}", stderr(&out));
    let scores: Vec<f64> = stdout(&out)
        .lines()
        .map(|l| l.rsplit(' ').next().unwrap().parse().unwrap())
        .collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]), "{scores:?}");
}

#[test]
fn eval_prints_method_dims_accuracy() {
    let fixture = trained_fixture();
    let out = run(paravec()
        .arg("eval")
        .arg("--corpus")
        .arg(&fixture.corpus)
        .args(["--method", "bow", "--generate", "400", "--seed", "2", "--min-count", "1"]));
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let fields: Vec<&str> = text.split_whitespace().collect();
    assert_eq!(fields[0], "bow");
    assert_eq!(fields[1], "-");
    let acc: f64 = fields[2].parse().unwrap();
    assert!((0.0..=1.0).contains(&acc));
}

#[test]
fn eval_on_saved_model_reports_accuracy() {
    let fixture = trained_fixture();
    let out = run(paravec()
        .arg("eval")
        .arg("--corpus")
        .arg(&fixture.corpus)
        .arg("--model")
        .arg(&fixture.model)
        .args(["--generate", "400", "--seed", "2", "--min-count", "1"]));
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("pv-dbow 16 "));
}

#[test]
fn eval_needs_multiple_categories_to_generate() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("one-cat.tsv");
    let mut lines = String::new();
    for i in 0..6 {
        lines.push_str(&format!("doc {i}\tonly\taa bb cc dd ee\n"));
    }
    std::fs::write(&corpus, lines).unwrap();
    let out = run(paravec()
        .arg("eval")
        .arg("--corpus")
        .arg(&corpus)
        .args(["--method", "bow", "--generate", "10", "--min-count", "1"]));
    assert!(!out.status.success());
    assert!(stderr(&out).contains("category"));
}

#[test]
fn eval_names_missing_triplet_titles() {
    let fixture = trained_fixture();
    let dir = tempfile::tempdir().unwrap();
    let triplets = dir.path().join("triplets.tsv");
    std::fs::write(&triplets, "sky doc 0\tno such doc\tsea doc 0\n").unwrap();
    let out = run(paravec()
        .arg("eval")
        .arg("--corpus")
        .arg(&fixture.corpus)
        .arg("--triplets")
        .arg(&triplets)
        .args(["--method", "bow", "--min-count", "1"]));
    assert!(!out.status.success());
    assert!(stderr(&out).contains("no such doc"));
}

#[test]
fn sweep_collapses_bow_and_writes_csv() {
    let fixture = trained_fixture();
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = run(paravec()
        .arg("eval")
        .arg("--corpus")
        .arg(&fixture.corpus)
        .args(["--sweep", "--methods", "bow,pv-dbow", "--dims", "8,16"])
        .arg("--csv")
        .arg(&csv)
        .args(["--generate", "300", "--epochs", "3", "--min-count", "1"]));
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "method,dims,accuracy");
    assert_eq!(lines.len(), 4, "bow collapses to one row:\n{text}");
    assert!(lines[1].starts_with("bow,,"));
    assert!(lines[2].starts_with("pv-dbow,8,"));
    assert!(lines[3].starts_with("pv-dbow,16,"));
}

#[test]
fn export_pv_round_trips_through_parsing() {
    let fixture = trained_fixture();
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("pv.txt");
    let out = run(paravec()
        .arg("export")
        .arg("--model")
        .arg(&fixture.model)
        .args(["--what", "pv"])
        .arg("--out")
        .arg(&out_path));
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 24);
    for line in lines {
        let (_, values) = line.split_once('\t').unwrap();
        let floats: Vec<f64> = values
            .split(' ')
            .map(|v| v.parse().expect("unparseable float"))
            .collect();
        assert_eq!(floats.len(), 16);
    }
}

#[test]
fn export_wv_is_keyed_by_word() {
    let fixture = trained_fixture();
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("wv.txt");
    let out = run(paravec()
        .arg("export")
        .arg("--model")
        .arg(&fixture.model)
        .args(["--what", "wv"])
        .arg("--out")
        .arg(&out_path));
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.lines().count(), 24); // 3 themes x 8 words
    assert!(text.lines().any(|l| l.starts_with("star\t")));
}

#[test]
fn infer_is_deterministic_across_invocations() {
    let fixture = trained_fixture();
    let mut args = paravec();
    args.arg("infer")
        .arg("--model")
        .arg(&fixture.model)
        .args(["--text", "star planet orbit", "--seed", "9"]);
    let a = run(&mut args);
    let mut args = paravec();
    args.arg("infer")
        .arg("--model")
        .arg(&fixture.model)
        .args(["--text", "star planet orbit", "--seed", "9"]);
    let b = run(&mut args);
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(stdout(&a).trim().split(' ').count(), 16);
}

#[test]
fn export_without_model_is_a_usage_error() {
    let out = run(paravec().args(["export", "--what", "pv", "--out", "/tmp/x.txt"]));
    assert!(!out.status.success());
    assert!(stderr(&out).contains("--model"));
}

#[test]
fn successful_commands_keep_stderr_quiet() {
    let fixture = trained_fixture();
    let out = run(paravec()
        .arg("nn")
        .arg("--model")
        .arg(&fixture.model)
        .args(["--doc", "sky doc 0", "-k", "2"]));
    assert!(out.status.success());
    assert!(stderr(&out).is_empty(), "stderr: {}", stderr(&out));
}
