use std::fs;
use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;

use textcode::corpus::{
    generate_synthetic, prepare_split, read_records, read_split, write_records, write_split, CorpusSplit, DocCounts,
    Part, SyntheticSpec,
};
use textcode::embeddings::{
    analogy_eval, count_cooccurrences, train_embeddings, GloveConfig, RelationSet, Vocabulary, WordVectors,
    UNK_TOKEN,
};
use textcode::evaluation::{compare_to_reference, MetricsReport, PredictionSet};
use textcode::explain::{distill_top_k, extract_importance, render_html, render_terminal};
use textcode::linear::{LinearClassifier, SvmConfig};
use textcode::model_file::{ModelFile, StoredModel};
use textcode::networks::{Family, Input, ModelConfig, Network};
use textcode::training::{
    apply_point, examples_for, grid_search, predict_all, reference_grid, train, write_results_csv, GridPoint,
    HyperGrid, PointOutcome, Task, TrainConfig, TrainHistory,
};

use crate::args::{
    Cli, Command, CompareArgs, DistillArgs, EmbedArgs, EvalArgs, ExplainArgs, GridArgs, ModelArgs, PrepareArgs,
    SynthArgs, TrainArgs,
};
use crate::config::Config;
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

struct Ctx {
    config: Config,
    seed: u64,
}

/// Random streams handed to each component, all derived from `--seed`.
#[derive(Clone, Copy)]
enum Stream {
    Synth = 1,
    Glove = 2,
    Init = 3,
    Train = 4,
    Svm = 5,
}

impl Ctx {
    fn seed_for(&self, stream: Stream) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream as u64);
        rng.next_u64()
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let seed = config.or(cli.seed, "seed", 0)?;
    let ctx = Ctx { config, seed };
    match cli.command {
        Command::Prepare(a) => prepare(&ctx, a),
        Command::Synth(a) => synth(&ctx, a),
        Command::Embed(a) => embed(&ctx, a),
        Command::Train(a) => train_cmd(&ctx, a),
        Command::Gridsearch(a) => gridsearch(&ctx, a),
        Command::Eval(a) => eval(&ctx, a),
        Command::Compare(a) => compare(&ctx, a),
        Command::Explain(a) => explain(&ctx, a),
        Command::Distill(a) => distill(&ctx, a),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| textcode::Error::parse(path.display(), e))?;
    fs::write(path, text + "\n").map_err(|e| textcode::Error::io(path, e))?;
    Ok(())
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| textcode::Error::io(path, e))?;
    Ok(serde_json::from_str(&text).map_err(|e| textcode::Error::parse(path.display(), e))?)
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| textcode::Error::io(path, e))?;
    Ok(())
}

fn parse_part(name: &str) -> Result<Part> {
    match name {
        "train" => Ok(Part::Train),
        "valid" => Ok(Part::Valid),
        "test" => Ok(Part::Test),
        other => Err(CliError::Usage(format!("unknown corpus part {other:?} (train, valid or test)"))),
    }
}

fn parse_family(name: &str) -> Result<Family> {
    name.parse().map_err(|e: textcode::Error| CliError::Usage(e.to_string()))
}

// ---------------------------------------------------------------------------

fn prepare(ctx: &Ctx, a: PrepareArgs) -> Result<()> {
    let c = &ctx.config;
    let input: PathBuf = c.need(a.input, "input")?;
    let out: PathBuf = c.need(a.out, "out")?;
    let test_frac = c.or(a.test_frac, "test_frac", 0.2)?;
    let valid_frac = c.or(a.valid_frac, "valid_frac", 0.2)?;
    let min_test = c.or(a.min_test, "min_test", 1)?;
    let records = read_records(&input)?;
    let split = prepare_split(&records, test_frac, valid_frac, min_test)?;
    write_split(&out, &split, None)?;
    println!(
        "{} classes; {} train, {} valid, {} test documents",
        split.num_classes(),
        split.train.len(),
        split.valid.len(),
        split.test.len()
    );
    Ok(())
}

fn synth(ctx: &Ctx, a: SynthArgs) -> Result<()> {
    let c = &ctx.config;
    let out: PathBuf = c.need(a.out, "out")?;
    let defaults = SyntheticSpec::default();
    let num_classes = c.or(a.classes, "classes", defaults.num_classes)?;
    let docs = match c.pick(a.class_sizes, "class_sizes")? {
        Some(sizes) => DocCounts::PerClass(sizes),
        None => DocCounts::Uniform(c.or(a.docs_per_class, "docs_per_class", 100)?),
    };
    let spec = SyntheticSpec {
        num_classes,
        docs,
        keywords_per_class: c.or(a.keywords_per_class, "keywords_per_class", defaults.keywords_per_class)?,
        noise_vocab: c.or(a.noise_vocab, "noise_vocab", defaults.noise_vocab)?,
        seed: ctx.seed_for(Stream::Synth),
        ..defaults
    };
    let corpus = generate_synthetic(&spec)?;
    create_dir(&out)?;
    write_records(&out.join("records.jsonl"), &corpus.records)?;
    write_json(&out.join("keywords.json"), &corpus.metadata)?;
    for w in &corpus.metadata.warnings {
        eprintln!("textcode: warning: {w}");
    }
    println!("{} records in {} classes", corpus.records.len(), num_classes);
    Ok(())
}

fn embed(ctx: &Ctx, a: EmbedArgs) -> Result<()> {
    let c = &ctx.config;
    let corpus: PathBuf = c.need(a.corpus, "corpus")?;
    let out: PathBuf = c.need(a.out, "out")?;
    let window = c.or(a.window, "window", textcode::embeddings::DEFAULT_WINDOW)?;
    let min_count = c.or(a.min_count, "min_count", textcode::embeddings::DEFAULT_MIN_COUNT)?;
    let defaults = GloveConfig::default();
    let cfg = GloveConfig {
        dim: c.or(a.dim, "dim", defaults.dim)?,
        iterations: c.or(a.iterations, "iterations", defaults.iterations)?,
        learning_rate: c.or(a.glove_rate, "glove_rate", defaults.learning_rate)?,
        seed: ctx.seed_for(Stream::Glove),
        ..defaults
    };
    let relations: Vec<PathBuf> = if a.relations.is_empty() {
        c.or(None, "relations", Vec::new())?
    } else {
        a.relations
    };

    let split = read_split(&corpus)?;
    let vocab = Vocabulary::build(split.train.iter().map(|d| &d.tokens), min_count);
    let table = count_cooccurrences(split.train.iter().map(|d| d.tokens.as_slice()), &vocab, window);
    let outcome = train_embeddings(&table, &cfg)?;
    let vectors = outcome.model.to_vectors(&vocab);
    vectors.save(&out, &[UNK_TOKEN])?;
    println!(
        "{} words, {} co-occurrence entries; objective {:.4} -> {:.4}",
        vocab.len(),
        table.len(),
        outcome.initial_objective,
        outcome.final_objective
    );
    let sets = relations
        .iter()
        .map(|p| RelationSet::load(p))
        .collect::<textcode::Result<Vec<_>>>()?;
    for r in analogy_eval(&vectors, &sets) {
        match r.accuracy {
            Some(acc) => println!("analogy {}: {}/{} = {acc:.3}", r.name, r.correct, r.queries),
            None => println!("analogy {}: no usable queries", r.name),
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------

/// Resolved training options shared by `train` and `gridsearch`.
struct Plan {
    family: Family,
    config: Option<ModelConfig>,
    vectors: Option<WordVectors>,
    vocab: Option<Vocabulary>,
    train: TrainConfig,
    svm: SvmConfig,
    ngram_max: usize,
}

const SIZE_KEYS: [&str; 11] = ModelConfig::AXES;

fn size_flag(m: &ModelArgs, key: &str) -> Option<usize> {
    match key {
        "embedding_dim" => m.embedding_dim,
        "rnn_layers" => m.rnn_layers,
        "rnn_width" => m.rnn_width,
        "g_layers" => m.g_layers,
        "g_width" => m.g_width,
        "attention_width" => m.attention_width,
        "sentence_rnn_layers" => m.sentence_rnn_layers,
        "sentence_rnn_width" => m.sentence_rnn_width,
        "sentence_attention_width" => m.sentence_attention_width,
        "cnn_projection" => m.cnn_projection,
        "cnn_filters" => m.cnn_filters,
        _ => None,
    }
}

fn plan(ctx: &Ctx, m: &ModelArgs, split: &CorpusSplit) -> Result<Plan> {
    let c = &ctx.config;
    let family = parse_family(&c.need(m.family.clone(), "family")?)?;
    let train = TrainConfig {
        learning_rate: c.or(m.learning_rate, "learning_rate", 0.001)?,
        batch_size: c.or(m.batch_size, "batch_size", 32)?,
        max_epochs: c.or(m.max_epochs, "max_epochs", 50)?,
        patience: c.or(m.patience, "patience", 5)?,
        seed: ctx.seed_for(Stream::Train),
        train_embeddings: !c.flag(m.freeze_embeddings, "freeze_embeddings")?,
    };
    let svm = SvmConfig {
        c: c.or(m.c, "c", 1.0)?,
        epochs: c.or(m.svm_epochs, "svm_epochs", 20)?,
        seed: ctx.seed_for(Stream::Svm),
    };
    let ngram_max = c.or(m.ngram_max, "ngram_max", 2)?;
    if !family.is_neural() {
        return Ok(Plan {
            family,
            config: None,
            vectors: None,
            vocab: None,
            train,
            svm,
            ngram_max,
        });
    }
    let vectors = c
        .pick(m.vectors.clone(), "vectors")?
        .map(|p: PathBuf| WordVectors::load(&p))
        .transpose()?;
    let min_count = c.or(m.vocab_min_count, "vocab_min_count", 1)?;
    let vocab = Vocabulary::build(split.train.iter().map(|d| &d.tokens), min_count);
    let dim = match (c.pick(m.embedding_dim, "embedding_dim")?, &vectors) {
        (Some(d), Some(v)) if d != v.dim() => {
            return Err(CliError::Usage(format!(
                "--embedding-dim {d} does not match the {}-dimensional vectors",
                v.dim()
            )))
        }
        (Some(d), _) => d,
        (None, Some(v)) => v.dim(),
        (None, None) => 60,
    };
    let mut config = ModelConfig::new(family, split.num_classes(), dim);
    for key in SIZE_KEYS {
        if let Some(v) = c.pick(size_flag(m, key), key)? {
            config.set_axis(key, v)?;
        }
    }
    config.train_embeddings = train.train_embeddings;
    Ok(Plan {
        family,
        config: Some(config),
        vectors,
        vocab: Some(vocab),
        train,
        svm,
        ngram_max,
    })
}

fn build_network(ctx: &Ctx, plan: &Plan, config: ModelConfig) -> textcode::Result<Network> {
    let vocab = plan.vocab.clone().expect("neural plan has a vocabulary");
    let seed = ctx.seed_for(Stream::Init);
    match &plan.vectors {
        Some(v) => Network::with_vectors(config, vocab, v, seed),
        None => Network::new(config, vocab, seed),
    }
}

fn fit_network(
    ctx: &Ctx,
    plan: &Plan,
    config: ModelConfig,
    train_cfg: &TrainConfig,
    split: &CorpusSplit,
) -> textcode::Result<(Network, TrainHistory)> {
    let net = build_network(ctx, plan, config)?;
    let tr = examples_for(&net, split, Part::Train)?;
    let va = examples_for(&net, split, Part::Valid)?;
    train(net, &tr, &va, train_cfg)
}

fn fit_linear(
    split: &CorpusSplit,
    svm: &SvmConfig,
    ngram_max: usize,
) -> textcode::Result<(LinearClassifier, Vec<f64>, f64)> {
    let docs: Vec<Vec<String>> = split.train.iter().map(|d| d.tokens.clone()).collect();
    let labels = split.labels(Part::Train)?;
    let (clf, objective) = LinearClassifier::fit(&docs, &labels, split.num_classes(), ngram_max, svm)?;
    let valid = split.labels(Part::Valid)?;
    let hits = split
        .valid
        .iter()
        .zip(&valid)
        .filter(|(d, &y)| clf.predict(&d.tokens) == y)
        .count();
    let acc = hits as f64 / valid.len().max(1) as f64;
    Ok((clf, objective, acc))
}

fn train_cmd(ctx: &Ctx, a: TrainArgs) -> Result<()> {
    let c = &ctx.config;
    let corpus: PathBuf = c.need(a.corpus, "corpus")?;
    let out: PathBuf = c.need(a.out, "out")?;
    let history_path: Option<PathBuf> = c.pick(a.history, "history")?;
    let split = read_split(&corpus)?;
    let plan = plan(ctx, &a.model, &split)?;
    let class_names = split.class_names();
    match &plan.config {
        None => {
            let (clf, objective, acc) = fit_linear(&split, &plan.svm, plan.ngram_max)?;
            ModelFile::new(StoredModel::Linear(clf), class_names)?.save(&out)?;
            if let Some(p) = history_path {
                write_json(&p, &serde_json::json!({ "objective": objective, "valid_accuracy": acc }))?;
            }
            println!("SVM: validation accuracy {acc:.4}");
        }
        Some(config) => {
            let (net, history) = fit_network(ctx, &plan, config.clone(), &plan.train, &split)?;
            let params = net.num_parameters();
            ModelFile::new(StoredModel::Neural(net), class_names)?.save(&out)?;
            if let Some(p) = history_path {
                write_json(&p, &history)?;
            }
            println!(
                "{}: validation accuracy {:.4} at epoch {} of {}; {} parameters",
                plan.family,
                history.best_valid_accuracy(),
                history.best_epoch + 1,
                history.epochs(),
                params
            );
        }
    }
    Ok(())
}

const TRAIN_AXES: [&str; 4] = ["learning_rate", "batch_size", "max_epochs", "patience"];
const SVM_AXES: [&str; 3] = ["c", "ngram_max", "svm_epochs"];

fn train_overrides(base: &TrainConfig, p: &GridPoint) -> textcode::Result<TrainConfig> {
    let mut t = base.clone();
    if let Some(&lr) = p.values.get("learning_rate") {
        t.learning_rate = lr;
    }
    if let Some(v) = p.usize("batch_size")? {
        t.batch_size = v;
    }
    if let Some(v) = p.usize("max_epochs")? {
        t.max_epochs = v;
    }
    if let Some(v) = p.usize("patience")? {
        t.patience = v;
    }
    Ok(t)
}

fn gridsearch(ctx: &Ctx, a: GridArgs) -> Result<()> {
    let c = &ctx.config;
    let corpus: PathBuf = c.need(a.corpus, "corpus")?;
    let out: PathBuf = c.need(a.out, "out")?;
    let jobs = c.or(a.jobs, "jobs", 1)?;
    let split = read_split(&corpus)?;
    let plan = plan(ctx, &a.model, &split)?;
    let grid = match (c.pick(a.grid, "grid")?, c.pick(a.reference_grid, "reference_grid")?) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --grid or --reference-grid".into())),
        (None, None) => return Err(CliError::Usage("missing --grid or --reference-grid".into())),
        (Some(path), None) => {
            let path: PathBuf = path;
            let text = fs::read_to_string(&path).map_err(|e| textcode::Error::io(&path, e))?;
            HyperGrid::from_toml(&text, plan.family)?
        }
        (None, Some(task)) => {
            let task: String = task;
            let task = match task.to_ascii_lowercase().as_str() {
                "topography" => Task::Topography,
                "morphology" => Task::Morphology,
                _ => return Err(CliError::Usage(format!("unknown task {task:?} (topography or morphology)"))),
            };
            reference_grid(plan.family, task)
                .ok_or_else(|| CliError::Usage(format!("no published grid for {}", plan.family)))?
        }
    };
    let allowed: Vec<&str> = if plan.family.is_neural() {
        SIZE_KEYS.iter().chain(&TRAIN_AXES).copied().collect()
    } else {
        SVM_AXES.to_vec()
    };
    if let Some(bad) = grid.axis_names().into_iter().find(|n| !allowed.contains(n)) {
        return Err(CliError::Usage(format!("grid axis {bad:?} does not apply to {}", plan.family)));
    }

    let results = grid_search(&grid, jobs, |p| match &plan.config {
        None => {
            let svm = SvmConfig {
                c: p.values.get("c").copied().unwrap_or(plan.svm.c),
                epochs: p.usize("svm_epochs")?.unwrap_or(plan.svm.epochs),
                seed: plan.svm.seed,
            };
            let ngram = p.usize("ngram_max")?.unwrap_or(plan.ngram_max);
            let (clf, _, acc) = fit_linear(&split, &svm, ngram)?;
            let params = clf.svm.num_classes() * (clf.svm.num_features() + 1);
            Ok(PointOutcome {
                valid_accuracy: acc,
                num_parameters: params,
            })
        }
        Some(base) => {
            let config = apply_point(base, p)?;
            let train_cfg = train_overrides(&plan.train, p)?;
            let (net, history) = fit_network(ctx, &plan, config, &train_cfg, &split)?;
            Ok(PointOutcome {
                valid_accuracy: history.best_valid_accuracy(),
                num_parameters: net.num_parameters(),
            })
        }
    })?;
    write_results_csv(&out, &grid, &results)?;
    let failed = results.iter().filter(|r| r.error.is_some()).count();
    match results.first().filter(|r| r.error.is_none()) {
        Some(best) => {
            let values: Vec<String> = best.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
            println!(
                "{} points ({failed} failed); best: {} validation accuracy {:.4}",
                results.len(),
                values.join(" "),
                best.valid_accuracy.unwrap_or(0.0)
            );
        }
        None => println!("{} points, all failed", results.len()),
    }
    Ok(())
}

// ---------------------------------------------------------------------------

fn load_model(path: &Path, split: &CorpusSplit) -> Result<ModelFile> {
    let model = ModelFile::load(path)?;
    if model.class_names != split.class_names() {
        return Err(textcode::Error::data(format!(
            "{} was trained on different classes than the corpus",
            path.display()
        ))
        .into());
    }
    Ok(model)
}

fn predict_part(model: &ModelFile, split: &CorpusSplit, part: Part) -> Result<PredictionSet> {
    let docs = split.part(part);
    let scores: Vec<Vec<f64>> = match &model.model {
        StoredModel::Neural(net) => {
            let inputs = docs.iter().map(|d| net.input(d)).collect::<textcode::Result<Vec<Input>>>()?;
            predict_all(net, &inputs)?.into_iter().map(|p| p.probs).collect()
        }
        StoredModel::Linear(clf) => docs.iter().map(|d| clf.scores(&d.tokens)).collect(),
    };
    Ok(PredictionSet::new(scores, split.labels(part)?, split.num_classes())?)
}

fn eval(ctx: &Ctx, a: EvalArgs) -> Result<()> {
    let c = &ctx.config;
    let out: PathBuf = c.need(a.out, "out")?;
    let top_l = c.or(a.top_l, "top_l", vec![1, 3, 5])?;
    let part = parse_part(&c.or(a.part, "part", "test".to_string())?)?;
    let corpus: Option<PathBuf> = c.pick(a.corpus, "corpus")?;
    let split = corpus.as_deref().map(read_split).transpose()?;
    let counts = split.as_ref().map(|s| s.class_counts(part)).transpose()?;

    let preds = match (c.pick(a.predictions, "predictions")?, c.pick(a.model, "model")?) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --predictions or --model".into())),
        (None, None) => return Err(CliError::Usage("missing --model or --predictions".into())),
        (Some(path), None) => {
            let path: PathBuf = path;
            read_json::<PredictionSet>(&path)?
        }
        (None, Some(path)) => {
            let path: PathBuf = path;
            let split = split
                .as_ref()
                .ok_or_else(|| CliError::Usage("--model needs --corpus".into()))?;
            predict_part(&load_model(&path, split)?, split, part)?
        }
    };
    if let Some(k) = &counts {
        if k.len() != preds.num_classes() {
            return Err(textcode::Error::data("predictions and corpus disagree on the number of classes").into());
        }
    }
    let mut report = MetricsReport::new(&preds, &top_l, counts.as_deref())?;
    if let Some(path) = c.pick::<PathBuf>(a.fidelity_model, "fidelity_model")? {
        let split = split
            .as_ref()
            .ok_or_else(|| CliError::Usage("--fidelity-model needs --corpus".into()))?;
        let other = predict_part(&load_model(&path, split)?, split, part)?;
        report = report.with_fidelity(&preds, &other)?;
    }
    create_dir(&out)?;
    write_json(&out.join("predictions.json"), &preds)?;
    write_json(&out.join("metrics.json"), &report)?;
    let tops: Vec<String> = report.top_l.iter().map(|t| format!("top-{} {:.4}", t.l, t.accuracy)).collect();
    println!(
        "{} documents: accuracy {:.4}, macro F1 {:.4}; {}",
        report.num_documents,
        report.accuracy,
        report.macro_f1,
        tops.join(", ")
    );
    if let Some(f) = report.fidelity {
        println!("fidelity {f:.4}");
    }
    Ok(())
}

fn compare(ctx: &Ctx, a: CompareArgs) -> Result<()> {
    let c = &ctx.config;
    let reference = c.or(a.reference, "reference", "MAX".to_string())?;
    let mut named = Vec::new();
    for spec in &a.models {
        let (name, path) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected NAME=PATH, got {spec:?}")))?;
        named.push((name.to_string(), read_json::<PredictionSet>(Path::new(path))?));
    }
    let pos = named
        .iter()
        .position(|(n, _)| *n == reference)
        .ok_or_else(|| CliError::Usage(format!("reference model {reference:?} is not among the inputs")))?;
    let (ref_name, ref_preds) = named.remove(pos);
    let table = compare_to_reference(&ref_name, &ref_preds, &named)?;
    let text = table.render();
    print!("{text}");
    if let Some(path) = c.pick::<PathBuf>(a.out, "out")? {
        fs::write(&path, &text).map_err(|e| textcode::Error::io(&path, e))?;
    }
    if let Some(path) = c.pick::<PathBuf>(a.json, "json")? {
        write_json(&path, &table)?;
    }
    Ok(())
}

fn interpretable(model: ModelFile, path: &Path) -> Result<Network> {
    match model.model {
        StoredModel::Neural(net) if net.config().is_interpretable() => Ok(net),
        other => Err(CliError::Usage(format!(
            "{} holds a {} model; word importances need MAXi",
            path.display(),
            other.family()
        ))),
    }
}

fn explain(ctx: &Ctx, a: ExplainArgs) -> Result<()> {
    let c = &ctx.config;
    let model_path: PathBuf = c.need(a.model, "model")?;
    let corpus: PathBuf = c.need(a.corpus, "corpus")?;
    let out: PathBuf = c.need(a.out, "out")?;
    let part = parse_part(&c.or(a.part, "part", "test".to_string())?)?;
    let limit = c.or(a.limit, "limit", 20)?;
    let split = read_split(&corpus)?;
    let net = interpretable(load_model(&model_path, &split)?, &model_path)?;
    let names = split.class_names();
    let mut docs = Vec::new();
    for (i, doc) in split.part(part).iter().take(limit).enumerate() {
        let (highlighted, pred) = extract_importance(&net, doc)?;
        let predicted = textcode::tensor::argmax(&pred.probs);
        println!(
            "# document {i}: label {}, predicted {}",
            doc.label.as_deref().unwrap_or("-"),
            names[predicted]
        );
        print!("{}", render_terminal(&highlighted, &names));
        docs.push(highlighted);
    }
    let html = render_html(&docs, &names);
    fs::write(&out, html).map_err(|e| textcode::Error::io(&out, e))?;
    Ok(())
}

fn distill(ctx: &Ctx, a: DistillArgs) -> Result<()> {
    let c = &ctx.config;
    let model_path: PathBuf = c.need(a.model, "model")?;
    let corpus: PathBuf = c.need(a.corpus, "corpus")?;
    let out: PathBuf = c.need(a.out, "out")?;
    let k: usize = c.need(a.k, "k")?;
    if k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    let split = read_split(&corpus)?;
    let net = interpretable(load_model(&model_path, &split)?, &model_path)?;
    let distilled = distill_top_k(&net, &split, k, Some(corpus.display().to_string()))?;
    distilled.write(&out)?;
    println!(
        "kept at most {k} words in each of {} documents",
        split.train.len() + split.valid.len() + split.test.len()
    );
    Ok(())
}
