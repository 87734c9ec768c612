use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "textcode",
    version,
    about = "Train, evaluate and explain classifiers that assign category codes to free-text reports"
)]
pub struct Cli {
    /// Flat TOML file of option values (keys are flag names with underscores); flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Seed for every random choice; each component derives its own stream from it [default: 0].
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clean, deduplicate and split a record file by date.
    Prepare(PrepareArgs),
    /// Generate a labeled keyword corpus with known ground truth.
    Synth(SynthArgs),
    /// Train word vectors on a prepared corpus.
    Embed(EmbedArgs),
    /// Train one model.
    Train(TrainArgs),
    /// Train every point of a hyperparameter grid and rank them on validation accuracy.
    Gridsearch(GridArgs),
    /// Score a model (or a predictions file) and write predictions and metrics.
    Eval(EvalArgs),
    /// Test several models' predictions against a reference model.
    Compare(CompareArgs),
    /// Highlight the words the interpretable model used for each class.
    Explain(ExplainArgs),
    /// Reduce every document to its k most important words.
    Distill(DistillArgs),
}

#[derive(Debug, Args)]
pub struct PrepareArgs {
    /// Record file, one JSON object per line.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output directory for train/valid/test files and the class map.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fraction of the newest documents used for testing [default: 0.2].
    #[arg(long)]
    pub test_frac: Option<f64>,
    /// Fraction of documents before the test block used for validation [default: 0.2].
    #[arg(long)]
    pub valid_frac: Option<f64>,
    /// Drop classes with fewer test documents than this [default: 1].
    #[arg(long)]
    pub min_test: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output directory for records.jsonl and keywords.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of classes [default: 61].
    #[arg(long)]
    pub classes: Option<usize>,
    /// Documents per class [default: 100].
    #[arg(long)]
    pub docs_per_class: Option<usize>,
    /// Comma-separated document count for each class; overrides --docs-per-class.
    #[arg(long, value_delimiter = ',')]
    pub class_sizes: Option<Vec<usize>>,
    /// Signal keywords per class [default: 3].
    #[arg(long)]
    pub keywords_per_class: Option<usize>,
    /// Size of the shared noise vocabulary [default: 300].
    #[arg(long)]
    pub noise_vocab: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Prepared corpus directory; vectors are trained on its training part.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Output file for the word vectors (text format).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Vector dimension [default: 60].
    #[arg(long)]
    pub dim: Option<usize>,
    /// Passes over the co-occurrence table [default: 50].
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Context window in tokens [default: 15].
    #[arg(long)]
    pub window: Option<usize>,
    /// Words seen fewer times are mapped to the unknown token [default: 5].
    #[arg(long)]
    pub min_count: Option<u64>,
    /// AdaGrad step size [default: 0.05].
    #[arg(long)]
    pub glove_rate: Option<f64>,
    /// Word-pair files ("a b" per line) for analogy evaluation of the result.
    #[arg(long)]
    pub relations: Vec<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct ModelArgs {
    /// Model family: SVM, CNN, GRU, ATT, MAX, MAXi, MAXh or ATTh.
    #[arg(long)]
    pub family: Option<String>,
    /// Pretrained word vectors (text format) to initialize the embedding layer.
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    /// Words seen fewer times in training documents map to the unknown token [default: 1].
    #[arg(long)]
    pub vocab_min_count: Option<u64>,
    /// Word embedding size when no vectors are given [default: 60].
    #[arg(long)]
    pub embedding_dim: Option<usize>,
    /// Stacked GRU layers per direction.
    #[arg(long)]
    pub rnn_layers: Option<usize>,
    /// GRU units per direction.
    #[arg(long)]
    pub rnn_width: Option<usize>,
    /// Dense layers in the per-position network (0 = identity).
    #[arg(long)]
    pub g_layers: Option<usize>,
    /// Units per hidden dense layer.
    #[arg(long)]
    pub g_width: Option<usize>,
    /// Attention projection size.
    #[arg(long)]
    pub attention_width: Option<usize>,
    /// Sentence-level GRU layers (hierarchical families).
    #[arg(long)]
    pub sentence_rnn_layers: Option<usize>,
    /// Sentence-level GRU units (hierarchical families).
    #[arg(long)]
    pub sentence_rnn_width: Option<usize>,
    /// Sentence-level attention size (ATTh).
    #[arg(long)]
    pub sentence_attention_width: Option<usize>,
    /// Projection size before the convolutions (CNN).
    #[arg(long)]
    pub cnn_projection: Option<usize>,
    /// Filters per convolution width (CNN).
    #[arg(long)]
    pub cnn_filters: Option<usize>,
    /// Keep the embedding layer fixed during training.
    #[arg(long)]
    pub freeze_embeddings: bool,
    /// Adam learning rate [default: 0.001].
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// Documents per minibatch [default: 32].
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Upper bound on training epochs [default: 50].
    #[arg(long)]
    pub max_epochs: Option<usize>,
    /// Epochs without validation improvement before stopping [default: 5].
    #[arg(long)]
    pub patience: Option<usize>,
    /// SVM inverse regularization strength [default: 1.0].
    #[arg(long)]
    pub c: Option<f64>,
    /// SVM passes over the training set [default: 20].
    #[arg(long)]
    pub svm_epochs: Option<usize>,
    /// Longest n-gram used by the SVM features, 1 or 2 [default: 2].
    #[arg(long)]
    pub ngram_max: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Prepared corpus directory.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Output model file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the per-epoch training history (JSON) here.
    #[arg(long)]
    pub history: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Prepared corpus directory.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Grid file with one TOML table of axes per family, e.g. [MAX] rnn_width = [16, 32].
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// Use the published grid for this task (topography or morphology) instead of --grid.
    #[arg(long)]
    pub reference_grid: Option<String>,
    /// Output CSV with one ranked row per grid point.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Grid points trained in parallel [default: 1].
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Model file to evaluate.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Prepared corpus directory.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Corpus part to score: train, valid or test [default: test].
    #[arg(long)]
    pub part: Option<String>,
    /// Score an existing predictions file instead of running a model.
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    /// Model whose predictions the fidelity measure compares against.
    #[arg(long)]
    pub fidelity_model: Option<PathBuf>,
    /// Comma-separated l values for top-l accuracy [default: 1,3,5].
    #[arg(long, value_delimiter = ',')]
    pub top_l: Option<Vec<usize>>,
    /// Output directory for predictions.json and metrics.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Predictions files as NAME=PATH, e.g. MAX=max/predictions.json.
    #[arg(required = true, value_name = "NAME=PATH")]
    pub models: Vec<String>,
    /// Name of the model every other model is tested against [default: MAX].
    #[arg(long)]
    pub reference: Option<String>,
    /// Write the table here as text (it is always printed).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the full test results here as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    /// Interpretable (MAXi) model file.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Prepared corpus directory.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Corpus part to explain [default: test].
    #[arg(long)]
    pub part: Option<String>,
    /// Number of documents to explain, from the start of the part [default: 20].
    #[arg(long)]
    pub limit: Option<usize>,
    /// Output HTML file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistillArgs {
    /// Interpretable (MAXi) model file.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Prepared corpus directory.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Words kept per document.
    #[arg(long)]
    pub k: Option<usize>,
    /// Output directory for the distilled corpus.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
