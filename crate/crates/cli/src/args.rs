use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "tweetscope", version, about = "Topic, time-series and emotion analysis of tweet corpora")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Tweet corpus, one JSON object per line.
    #[arg(long, global = true, value_name = "FILE")]
    pub corpus: Option<PathBuf>,

    /// Directory receiving the output files [default: out]
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    /// Seed for every random draw [default: 42]
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// TOML settings file; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Stopword list, one word per line [default: built-in English list]
    #[arg(long, global = true, value_name = "FILE")]
    pub stoplist: Option<PathBuf>,

    /// Emoticon table, `emoticon<TAB>positive_emoticon|negative_emoticon`.
    #[arg(long, global = true, value_name = "FILE")]
    pub emoticons: Option<PathBuf>,

    /// Turn a preprocessing stage off (repeatable).
    #[arg(long, global = true, value_enum, value_name = "STAGE")]
    pub disable: Vec<Stage>,

    /// Turn a preprocessing stage on (repeatable), overriding the config file.
    #[arg(long, global = true, value_enum, value_name = "STAGE")]
    pub enable: Vec<Stage>,

    /// Keep only English tweets (by `lang` tag, else by script)
    /// [default: true; ignored by `stats`]
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    pub english_only: Option<bool>,

    /// Drop tweets whose text repeats an earlier tweet [default: false]
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    pub dedup: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stage {
    Lowercase,
    Urls,
    Mentions,
    Hashtags,
    Repeats,
    Punctuation,
    Emoticons,
    Stopwords,
    Stem,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hourly series, top sources and users, term frequencies.
    Stats,
    /// Tokenize the corpus and cache vocabulary and document-term matrix.
    Preprocess(VocabArgs),
    /// Fit one LDA model and export theta, phi and top terms.
    Train(TrainArgs),
    /// Fit a grid of models and rank them by NMI.
    Sweep(SweepArgs),
    /// Per-tweet and corpus-level emotion counts.
    Emotions(EmotionArgs),
}

#[derive(Debug, Args, Default)]
pub struct VocabArgs {
    /// Minimum number of documents a term must occur in [default: 2]
    #[arg(long)]
    pub min_df: Option<usize>,

    /// Maximum share of documents a term may occur in [default: 0.95]
    #[arg(long)]
    pub max_df_ratio: Option<f64>,

    /// Term to exclude from the vocabulary (repeatable).
    #[arg(long, value_name = "TERM")]
    pub drop_term: Vec<String>,
}

#[derive(Debug, Args, Default)]
pub struct MatrixSource {
    /// Cached document-term matrix written by `preprocess`.
    #[arg(long, value_name = "FILE", requires = "vocab")]
    pub matrix: Option<PathBuf>,

    /// Vocabulary file matching `--matrix`.
    #[arg(long, value_name = "FILE", requires = "matrix")]
    pub vocab: Option<PathBuf>,

    #[command(flatten)]
    pub vocab_opts: VocabArgs,

    /// Gibbs sweeps per chain [default: 1000]
    #[arg(long)]
    pub sweeps: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct TrainArgs {
    #[command(flatten)]
    pub source: MatrixSource,

    /// Number of topics [default: 15]
    #[arg(long)]
    pub topics: Option<usize>,

    /// Document-topic prior [default: 0.1]
    #[arg(long, conflicts_with = "alpha_50_over_k")]
    pub alpha: Option<f64>,

    /// Use alpha = 50 / K.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    pub alpha_50_over_k: Option<bool>,

    /// Topic-word prior [default: 0.01]
    #[arg(long)]
    pub beta: Option<f64>,

    /// Terms listed per topic [default: 10]
    #[arg(long)]
    pub top_terms: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: MatrixSource,

    /// Topic counts [default: 5,10,15,20]
    #[arg(long, value_delimiter = ',', value_name = "K,..")]
    pub ks: Option<Vec<usize>>,

    /// Alpha values [default: 0.1]
    #[arg(long, value_delimiter = ',', value_name = "A,..")]
    pub alphas: Option<Vec<f64>>,

    /// Beta values [default: 0.01]
    #[arg(long, value_delimiter = ',', value_name = "B,..")]
    pub betas: Option<Vec<f64>>,

    /// Reference clustering, one integer label per document. Without it each
    /// model is compared with a second chain seeded independently.
    #[arg(long, value_name = "FILE")]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct EmotionArgs {
    /// Word-emotion lexicon in NRC layout: word, category, 0/1 flag.
    #[arg(long, value_name = "FILE")]
    pub lexicon: Option<PathBuf>,
}
