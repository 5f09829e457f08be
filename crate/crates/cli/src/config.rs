//! Settings file and its merge with command-line flags.
//!
//! Relative paths in the file are resolved against the file's directory.
//!
//! ```toml
//! corpus = "tweets.jsonl"
//! out_dir = "out"
//! seed = 42
//! english_only = true
//! dedup = false
//!
//! [pipeline]
//! stem = true
//!
//! [vocabulary]
//! min_df = 2
//! max_df_ratio = 0.95
//! drop_terms = ["demonetisation"]
//!
//! [lda]
//! topics = 15
//! alpha = 0.1
//! beta = 0.01
//! sweeps = 1000
//! top_terms = 10
//!
//! [sweep]
//! ks = [5, 10, 15, 20]
//! alphas = [0.1]
//! betas = [0.01]
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;
use tweetscope::textprep::PipelineConfig;

use crate::args::{GlobalArgs, MatrixSource, Stage, SweepArgs, TrainArgs, VocabArgs};
use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    corpus: Option<PathBuf>,
    out_dir: Option<PathBuf>,
    seed: Option<u64>,
    stoplist: Option<PathBuf>,
    emoticons: Option<PathBuf>,
    lexicon: Option<PathBuf>,
    english_only: Option<bool>,
    dedup: Option<bool>,
    #[serde(default)]
    pipeline: PipelineSection,
    #[serde(default)]
    vocabulary: VocabularySection,
    #[serde(default)]
    lda: LdaSection,
    #[serde(default)]
    sweep: SweepSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PipelineSection {
    lowercase: Option<bool>,
    strip_urls: Option<bool>,
    strip_mentions: Option<bool>,
    strip_hashtags: Option<bool>,
    collapse_repeats: Option<bool>,
    strip_punctuation: Option<bool>,
    map_emoticons: Option<bool>,
    remove_stopwords: Option<bool>,
    stem: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct VocabularySection {
    min_df: Option<usize>,
    max_df_ratio: Option<f64>,
    drop_terms: Option<Vec<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct LdaSection {
    topics: Option<usize>,
    alpha: Option<f64>,
    alpha_50_over_k: Option<bool>,
    beta: Option<f64>,
    sweeps: Option<usize>,
    top_terms: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    ks: Option<Vec<usize>>,
    alphas: Option<Vec<f64>>,
    betas: Option<Vec<f64>>,
    labels: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let mut cfg: FileConfig =
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.corpus,
            &mut cfg.out_dir,
            &mut cfg.stoplist,
            &mut cfg.emoticons,
            &mut cfg.lexicon,
            &mut cfg.sweep.labels,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

/// Everything a subcommand needs, after flags, file and defaults are merged.
#[derive(Debug, Clone)]
pub struct Settings {
    pub corpus: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub stoplist: Option<PathBuf>,
    pub emoticons: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub english_only: bool,
    pub dedup: bool,
    pub pipeline: PipelineConfig,
    pub min_df: usize,
    pub max_df_ratio: f64,
    pub drop_terms: Vec<String>,
    pub matrix: Option<(PathBuf, PathBuf)>,
    pub topics: usize,
    pub alpha: Option<f64>,
    pub alpha_50_over_k: bool,
    pub beta: f64,
    pub sweeps: usize,
    pub top_terms: usize,
    pub ks: Vec<usize>,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub labels: Option<PathBuf>,
}

fn stage_flag(p: &mut PipelineConfig, stage: Stage) -> &mut bool {
    match stage {
        Stage::Lowercase => &mut p.lowercase,
        Stage::Urls => &mut p.strip_urls,
        Stage::Mentions => &mut p.strip_mentions,
        Stage::Hashtags => &mut p.strip_hashtags,
        Stage::Repeats => &mut p.collapse_repeats,
        Stage::Punctuation => &mut p.strip_punctuation,
        Stage::Emoticons => &mut p.map_emoticons,
        Stage::Stopwords => &mut p.remove_stopwords,
        Stage::Stem => &mut p.stem,
    }
}

impl Settings {
    pub fn resolve(g: &GlobalArgs, file: FileConfig) -> Self {
        let mut pipeline = PipelineConfig::default();
        let ps = &file.pipeline;
        for (slot, value) in [
            (&mut pipeline.lowercase, ps.lowercase),
            (&mut pipeline.strip_urls, ps.strip_urls),
            (&mut pipeline.strip_mentions, ps.strip_mentions),
            (&mut pipeline.strip_hashtags, ps.strip_hashtags),
            (&mut pipeline.collapse_repeats, ps.collapse_repeats),
            (&mut pipeline.strip_punctuation, ps.strip_punctuation),
            (&mut pipeline.map_emoticons, ps.map_emoticons),
            (&mut pipeline.remove_stopwords, ps.remove_stopwords),
            (&mut pipeline.stem, ps.stem),
        ] {
            if let Some(v) = value {
                *slot = v;
            }
        }
        for &s in &g.disable {
            *stage_flag(&mut pipeline, s) = false;
        }
        for &s in &g.enable {
            *stage_flag(&mut pipeline, s) = true;
        }

        Settings {
            corpus: g.corpus.clone().or(file.corpus),
            out_dir: g.out_dir.clone().or(file.out_dir).unwrap_or_else(|| "out".into()),
            seed: g.seed.or(file.seed).unwrap_or(42),
            stoplist: g.stoplist.clone().or(file.stoplist),
            emoticons: g.emoticons.clone().or(file.emoticons),
            lexicon: file.lexicon,
            english_only: g.english_only.or(file.english_only).unwrap_or(true),
            dedup: g.dedup.or(file.dedup).unwrap_or(false),
            pipeline,
            min_df: file.vocabulary.min_df.unwrap_or(2),
            max_df_ratio: file.vocabulary.max_df_ratio.unwrap_or(0.95),
            drop_terms: file.vocabulary.drop_terms.unwrap_or_default(),
            matrix: None,
            topics: file.lda.topics.unwrap_or(15),
            alpha: file.lda.alpha,
            alpha_50_over_k: file.lda.alpha_50_over_k.unwrap_or(false),
            beta: file.lda.beta.unwrap_or(0.01),
            sweeps: file.lda.sweeps.unwrap_or(1000),
            top_terms: file.lda.top_terms.unwrap_or(10),
            ks: file.sweep.ks.unwrap_or_else(|| vec![5, 10, 15, 20]),
            alphas: file.sweep.alphas.unwrap_or_else(|| vec![0.1]),
            betas: file.sweep.betas.unwrap_or_else(|| vec![0.01]),
            labels: file.sweep.labels,
        }
    }

    pub fn apply_vocab(&mut self, a: &VocabArgs) {
        if let Some(v) = a.min_df {
            self.min_df = v;
        }
        if let Some(v) = a.max_df_ratio {
            self.max_df_ratio = v;
        }
        if !a.drop_term.is_empty() {
            self.drop_terms = a.drop_term.clone();
        }
    }

    fn apply_source(&mut self, a: &MatrixSource) {
        self.apply_vocab(&a.vocab_opts);
        if let (Some(m), Some(v)) = (&a.matrix, &a.vocab) {
            self.matrix = Some((m.clone(), v.clone()));
        }
        if let Some(n) = a.sweeps {
            self.sweeps = n;
        }
    }

    pub fn apply_train(&mut self, a: &TrainArgs) {
        self.apply_source(&a.source);
        if let Some(k) = a.topics {
            self.topics = k;
        }
        if let Some(x) = a.alpha {
            self.alpha = Some(x);
            self.alpha_50_over_k = false;
        }
        if let Some(flag) = a.alpha_50_over_k {
            self.alpha_50_over_k = flag;
        }
        if let Some(x) = a.beta {
            self.beta = x;
        }
        if let Some(n) = a.top_terms {
            self.top_terms = n;
        }
    }

    pub fn apply_sweep(&mut self, a: &SweepArgs) {
        self.apply_source(&a.source);
        if let Some(v) = &a.ks {
            self.ks = v.clone();
        }
        if let Some(v) = &a.alphas {
            self.alphas = v.clone();
        }
        if let Some(v) = &a.betas {
            self.betas = v.clone();
        }
        if a.labels.is_some() {
            self.labels = a.labels.clone();
        }
    }

    /// The alpha used for a model with `k` topics.
    pub fn alpha_for(&self, k: usize) -> f64 {
        if self.alpha_50_over_k {
            tweetscope::lda::LdaConfig::heuristic_alpha(k)
        } else {
            self.alpha.unwrap_or(0.1)
        }
    }
}
