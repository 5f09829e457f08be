use std::collections::BTreeSet;
use std::path::PathBuf;

use tweetscope::corpus::{self, BucketWidth, Corpus, TimeMetric, TweetField};
use tweetscope::dtm::{self, DocTermMatrix, Vocabulary};
use tweetscope::emotion::{score_tokens, EmotionLexicon, EmotionProfile};
use tweetscope::lda::{self, LdaConfig};
use tweetscope::nmi::{self, Partition, Reference, SweepGrid};
use tweetscope::report;
use tweetscope::textprep::{self, EmoticonTable, PipelineConfig, StopList};

use crate::config::Settings;
use crate::output::Staging;
use crate::CliError;

const TOP_SOURCES: usize = 7;
const TOP_USERS: usize = 10;

fn load_tweets(s: &Settings, english_only: bool) -> Result<Corpus, CliError> {
    let path = s
        .corpus
        .as_ref()
        .ok_or_else(|| CliError::Usage("no corpus given (use --corpus)".into()))?;
    let mut c = corpus::load_corpus(path)?;
    if !c.skipped_lines().is_empty() {
        eprintln!(
            "warning: {}: skipped {} malformed line(s), first at line {}",
            path.display(),
            c.skipped_lines().len(),
            c.skipped_lines()[0]
        );
    }
    if english_only {
        c = corpus::filter_english(&c);
    }
    if s.dedup {
        c = c.dedup_by_text();
    }
    if c.is_empty() {
        return Err(tweetscope::Error::NoTweets.into());
    }
    Ok(c)
}

fn tokenize(s: &Settings, c: &Corpus, pipeline: &PipelineConfig) -> Result<Vec<Vec<String>>, CliError> {
    let table = match &s.emoticons {
        Some(p) => EmoticonTable::load(p)?,
        None => EmoticonTable::builtin(),
    };
    let stoplist = match &s.stoplist {
        Some(p) => StopList::load(p)?,
        None => StopList::builtin(),
    };
    Ok(textprep::preprocess_corpus(c.tweets(), pipeline, &table, &stoplist))
}

fn vocabulary(s: &Settings, docs: &[Vec<String>]) -> Result<Vocabulary, CliError> {
    let drop: BTreeSet<String> = s.drop_terms.iter().cloned().collect();
    Ok(dtm::build_vocabulary_excluding(docs, s.min_df, s.max_df_ratio, &drop)?)
}

/// Cached matrix if one was named, otherwise the corpus run through the
/// preprocessing pipeline.
fn matrix_and_vocab(s: &Settings) -> Result<(DocTermMatrix, Vocabulary), CliError> {
    if let Some((m, v)) = &s.matrix {
        let matrix = DocTermMatrix::load(m)?;
        let vocab = Vocabulary::load(v)?;
        if matrix.n_terms() != vocab.len() {
            return Err(tweetscope::Error::LengthMismatch {
                left: matrix.n_terms(),
                right: vocab.len(),
            }
            .into());
        }
        return Ok((matrix, vocab));
    }
    if s.corpus.is_none() {
        return Err(CliError::Usage("need --corpus, or --matrix with --vocab".into()));
    }
    let docs = tokenize(s, &load_tweets(s, s.english_only)?, &s.pipeline)?;
    let vocab = vocabulary(s, &docs)?;
    let matrix = dtm::build_dtm(&docs, &vocab)?;
    Ok((matrix, vocab))
}

fn check_topics(k: usize) -> Result<(), CliError> {
    if k < 2 {
        return Err(CliError::Usage(format!("topic count must be at least 2, got {k}")));
    }
    Ok(())
}

fn check_sweeps(n: usize) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Usage("sweeps must be at least 1".into()));
    }
    Ok(())
}

pub fn stats(s: &Settings) -> Result<Vec<PathBuf>, CliError> {
    let c = load_tweets(s, false)?;
    let retweets = corpus::time_histogram(&c, BucketWidth::Hour, TimeMetric::RetweetSum)?;
    let words = corpus::time_histogram(&c, BucketWidth::Hour, TimeMetric::AvgWords)?;
    let sources = corpus::top_k_by(&c, TweetField::Source, TOP_SOURCES)?;
    let users = corpus::top_k_by(&c, TweetField::UserHandle, TOP_USERS)?;
    // word-cloud counts keep surface forms
    let pipeline = PipelineConfig { stem: false, ..s.pipeline };
    let terms = report::term_frequencies(&tokenize(s, &c, &pipeline)?);

    let mut out = Staging::new(&s.out_dir)?;
    out.write("hourly_retweets.csv", &report::time_series_csv(&retweets)?)?;
    out.write("hourly_avg_words.csv", &report::time_series_csv(&words)?)?;
    out.write("top_sources.csv", &report::ranked_counts_csv("source", &sources)?)?;
    out.write("top_users.csv", &report::ranked_counts_csv("user", &users)?)?;
    out.write("term_frequencies.csv", &report::ranked_counts_csv("term", &terms)?)?;
    println!("tweets: {}", c.len());
    out.commit()
}

pub fn preprocess(s: &Settings) -> Result<Vec<PathBuf>, CliError> {
    let c = load_tweets(s, s.english_only)?;
    let docs = tokenize(s, &c, &s.pipeline)?;
    let vocab = vocabulary(s, &docs)?;
    let matrix = dtm::build_dtm(&docs, &vocab)?;
    let tokens: String = docs.iter().map(|d| d.join(" ") + "\n").collect();

    let mut out = Staging::new(&s.out_dir)?;
    out.write("tokens.txt", &tokens)?;
    out.write("vocab.txt", &vocab.to_text())?;
    out.write("dtm.txt", &matrix.to_triplets())?;
    println!("vocabulary size: {}", vocab.len());
    println!("documents: {}", matrix.n_docs());
    let empty = matrix.empty_docs().len();
    if empty > 0 {
        println!("empty documents after pruning: {empty}");
    }
    out.commit()
}

pub fn train(s: &Settings) -> Result<Vec<PathBuf>, CliError> {
    check_topics(s.topics)?;
    check_sweeps(s.sweeps)?;
    if s.top_terms == 0 {
        return Err(CliError::Usage("top-terms must be at least 1".into()));
    }
    let cfg = LdaConfig {
        n_topics: s.topics,
        alpha: s.alpha_for(s.topics),
        beta: s.beta,
        sweeps: s.sweeps,
        seed: s.seed,
    };
    cfg.validate()?;
    println!("seed: {}", s.seed);
    let (m, vocab) = matrix_and_vocab(s)?;
    let (_, model) = lda::train(&m, &cfg)?;
    let top = lda::top_terms(&model, &vocab, s.top_terms)?;

    let mut out = Staging::new(&s.out_dir)?;
    out.write("theta.csv", &report::theta_csv(&model.theta)?)?;
    out.write("phi.csv", &report::phi_csv(&model.phi, &vocab)?)?;
    out.write("top_terms.csv", &report::top_terms_csv(&top)?)?;
    println!(
        "K={} alpha={} beta={} sweeps={} documents={} terms={}",
        cfg.n_topics,
        cfg.alpha,
        cfg.beta,
        cfg.sweeps,
        m.n_docs(),
        m.n_terms()
    );
    out.commit()
}

pub fn sweep(s: &Settings) -> Result<Vec<PathBuf>, CliError> {
    if s.ks.is_empty() || s.alphas.is_empty() || s.betas.is_empty() {
        return Err(CliError::Usage("sweep grids must not be empty".into()));
    }
    s.ks.iter().try_for_each(|&k| check_topics(k))?;
    check_sweeps(s.sweeps)?;
    println!("seed: {}", s.seed);
    let (m, _) = matrix_and_vocab(s)?;
    let reference = match &s.labels {
        Some(p) => Reference::Labels(Partition::load(p)?),
        None => Reference::SelfArgmax,
    };
    let grid = SweepGrid {
        n_topics: s.ks.clone(),
        alphas: s.alphas.clone(),
        betas: s.betas.clone(),
        sweeps: s.sweeps,
        base_seed: s.seed,
    };
    let result = nmi::model_sweep(&m, &grid, &reference)?;

    let mut out = Staging::new(&s.out_dir)?;
    out.write("sweep.csv", &report::sweep_csv(&result)?)?;
    if let Some(b) = result.best() {
        println!(
            "best model: K={} alpha={} beta={} nmi={:.4} (seed {})",
            b.n_topics, b.alpha, b.beta, b.nmi, b.seed
        );
    }
    out.commit()
}

pub fn emotions(s: &Settings) -> Result<Vec<PathBuf>, CliError> {
    let path = s
        .lexicon
        .as_ref()
        .ok_or_else(|| CliError::Usage("no lexicon given (use --lexicon)".into()))?;
    let lex = EmotionLexicon::load(path)?;
    let c = load_tweets(s, s.english_only)?;
    // lexicon entries are surface words
    let pipeline = PipelineConfig { stem: false, ..s.pipeline };
    let docs = tokenize(s, &c, &pipeline)?;
    let profiles: Vec<EmotionProfile> = docs.iter().map(|d| score_tokens(d, &lex)).collect();

    let mut out = Staging::new(&s.out_dir)?;
    out.write("emotions_per_tweet.csv", &report::emotions_per_tweet_csv(c.tweets(), &profiles)?)?;
    out.write("emotions_aggregate.csv", &report::emotions_aggregate_csv(&profiles)?)?;
    println!("tweets: {}", c.len());
    out.commit()
}
