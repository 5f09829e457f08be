//! Tweet text cleanup: emoticon mapping, normalization, tokenization,
//! stopword removal and Porter stemming.
//!
//! [`preprocess`] runs the stages in a fixed order:
//! emoticons, normalize, tokenize, stopwords, stem.

mod porter;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;

use crate::corpus::Tweet;
use crate::error::{Error, Result};

pub use porter::porter_stem;

pub const POSITIVE_EMOTICON: &str = "positive_emoticon";
pub const NEGATIVE_EMOTICON: &str = "negative_emoticon";

const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");
const DEFAULT_EMOTICONS: &str = include_str!("../../data/emoticons.tsv");

static URL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?:https?://|www\.)\S*").unwrap());
static MENTION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"@\w+").unwrap());
static HASHTAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"#\S+").unwrap());

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineConfig {
    pub lowercase: bool,
    pub strip_urls: bool,
    pub strip_mentions: bool,
    /// Drop hashtags together with their word. When off, only the `#` goes
    /// (with the rest of the punctuation) and the bare word is kept.
    pub strip_hashtags: bool,
    pub collapse_repeats: bool,
    /// Replace punctuation, symbols and digits by spaces.
    pub strip_punctuation: bool,
    pub map_emoticons: bool,
    pub remove_stopwords: bool,
    pub stem: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            lowercase: true,
            strip_urls: true,
            strip_mentions: true,
            strip_hashtags: true,
            collapse_repeats: true,
            strip_punctuation: true,
            map_emoticons: true,
            remove_stopwords: true,
            stem: true,
        }
    }
}

impl PipelineConfig {
    /// Every stage disabled: preprocessing reduces to whitespace splitting.
    pub fn disabled() -> Self {
        Self {
            lowercase: false,
            strip_urls: false,
            strip_mentions: false,
            strip_hashtags: false,
            collapse_repeats: false,
            strip_punctuation: false,
            map_emoticons: false,
            remove_stopwords: false,
            stem: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EmoticonSentiment {
    Positive,
    Negative,
}

impl EmoticonSentiment {
    pub fn token(self) -> &'static str {
        match self {
            EmoticonSentiment::Positive => POSITIVE_EMOTICON,
            EmoticonSentiment::Negative => NEGATIVE_EMOTICON,
        }
    }

    fn from_token(s: &str) -> Option<Self> {
        match s {
            POSITIVE_EMOTICON => Some(Self::Positive),
            NEGATIVE_EMOTICON => Some(Self::Negative),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmoticonTable {
    entries: BTreeMap<String, EmoticonSentiment>,
}

impl EmoticonTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, emoticon: impl Into<String>, sentiment: EmoticonSentiment) {
        self.entries.insert(emoticon.into(), sentiment);
    }

    pub fn get(&self, emoticon: &str) -> Option<EmoticonSentiment> {
        self.entries.get(emoticon).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses `emoticon<TAB>sentinel` lines. Blank lines and lines starting
    /// with `##` are skipped.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut table = Self::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with("##") {
                continue;
            }
            let bad = |message: String| Error::Format {
                path: origin.to_path_buf(),
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('\t')
                .ok_or_else(|| bad("expected emoticon<TAB>sentinel".into()))?;
            let key = key.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(bad(format!("invalid emoticon {key:?}")));
            }
            let sentiment = EmoticonSentiment::from_token(value.trim())
                .ok_or_else(|| bad(format!("unknown sentinel {:?}", value.trim())))?;
            if table.entries.insert(key.to_string(), sentiment).is_some() {
                return Err(bad(format!("duplicate emoticon {key:?}")));
            }
        }
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// The bundled table of common emoticons.
    pub fn builtin() -> Self {
        Self::parse(DEFAULT_EMOTICONS, Path::new("<builtin emoticons>"))
            .expect("bundled emoticon table is well formed")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopList {
    words: BTreeSet<String>,
}

impl StopList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// One word per line, lowercased on read. Blank lines and `#` comments
    /// are skipped.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut words = BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            let w = line.trim();
            if w.is_empty() || w.starts_with('#') {
                continue;
            }
            if w.contains(char::is_whitespace) {
                return Err(Error::Format {
                    path: origin.to_path_buf(),
                    line: i + 1,
                    message: format!("stopword {w:?} contains whitespace"),
                });
            }
            words.insert(w.to_lowercase());
        }
        Ok(Self { words })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// The bundled English list.
    pub fn builtin() -> Self {
        Self::parse(DEFAULT_STOPWORDS, Path::new("<builtin stopwords>"))
            .expect("bundled stoplist is well formed")
    }
}

impl<S: Into<String>> FromIterator<S> for StopList {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self {
            words: iter.into_iter().map(|s| s.into().to_lowercase()).collect(),
        }
    }
}

/// Shortens every run of three or more identical letters to two.
fn collapse_repeats(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut prev = None;
    let mut run = 0;
    for c in text.chars() {
        if Some(c) == prev {
            run += 1;
        } else {
            prev = Some(c);
            run = 1;
        }
        if run <= 2 || !c.is_alphabetic() {
            out.push(c);
        }
    }
    out
}

/// Characters that survive punctuation stripping: letters, `_` (used by the
/// emoticon sentinels) and whitespace.
fn is_word_char(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

/// Cleans tweet text: lowercase, URLs, @mentions, hashtags, repeated
/// letters, punctuation/digits, then whitespace collapse and trim. Each stage
/// is gated by its `cfg` flag.
pub fn normalize(text: &str, cfg: &PipelineConfig) -> String {
    let mut s = if cfg.lowercase {
        text.to_lowercase()
    } else {
        text.to_string()
    };
    if cfg.strip_urls {
        s = URL.replace_all(&s, " ").into_owned();
    }
    if cfg.strip_mentions {
        s = MENTION.replace_all(&s, " ").into_owned();
    }
    if cfg.strip_hashtags {
        s = HASHTAG.replace_all(&s, " ").into_owned();
    }
    if cfg.collapse_repeats {
        s = collapse_repeats(&s);
    }
    if cfg.strip_punctuation {
        s = s
            .chars()
            .map(|c| if is_word_char(c) || c.is_whitespace() { c } else { ' ' })
            .collect();
    }
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Replaces whitespace-delimited tokens that exactly match a table key by
/// their sentinel token. Must run before punctuation is stripped.
pub fn map_emoticons(text: &str, table: &EmoticonTable) -> String {
    text.split_whitespace()
        .map(|tok| table.get(tok).map_or(tok, |s| s.token()))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

pub fn remove_stopwords(tokens: Vec<String>, stoplist: &StopList) -> Vec<String> {
    tokens.into_iter().filter(|t| !stoplist.contains(t)).collect()
}

fn is_sentinel(token: &str) -> bool {
    token == POSITIVE_EMOTICON || token == NEGATIVE_EMOTICON
}

/// Full per-text pipeline, honouring the `cfg` flags.
pub fn preprocess_text(
    text: &str,
    cfg: &PipelineConfig,
    table: &EmoticonTable,
    stoplist: &StopList,
) -> Vec<String> {
    let mapped;
    let text = if cfg.map_emoticons {
        mapped = map_emoticons(text, table);
        mapped.as_str()
    } else {
        text
    };
    let mut tokens = tokenize(&normalize(text, cfg));
    if cfg.remove_stopwords {
        tokens = remove_stopwords(tokens, stoplist);
    }
    if cfg.stem {
        for t in tokens.iter_mut().filter(|t| !is_sentinel(t)) {
            *t = porter_stem(t);
        }
        // a stem can land on a stopword ("ones" -> "on")
        if cfg.remove_stopwords {
            tokens.retain(|t| !stoplist.contains(t));
        }
    }
    tokens
}

pub fn preprocess(
    tweet: &Tweet,
    cfg: &PipelineConfig,
    table: &EmoticonTable,
    stoplist: &StopList,
) -> Vec<String> {
    preprocess_text(&tweet.text, cfg, table, stoplist)
}

/// Runs the pipeline over every tweet of a corpus, in parallel. Output order
/// follows the corpus.
pub fn preprocess_corpus(
    tweets: &[Tweet],
    cfg: &PipelineConfig,
    table: &EmoticonTable,
    stoplist: &StopList,
) -> Vec<Vec<String>> {
    use rayon::prelude::*;
    tweets
        .par_iter()
        .map(|t| preprocess(t, cfg, table, stoplist))
        .collect()
}
