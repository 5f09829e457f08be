//! Tweet corpora: loading from JSON-lines files, language filtering and the
//! exploratory aggregates (time series, top sources and handles).
//!
//! # File format
//!
//! One JSON object per line:
//!
//! ```text
//! {"id":"1","created_at":"2016-11-08T20:15:00Z","user":"rbi","text":"...","source":"Twitter Web Client","retweet_count":3,"lang":"en"}
//! ```
//!
//! `id` may be a string or an integer. `created_at` is ISO-8601; values
//! without an offset are read as UTC. `source` and `lang` are optional and
//! unknown fields are ignored. Lines that fail to parse are skipped and
//! reported through [`Corpus::skipped_lines`].

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, DurationRound, NaiveDateTime, TimeDelta, Utc};
use serde::Deserialize;

use crate::error::{Error, Result};

/// Source value used when a tweet carries no client platform.
pub const UNKNOWN_SOURCE: &str = "unknown";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tweet {
    pub id: String,
    pub timestamp: DateTime<Utc>,
    pub user_handle: String,
    pub text: String,
    pub source: String,
    pub retweet_count: u64,
    pub lang: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Provenance {
    pub path: PathBuf,
    pub loaded_at: DateTime<Utc>,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    tweets: Vec<Tweet>,
    provenance: Option<Provenance>,
    skipped_lines: Vec<usize>,
}

/// Two corpora are equal when they hold the same tweets in the same order;
/// load time is not part of the identity.
impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.tweets == other.tweets
    }
}

impl Corpus {
    /// Builds a corpus from in-memory tweets, rejecting duplicate ids.
    pub fn from_tweets(tweets: Vec<Tweet>) -> Result<Self> {
        let mut seen: HashMap<&str, usize> = HashMap::with_capacity(tweets.len());
        for (i, t) in tweets.iter().enumerate() {
            if t.id.is_empty() {
                return Err(Error::InvalidParameter(format!("tweet #{} has an empty id", i + 1)));
            }
            if let Some(first) = seen.insert(&t.id, i + 1) {
                return Err(Error::DuplicateId {
                    id: t.id.clone(),
                    first_line: first,
                    second_line: i + 1,
                });
            }
        }
        Ok(Self {
            tweets,
            provenance: None,
            skipped_lines: Vec::new(),
        })
    }

    pub fn tweets(&self) -> &[Tweet] {
        &self.tweets
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    /// 1-based line numbers of records that could not be parsed.
    pub fn skipped_lines(&self) -> &[usize] {
        &self.skipped_lines
    }

    fn retain(&self, keep: impl Fn(&Tweet) -> bool) -> Corpus {
        Corpus {
            tweets: self.tweets.iter().filter(|t| keep(t)).cloned().collect(),
            provenance: self.provenance.clone(),
            skipped_lines: self.skipped_lines.clone(),
        }
    }

    /// Keeps the first tweet of every group sharing identical text.
    pub fn dedup_by_text(&self) -> Corpus {
        let mut seen = std::collections::HashSet::new();
        let kept = self
            .tweets
            .iter()
            .filter(|t| seen.insert(t.text.as_str()))
            .cloned()
            .collect();
        Corpus {
            tweets: kept,
            provenance: self.provenance.clone(),
            skipped_lines: self.skipped_lines.clone(),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawId {
    Text(String),
    Number(u64),
}

#[derive(Deserialize)]
struct RawTweet {
    id: RawId,
    created_at: String,
    user: String,
    text: String,
    #[serde(default)]
    source: Option<String>,
    #[serde(default)]
    retweet_count: u64,
    #[serde(default)]
    lang: Option<String>,
}

/// Parses an ISO-8601 timestamp, truncated to whole seconds. Offsets are
/// honoured; naive values are taken as UTC.
pub fn parse_timestamp(raw: &str) -> Option<DateTime<Utc>> {
    let raw = raw.trim();
    let parsed = DateTime::parse_from_rfc3339(raw)
        .map(|dt| dt.with_timezone(&Utc))
        .ok()
        .or_else(|| {
            ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"]
                .iter()
                .find_map(|fmt| NaiveDateTime::parse_from_str(raw, fmt).ok())
                .map(|naive| naive.and_utc())
        })?;
    parsed.duration_trunc(TimeDelta::seconds(1)).ok()
}

fn parse_record(line: &str) -> Option<Tweet> {
    let raw: RawTweet = serde_json::from_str(line).ok()?;
    let id = match raw.id {
        RawId::Text(s) => s,
        RawId::Number(n) => n.to_string(),
    };
    if id.is_empty() {
        return None;
    }
    let lang = raw
        .lang
        .map(|l| l.trim().to_lowercase())
        .filter(|l| !l.is_empty());
    Some(Tweet {
        id,
        timestamp: parse_timestamp(&raw.created_at)?,
        user_handle: raw.user,
        text: raw.text,
        source: raw.source.unwrap_or_default(),
        retweet_count: raw.retweet_count,
        lang,
    })
}

/// Loads a JSON-lines tweet file. Malformed lines are skipped and recorded;
/// blank lines are ignored.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8_lossy(&bytes);

    let mut tweets = Vec::new();
    let mut lines_of: HashMap<String, usize> = HashMap::new();
    let mut skipped = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let Some(tweet) = parse_record(line) else {
            skipped.push(lineno);
            continue;
        };
        match lines_of.entry(tweet.id.clone()) {
            Entry::Occupied(e) => {
                return Err(Error::DuplicateId {
                    id: tweet.id,
                    first_line: *e.get(),
                    second_line: lineno,
                });
            }
            Entry::Vacant(e) => {
                e.insert(lineno);
            }
        }
        tweets.push(tweet);
    }
    if tweets.is_empty() {
        return Err(Error::EmptyCorpus { path: path.to_path_buf() });
    }
    Ok(Corpus {
        tweets,
        provenance: Some(Provenance {
            path: path.to_path_buf(),
            loaded_at: Utc::now(),
        }),
        skipped_lines: skipped,
    })
}

/// Minimum share of ASCII letters among alphabetic characters for an
/// untagged tweet to count as English.
pub const ENGLISH_ASCII_RATIO: f64 = 0.8;

fn looks_english(text: &str) -> bool {
    let (ascii, total) = text
        .chars()
        .filter(|c| c.is_alphabetic())
        .fold((0usize, 0usize), |(a, t), c| (a + c.is_ascii() as usize, t + 1));
    total > 0 && ascii as f64 >= ENGLISH_ASCII_RATIO * total as f64
}

/// Keeps tweets tagged `en`; untagged tweets are kept when at least 80% of
/// their alphabetic characters are ASCII.
pub fn filter_english(corpus: &Corpus) -> Corpus {
    corpus.retain(|t| match t.lang.as_deref() {
        Some(lang) => lang == "en",
        None => looks_english(&t.text),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BucketWidth {
    Hour,
    Minute,
}

impl BucketWidth {
    fn delta(self) -> TimeDelta {
        match self {
            BucketWidth::Hour => TimeDelta::hours(1),
            BucketWidth::Minute => TimeDelta::minutes(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeMetric {
    RetweetSum,
    TweetCount,
    AvgWords,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesBucket {
    pub bucket_start: DateTime<Utc>,
    pub value: f64,
}

/// Aggregates the corpus into aligned time buckets. Only intervals holding
/// at least one tweet produce a bucket; output is sorted by start time.
pub fn time_histogram(
    corpus: &Corpus,
    width: BucketWidth,
    metric: TimeMetric,
) -> Result<Vec<TimeSeriesBucket>> {
    if corpus.is_empty() {
        return Err(Error::NoTweets);
    }
    // (tweets, retweets, words) per bucket
    let mut acc: BTreeMap<DateTime<Utc>, (u64, u64, u64)> = BTreeMap::new();
    for t in corpus.tweets() {
        let start = t
            .timestamp
            .duration_trunc(width.delta())
            .expect("bucket widths are small and timestamps in range");
        let slot = acc.entry(start).or_default();
        slot.0 += 1;
        slot.1 += t.retweet_count;
        slot.2 += t.text.split_whitespace().count() as u64;
    }
    Ok(acc
        .into_iter()
        .map(|(bucket_start, (n, rts, words))| TimeSeriesBucket {
            bucket_start,
            value: match metric {
                TimeMetric::RetweetSum => rts as f64,
                TimeMetric::TweetCount => n as f64,
                TimeMetric::AvgWords => words as f64 / n as f64,
            },
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TweetField {
    Source,
    UserHandle,
}

/// Full frequency table for a field, descending by count with ties broken
/// by value. Empty values are counted under [`UNKNOWN_SOURCE`].
pub fn value_counts(corpus: &Corpus, field: TweetField) -> Vec<(String, usize)> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in corpus.tweets() {
        let v = match field {
            TweetField::Source => t.source.as_str(),
            TweetField::UserHandle => t.user_handle.as_str(),
        };
        let v = if v.trim().is_empty() { UNKNOWN_SOURCE } else { v };
        *counts.entry(v).or_default() += 1;
    }
    let mut ranked: Vec<(String, usize)> =
        counts.into_iter().map(|(v, n)| (v.to_string(), n)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked
}

/// The `k` most frequent values of a field.
pub fn top_k_by(corpus: &Corpus, field: TweetField, k: usize) -> Result<Vec<(String, usize)>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let mut ranked = value_counts(corpus, field);
    ranked.truncate(k);
    Ok(ranked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;
    use std::io::Write;

    pub(crate) fn tweet(id: &str, hour: u32, text: &str) -> Tweet {
        Tweet {
            id: id.into(),
            timestamp: Utc.with_ymd_and_hms(2016, 11, 9, hour, 5, 0).unwrap(),
            user_handle: "u".into(),
            text: text.into(),
            source: "web".into(),
            retweet_count: 0,
            lang: Some("en".into()),
        }
    }

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    const GOOD: &str = r#"{"id":"1","created_at":"2016-11-08T20:00:00Z","user":"a","text":"hello world","source":"web","retweet_count":1,"lang":"en"}
{"id":2,"created_at":"2016-11-08 21:30:10","user":"b","text":"bank queue","retweet_count":0}
{"id":"3","created_at":"2016-11-08T21:45:00+05:30","user":"c","text":"atm","source":"iphone","retweet_count":4,"lang":"hi","geo":null}
"#;

    #[test]
    fn loads_well_formed_file() {
        let f = write_tmp(GOOD);
        let c = load_corpus(f.path()).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.skipped_lines().is_empty());
        assert_eq!(c.tweets()[1].id, "2");
        assert_eq!(c.tweets()[1].source, "");
        assert_eq!(c.tweets()[1].lang, None);
        // +05:30 offset normalised to UTC
        assert_eq!(
            c.tweets()[2].timestamp,
            Utc.with_ymd_and_hms(2016, 11, 8, 16, 15, 0).unwrap()
        );
    }

    #[test]
    fn truncated_line_is_skipped_and_reported() {
        let body = format!("{}{}", &GOOD[..GOOD.rfind("{\"id\":\"3\"").unwrap()], "{\"id\":\"3\",\"crea\n");
        let f = write_tmp(&body);
        let c = load_corpus(f.path()).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.skipped_lines(), &[3]);
    }

    #[test]
    fn duplicate_id_names_the_id() {
        let line = |id: &str| {
            format!(r#"{{"id":"{id}","created_at":"2016-11-08T20:00:00Z","user":"a","text":"x","retweet_count":0}}"#)
        };
        let body = [line("7"), line("8"), line("9"), line("10"), line("7")].join("\n");
        let f = write_tmp(&body);
        match load_corpus(f.path()) {
            Err(Error::DuplicateId { id, first_line, second_line }) => {
                assert_eq!(id, "7");
                assert_eq!((first_line, second_line), (1, 5));
            }
            other => panic!("expected duplicate id error, got {other:?}"),
        }
    }

    #[test]
    fn missing_and_empty_files() {
        assert!(load_corpus("/definitely/not/here.jsonl").unwrap_err().is_io());
        let f = write_tmp("not json\n\n");
        assert!(matches!(load_corpus(f.path()), Err(Error::EmptyCorpus { .. })));
    }

    #[test]
    fn negative_retweets_are_malformed() {
        let f = write_tmp(
            "{\"id\":\"1\",\"created_at\":\"2016-11-08T20:00:00Z\",\"user\":\"a\",\"text\":\"x\",\"retweet_count\":-1}\n\
             {\"id\":\"2\",\"created_at\":\"2016-11-08T20:00:00Z\",\"user\":\"a\",\"text\":\"x\",\"retweet_count\":1}\n",
        );
        let c = load_corpus(f.path()).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.skipped_lines(), &[1]);
    }

    #[test]
    fn english_filter_rules() {
        let mut hi = tweet("2", 1, "bank");
        hi.lang = Some("hi".into());
        let mut untagged = tweet("3", 1, "नोटबंदी से परेशान");
        untagged.lang = None;
        let mut untagged_en = tweet("4", 1, "long atm queue at bank नोट");
        untagged_en.lang = None;
        let c = Corpus::from_tweets(vec![tweet("1", 1, "bank"), hi, untagged, untagged_en]).unwrap();
        let kept: Vec<_> = filter_english(&c).tweets().iter().map(|t| t.id.clone()).collect();
        assert_eq!(kept, ["1", "4"]);
    }

    #[test]
    fn histogram_examples() {
        let mut a = tweet("1", 10, "a b c");
        a.retweet_count = 3;
        let mut b = tweet("2", 10, "x");
        b.retweet_count = 4;
        let c = Corpus::from_tweets(vec![a.clone(), b]).unwrap();
        let h = time_histogram(&c, BucketWidth::Hour, TimeMetric::RetweetSum).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].value, 7.0);
        assert_eq!(h[0].bucket_start, Utc.with_ymd_and_hms(2016, 11, 9, 10, 0, 0).unwrap());

        let single = Corpus::from_tweets(vec![a]).unwrap();
        let h = time_histogram(&single, BucketWidth::Hour, TimeMetric::AvgWords).unwrap();
        assert_eq!(h[0].value, 3.0);

        let gap = Corpus::from_tweets(vec![tweet("1", 10, "x"), tweet("2", 12, "y")]).unwrap();
        let h = time_histogram(&gap, BucketWidth::Hour, TimeMetric::TweetCount).unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(h[1].bucket_start.time().to_string(), "12:00:00");

        let h = time_histogram(&gap, BucketWidth::Minute, TimeMetric::TweetCount).unwrap();
        assert_eq!(h[0].bucket_start.time().to_string(), "10:05:00");

        let empty = Corpus::from_tweets(vec![]).unwrap();
        assert!(time_histogram(&empty, BucketWidth::Hour, TimeMetric::TweetCount).is_err());
    }

    #[test]
    fn top_k_examples() {
        let with_source = |id: &str, s: &str| {
            let mut t = tweet(id, 1, "x");
            t.source = s.into();
            t
        };
        let c = Corpus::from_tweets(vec![
            with_source("1", "web"),
            with_source("2", "iphone"),
            with_source("3", "web"),
            with_source("4", "iphone"),
            with_source("5", "web"),
        ])
        .unwrap();
        assert_eq!(top_k_by(&c, TweetField::Source, 1).unwrap(), [("web".to_string(), 3)]);

        let tie = Corpus::from_tweets(vec![
            with_source("1", "b"),
            with_source("2", "a"),
            with_source("3", "b"),
            with_source("4", "a"),
        ])
        .unwrap();
        assert_eq!(
            top_k_by(&tie, TweetField::Source, 2).unwrap(),
            [("a".to_string(), 2), ("b".to_string(), 2)]
        );

        let mut users = vec![tweet("1", 1, "x"), tweet("2", 1, "x")];
        users[1].user_handle = "v".into();
        let c = Corpus::from_tweets(users).unwrap();
        assert_eq!(top_k_by(&c, TweetField::UserHandle, 10).unwrap().len(), 2);
        assert!(top_k_by(&c, TweetField::UserHandle, 0).is_err());
    }

    #[test]
    fn missing_source_is_unknown() {
        let mut t = tweet("1", 1, "x");
        t.source.clear();
        let c = Corpus::from_tweets(vec![t, tweet("2", 1, "y")]).unwrap();
        let counts = value_counts(&c, TweetField::Source);
        assert_eq!(counts, [("unknown".to_string(), 1), ("web".to_string(), 1)]);
    }
}
