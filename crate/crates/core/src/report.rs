//! CSV renderings of every table the pipeline emits.
//!
//! All tables have a header row, use `,` as separator and `.` as decimal
//! point. Reals are printed with the shortest representation that reads
//! back to the same `f64`, so output is stable across runs.
//!
//! | file | header |
//! |------|--------|
//! | `hourly_retweets.csv`, `hourly_avg_words.csv` | `bucket_start,value` |
//! | `top_sources.csv` | `source,count` |
//! | `top_users.csv` | `user,count` |
//! | `term_frequencies.csv` | `term,count` |
//! | `theta.csv` | `doc,topic_0,...,topic_{K-1}` |
//! | `phi.csv` | `topic,<term_0>,...,<term_{V-1}>` |
//! | `top_terms.csv` | `topic,rank,term,probability` |
//! | `sweep.csv` | `K,alpha,beta,nmi,seed` |
//! | `emotions_per_tweet.csv` | `tweet_id,anger,...,positive,dominant_label` |
//! | `emotions_aggregate.csv` | `category,word_count,dominant_tweets` |

use std::collections::HashMap;

use crate::corpus::{Tweet, TimeSeriesBucket};
use crate::dtm::Vocabulary;
use crate::emotion::{dominant_histogram, dominant_label, AffectCategory, DominantLabel, EmotionProfile};
use crate::error::Result;
use crate::lda::{Matrix, TopTerm};
use crate::nmi::SweepResult;

fn render<F>(header: &[&str], fill: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    fill(&mut w)?;
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields is utf-8"))
}

pub fn time_series_csv(buckets: &[TimeSeriesBucket]) -> Result<String> {
    render(&["bucket_start", "value"], |w| {
        for b in buckets {
            w.write_record([b.bucket_start.format("%Y-%m-%dT%H:%M:%SZ").to_string(), b.value.to_string()])?;
        }
        Ok(())
    })
}

pub fn ranked_counts_csv(label: &str, rows: &[(String, usize)]) -> Result<String> {
    render(&[label, "count"], |w| {
        for (v, n) in rows {
            w.write_record([v.as_str(), &n.to_string()])?;
        }
        Ok(())
    })
}

/// Token counts over all documents, most frequent first, ties by term.
pub fn term_frequencies<S: AsRef<str>>(docs: &[Vec<S>]) -> Vec<(String, usize)> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in docs.iter().flatten() {
        *counts.entry(t.as_ref()).or_default() += 1;
    }
    let mut rows: Vec<(String, usize)> = counts.into_iter().map(|(t, n)| (t.to_string(), n)).collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    rows
}

pub fn theta_csv(theta: &Matrix) -> Result<String> {
    let header: Vec<String> = std::iter::once("doc".to_string())
        .chain((0..theta.cols()).map(|k| format!("topic_{k}")))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    render(&header, |w| {
        for (d, row) in theta.iter_rows().enumerate() {
            w.write_record(std::iter::once(d.to_string()).chain(row.iter().map(f64::to_string)))?;
        }
        Ok(())
    })
}

pub fn phi_csv(phi: &Matrix, vocab: &Vocabulary) -> Result<String> {
    let header: Vec<&str> = std::iter::once("topic")
        .chain(vocab.terms().iter().map(String::as_str))
        .collect();
    render(&header, |w| {
        for (k, row) in phi.iter_rows().enumerate() {
            w.write_record(std::iter::once(k.to_string()).chain(row.iter().map(f64::to_string)))?;
        }
        Ok(())
    })
}

/// Ranks start at 1.
pub fn top_terms_csv(top: &[Vec<TopTerm>]) -> Result<String> {
    render(&["topic", "rank", "term", "probability"], |w| {
        for (k, terms) in top.iter().enumerate() {
            for (r, t) in terms.iter().enumerate() {
                w.write_record([k.to_string(), (r + 1).to_string(), t.term.clone(), t.probability.to_string()])?;
            }
        }
        Ok(())
    })
}

pub fn sweep_csv(result: &SweepResult) -> Result<String> {
    render(&["K", "alpha", "beta", "nmi", "seed"], |w| {
        for r in &result.rows {
            w.write_record([
                r.n_topics.to_string(),
                r.alpha.to_string(),
                r.beta.to_string(),
                r.nmi.to_string(),
                r.seed.to_string(),
            ])?;
        }
        Ok(())
    })
}

pub fn emotions_per_tweet_csv(tweets: &[Tweet], profiles: &[EmotionProfile]) -> Result<String> {
    let header: Vec<&str> = std::iter::once("tweet_id")
        .chain(AffectCategory::ALL.iter().map(|c| c.name()))
        .chain(["dominant_label"])
        .collect();
    render(&header, |w| {
        for (t, p) in tweets.iter().zip(profiles) {
            w.write_record(
                std::iter::once(t.id.clone())
                    .chain(p.counts().iter().map(u64::to_string))
                    .chain([dominant_label(p).to_string()]),
            )?;
        }
        Ok(())
    })
}

/// Both corpus-level histograms: associated-word counts per category and
/// tweets per dominant label. Cells that do not apply are left empty.
pub fn emotions_aggregate_csv(profiles: &[EmotionProfile]) -> Result<String> {
    let total = crate::emotion::aggregate(profiles);
    let dominant: HashMap<DominantLabel, u64> = dominant_histogram(profiles).into_iter().collect();
    render(&["category", "word_count", "dominant_tweets"], |w| {
        for c in AffectCategory::ALL {
            let tweets = if c.is_emotion() {
                dominant[&DominantLabel::Emotion(c)].to_string()
            } else {
                String::new()
            };
            w.write_record([c.name().to_string(), total.count(c).to_string(), tweets])?;
        }
        w.write_record(["neutral".to_string(), String::new(), dominant[&DominantLabel::Neutral].to_string()])
    })
}
