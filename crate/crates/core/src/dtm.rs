//! Vocabulary, sparse document-term counts and TF-IDF weights.
//!
//! The sparse triplet format used to cache a [`DocTermMatrix`] is
//!
//! ```text
//! D V NNZ
//! d v count
//! ...
//! ```
//!
//! with one line per non-zero cell, sorted by document then term. A matrix
//! read back from this format lists each document's tokens grouped by term.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    /// Builds a vocabulary from terms, assigning indices in lexicographic
    /// order. Duplicates are merged.
    pub fn from_terms<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let sorted: BTreeSet<String> = terms.into_iter().map(Into::into).collect();
        let terms: Vec<String> = sorted.into_iter().collect();
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Self { terms, index }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).map(|&i| i as usize)
    }

    pub fn term(&self, index: usize) -> Option<&str> {
        self.terms.get(index).map(String::as_str)
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// One term per line; line `i` holds the term with index `i`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            out.push_str(t);
            out.push('\n');
        }
        out
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let terms: Vec<&str> = text.lines().collect();
        for (i, pair) in terms.windows(2).enumerate() {
            if pair[0] >= pair[1] {
                return Err(Error::Format {
                    path: path.to_path_buf(),
                    line: i + 2,
                    message: "vocabulary terms must be unique and sorted".into(),
                });
            }
        }
        if let Some(i) = terms.iter().position(|t| t.is_empty()) {
            return Err(Error::Format {
                path: path.to_path_buf(),
                line: i + 1,
                message: "empty term".into(),
            });
        }
        Ok(Self::from_terms(terms))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VocabularyOptions {
    pub min_df: usize,
    pub max_df_ratio: f64,
}

impl Default for VocabularyOptions {
    fn default() -> Self {
        Self {
            min_df: 2,
            max_df_ratio: 0.95,
        }
    }
}

/// Keeps the terms with `df >= min_df` and `df / D <= max_df_ratio`.
pub fn build_vocabulary<S: AsRef<str>>(
    docs: &[Vec<S>],
    min_df: usize,
    max_df_ratio: f64,
) -> Result<Vocabulary> {
    build_vocabulary_excluding(docs, min_df, max_df_ratio, &BTreeSet::new())
}

/// [`build_vocabulary`] that also drops an explicit list of terms, such as
/// the keywords a corpus was collected with.
pub fn build_vocabulary_excluding<S: AsRef<str>>(
    docs: &[Vec<S>],
    min_df: usize,
    max_df_ratio: f64,
    drop: &BTreeSet<String>,
) -> Result<Vocabulary> {
    if min_df < 1 {
        return Err(Error::InvalidParameter("min_df must be at least 1".into()));
    }
    if !(max_df_ratio > 0.0 && max_df_ratio <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "max_df_ratio must lie in (0, 1], got {max_df_ratio}"
        )));
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        let distinct: BTreeSet<&str> = doc.iter().map(AsRef::as_ref).collect();
        for t in distinct {
            *df.entry(t).or_default() += 1;
        }
    }
    let n_docs = docs.len() as f64;
    let kept = df
        .into_iter()
        .filter(|&(t, n)| n >= min_df && n as f64 <= max_df_ratio * n_docs && !drop.contains(t))
        .map(|(t, _)| t);
    let vocab = Vocabulary::from_terms(kept);
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary {
            min_df,
            max_df_ratio,
        });
    }
    Ok(vocab)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocTermMatrix {
    n_terms: usize,
    /// Term index per token position, per document.
    tokens: Vec<Vec<u32>>,
    /// Sorted `(term, count)` pairs per document.
    counts: Vec<Vec<(u32, u32)>>,
}

impl DocTermMatrix {
    /// Builds the matrix from per-document term index sequences.
    pub fn from_token_ids(n_terms: usize, tokens: Vec<Vec<u32>>) -> Result<Self> {
        if let Some(bad) = tokens.iter().flatten().find(|&&v| v as usize >= n_terms) {
            return Err(Error::OutOfRange(format!(
                "term index {bad} with vocabulary size {n_terms}"
            )));
        }
        let counts = tokens
            .iter()
            .map(|doc| {
                let mut tally: BTreeMap<u32, u32> = BTreeMap::new();
                for &v in doc {
                    *tally.entry(v).or_default() += 1;
                }
                tally.into_iter().collect()
            })
            .collect();
        Ok(Self {
            n_terms,
            tokens,
            counts,
        })
    }

    pub fn n_docs(&self) -> usize {
        self.tokens.len()
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn nnz(&self) -> usize {
        self.counts.iter().map(Vec::len).sum()
    }

    pub fn total_tokens(&self) -> usize {
        self.tokens.iter().map(Vec::len).sum()
    }

    pub fn doc_tokens(&self, d: usize) -> &[u32] {
        &self.tokens[d]
    }

    pub fn doc_counts(&self, d: usize) -> &[(u32, u32)] {
        &self.counts[d]
    }

    pub fn doc_len(&self, d: usize) -> usize {
        self.tokens[d].len()
    }

    pub fn count(&self, d: usize, v: usize) -> u32 {
        self.counts[d]
            .binary_search_by_key(&(v as u32), |&(t, _)| t)
            .map_or(0, |i| self.counts[d][i].1)
    }

    /// Documents left without any in-vocabulary token.
    pub fn empty_docs(&self) -> Vec<usize> {
        (0..self.n_docs()).filter(|&d| self.tokens[d].is_empty()).collect()
    }

    pub fn is_degenerate(&self) -> bool {
        self.tokens.iter().all(Vec::is_empty)
    }

    /// Number of documents containing each term.
    pub fn document_frequencies(&self) -> Vec<usize> {
        let mut df = vec![0; self.n_terms];
        for (v, _) in self.counts.iter().flatten() {
            df[*v as usize] += 1;
        }
        df
    }

    pub fn to_triplets(&self) -> String {
        let mut out = format!("{} {} {}\n", self.n_docs(), self.n_terms, self.nnz());
        for (d, row) in self.counts.iter().enumerate() {
            for (v, c) in row {
                writeln!(out, "{d} {v} {c}").unwrap();
            }
        }
        out
    }

    pub fn parse_triplets(text: &str, origin: &Path) -> Result<Self> {
        let bad = |line: usize, message: String| Error::Format {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| bad(1, "missing header".into()))?;
        let header: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| bad(1, format!("bad header: {e}")))?;
        let [n_docs, n_terms, nnz] = header[..] else {
            return Err(bad(1, "header must be `D V NNZ`".into()));
        };
        let mut tokens = vec![Vec::new(); n_docs];
        let mut seen = 0;
        let mut last: Option<(usize, usize)> = None;
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<usize> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| bad(i + 1, format!("bad triplet: {e}")))?;
            let [d, v, c] = fields[..] else {
                return Err(bad(i + 1, "triplet must be `d v count`".into()));
            };
            if d >= n_docs || v >= n_terms || c == 0 {
                return Err(bad(i + 1, format!("cell ({d}, {v}, {c}) out of range")));
            }
            if last.is_some_and(|prev| prev >= (d, v)) {
                return Err(bad(i + 1, "triplets must be sorted and unique".into()));
            }
            last = Some((d, v));
            tokens[d].extend(std::iter::repeat_n(v as u32, c));
            seen += 1;
        }
        if seen != nnz {
            return Err(bad(1, format!("header declares {nnz} cells, found {seen}")));
        }
        Self::from_token_ids(n_terms, tokens)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_triplets(&text, path)
    }
}

/// Maps documents onto the vocabulary. Out-of-vocabulary tokens are dropped;
/// documents that end up empty keep their index (see
/// [`DocTermMatrix::empty_docs`]).
pub fn build_dtm<S: AsRef<str>>(docs: &[Vec<S>], vocab: &Vocabulary) -> Result<DocTermMatrix> {
    if vocab.is_empty() {
        return Err(Error::InvalidParameter("vocabulary is empty".into()));
    }
    let tokens = docs
        .iter()
        .map(|doc| {
            doc.iter()
                .filter_map(|t| vocab.index_of(t.as_ref()).map(|i| i as u32))
                .collect()
        })
        .collect();
    DocTermMatrix::from_token_ids(vocab.len(), tokens)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum IdfSmoothing {
    /// `ln(D / df)`
    #[default]
    None,
    /// `ln((1 + D) / (1 + df)) + 1`
    AddOne,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TfIdfMatrix {
    n_terms: usize,
    rows: Vec<Vec<(u32, f64)>>,
}

impl TfIdfMatrix {
    pub fn n_docs(&self) -> usize {
        self.rows.len()
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn weight(&self, d: usize, v: usize) -> f64 {
        self.rows[d]
            .binary_search_by_key(&(v as u32), |&(t, _)| t)
            .map_or(0.0, |i| self.rows[d][i].1)
    }

    pub fn row(&self, d: usize) -> &[(u32, f64)] {
        &self.rows[d]
    }

    /// Sum of each term's weight over all documents.
    pub fn term_totals(&self) -> Vec<f64> {
        let mut totals = vec![0.0; self.n_terms];
        for (v, w) in self.rows.iter().flatten() {
            totals[*v as usize] += w;
        }
        totals
    }
}

/// `w(d, v) = count(d, v) * ln(D / df(v))`.
pub fn tfidf(m: &DocTermMatrix) -> TfIdfMatrix {
    tfidf_with(m, IdfSmoothing::None)
}

pub fn tfidf_with(m: &DocTermMatrix, smoothing: IdfSmoothing) -> TfIdfMatrix {
    let n_docs = m.n_docs() as f64;
    let idf: Vec<f64> = m
        .document_frequencies()
        .into_iter()
        .map(|df| match smoothing {
            IdfSmoothing::None if df == 0 => 0.0,
            IdfSmoothing::None => (n_docs / df as f64).ln(),
            IdfSmoothing::AddOne => ((1.0 + n_docs) / (1.0 + df as f64)).ln() + 1.0,
        })
        .collect();
    let rows = (0..m.n_docs())
        .map(|d| {
            m.doc_counts(d)
                .iter()
                .map(|&(v, c)| (v, c as f64 * idf[v as usize]))
                .collect()
        })
        .collect();
    TfIdfMatrix {
        n_terms: m.n_terms(),
        rows,
    }
}
