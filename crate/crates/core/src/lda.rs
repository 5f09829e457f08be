//! Latent Dirichlet allocation fitted by collapsed Gibbs sampling.
//!
//! The sampler keeps one topic assignment per token plus the count tables it
//! implies: word-topic counts, document-topic counts and per-topic totals.
//! Each token update removes the token from the tables, draws a new topic
//! from
//!
//! ```text
//! p(z = k) ∝ (n_kv + β) / (n_k + Vβ) · (n_dk + α) / (n_d − 1 + Kα)
//! ```
//!
//! and adds it back. After the last sweep the document-topic (θ) and
//! topic-word (φ) distributions are read off the final state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dtm::{DocTermMatrix, Vocabulary};
use crate::error::{Error, Result};

/// Seeded generator driving a sampling chain.
pub type ChainRng = ChaCha8Rng;

pub fn chain_rng(seed: u64) -> ChainRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdaConfig {
    pub n_topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub sweeps: usize,
    pub seed: u64,
}

impl Default for LdaConfig {
    fn default() -> Self {
        Self {
            n_topics: 15,
            alpha: 0.1,
            beta: 0.01,
            sweeps: 1000,
            seed: 42,
        }
    }
}

impl LdaConfig {
    /// The `alpha = 50 / K` heuristic.
    pub fn heuristic_alpha(n_topics: usize) -> f64 {
        50.0 / n_topics as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_topics == 0 {
            return Err(Error::InvalidParameter("topic count must be at least 1".into()));
        }
        if self.n_topics > u32::MAX as usize {
            return Err(Error::InvalidParameter("topic count too large".into()));
        }
        for (name, value) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        Ok(())
    }
}

/// Topic assignments and the count tables they imply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LdaState {
    n_topics: usize,
    n_terms: usize,
    words: Vec<Vec<u32>>,
    z: Vec<Vec<u32>>,
    /// Word-major: `word_topic[v * K + k]`.
    word_topic: Vec<u32>,
    /// `doc_topic[d * K + k]`.
    doc_topic: Vec<u32>,
    topic_totals: Vec<u32>,
    doc_lengths: Vec<u32>,
    /// Token currently removed from the counts, if any.
    held_out: Option<(usize, usize)>,
}

impl LdaState {
    /// Builds a state from explicit assignments, `z[d][i]` being the topic
    /// of token `i` in document `d`.
    pub fn from_assignments(m: &DocTermMatrix, n_topics: usize, z: Vec<Vec<u32>>) -> Result<Self> {
        if n_topics == 0 {
            return Err(Error::InvalidParameter("topic count must be at least 1".into()));
        }
        if z.len() != m.n_docs() {
            return Err(Error::LengthMismatch {
                left: m.n_docs(),
                right: z.len(),
            });
        }
        let words: Vec<Vec<u32>> = (0..m.n_docs()).map(|d| m.doc_tokens(d).to_vec()).collect();
        for (d, (zd, wd)) in z.iter().zip(&words).enumerate() {
            if zd.len() != wd.len() {
                return Err(Error::OutOfRange(format!(
                    "document {d}: {} assignments for {} tokens",
                    zd.len(),
                    wd.len()
                )));
            }
            if let Some(k) = zd.iter().find(|&&k| k as usize >= n_topics) {
                return Err(Error::OutOfRange(format!("document {d}: topic {k} >= {n_topics}")));
            }
        }
        let mut state = Self {
            n_topics,
            n_terms: m.n_terms(),
            doc_lengths: words.iter().map(|w| w.len() as u32).collect(),
            word_topic: vec![0; m.n_terms() * n_topics],
            doc_topic: vec![0; m.n_docs() * n_topics],
            topic_totals: vec![0; n_topics],
            words,
            z,
            held_out: None,
        };
        state.rebuild_counts();
        Ok(state)
    }

    fn rebuild_counts(&mut self) {
        let k_ = self.n_topics;
        self.word_topic.iter_mut().for_each(|c| *c = 0);
        self.doc_topic.iter_mut().for_each(|c| *c = 0);
        self.topic_totals.iter_mut().for_each(|c| *c = 0);
        for (d, (zd, wd)) in self.z.iter().zip(&self.words).enumerate() {
            for (&k, &v) in zd.iter().zip(wd) {
                self.word_topic[v as usize * k_ + k as usize] += 1;
                self.doc_topic[d * k_ + k as usize] += 1;
                self.topic_totals[k as usize] += 1;
            }
        }
    }

    pub fn n_topics(&self) -> usize {
        self.n_topics
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn n_docs(&self) -> usize {
        self.z.len()
    }

    pub fn assignments(&self) -> &[Vec<u32>] {
        &self.z
    }

    /// Tokens assigned to topic `k` with term `v`.
    pub fn cwt(&self, k: usize, v: usize) -> u32 {
        self.word_topic[v * self.n_topics + k]
    }

    /// Tokens of document `d` assigned to topic `k`.
    pub fn cdt(&self, d: usize, k: usize) -> u32 {
        self.doc_topic[d * self.n_topics + k]
    }

    pub fn topic_totals(&self) -> &[u32] {
        &self.topic_totals
    }

    pub fn doc_lengths(&self) -> &[u32] {
        &self.doc_lengths
    }

    pub fn total_tokens(&self) -> usize {
        self.doc_lengths.iter().map(|&n| n as usize).sum()
    }

    pub fn held_out(&self) -> Option<(usize, usize)> {
        self.held_out
    }

    fn check_token(&self, d: usize, i: usize) -> Result<()> {
        if d >= self.z.len() || i >= self.z[d].len() {
            return Err(Error::OutOfRange(format!("no token {i} in document {d}")));
        }
        Ok(())
    }

    /// Removes token `(d, i)` from the count tables. Its assignment is kept
    /// until [`increment`](Self::increment) gives it a new one.
    pub fn decrement(&mut self, d: usize, i: usize) -> Result<()> {
        self.check_token(d, i)?;
        if let Some(other) = self.held_out {
            return Err(Error::InvalidParameter(format!(
                "token {other:?} is already removed from the counts"
            )));
        }
        self.remove(d, i);
        Ok(())
    }

    /// Assigns topic `k` to the held-out token `(d, i)` and adds it back.
    pub fn increment(&mut self, d: usize, i: usize, k: usize) -> Result<()> {
        if self.held_out != Some((d, i)) {
            return Err(Error::InvalidParameter(format!(
                "token ({d}, {i}) is not removed from the counts"
            )));
        }
        if k >= self.n_topics {
            return Err(Error::OutOfRange(format!("topic {k} >= {}", self.n_topics)));
        }
        self.insert(d, i, k);
        Ok(())
    }

    #[inline]
    fn remove(&mut self, d: usize, i: usize) {
        let k = self.z[d][i] as usize;
        let v = self.words[d][i] as usize;
        self.word_topic[v * self.n_topics + k] -= 1;
        self.doc_topic[d * self.n_topics + k] -= 1;
        self.topic_totals[k] -= 1;
        self.held_out = Some((d, i));
    }

    #[inline]
    fn insert(&mut self, d: usize, i: usize, k: usize) {
        let v = self.words[d][i] as usize;
        self.z[d][i] = k as u32;
        self.word_topic[v * self.n_topics + k] += 1;
        self.doc_topic[d * self.n_topics + k] += 1;
        self.topic_totals[k] += 1;
        self.held_out = None;
    }

    /// Unnormalized full conditional of the held-out token into `out`;
    /// returns the total mass.
    #[inline]
    fn conditional_weights(&self, cfg: &LdaConfig, d: usize, i: usize, out: &mut [f64]) -> f64 {
        let k_ = self.n_topics;
        let v = self.words[d][i] as usize;
        let v_beta = self.n_terms as f64 * cfg.beta;
        let doc_norm = self.doc_lengths[d] as f64 - 1.0 + k_ as f64 * cfg.alpha;
        let wt = &self.word_topic[v * k_..(v + 1) * k_];
        let dt = &self.doc_topic[d * k_..(d + 1) * k_];
        let mut total = 0.0;
        for k in 0..k_ {
            let word = (wt[k] as f64 + cfg.beta) / (self.topic_totals[k] as f64 + v_beta);
            let doc = (dt[k] as f64 + cfg.alpha) / doc_norm;
            let p = word * doc;
            out[k] = p;
            total += p;
        }
        total
    }

    /// Normalized full conditional for token `(d, i)`, which must have been
    /// removed from the counts with [`decrement`](Self::decrement).
    pub fn conditional_distribution(&self, cfg: &LdaConfig, d: usize, i: usize) -> Result<Vec<f64>> {
        self.check_token(d, i)?;
        if self.held_out != Some((d, i)) {
            return Err(Error::InvalidParameter(format!(
                "token ({d}, {i}) must be removed from the counts first"
            )));
        }
        let mut p = vec![0.0; self.n_topics];
        let total = self.conditional_weights(cfg, d, i, &mut p);
        p.iter_mut().for_each(|x| *x /= total);
        Ok(p)
    }

    #[inline]
    fn resample(&mut self, cfg: &LdaConfig, d: usize, i: usize, rng: &mut ChainRng, buf: &mut [f64]) -> usize {
        self.remove(d, i);
        let total = self.conditional_weights(cfg, d, i, buf);
        let k = sample_index(buf, total, rng);
        self.insert(d, i, k);
        k
    }

    /// Draws a new topic for token `(d, i)` given every other assignment.
    pub fn resample_token(&mut self, cfg: &LdaConfig, d: usize, i: usize, rng: &mut ChainRng) -> Result<usize> {
        self.check_token(d, i)?;
        if self.held_out.is_some() {
            return Err(Error::InvalidParameter("a token is held out of the counts".into()));
        }
        let mut buf = vec![0.0; self.n_topics];
        Ok(self.resample(cfg, d, i, rng, &mut buf))
    }

    /// Recomputes every count table from the assignments and compares.
    pub fn counts_consistent(&self) -> bool {
        let mut fresh = self.clone();
        fresh.rebuild_counts();
        self.held_out.is_none()
            && fresh.word_topic == self.word_topic
            && fresh.doc_topic == self.doc_topic
            && fresh.topic_totals == self.topic_totals
    }
}

/// Inverse-CDF draw from unnormalized weights.
#[inline]
fn sample_index(weights: &[f64], total: f64, rng: &mut ChainRng) -> usize {
    let u = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (k, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return k;
        }
    }
    weights.len() - 1
}

/// Assigns every token a uniformly random topic.
pub fn init_state(m: &DocTermMatrix, cfg: &LdaConfig, rng: &mut ChainRng) -> Result<LdaState> {
    cfg.validate()?;
    if m.is_degenerate() {
        return Err(Error::DegenerateCorpus);
    }
    let k_ = cfg.n_topics as u32;
    let z = (0..m.n_docs())
        .map(|d| (0..m.doc_len(d)).map(|_| rng.gen_range(0..k_)).collect())
        .collect();
    LdaState::from_assignments(m, cfg.n_topics, z)
}

/// Visits every token once, in document then position order.
pub fn gibbs_sweep(state: &mut LdaState, cfg: &LdaConfig, rng: &mut ChainRng) -> Result<()> {
    if state.held_out.is_some() {
        return Err(Error::InvalidParameter("a token is held out of the counts".into()));
    }
    if cfg.n_topics != state.n_topics {
        return Err(Error::InvalidParameter(format!(
            "config has {} topics, state has {}",
            cfg.n_topics, state.n_topics
        )));
    }
    let mut buf = vec![0.0; state.n_topics];
    for d in 0..state.z.len() {
        for i in 0..state.z[d].len() {
            state.resample(cfg, d, i, rng, &mut buf);
        }
    }
    Ok(())
}

/// Row-major dense matrix of reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }
}

/// `θ[d][k] = (n_dk + α) / (n_d + Kα)`
pub fn estimate_theta(state: &LdaState, cfg: &LdaConfig) -> Matrix {
    let k_ = state.n_topics;
    Matrix::from_fn(state.n_docs(), k_, |d, k| {
        (state.cdt(d, k) as f64 + cfg.alpha) / (state.doc_lengths[d] as f64 + k_ as f64 * cfg.alpha)
    })
}

/// `φ[k][v] = (n_kv + β) / (n_k + Vβ)`
pub fn estimate_phi(state: &LdaState, cfg: &LdaConfig) -> Matrix {
    let v_ = state.n_terms;
    Matrix::from_fn(state.n_topics, v_, |k, v| {
        (state.cwt(k, v) as f64 + cfg.beta) / (state.topic_totals[k] as f64 + v_ as f64 * cfg.beta)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LdaModel {
    /// Documents × topics.
    pub theta: Matrix,
    /// Topics × terms.
    pub phi: Matrix,
}

impl LdaModel {
    pub fn from_state(state: &LdaState, cfg: &LdaConfig) -> Self {
        Self {
            theta: estimate_theta(state, cfg),
            phi: estimate_phi(state, cfg),
        }
    }

    pub fn n_topics(&self) -> usize {
        self.phi.rows()
    }
}

/// Initializes from `cfg.seed`, runs `cfg.sweeps` sweeps and estimates the
/// model from the final state.
pub fn train(m: &DocTermMatrix, cfg: &LdaConfig) -> Result<(LdaState, LdaModel)> {
    let mut rng = chain_rng(cfg.seed);
    let mut state = init_state(m, cfg, &mut rng)?;
    for _ in 0..cfg.sweeps {
        gibbs_sweep(&mut state, cfg, &mut rng)?;
    }
    let model = LdaModel::from_state(&state, cfg);
    Ok((state, model))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopTerm {
    pub term: String,
    pub probability: f64,
}

/// The `k_terms` most probable terms of each topic, ties broken by term.
pub fn top_terms(model: &LdaModel, vocab: &Vocabulary, k_terms: usize) -> Result<Vec<Vec<TopTerm>>> {
    if k_terms == 0 {
        return Err(Error::InvalidParameter("k_terms must be at least 1".into()));
    }
    if vocab.len() != model.phi.cols() {
        return Err(Error::LengthMismatch {
            left: model.phi.cols(),
            right: vocab.len(),
        });
    }
    Ok(model
        .phi
        .iter_rows()
        .map(|row| {
            let mut order: Vec<usize> = (0..row.len()).collect();
            order.sort_by(|&a, &b| {
                row[b]
                    .total_cmp(&row[a])
                    .then_with(|| vocab.terms()[a].cmp(&vocab.terms()[b]))
            });
            order
                .into_iter()
                .take(k_terms)
                .map(|v| TopTerm {
                    term: vocab.terms()[v].clone(),
                    probability: row[v],
                })
                .collect()
        })
        .collect())
}
