//! Normalized mutual information between hard document clusterings, and the
//! (K, α, β) model-selection sweep built on it.
//!
//! All quantities are in nats. Probabilities are taken over documents.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::dtm::DocTermMatrix;
use crate::error::{Error, Result};
use crate::lda::{train, LdaConfig, Matrix};

/// Hard assignment of each document to a cluster in `[0, n_clusters)`.
/// Clusters may be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    n_clusters: usize,
}

impl Partition {
    /// Cluster count is one past the largest label.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let n_clusters = labels.iter().max().map_or(0, |&m| m + 1);
        Self { labels, n_clusters }
    }

    pub fn with_clusters(labels: Vec<usize>, n_clusters: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= n_clusters) {
            return Err(Error::OutOfRange(format!("label {bad} >= {n_clusters} clusters")));
        }
        Ok(Self { labels, n_clusters })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn n_docs(&self) -> usize {
        self.labels.len()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_clusters];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Label file: one non-negative integer per line, line `i` being
    /// document `i`. Blank lines are not allowed between entries.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let labels = text
            .lines()
            .enumerate()
            .map(|(i, line)| {
                line.trim().parse::<usize>().map_err(|e| Error::Format {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("bad cluster id {line:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_labels(labels))
    }
}

/// Assigns each document its most probable topic; ties go to the lowest
/// topic index.
pub fn hard_labels(theta: &Matrix) -> Partition {
    let labels = theta
        .iter_rows()
        .map(|row| {
            row.iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (k, &p)| if p > best.1 { (k, p) } else { best })
                .0
        })
        .collect();
    Partition {
        labels,
        n_clusters: theta.cols(),
    }
}

fn plogp_sum(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// `H(X) = -Σ p(x) ln p(x)`.
pub fn entropy(p: &Partition) -> Result<f64> {
    if p.n_docs() == 0 {
        return Err(Error::InvalidParameter("partition has no documents".into()));
    }
    Ok(plogp_sum(p.cluster_sizes().into_iter(), p.n_docs() as f64))
}

fn check_sizes(x: &Partition, y: &Partition) -> Result<()> {
    if x.n_docs() != y.n_docs() {
        return Err(Error::LengthMismatch {
            left: x.n_docs(),
            right: y.n_docs(),
        });
    }
    if x.n_docs() == 0 {
        return Err(Error::InvalidParameter("partitions have no documents".into()));
    }
    Ok(())
}

/// `I(X; Y) = Σ p(x, y) ln(p(x, y) / (p(x) p(y)))` over non-empty cells.
pub fn mutual_information(x: &Partition, y: &Partition) -> Result<f64> {
    check_sizes(x, y)?;
    let n = x.n_docs() as f64;
    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    for (&a, &b) in x.labels.iter().zip(&y.labels) {
        *joint.entry((a, b)).or_default() += 1;
    }
    let (sx, sy) = (x.cluster_sizes(), y.cluster_sizes());
    let mut terms: Vec<f64> = joint
        .into_iter()
        .map(|((a, b), c)| {
            let c = c as f64;
            c / n * (c * n / (sx[a] as f64 * sy[b] as f64)).ln()
        })
        .collect();
    // summing in value order makes I(X; Y) and I(Y; X) bit-identical
    terms.sort_by(f64::total_cmp);
    Ok(terms.into_iter().sum::<f64>().max(0.0))
}

/// `NMI = 2 I(X; Y) / (H(X) + H(Y))`, undefined when both entropies are 0.
pub fn nmi(x: &Partition, y: &Partition) -> Result<f64> {
    check_sizes(x, y)?;
    let hx = entropy(x)?;
    let hy = entropy(y)?;
    if hx + hy == 0.0 {
        return Err(Error::UndefinedNmi);
    }
    let value = 2.0 * mutual_information(x, y)? / (hx + hy);
    Ok(value.clamp(0.0, 1.0))
}

/// What a sweep row's clustering is scored against.
#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    /// Hard labels of a second, independently seeded chain with the same
    /// configuration.
    SelfArgmax,
    /// Externally supplied document labels.
    Labels(Partition),
}

/// Offset between a row's seed and the seed of its reference chain.
pub const REFERENCE_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n_topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub nmi: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Sorted by NMI, highest first; ties keep grid order.
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn best(&self) -> Option<&SweepRow> {
        self.rows.first()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub n_topics: Vec<usize>,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub sweeps: usize,
    pub base_seed: u64,
}

impl SweepGrid {
    /// Configurations in row order: K outermost, then α, then β. Row `i`
    /// uses seed `base_seed + i`.
    pub fn configs(&self) -> Vec<LdaConfig> {
        let mut out = Vec::new();
        for &n_topics in &self.n_topics {
            for &alpha in &self.alphas {
                for &beta in &self.betas {
                    out.push(LdaConfig {
                        n_topics,
                        alpha,
                        beta,
                        sweeps: self.sweeps,
                        seed: self.base_seed.wrapping_add(out.len() as u64),
                    });
                }
            }
        }
        out
    }
}

/// Trains one model per grid point (in parallel) and scores its argmax-θ
/// clustering against `reference`.
pub fn model_sweep(m: &DocTermMatrix, grid: &SweepGrid, reference: &Reference) -> Result<SweepResult> {
    if grid.n_topics.is_empty() || grid.alphas.is_empty() || grid.betas.is_empty() {
        return Err(Error::InvalidParameter("sweep grids must be non-empty".into()));
    }
    if let Reference::Labels(labels) = reference {
        if labels.n_docs() != m.n_docs() {
            return Err(Error::LengthMismatch {
                left: m.n_docs(),
                right: labels.n_docs(),
            });
        }
    }
    let configs = grid.configs();
    for cfg in &configs {
        cfg.validate()?;
    }
    let scored: Vec<Result<SweepRow>> = configs
        .par_iter()
        .map(|cfg| {
            let (_, model) = train(m, cfg)?;
            let labels = hard_labels(&model.theta);
            let value = match reference {
                Reference::Labels(truth) => nmi(&labels, truth)?,
                Reference::SelfArgmax => {
                    let other = LdaConfig {
                        seed: cfg.seed.wrapping_add(REFERENCE_SEED_OFFSET),
                        ..*cfg
                    };
                    let (_, ref_model) = train(m, &other)?;
                    nmi(&labels, &hard_labels(&ref_model.theta))?
                }
            };
            Ok(SweepRow {
                n_topics: cfg.n_topics,
                alpha: cfg.alpha,
                beta: cfg.beta,
                nmi: value,
                seed: cfg.seed,
            })
        })
        .collect();
    let mut rows = scored.into_iter().collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| b.nmi.total_cmp(&a.nmi));
    Ok(SweepResult { rows })
}
