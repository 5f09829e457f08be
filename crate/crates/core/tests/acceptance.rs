//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every check prints its own PASS/FAIL line.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use tweetscope::corpus::{filter_english, load_corpus};
use tweetscope::dtm::{build_dtm, build_vocabulary, tfidf, DocTermMatrix};
use tweetscope::emotion::{aggregate, score_tokens, AffectCategory, EmotionLexicon, EmotionProfile};
use tweetscope::lda::{chain_rng, estimate_phi, estimate_theta, train, LdaConfig, LdaState};
use tweetscope::nmi::{hard_labels, model_sweep, nmi, Partition, Reference, SweepGrid};
use tweetscope::report;
use tweetscope::textprep::{porter_stem, preprocess_corpus, EmoticonTable, PipelineConfig, StopList};

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome, Duration);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(fixtures().join("golden").join(name)).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn matrix(docs: &[&[u32]], n_terms: usize) -> DocTermMatrix {
    DocTermMatrix::from_token_ids(n_terms, docs.iter().map(|d| d.to_vec()).collect()).unwrap()
}

/// Count tables rebuilt from scratch from `(words, z)`, skipping one token.
struct Tally {
    cwt: Vec<Vec<f64>>,
    cdt: Vec<Vec<f64>>,
    nk: Vec<f64>,
    nd: Vec<f64>,
}

fn tally(words: &[&[u32]], z: &[Vec<u32>], k: usize, v: usize, skip: Option<(usize, usize)>) -> Tally {
    let mut t = Tally {
        cwt: vec![vec![0.0; v]; k],
        cdt: vec![vec![0.0; k]; words.len()],
        nk: vec![0.0; k],
        nd: words.iter().map(|w| w.len() as f64).collect(),
    };
    for (d, doc) in words.iter().enumerate() {
        for (i, &w) in doc.iter().enumerate() {
            if skip == Some((d, i)) {
                continue;
            }
            let topic = z[d][i] as usize;
            t.cwt[topic][w as usize] += 1.0;
            t.cdt[d][topic] += 1.0;
            t.nk[topic] += 1.0;
        }
    }
    t
}

fn estimators() -> Outcome {
    let docs: [&[u32]; 3] = [&[0, 1, 1, 3], &[2, 2, 0], &[3, 1, 0, 2, 2]];
    let z = vec![vec![0, 1, 1, 0], vec![1, 1, 0], vec![0, 0, 1, 1, 0]];
    let (k, v) = (2, 4);
    let cfg = LdaConfig { n_topics: k, alpha: 0.1, beta: 0.01, sweeps: 0, seed: 0 };
    let state = LdaState::from_assignments(&matrix(&docs, v), k, z.clone()).unwrap();
    let theta = estimate_theta(&state, &cfg);
    let phi = estimate_phi(&state, &cfg);
    let t = tally(&docs, &z, k, v, None);
    for d in 0..docs.len() {
        let mut sum = 0.0;
        for topic in 0..k {
            let want = (t.cdt[d][topic] + cfg.alpha) / (t.nd[d] + k as f64 * cfg.alpha);
            ensure!(close(theta.get(d, topic), want, 1e-12), "theta[{d}][{topic}] = {} want {want}", theta.get(d, topic));
            sum += theta.get(d, topic);
        }
        ensure!(close(sum, 1.0, 1e-9), "theta row {d} sums to {sum}");
    }
    for topic in 0..k {
        let mut sum = 0.0;
        for w in 0..v {
            let want = (t.cwt[topic][w] + cfg.beta) / (t.nk[topic] + v as f64 * cfg.beta);
            ensure!(close(phi.get(topic, w), want, 1e-12), "phi[{topic}][{w}] = {} want {want}", phi.get(topic, w));
            sum += phi.get(topic, w);
        }
        ensure!(close(sum, 1.0, 1e-9), "phi row {topic} sums to {sum}");
    }
    Ok("theta and phi match the direct formulas".into())
}

fn gibbs_conditional() -> Outcome {
    let docs: [&[u32]; 2] = [&[0, 0], &[0, 1]];
    let z = vec![vec![0, 1], vec![1, 0]];
    let (k, v, d, i) = (2, 2, 1, 1);
    let cfg = LdaConfig { n_topics: k, alpha: 0.1, beta: 0.01, sweeps: 0, seed: 0 };

    let t = tally(&docs, &z, k, v, Some((d, i)));
    let w = docs[d][i] as usize;
    let weights: Vec<f64> = (0..k)
        .map(|topic| {
            (t.cwt[topic][w] + cfg.beta) / (t.nk[topic] + v as f64 * cfg.beta)
                * (t.cdt[d][topic] + cfg.alpha)
                / (t.nd[d] - 1.0 + k as f64 * cfg.alpha)
        })
        .collect();
    let total: f64 = weights.iter().sum();
    let oracle: Vec<f64> = weights.iter().map(|x| x / total).collect();

    let mut state = LdaState::from_assignments(&matrix(&docs, v), k, z).unwrap();
    state.decrement(d, i).unwrap();
    let p = state.conditional_distribution(&cfg, d, i).unwrap();
    for topic in 0..k {
        ensure!(close(p[topic], oracle[topic], 1e-12), "p[{topic}] = {} oracle {}", p[topic], oracle[topic]);
    }
    let restore = state.assignments()[d][i] as usize;
    state.increment(d, i, restore).unwrap();

    let n = 10_000;
    let mut rng = chain_rng(2024);
    let mut observed = vec![0u64; k];
    for _ in 0..n {
        observed[state.resample_token(&cfg, d, i, &mut rng).unwrap()] += 1;
    }
    let stat: f64 = (0..k)
        .map(|topic| {
            let expected = n as f64 * oracle[topic];
            (observed[topic] as f64 - expected).powi(2) / expected
        })
        .sum();
    let p_value = ChiSquared::new((k - 1) as f64).unwrap().sf(stat);
    ensure!(p_value > 0.01, "chi-square {stat:.3}, p = {p_value:.4}, observed {observed:?}, p {oracle:?}");
    Ok(format!("max |p - oracle| <= 1e-12; chi-square {stat:.3}, p-value {p_value:.3}"))
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

fn draw(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen::<f64>() * weights.iter().sum::<f64>();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

fn generative_recovery() -> Outcome {
    let (k, v, n_docs, doc_len) = (3, 60, 500, 50);
    let block = v / k;
    // each topic puts 90% of its mass on its own block of 20 terms
    let generators: Vec<Vec<f64>> = (0..k)
        .map(|topic| {
            (0..v)
                .map(|w| if w / block == topic { 0.9 / block as f64 } else { 0.1 / (v - block) as f64 })
                .collect()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut labels = Vec::with_capacity(n_docs);
    let mut tokens = Vec::with_capacity(n_docs);
    for _ in 0..n_docs {
        let label = rng.gen_range(0..k);
        let mix: Vec<f64> = (0..k).map(|t| if t == label { 0.8 } else { 0.1 }).collect();
        let doc: Vec<u32> = (0..doc_len)
            .map(|_| draw(&generators[draw(&mix, &mut rng)], &mut rng) as u32)
            .collect();
        labels.push(label);
        tokens.push(doc);
    }
    let m = DocTermMatrix::from_token_ids(v, tokens).unwrap();
    let cfg = LdaConfig { n_topics: k, alpha: 0.1, beta: 0.01, sweeps: 500, seed: 42 };
    let (_, model) = train(&m, &cfg).unwrap();

    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (r, row) in model.phi.iter_rows().enumerate() {
        for (g, gen) in generators.iter().enumerate() {
            pairs.push((cosine(row, gen), r, g));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (mut used_r, mut used_g, mut matched) = (vec![false; k], vec![false; k], Vec::new());
    for (c, r, g) in pairs {
        if !used_r[r] && !used_g[g] {
            used_r[r] = true;
            used_g[g] = true;
            matched.push(c);
        }
    }
    let worst = matched.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure!(worst >= 0.9, "matched cosines {matched:?}");
    let score = nmi(&hard_labels(&model.theta), &Partition::from_labels(labels)).unwrap();
    ensure!(score >= 0.8, "argmax-theta NMI {score}");
    Ok(format!("min matched cosine {worst:.4}, NMI {score:.4}"))
}

fn nmi_endpoints() -> Outcome {
    let x = Partition::from_labels(vec![0, 0, 1, 1, 2, 1]);
    let same = nmi(&x, &x).unwrap();
    ensure!(close(same, 1.0, 1e-12), "identical partitions give {same}");
    let a = Partition::from_labels(vec![0, 0, 1, 1]);
    let b = Partition::from_labels(vec![0, 1, 0, 1]);
    let indep = nmi(&a, &b).unwrap();
    ensure!(close(indep, 0.0, 1e-12), "independent partitions give {indep}");

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    while checked < 1000 {
        let n = rng.gen_range(1..40);
        let cx = rng.gen_range(1..6);
        let cy = rng.gen_range(1..6);
        let x = Partition::from_labels((0..n).map(|_| rng.gen_range(0..cx)).collect());
        let y = Partition::from_labels((0..n).map(|_| rng.gen_range(0..cy)).collect());
        let (Ok(xy), Ok(yx)) = (nmi(&x, &y), nmi(&y, &x)) else {
            continue; // both single-cluster: undefined
        };
        ensure!((0.0..=1.0 + 1e-12).contains(&xy), "nmi {xy} out of bounds");
        ensure!(xy.to_bits() == yx.to_bits(), "asymmetric: {xy} vs {yx}");
        checked += 1;
    }
    Ok(format!("1.0 / 0.0 endpoints exact; {checked} random pairs bounded and symmetric"))
}

fn mini_corpus_matrix() -> DocTermMatrix {
    let corpus = load_corpus(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/mini_corpus.jsonl")).unwrap();
    let corpus = filter_english(&corpus);
    let docs = preprocess_corpus(
        corpus.tweets(),
        &PipelineConfig::default(),
        &EmoticonTable::builtin(),
        &StopList::builtin(),
    );
    let vocab = build_vocabulary(&docs, 2, 0.95).unwrap();
    build_dtm(&docs, &vocab).unwrap()
}

fn sweep_shape() -> Outcome {
    let m = mini_corpus_matrix();
    let grid = SweepGrid {
        n_topics: vec![5, 10, 15, 20],
        alphas: vec![0.1],
        betas: vec![0.01],
        sweeps: 1000,
        base_seed: 42,
    };
    let first = report::sweep_csv(&model_sweep(&m, &grid, &Reference::SelfArgmax).unwrap()).unwrap();
    let second = report::sweep_csv(&model_sweep(&m, &grid, &Reference::SelfArgmax).unwrap()).unwrap();
    let lines: Vec<&str> = first.lines().collect();
    ensure!(lines.len() == 5, "expected header + 4 rows, got\n{first}");
    ensure!(lines[0] == "K,alpha,beta,nmi,seed", "header {}", lines[0]);
    ensure!(first == second, "reruns differ:\n{first}\n{second}");
    let mut ks: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    ks.sort_by_key(|k| k.parse::<usize>().unwrap());
    ensure!(ks == ["5", "10", "15", "20"], "K column {ks:?}");
    Ok(format!("{} docs, V = {}; 4 rows, byte-identical reruns", m.n_docs(), m.n_terms()))
}

fn fixture_corpus() -> tweetscope::corpus::Corpus {
    filter_english(&load_corpus(fixtures().join("tweets5.jsonl")).unwrap())
}

fn preprocessing_golden() -> Outcome {
    let corpus = fixture_corpus();
    let docs = preprocess_corpus(
        corpus.tweets(),
        &PipelineConfig::default(),
        &EmoticonTable::builtin(),
        &StopList::builtin(),
    );
    let text: String = docs.iter().map(|d| d.join(" ") + "\n").collect();
    let want = golden("tokens.txt");
    ensure!(text == want, "got\n{text}want\n{want}");
    ensure!(docs[0][0] == "read", "first token {}", docs[0][0]);
    Ok(format!("{} tweets byte-identical to the golden token file", docs.len()))
}

fn porter_conformance() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let words = std::fs::read_to_string(dir.join("porter_voc.txt")).unwrap();
    let stems = std::fs::read_to_string(dir.join("porter_output.txt")).unwrap();
    let mut n = 0;
    let mut bad = Vec::new();
    for (w, s) in words.lines().zip(stems.lines()) {
        n += 1;
        if porter_stem(w) != s {
            bad.push(w.to_string());
        }
    }
    ensure!(bad.is_empty(), "{} mismatches, first {:?}", bad.len(), &bad[..bad.len().min(10)]);
    Ok(format!("{n} words, 0 mismatches"))
}

/// Brute-force tally straight from the lexicon rows, no lexicon type involved.
fn independent_tally(lexicon_text: &str, tokens: &[String]) -> HashMap<String, u64> {
    let mut counts = HashMap::new();
    for tok in tokens {
        for line in lexicon_text.lines() {
            let cols: Vec<&str> = line.split('\t').collect();
            if cols[0] == tok && cols[2] == "1" {
                *counts.entry(cols[1].to_string()).or_insert(0) += 1;
            }
        }
    }
    counts
}

fn emotion_tallies() -> Outcome {
    let lex_path = fixtures().join("lexicon_nrc.txt");
    let lex_text = std::fs::read_to_string(&lex_path).unwrap();
    let lex = EmotionLexicon::load(&lex_path).unwrap();
    let corpus = fixture_corpus();
    let cfg = PipelineConfig { stem: false, ..PipelineConfig::default() };
    let docs = preprocess_corpus(corpus.tweets(), &cfg, &EmoticonTable::builtin(), &StopList::builtin());
    let profiles: Vec<EmotionProfile> = docs.iter().map(|d| score_tokens(d, &lex)).collect();
    for (d, p) in docs.iter().zip(&profiles) {
        let want = independent_tally(&lex_text, d);
        for c in AffectCategory::ALL {
            let expect = want.get(c.name()).copied().unwrap_or(0);
            ensure!(p.count(c) == expect, "{d:?}: {} = {} want {expect}", c.name(), p.count(c));
        }
    }
    let per_tweet = report::emotions_per_tweet_csv(corpus.tweets(), &profiles).unwrap();
    ensure!(per_tweet == golden("emotions_per_tweet.csv"), "per-tweet table:\n{per_tweet}");
    let agg = report::emotions_aggregate_csv(&profiles).unwrap();
    ensure!(agg == golden("emotions_aggregate.csv"), "aggregate table:\n{agg}");

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..1000 {
        let n = rng.gen_range(0..30);
        let ps: Vec<EmotionProfile> = (0..n)
            .map(|_| {
                let mut c = [0u64; 10];
                c.iter_mut().for_each(|x| *x = rng.gen_range(0..50));
                EmotionProfile::from_counts(c, rng.gen_range(0..50))
            })
            .collect();
        let cut = rng.gen_range(0..=n);
        let whole = aggregate(&ps);
        let split = aggregate(&ps[..cut]) + aggregate(&ps[cut..]);
        ensure!(whole == split, "trial {trial}: split at {cut} of {n}");
    }
    Ok("golden tables match the independent tally; 1000 additivity trials".into())
}

fn tfidf_check() -> Outcome {
    // term 0 in both documents, term 1 three times in document 0 only
    let m = matrix(&[&[0, 1, 1, 1], &[0, 2]], 3);
    let w = tfidf(&m);
    ensure!(w.weight(0, 0) == 0.0 && w.weight(1, 0) == 0.0, "ubiquitous term weighted {} / {}", w.weight(0, 0), w.weight(1, 0));
    let want = 3.0 * 2f64.ln();
    ensure!(close(w.weight(0, 1), want, 1e-12), "w(0,1) = {} want {want}", w.weight(0, 1));
    Ok(format!("w(0,1) = {:.12}", w.weight(0, 1)))
}

fn main() {
    let checks: [Check; 9] = [
        ("estimator correctness", estimators, Duration::from_secs(1)),
        ("gibbs conditional exactness", gibbs_conditional, Duration::from_secs(5)),
        ("generative recovery", generative_recovery, Duration::from_secs(60)),
        ("nmi endpoints", nmi_endpoints, Duration::MAX),
        ("sweep shape", sweep_shape, Duration::from_secs(120)),
        ("preprocessing golden file", preprocessing_golden, Duration::MAX),
        ("porter conformance", porter_conformance, Duration::MAX),
        ("emotion tallies", emotion_tallies, Duration::MAX),
        ("tf-idf", tfidf_check, Duration::MAX),
    ];
    let mut failed = 0;
    for (n, (name, check, limit)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > *limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {}. {name} ({elapsed:.2?}): {detail}", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name} ({elapsed:.2?}): {why}", n + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} acceptance checks failed", checks.len());
        std::process::exit(1);
    }
}
