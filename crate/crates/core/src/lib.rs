//! Tweet corpus analysis: preprocessing, LDA topic models fitted by
//! collapsed Gibbs sampling, NMI-based model selection and lexicon emotion
//! scoring.
//!
//! Typical flow:
//!
//! ```no_run
//! use tweetscope::{corpus, dtm, lda, textprep};
//!
//! let tweets = corpus::filter_english(&corpus::load_corpus("tweets.jsonl")?);
//! let docs = textprep::preprocess_corpus(
//!     tweets.tweets(),
//!     &textprep::PipelineConfig::default(),
//!     &textprep::EmoticonTable::builtin(),
//!     &textprep::StopList::builtin(),
//! );
//! let vocab = dtm::build_vocabulary(&docs, 2, 0.95)?;
//! let matrix = dtm::build_dtm(&docs, &vocab)?;
//! let (_, model) = lda::train(&matrix, &lda::LdaConfig::default())?;
//! let top = lda::top_terms(&model, &vocab, 10)?;
//! # Ok::<(), tweetscope::Error>(())
//! ```

pub mod corpus;
pub mod dtm;
pub mod emotion;
mod error;
pub mod lda;
pub mod nmi;
pub mod report;
pub mod textprep;

pub use error::{Error, Result};
