//! Airline tweet sentiment monitoring.
//!
//! The pipeline runs in five stages, each in its own module:
//!
//! * [`corpus`]: tweet records, boolean search queries, fetch-window planning
//!   and the on-disk record store.
//! * [`textprep`]: cleaning, tokenization, stop-word removal, Porter stemming
//!   and rule-based lemmatization.
//! * [`vectorize`]: TF-IDF vocabulary fitting and sparse vector transforms.
//! * [`svm`]: RBF-kernel SVM trained by sequential minimal optimization, with
//!   Platt-calibrated probabilities.
//! * [`series`] and [`wordfreq`]: daily sentiment series, Bollinger bands,
//!   breakout detection and word-frequency attribution.
//!
//! [`report`] composes the analytics so that every front end (CLI, HTTP)
//! produces identical numbers from identical inputs.

pub mod airline;
pub mod corpus;
pub mod error;
pub mod model;
pub mod report;
pub mod series;
pub mod sparse;
pub mod svm;
pub mod synth;
pub mod textprep;
pub mod vectorize;
pub mod wordfreq;

pub use airline::Airline;
pub use corpus::{Query, Store, TweetRecord};
pub use error::{Error, Result};
pub use model::SentimentModel;
pub use sparse::SparseVector;
pub use textprep::{NormalizationConfig, Normalizer, TokenDoc};
pub use vectorize::TfidfModel;
