//! Tweet text normalization: cleaning, tokenization, noise removal and word
//! normalization (lemmatization by default, Porter stemming optionally).
//!
//! Bundled word lists live in `data/` as plain text, one entry per line
//! (`#` starts a comment line). The lemma exception table holds
//! `form lemma` pairs separated by whitespace. Each bundled file's SHA-256 is
//! pinned in [`BUNDLED_CHECKSUMS`].

mod lemma;
mod porter;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::PathBuf;
use std::sync::{Arc, OnceLock};

use regex::Regex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::airline::Airline;
use crate::corpus::TweetRecord;
use crate::error::{Error, Result};

pub use lemma::Lemmatizer;
pub use porter::stem;

pub const STOPWORDS_V1: &str = include_str!("../../data/stopwords-v1.txt");
pub const LEMMA_EXCEPTIONS_V1: &str = include_str!("../../data/lemma-exceptions-v1.txt");
pub const LEXICON_V1: &str = include_str!("../../data/lexicon-v1.txt");

/// `(file name, sha256)` for every bundled data file.
pub const BUNDLED_CHECKSUMS: &[(&str, &str)] = &[
    ("stopwords-v1.txt", "111b3cd38e3f325c71abcb843316b2d0216007dc55d1261375478a15be690bf8"),
    ("lemma-exceptions-v1.txt", "9d86eddf62ca10ba0468462c5e1cff6b04c9dc8ad03c59e44f8a5d4e5a0533cf"),
    ("lexicon-v1.txt", "c37532f1efeaf5aad48128c40e846aff1ccdc9f879d65ffdfc97ff33364681e9"),
];

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NormalizerKind {
    Stem,
    #[default]
    Lemma,
}

/// Serializable normalization settings. A configured `airline_keywords`
/// map replaces the default one and must cover every airline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalizationConfig {
    /// Bundled list version (`"v1"`), ignored when `stopword_file` is set.
    pub stopword_list_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stopword_file: Option<PathBuf>,
    pub airline_keywords: BTreeMap<Airline, BTreeSet<String>>,
    pub normalizer: NormalizerKind,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        NormalizationConfig {
            stopword_list_version: "v1".into(),
            stopword_file: None,
            airline_keywords: Airline::ALL
                .into_iter()
                .map(|a| (a, a.default_keywords().into_iter().collect()))
                .collect(),
            normalizer: NormalizerKind::Lemma,
        }
    }
}

impl NormalizationConfig {
    pub fn validate(&self) -> Result<()> {
        for airline in Airline::ALL {
            match self.airline_keywords.get(&airline) {
                Some(set) if !set.is_empty() => {}
                _ => {
                    return Err(Error::invalid(format!(
                        "airline keyword set for {airline} is missing or empty"
                    )))
                }
            }
        }
        Ok(())
    }
}

/// Normalized tokens of one tweet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenDoc {
    pub tweet_id: String,
    pub tokens: Vec<String>,
}

impl TokenDoc {
    pub fn new(tweet_id: impl Into<String>, tokens: Vec<String>) -> Self {
        TokenDoc {
            tweet_id: tweet_id.into(),
            tokens,
        }
    }

    /// All tokens were noise.
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

fn url_pattern() -> &'static Regex {
    static URL: OnceLock<Regex> = OnceLock::new();
    URL.get_or_init(|| Regex::new(r"(?i)\b(?:https?://|www\.)\S*").expect("static pattern"))
}

/// Lowercase ASCII letters separated by single spaces. URLs are removed
/// first; apostrophes are deleted so contractions stay one word; every other
/// non-letter (digits, punctuation, emoji, `@`/`#` sigils) becomes a
/// separator.
pub fn clean(text: &str) -> String {
    let without_urls = url_pattern().replace_all(text, " ");
    let mut out = String::with_capacity(without_urls.len());
    let mut pending_space = false;
    for c in without_urls.chars().flat_map(char::to_lowercase) {
        if c.is_ascii_lowercase() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        } else if matches!(c, '\'' | '\u{2019}') {
        } else {
            pending_space = true;
        }
    }
    out
}

pub fn tokenize(cleaned: &str) -> Vec<String> {
    cleaned.split(' ').filter(|t| !t.is_empty()).map(str::to_owned).collect()
}

struct Lexicons {
    stopwords_v1: HashSet<String>,
    lemmatizer_v1: Lemmatizer,
}

fn bundled() -> &'static Lexicons {
    static DATA: OnceLock<Lexicons> = OnceLock::new();
    DATA.get_or_init(|| Lexicons {
        stopwords_v1: lemma::data_lines(STOPWORDS_V1).map(str::to_owned).collect(),
        lemmatizer_v1: Lemmatizer::from_data(LEMMA_EXCEPTIONS_V1, LEXICON_V1)
            .expect("bundled lemma data is consistent"),
    })
}

/// The bundled v1 lemmatizer.
pub fn bundled_lemmatizer() -> &'static Lemmatizer {
    &bundled().lemmatizer_v1
}

/// Applies a [`NormalizationConfig`]. Cheap to clone; safe to share across
/// threads.
#[derive(Clone)]
pub struct Normalizer {
    config: NormalizationConfig,
    stopwords: Arc<HashSet<String>>,
    all_keywords: Arc<HashSet<String>>,
}

impl std::fmt::Debug for Normalizer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Normalizer")
            .field("config", &self.config)
            .field("stopwords", &self.stopwords.len())
            .finish()
    }
}

impl Normalizer {
    pub fn new(config: NormalizationConfig) -> Result<Self> {
        config.validate()?;
        let stopwords = match &config.stopword_file {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                lemma::data_lines(&text).map(str::to_lowercase).collect()
            }
            None => match config.stopword_list_version.as_str() {
                "v1" => bundled().stopwords_v1.clone(),
                other => {
                    return Err(Error::invalid(format!("unknown stop-word list version {other:?}")))
                }
            },
        };
        let all_keywords = config
            .airline_keywords
            .values()
            .flat_map(|set| set.iter().cloned())
            .collect();
        Ok(Normalizer {
            config,
            stopwords: Arc::new(stopwords),
            all_keywords: Arc::new(all_keywords),
        })
    }

    pub fn config(&self) -> &NormalizationConfig {
        &self.config
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }

    /// Drops stop words and the airline's keywords, keeping order. With no
    /// airline, the keywords of every carrier are dropped.
    pub fn remove_noise(&self, tokens: Vec<String>, airline: Option<Airline>) -> Vec<String> {
        let keywords = airline.and_then(|a| self.config.airline_keywords.get(&a));
        tokens
            .into_iter()
            .filter(|t| {
                !self.stopwords.contains(t)
                    && match keywords {
                        Some(set) => !set.contains(t),
                        None => !self.all_keywords.contains(t),
                    }
            })
            .collect()
    }

    pub fn normalize_token(&self, token: &str) -> String {
        match self.config.normalizer {
            NormalizerKind::Stem => stem(token),
            NormalizerKind::Lemma => bundled().lemmatizer_v1.lemmatize(token),
        }
    }

    /// Full pipeline over raw text.
    pub fn normalize_text(&self, tweet_id: &str, text: &str, airline: Option<Airline>) -> TokenDoc {
        let tokens = self.remove_noise(tokenize(&clean(text)), airline);
        TokenDoc::new(
            tweet_id,
            tokens.iter().map(|t| self.normalize_token(t)).collect(),
        )
    }

    pub fn normalize_doc(&self, record: &TweetRecord) -> TokenDoc {
        self.normalize_text(&record.tweet_id, &record.text, Some(record.airline))
    }

    /// Normalizes a search keyword the same way document tokens are
    /// normalized, without noise removal.
    pub fn normalize_keyword(&self, keyword: &str) -> Vec<String> {
        tokenize(&clean(keyword))
            .iter()
            .map(|t| self.normalize_token(t))
            .collect()
    }
}

impl Default for Normalizer {
    fn default() -> Self {
        Normalizer::new(NormalizationConfig::default()).expect("default config is valid")
    }
}
