//! TF-IDF vocabulary fitting and document transforms.
//!
//! Weighting, with `tf` the raw count of a token in the document, `N` the
//! number of training documents and `df` the number of training documents
//! containing the token (natural logarithm throughout):
//!
//! * [`TfidfVariant::Additive`]: `w = tf + ln(N / df)`
//! * [`TfidfVariant::Multiplicative`]: `w = tf · (ln((1 + N) / (1 + df)) + 1)`
//!
//! L2 normalization, when enabled, is applied last.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::SparseVector;
use crate::textprep::TokenDoc;

pub const FORMAT: &str = "airsent-tfidf";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TfidfVariant {
    #[default]
    Additive,
    Multiplicative,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TfidfConfig {
    pub variant: TfidfVariant,
    pub l2_normalize: bool,
    /// Tokens in fewer training documents are dropped from the vocabulary.
    pub min_df: u32,
}

impl Default for TfidfConfig {
    fn default() -> Self {
        TfidfConfig {
            variant: TfidfVariant::Additive,
            l2_normalize: true,
            min_df: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TfidfDocument", into = "TfidfDocument")]
pub struct TfidfModel {
    vocabulary: BTreeMap<String, u32>,
    df: Vec<u32>,
    n_docs: u32,
    variant: TfidfVariant,
    l2_normalize: bool,
}

/// Persisted form: `terms` holds `(token, column, df)` triples.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct TfidfDocument {
    format: String,
    version: u32,
    variant: TfidfVariant,
    l2_normalize: bool,
    n_docs: u32,
    terms: Vec<(String, u32, u32)>,
}

impl From<TfidfModel> for TfidfDocument {
    fn from(m: TfidfModel) -> Self {
        let terms = m
            .vocabulary
            .into_iter()
            .map(|(t, i)| {
                let df = m.df[i as usize];
                (t, i, df)
            })
            .collect();
        TfidfDocument {
            format: FORMAT.into(),
            version: VERSION,
            variant: m.variant,
            l2_normalize: m.l2_normalize,
            n_docs: m.n_docs,
            terms,
        }
    }
}

impl TryFrom<TfidfDocument> for TfidfModel {
    type Error = Error;

    fn try_from(doc: TfidfDocument) -> Result<Self> {
        let corrupt = |message: String| Error::Corrupt {
            kind: "tfidf model",
            message,
        };
        if doc.format != FORMAT {
            return Err(corrupt(format!("unexpected format tag {:?}", doc.format)));
        }
        if doc.version != VERSION {
            return Err(Error::UnsupportedVersion {
                kind: "tfidf model",
                found: doc.version,
                expected: VERSION,
            });
        }
        let n = doc.terms.len();
        let mut df = vec![0u32; n];
        let mut vocabulary = BTreeMap::new();
        for (token, index, count) in doc.terms {
            let slot = df
                .get_mut(index as usize)
                .ok_or_else(|| corrupt(format!("column {index} out of range")))?;
            if *slot != 0 {
                return Err(corrupt(format!("column {index} assigned twice")));
            }
            if count == 0 || count > doc.n_docs {
                return Err(corrupt(format!("df {count} of {token:?} outside 1..={}", doc.n_docs)));
            }
            *slot = count;
            if vocabulary.insert(token.clone(), index).is_some() {
                return Err(corrupt(format!("duplicate token {token:?}")));
            }
        }
        Ok(TfidfModel {
            vocabulary,
            df,
            n_docs: doc.n_docs,
            variant: doc.variant,
            l2_normalize: doc.l2_normalize,
        })
    }
}

impl TfidfModel {
    /// Fits vocabulary and document frequencies. Columns are assigned in
    /// lexicographic token order.
    pub fn fit(corpus: &[TokenDoc], config: &TfidfConfig) -> Result<Self> {
        Self::fit_tokens(corpus.iter().map(|d| d.tokens.as_slice()), config)
    }

    pub fn fit_tokens<'a, I>(corpus: I, config: &TfidfConfig) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [String]>,
    {
        let mut counts: BTreeMap<&str, u32> = BTreeMap::new();
        let mut n_docs: u32 = 0;
        let mut seen = std::collections::HashSet::new();
        for tokens in corpus {
            n_docs += 1;
            seen.clear();
            for t in tokens {
                if seen.insert(t.as_str()) {
                    *counts.entry(t.as_str()).or_default() += 1;
                }
            }
        }
        if n_docs == 0 {
            return Err(Error::invalid("cannot fit TF-IDF on an empty corpus"));
        }
        let mut vocabulary = BTreeMap::new();
        let mut df = Vec::new();
        for (token, count) in counts {
            if count >= config.min_df.max(1) {
                vocabulary.insert(token.to_owned(), df.len() as u32);
                df.push(count);
            }
        }
        Ok(TfidfModel {
            vocabulary,
            df,
            n_docs,
            variant: config.variant,
            l2_normalize: config.l2_normalize,
        })
    }

    pub fn dim(&self) -> usize {
        self.df.len()
    }

    pub fn n_docs(&self) -> u32 {
        self.n_docs
    }

    pub fn variant(&self) -> TfidfVariant {
        self.variant
    }

    pub fn l2_normalize(&self) -> bool {
        self.l2_normalize
    }

    pub fn index_of(&self, token: &str) -> Option<u32> {
        self.vocabulary.get(token).copied()
    }

    pub fn df(&self, token: &str) -> Option<u32> {
        self.index_of(token).map(|i| self.df[i as usize])
    }

    /// Tokens in column order.
    pub fn vocabulary(&self) -> impl Iterator<Item = (&str, u32)> {
        self.vocabulary.iter().map(|(t, i)| (t.as_str(), *i))
    }

    fn weight(&self, tf: u32, df: u32) -> f64 {
        let (tf, df, n) = (f64::from(tf), f64::from(df), f64::from(self.n_docs));
        match self.variant {
            TfidfVariant::Additive => tf + (n / df).ln(),
            TfidfVariant::Multiplicative => tf * (((1.0 + n) / (1.0 + df)).ln() + 1.0),
        }
    }

    /// Out-of-vocabulary tokens are ignored.
    pub fn transform(&self, doc: &TokenDoc) -> SparseVector {
        self.transform_tokens(&doc.tokens)
    }

    pub fn transform_tokens(&self, tokens: &[String]) -> SparseVector {
        let mut tf: BTreeMap<u32, u32> = BTreeMap::new();
        for t in tokens {
            if let Some(&i) = self.vocabulary.get(t) {
                *tf.entry(i).or_default() += 1;
            }
        }
        let entries = tf
            .into_iter()
            .map(|(i, count)| (i, self.weight(count, self.df[i as usize])))
            .collect();
        let mut v = SparseVector::new(self.dim(), entries).expect("indices sorted and in range");
        if self.l2_normalize {
            v.normalize();
        }
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TfidfDocument = serde_json::from_str(text).map_err(|e| Error::Corrupt {
            kind: "tfidf model",
            message: e.to_string(),
        })?;
        TfidfModel::try_from(doc)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
