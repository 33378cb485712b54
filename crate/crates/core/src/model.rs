//! The complete scoring artifact: normalization settings, fitted TF-IDF
//! vocabulary and calibrated SVM in one versioned file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::airline::Airline;
use crate::corpus::TweetRecord;
use crate::error::{Error, Result};
use crate::svm::{self, dataset, LabeledCorpus, LabeledDataset, Metrics, SentimentScore, SvmConfig, SvmModel, SvmTrainReport};
use crate::textprep::{NormalizationConfig, Normalizer, TokenDoc};
use crate::vectorize::{TfidfConfig, TfidfModel};

pub const FORMAT: &str = "airsent-model";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub normalization: NormalizationConfig,
    pub tfidf: TfidfConfig,
    pub svm: SvmConfig,
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            normalization: NormalizationConfig::default(),
            tfidf: TfidfConfig::default(),
            svm: SvmConfig::default(),
            test_fraction: 0.2,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingInfo {
    pub provenance: String,
    pub seed: u64,
    pub test_fraction: f64,
    pub n_train: usize,
    pub n_test: usize,
    /// Held-out metrics; absent when no test split was made.
    pub test_metrics: Option<Metrics>,
    /// Metrics over every labeled row, training rows included.
    pub full_metrics: Metrics,
    pub svm: SvmTrainReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentModel {
    format: String,
    version: u32,
    pub normalization: NormalizationConfig,
    pub tfidf: TfidfModel,
    pub svm: SvmModel,
    pub training: TrainingInfo,
}

#[derive(Deserialize)]
struct Header {
    format: String,
    version: u32,
}

impl SentimentModel {
    /// Normalizes, splits, fits TF-IDF on the training side, trains and
    /// calibrates the SVM, and evaluates.
    pub fn train(corpus: &LabeledCorpus, config: &TrainConfig) -> Result<Self> {
        let normalizer = Normalizer::new(config.normalization.clone())?;
        let docs: Vec<TokenDoc> = corpus
            .rows
            .iter()
            .map(|r| normalizer.normalize_text(&r.id, &r.text, None))
            .collect();
        let labels = corpus.labels();
        let (train_idx, test_idx) = dataset::stratified_split(&labels, config.test_fraction, config.seed)?;
        let train_docs: Vec<&[String]> = train_idx.iter().map(|&i| docs[i].tokens.as_slice()).collect();
        let tfidf = TfidfModel::fit_tokens(train_docs, &config.tfidf)?;

        let vectors: Vec<_> = docs.iter().map(|d| tfidf.transform(d)).collect();
        let all = LabeledDataset::new(vectors, labels, corpus.provenance.clone())?;
        let train = all.subset(&train_idx);
        let (svm, report) = svm::train(&train, &config.svm, config.seed)?;
        let test_metrics = if test_idx.is_empty() {
            None
        } else {
            Some(svm::evaluate(&svm, &all.subset(&test_idx))?)
        };
        let full_metrics = svm::evaluate(&svm, &all)?;
        Ok(SentimentModel {
            format: FORMAT.into(),
            version: VERSION,
            normalization: config.normalization.clone(),
            tfidf,
            svm,
            training: TrainingInfo {
                provenance: corpus.provenance.clone(),
                seed: config.seed,
                test_fraction: config.test_fraction,
                n_train: train_idx.len(),
                n_test: test_idx.len(),
                test_metrics,
                full_metrics,
                svm: report,
            },
        })
    }

    pub fn scorer(&self) -> Result<Scorer<'_>> {
        Ok(Scorer {
            model: self,
            normalizer: Normalizer::new(self.normalization.clone())?,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let corrupt = |e: serde_json::Error| Error::Corrupt {
            kind: "sentiment model",
            message: e.to_string(),
        };
        let header: Header = serde_json::from_str(text).map_err(corrupt)?;
        if header.format != FORMAT {
            return Err(Error::Corrupt {
                kind: "sentiment model",
                message: format!("unexpected format tag {:?}", header.format),
            });
        }
        if header.version != VERSION {
            return Err(Error::UnsupportedVersion {
                kind: "sentiment model",
                found: header.version,
                expected: VERSION,
            });
        }
        let model: SentimentModel = serde_json::from_str(text).map_err(corrupt)?;
        if model.tfidf.dim() != model.svm.dim() {
            return Err(Error::Corrupt {
                kind: "sentiment model",
                message: format!(
                    "vocabulary size {} does not match SVM dimension {}",
                    model.tfidf.dim(),
                    model.svm.dim()
                ),
            });
        }
        if model.svm.platt().is_none() {
            return Err(Error::MissingCalibration);
        }
        Ok(model)
    }

    /// Writes through a temporary file and renames, so readers never see a
    /// partial model.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, self.to_json()).map_err(|e| Error::io(&tmp, e))?;
        std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// A model paired with its constructed normalizer.
pub struct Scorer<'a> {
    model: &'a SentimentModel,
    normalizer: Normalizer,
}

impl Scorer<'_> {
    pub fn normalizer(&self) -> &Normalizer {
        &self.normalizer
    }

    /// Scores text in the context of `airline`, whose keywords are removed;
    /// `None` removes every carrier's keywords.
    pub fn score_text(&self, text: &str, airline: Option<Airline>) -> Result<SentimentScore> {
        let doc = self.normalizer.normalize_text("", text, airline);
        self.model.svm.predict(&self.model.tfidf.transform(&doc))
    }

    pub fn score_record(&self, record: &TweetRecord) -> Result<SentimentScore> {
        self.score_text(&record.text, Some(record.airline))
    }
}
