//! Labeled training data: the Kaggle "Twitter US Airline Sentiment" CSV
//! loader and stratified splitting.
//!
//! The loader needs the columns `airline_sentiment` (`positive`, `neutral`
//! or `negative`) and `text`; `tweet_id` and `airline` are used when
//! present. Neutral rows are dropped and counted.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::airline::Airline;
use crate::error::{Error, Result};
use crate::sparse::SparseVector;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledText {
    pub id: String,
    /// +1 positive, −1 negative.
    pub label: i8,
    pub text: String,
    pub airline: Option<Airline>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledCorpus {
    pub rows: Vec<LabeledText>,
    pub neutral_dropped: usize,
    pub provenance: String,
}

impl LabeledCorpus {
    pub fn labels(&self) -> Vec<i8> {
        self.rows.iter().map(|r| r.label).collect()
    }
}

pub fn load_kaggle_csv<R: Read>(reader: R, source_name: &str) -> Result<LabeledCorpus> {
    let mut csv = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = csv.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let sentiment = column("airline_sentiment")
        .ok_or_else(|| Error::invalid(format!("{source_name}: missing column airline_sentiment")))?;
    let text = column("text").ok_or_else(|| Error::invalid(format!("{source_name}: missing column text")))?;
    let id_col = column("tweet_id");
    let airline_col = column("airline");

    let mut rows = Vec::new();
    let mut neutral_dropped = 0;
    for (n, record) in csv.records().enumerate() {
        let record = record?;
        let field = |i: usize| record.get(i).unwrap_or("").trim();
        let label = match field(sentiment) {
            "positive" => 1,
            "negative" => -1,
            "neutral" => {
                neutral_dropped += 1;
                continue;
            }
            other => {
                return Err(Error::invalid(format!(
                    "{source_name}: row {}: unknown sentiment {other:?}",
                    n + 2
                )))
            }
        };
        rows.push(LabeledText {
            id: id_col.map_or_else(|| (n + 1).to_string(), |c| field(c).to_owned()),
            label,
            text: record.get(text).unwrap_or("").to_owned(),
            airline: airline_col.and_then(|c| field(c).parse().ok()),
        });
    }
    Ok(LabeledCorpus {
        provenance: format!(
            "{source_name}: {} positive/negative rows, {neutral_dropped} neutral rows dropped",
            rows.len()
        ),
        rows,
        neutral_dropped,
    })
}

pub fn load_kaggle_path(path: &Path) -> Result<LabeledCorpus> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    load_kaggle_csv(std::io::BufReader::new(file), &path.display().to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub vectors: Vec<SparseVector>,
    pub labels: Vec<i8>,
    pub provenance: String,
}

impl LabeledDataset {
    pub fn new(vectors: Vec<SparseVector>, labels: Vec<i8>, provenance: impl Into<String>) -> Result<Self> {
        if vectors.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} vectors but {} labels",
                vectors.len(),
                labels.len()
            )));
        }
        if labels.iter().any(|&l| l != 1 && l != -1) {
            return Err(Error::invalid("labels must be +1 or -1"));
        }
        Ok(LabeledDataset {
            vectors,
            labels,
            provenance: provenance.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn subset(&self, indices: &[usize]) -> LabeledDataset {
        LabeledDataset {
            vectors: indices.iter().map(|&i| self.vectors[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            provenance: self.provenance.clone(),
        }
    }
}

fn class_indices(labels: &[i8], seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_class: HashMap<i8, Vec<usize>> = HashMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    // Classes in order of first appearance, so that renaming the labels does
    // not change the shuffle.
    let mut classes: Vec<i8> = by_class.keys().copied().collect();
    classes.sort_unstable_by_key(|c| by_class[c][0]);
    classes
        .into_iter()
        .map(|c| {
            let mut idx = by_class.remove(&c).expect("present");
            idx.shuffle(&mut rng);
            idx
        })
        .collect()
}

/// Per-class shuffled split; each class contributes `round(n_c · test_fraction)`
/// rows to the test side. Both index lists come back sorted.
pub fn stratified_split(labels: &[i8], test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(Error::invalid(format!("test fraction {test_fraction} outside [0, 1)")));
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for idx in class_indices(labels, seed) {
        let n_test = (idx.len() as f64 * test_fraction).round() as usize;
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Fold number in `0..k` for every row, dealt round-robin within each class.
pub fn stratified_folds(labels: &[i8], k: usize, seed: u64) -> Vec<usize> {
    let mut fold = vec![0; labels.len()];
    for idx in class_indices(labels, seed) {
        for (pos, i) in idx.into_iter().enumerate() {
            fold[i] = pos % k;
        }
    }
    fold
}
