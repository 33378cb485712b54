//! Token frequency tables and keyword search over normalized tweets.

use std::collections::HashMap;
use std::io::Write;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::TweetRecord;
use crate::error::{Error, Result};
use crate::series::{Breakout, Direction};
use crate::textprep::{Normalizer, TokenDoc};

/// `(token, count)` pairs by descending count, ties in lexicographic order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyTable {
    pub entries: Vec<(String, u64)>,
}

impl FrequencyTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|(_, c)| c).sum()
    }

    pub fn top_k(&self, k: usize) -> FrequencyTable {
        FrequencyTable {
            entries: self.entries.iter().take(k).cloned().collect(),
        }
    }

    /// Two columns, `word,frequency`, with a header row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["word", "frequency"])?;
        for (word, count) in &self.entries {
            w.write_record([word.as_str(), &count.to_string()])?;
        }
        w.flush().map_err(|e| Error::Io {
            path: "<csv>".into(),
            source: e,
        })?;
        Ok(())
    }
}

/// Counts every token occurrence.
pub fn count_tokens<'a, I>(docs: I) -> FrequencyTable
where
    I: IntoIterator<Item = &'a TokenDoc>,
{
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for doc in docs {
        for t in &doc.tokens {
            *counts.entry(t.as_str()).or_default() += 1;
        }
    }
    let mut entries: Vec<(String, u64)> = counts.into_iter().map(|(t, c)| (t.to_owned(), c)).collect();
    entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    FrequencyTable { entries }
}

/// Records whose normalized tokens contain every normalized keyword token,
/// ordered by `(created_at, tweet_id)`.
pub fn keyword_search<'a>(
    records: &'a [TweetRecord],
    normalizer: &Normalizer,
    keyword: &str,
) -> Result<Vec<&'a TweetRecord>> {
    let wanted = normalizer.normalize_keyword(keyword);
    if wanted.is_empty() {
        return Err(Error::invalid(format!("keyword {keyword:?} has no searchable letters")));
    }
    let mut hits: Vec<&TweetRecord> = records
        .iter()
        .filter(|r| {
            let doc = normalizer.normalize_doc(r);
            wanted.iter().all(|w| doc.tokens.contains(w))
        })
        .collect();
    hits.sort_by(|a, b| (a.created_at, &a.tweet_id).cmp(&(b.created_at, &b.tweet_id)));
    Ok(hits)
}

/// A run of consecutive breakout dates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub directions: Vec<Direction>,
}

/// Groups date-sorted breakouts into runs of consecutive days.
pub fn episodes(breakouts: &[Breakout]) -> Vec<Episode> {
    let mut out: Vec<Episode> = Vec::new();
    for b in breakouts {
        match out.last_mut() {
            Some(e) if e.end.succ_opt() == Some(b.date) => {
                e.end = b.date;
                if !e.directions.contains(&b.direction) {
                    e.directions.push(b.direction);
                }
            }
            _ => out.push(Episode {
                start: b.date,
                end: b.date,
                directions: vec![b.direction],
            }),
        }
    }
    out
}
