use std::collections::BTreeMap;
use std::sync::Arc;

use airsent_core::corpus::PartitionSummary;
use airsent_core::{Airline, Result, Store, TweetRecord};
use chrono::{DateTime, NaiveDate, Utc};

/// Immutable view of the store taken at `loaded_at`. Refreshing builds a new
/// snapshot and swaps it in whole.
#[derive(Debug)]
pub struct Snapshot {
    pub loaded_at: DateTime<Utc>,
    pub summaries: Vec<PartitionSummary>,
    partitions: BTreeMap<Airline, Arc<Vec<TweetRecord>>>,
}

impl Snapshot {
    pub fn load(store: &Store) -> Result<Self> {
        let summaries = store.summary()?;
        let mut partitions = BTreeMap::new();
        for s in &summaries {
            partitions.insert(s.airline, Arc::new(store.load_all(s.airline)?));
        }
        Ok(Snapshot {
            loaded_at: Utc::now(),
            summaries,
            partitions,
        })
    }

    pub fn records(&self, airline: Airline) -> Option<&[TweetRecord]> {
        self.partitions.get(&airline).map(|r| r.as_slice())
    }

    pub fn coverage(&self, airline: Airline) -> Option<(NaiveDate, NaiveDate)> {
        let s = self.summaries.iter().find(|s| s.airline == airline)?;
        Some((s.first_date?, s.last_date?))
    }
}
