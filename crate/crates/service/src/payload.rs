//! Response documents. Every document carries `schema_version`.

use airsent_core::report::SeriesRow;
use airsent_core::series::Direction;
use airsent_core::Airline;
use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AirlineEntry {
    pub airline: Airline,
    pub name: String,
    pub records: usize,
    pub scored: usize,
    pub first_date: Option<NaiveDate>,
    pub last_date: Option<NaiveDate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AirlinesDoc {
    pub schema_version: u32,
    pub loaded_at: DateTime<Utc>,
    pub airlines: Vec<AirlineEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDoc {
    pub schema_version: u32,
    pub airline: Airline,
    pub window: usize,
    pub k: f64,
    pub from: NaiveDate,
    pub to: NaiveDate,
    pub mean: f64,
    pub std: f64,
    pub constant: bool,
    pub rows: Vec<SeriesRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordCount {
    pub word: String,
    pub frequency: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakoutEntry {
    pub date: NaiveDate,
    pub direction: Direction,
    pub z_value: f64,
    pub band_value: f64,
    pub gap: f64,
    /// Consecutive breakout days sharing one word table.
    pub episode_start: NaiveDate,
    pub episode_end: NaiveDate,
    pub top_words: Vec<WordCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakoutsDoc {
    pub schema_version: u32,
    pub airline: Airline,
    pub window: usize,
    pub k: f64,
    pub from: NaiveDate,
    pub to: NaiveDate,
    pub breakouts: Vec<BreakoutEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchHit {
    pub tweet_id: String,
    pub created_at: DateTime<Utc>,
    pub text: String,
    pub p_positive: Option<f64>,
    pub p_negative: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchDoc {
    pub schema_version: u32,
    pub airline: Airline,
    pub q: Option<String>,
    pub total: usize,
    pub results: Vec<SearchHit>,
    /// Pass back as `cursor` for the next page; absent on the last page.
    pub next_cursor: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorDoc {
    pub schema_version: u32,
    pub status: u16,
    pub error: String,
}
