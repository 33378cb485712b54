use chrono::{DateTime, Duration, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on results the search endpoint returns per request.
pub const MAX_RESULTS_PER_REQUEST: u32 = 500;
/// A day is fetched as eight three-hour requests.
pub const WINDOWS_PER_DAY: u32 = 8;

/// Half-open time interval `[start, end)` for one search request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FetchWindow {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    pub max_results: u32,
}

impl FetchWindow {
    pub fn new(start: DateTime<Utc>, end: DateTime<Utc>, max_results: u32) -> Result<Self> {
        if start >= end {
            return Err(Error::invalid("window start must precede end"));
        }
        if max_results == 0 || max_results > MAX_RESULTS_PER_REQUEST {
            return Err(Error::invalid(format!(
                "max_results must be in 1..={MAX_RESULTS_PER_REQUEST}"
            )));
        }
        Ok(FetchWindow {
            start,
            end,
            max_results,
        })
    }

    pub fn contains(&self, ts: DateTime<Utc>) -> bool {
        self.start <= ts && ts < self.end
    }
}

/// Splits a UTC day into contiguous three-hour request windows.
pub fn plan_windows(day: NaiveDate) -> Vec<FetchWindow> {
    let midnight = day.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc();
    let step = Duration::hours(24 / i64::from(WINDOWS_PER_DAY));
    (0..WINDOWS_PER_DAY)
        .map(|i| {
            let start = midnight + step * i as i32;
            FetchWindow {
                start,
                end: start + step,
                max_results: MAX_RESULTS_PER_REQUEST,
            }
        })
        .collect()
}
