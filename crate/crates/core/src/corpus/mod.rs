//! Tweet records, search queries, fetch planning and persistence.

mod query;
mod record;
mod source;
mod store;
mod window;

pub use query::{parse_query, Query, QueryNode};
pub use record::{RawRecord, TweetRecord};
pub use source::{FileSource, TweetSource};
pub use store::{IngestReport, PartitionSummary, Rejection, Store};
pub use window::{plan_windows, FetchWindow, MAX_RESULTS_PER_REQUEST, WINDOWS_PER_DAY};
