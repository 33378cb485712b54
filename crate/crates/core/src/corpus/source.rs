use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use super::query::Query;
use super::record::RawRecord;
use super::window::FetchWindow;
use crate::error::{Error, Result};

/// Anything that can answer a windowed search request.
///
/// A live HTTP implementation would issue one request per window; the
/// shipped implementation replays a line-delimited record file.
pub trait TweetSource {
    fn fetch(&self, window: &FetchWindow, query: &Query) -> Result<Vec<RawRecord>>;
}

/// Serves search requests from a line-delimited JSON file. Malformed lines
/// are skipped; results are ordered by creation time and capped at the
/// window's `max_results`.
#[derive(Debug, Clone)]
pub struct FileSource {
    path: PathBuf,
}

impl FileSource {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        FileSource { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl TweetSource for FileSource {
    fn fetch(&self, window: &FetchWindow, query: &Query) -> Result<Vec<RawRecord>> {
        let file = File::open(&self.path).map_err(|e| Error::io(&self.path, e))?;
        let mut hits = Vec::new();
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| Error::io(&self.path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let Ok(raw) = RawRecord::parse_line(&line) else {
                continue;
            };
            if window.contains(raw.created_at)
                && query.matches_fields(&raw.text, &raw.lang, raw.is_retweet)
            {
                hits.push(raw);
            }
        }
        hits.sort_by(|a, b| {
            a.created_at
                .cmp(&b.created_at)
                .then_with(|| a.tweet_id.cmp(&b.tweet_id))
        });
        hits.truncate(window.max_results as usize);
        Ok(hits)
    }
}
