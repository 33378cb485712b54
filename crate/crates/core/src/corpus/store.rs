//! Line-delimited record store.
//!
//! Layout under the store root:
//!
//! ```text
//! <airline>/<YYYY-MM-DD>.jsonl   one TweetRecord per line, append-only on ingest
//! <airline>/ids.idx              one tweet_id per line (deduplication index)
//! <airline>/.lock                present while a writer holds the partition
//! ```
//!
//! Readers never take the lock. Appends are line-atomic from the reader's
//! point of view (a trailing line without a newline is ignored) and score
//! updates replace whole day files by rename.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::query::Query;
use super::record::{RawRecord, TweetRecord};
use crate::airline::Airline;
use crate::error::{Error, Result};

const INDEX_FILE: &str = "ids.idx";
const LOCK_FILE: &str = ".lock";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    /// 1-based line number in the source stream.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub accepted: usize,
    pub duplicates: usize,
    pub rejected: usize,
    pub rejections: Vec<Rejection>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionSummary {
    pub airline: Airline,
    pub records: usize,
    pub scored: usize,
    pub first_date: Option<NaiveDate>,
    pub last_date: Option<NaiveDate>,
}

#[derive(Debug, Clone)]
pub struct Store {
    root: PathBuf,
}

/// Exclusive writer guard for one airline partition.
struct WriterLock {
    path: PathBuf,
}

impl WriterLock {
    fn acquire(partition: &Path) -> Result<Self> {
        fs::create_dir_all(partition).map_err(|e| Error::io(partition, e))?;
        let path = partition.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(WriterLock { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(Error::Locked(partition.to_path_buf()))
            }
            Err(e) => Err(Error::io(&path, e)),
        }
    }
}

impl Drop for WriterLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

fn day_file_name(date: NaiveDate) -> String {
    format!("{}.jsonl", date.format("%Y-%m-%d"))
}

fn parse_day_file_name(name: &str) -> Option<NaiveDate> {
    let stem = name.strip_suffix(".jsonl")?;
    NaiveDate::parse_from_str(stem, "%Y-%m-%d").ok()
}

fn read_day_file(path: &Path) -> Result<Vec<TweetRecord>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let complete = match content.rfind('\n') {
        Some(i) => &content[..=i],
        None => "",
    };
    complete
        .lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str(line).map_err(|e| Error::Corrupt {
                kind: "record file",
                message: format!("{}:{}: {e}", path.display(), i + 1),
            })
        })
        .collect()
}

fn write_lines<'a>(out: &mut impl Write, records: impl IntoIterator<Item = &'a TweetRecord>) -> std::io::Result<()> {
    for rec in records {
        serde_json::to_writer(&mut *out, rec)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

impl Store {
    /// Opens (creating if needed) a store rooted at `root`.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
        Ok(Store { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn partition(&self, airline: Airline) -> PathBuf {
        self.root.join(airline.slug())
    }

    fn load_index(&self, partition: &Path) -> Result<HashSet<String>> {
        let path = partition.join(INDEX_FILE);
        if !path.exists() {
            // Rebuild from the day files; covers a crash between the record
            // append and the index append.
            let mut ids = HashSet::new();
            for (_, file) in self.day_files(partition)? {
                ids.extend(read_day_file(&file)?.into_iter().map(|r| r.tweet_id));
            }
            return Ok(ids);
        }
        let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
        BufReader::new(file)
            .lines()
            .map(|l| l.map_err(|e| Error::io(&path, e)))
            .filter(|l| !matches!(l, Ok(s) if s.is_empty()))
            .collect()
    }

    fn day_files(&self, partition: &Path) -> Result<Vec<(NaiveDate, PathBuf)>> {
        if !partition.exists() {
            return Ok(Vec::new());
        }
        let mut files = Vec::new();
        for entry in fs::read_dir(partition).map_err(|e| Error::io(partition, e))? {
            let entry = entry.map_err(|e| Error::io(partition, e))?;
            let name = entry.file_name();
            if let Some(date) = name.to_str().and_then(parse_day_file_name) {
                files.push((date, entry.path()));
            }
        }
        files.sort();
        Ok(files)
    }

    /// Ingests a line-delimited stream of raw records. Records must match
    /// `query`; tweet ids already present in the partition are skipped.
    pub fn ingest<R: BufRead>(&self, reader: R, airline: Airline, query: &Query) -> Result<IngestReport> {
        let partition = self.partition(airline);
        let _lock = WriterLock::acquire(&partition)?;
        let mut seen = self.load_index(&partition)?;
        let index_existed = partition.join(INDEX_FILE).exists();

        let mut report = IngestReport::default();
        let mut by_day: BTreeMap<NaiveDate, Vec<TweetRecord>> = BTreeMap::new();
        let mut new_ids = Vec::new();

        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<ingest stream>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let raw = match RawRecord::parse_line(&line) {
                Ok(raw) => raw,
                Err(e) => {
                    report.rejected += 1;
                    report.rejections.push(Rejection {
                        line: i + 1,
                        reason: format!("malformed record: {e}"),
                    });
                    continue;
                }
            };
            if !query.matches_fields(&raw.text, &raw.lang, raw.is_retweet) {
                report.rejected += 1;
                report.rejections.push(Rejection {
                    line: i + 1,
                    reason: "does not match query".into(),
                });
                continue;
            }
            if !seen.insert(raw.tweet_id.clone()) {
                report.duplicates += 1;
                continue;
            }
            let record = raw.into_record(airline);
            new_ids.push(record.tweet_id.clone());
            by_day.entry(record.date()).or_default().push(record);
            report.accepted += 1;
        }

        for (date, records) in &by_day {
            let path = partition.join(day_file_name(*date));
            let file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(&path)
                .map_err(|e| Error::io(&path, e))?;
            let mut out = std::io::BufWriter::new(file);
            write_lines(&mut out, records).map_err(|e| Error::io(&path, e))?;
            out.flush().map_err(|e| Error::io(&path, e))?;
        }

        let index_path = partition.join(INDEX_FILE);
        let ids_to_write: Vec<String> = if index_existed {
            new_ids
        } else {
            let mut all: Vec<String> = seen.into_iter().collect();
            all.sort();
            all
        };
        if !ids_to_write.is_empty() || !index_existed {
            let file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(&index_path)
                .map_err(|e| Error::io(&index_path, e))?;
            let mut out = std::io::BufWriter::new(file);
            for id in &ids_to_write {
                writeln!(out, "{id}").map_err(|e| Error::io(&index_path, e))?;
            }
            out.flush().map_err(|e| Error::io(&index_path, e))?;
        }
        Ok(report)
    }

    /// Ingests a file; an unreadable path is a fatal error.
    pub fn ingest_path(&self, path: &Path, airline: Airline, query: &Query) -> Result<IngestReport> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        self.ingest(BufReader::new(file), airline, query)
    }

    /// All records created on UTC dates in `[from, to]`, ordered by
    /// `created_at` then `tweet_id`.
    pub fn load_range(&self, airline: Airline, from: NaiveDate, to: NaiveDate) -> Result<Vec<TweetRecord>> {
        if from > to {
            return Err(Error::invalid(format!("range start {from} is after end {to}")));
        }
        let mut records = Vec::new();
        for (date, path) in self.day_files(&self.partition(airline))? {
            if date >= from && date <= to {
                records.extend(read_day_file(&path)?);
            }
        }
        sort_records(&mut records);
        Ok(records)
    }

    pub fn load_all(&self, airline: Airline) -> Result<Vec<TweetRecord>> {
        let mut records = Vec::new();
        for (_, path) in self.day_files(&self.partition(airline))? {
            records.extend(read_day_file(&path)?);
        }
        sort_records(&mut records);
        Ok(records)
    }

    /// First and last dates holding records, if any.
    pub fn coverage(&self, airline: Airline) -> Result<Option<(NaiveDate, NaiveDate)>> {
        let files = self.day_files(&self.partition(airline))?;
        Ok(files.first().map(|(first, _)| (*first, files.last().unwrap().0)))
    }

    /// Per-airline counts for every partition that exists on disk, in
    /// [`Airline::ALL`] order.
    pub fn summary(&self) -> Result<Vec<PartitionSummary>> {
        let mut out = Vec::new();
        for airline in Airline::ALL {
            let partition = self.partition(airline);
            if !partition.is_dir() {
                continue;
            }
            let records = self.load_all(airline)?;
            out.push(PartitionSummary {
                airline,
                records: records.len(),
                scored: records.iter().filter(|r| r.is_scored()).count(),
                first_date: records.first().map(TweetRecord::date),
                last_date: records.last().map(TweetRecord::date),
            });
        }
        Ok(out)
    }

    /// Fills probabilities for unscored records in the (inclusive, optional)
    /// date range. Already-scored records are left untouched. Returns the
    /// number of records scored.
    pub fn score_unscored<F>(
        &self,
        airline: Airline,
        from: Option<NaiveDate>,
        to: Option<NaiveDate>,
        scorer: F,
    ) -> Result<usize>
    where
        F: Fn(&TweetRecord) -> Result<(f64, f64)> + Sync,
    {
        if let (Some(f), Some(t)) = (from, to) {
            if f > t {
                return Err(Error::invalid(format!("range start {f} is after end {t}")));
            }
        }
        let partition = self.partition(airline);
        let _lock = WriterLock::acquire(&partition)?;
        let mut scored = 0;
        for (date, path) in self.day_files(&partition)? {
            if from.is_some_and(|f| date < f) || to.is_some_and(|t| date > t) {
                continue;
            }
            let mut records = read_day_file(&path)?;
            let pending: Vec<usize> = (0..records.len()).filter(|&i| !records[i].is_scored()).collect();
            if pending.is_empty() {
                continue;
            }
            let probabilities: Vec<(f64, f64)> = pending
                .par_iter()
                .map(|&i| scorer(&records[i]))
                .collect::<Result<_>>()?;
            for (&i, p) in pending.iter().zip(probabilities) {
                records[i].set_probabilities(p);
            }
            let tmp = path.with_extension("jsonl.tmp");
            {
                let file = File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
                let mut out = std::io::BufWriter::new(file);
                write_lines(&mut out, &records).map_err(|e| Error::io(&tmp, e))?;
                out.flush().map_err(|e| Error::io(&tmp, e))?;
            }
            fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
            scored += pending.len();
        }
        Ok(scored)
    }

    /// SHA-256 over every file in the store (relative path and contents), in
    /// path order. Used to verify read-only consumers.
    pub fn fingerprint(&self) -> Result<String> {
        fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
            for entry in fs::read_dir(dir)? {
                let path = entry?.path();
                if path.is_dir() {
                    walk(&path, out)?;
                } else {
                    out.push(path);
                }
            }
            Ok(())
        }
        let mut files = Vec::new();
        walk(&self.root, &mut files).map_err(|e| Error::io(&self.root, e))?;
        files.sort();
        let mut hasher = Sha256::new();
        for path in files {
            let rel = path.strip_prefix(&self.root).unwrap_or(&path);
            hasher.update(rel.to_string_lossy().as_bytes());
            hasher.update([0]);
            hasher.update(fs::read(&path).map_err(|e| Error::io(&path, e))?);
        }
        Ok(hex::encode(hasher.finalize()))
    }
}

fn sort_records(records: &mut [TweetRecord]) {
    records.sort_by(|a, b| {
        a.created_at
            .cmp(&b.created_at)
            .then_with(|| a.tweet_id.cmp(&b.tweet_id))
    });
}
