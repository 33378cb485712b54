//! Series, bands, breakouts and word attribution for one airline and date
//! range. The CLI and the HTTP service both call [`analyze`], so their
//! numbers agree exactly.

use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::airline::Airline;
use crate::corpus::TweetRecord;
use crate::error::{Error, Result};
use crate::series::{
    aggregate_daily, bollinger, detect_breakouts, mean_std, znormalize, Breakout, DailyPoint, Direction, EmptyDays,
    SentimentSeries, SeriesConfig,
};
use crate::textprep::Normalizer;
use crate::wordfreq::{count_tokens, episodes, FrequencyTable};

pub const SERIES_HEADER: [&str; 10] = [
    "date",
    "n_tweets",
    "n_positive",
    "n_negative",
    "raw_score",
    "z",
    "sma",
    "upper",
    "lower",
    "breakout_direction",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub airline: Airline,
    pub from: NaiveDate,
    pub to: NaiveDate,
    pub series: SeriesConfig,
    /// Rows per attribution table.
    pub top_k: usize,
    /// Extra days on each side of a breakout episode for attribution.
    pub padding: u64,
}

impl ReportParams {
    pub fn new(airline: Airline, from: NaiveDate, to: NaiveDate) -> Self {
        ReportParams {
            airline,
            from,
            to,
            series: SeriesConfig::default(),
            top_k: 5,
            padding: 0,
        }
    }
}

/// One date of the exported series. `z` and the band columns are absent
/// where undefined (before the first full window, or on excluded days).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub date: NaiveDate,
    pub n_tweets: usize,
    pub n_positive: usize,
    pub n_negative: usize,
    pub raw_score: f64,
    pub z: Option<f64>,
    pub sma: Option<f64>,
    pub upper: Option<f64>,
    pub lower: Option<f64>,
    pub breakout_direction: Option<Direction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribution {
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub directions: Vec<Direction>,
    pub words: FrequencyTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub params: ReportParams,
    /// Mean and population std of the raw scores used for normalization.
    pub mean: f64,
    pub std: f64,
    /// The raw series was constant; z is 0 everywhere and nothing breaks out.
    pub constant: bool,
    pub rows: Vec<SeriesRow>,
    pub breakouts: Vec<Breakout>,
    pub attributions: Vec<Attribution>,
}

/// `records` may hold other airlines and dates; they are filtered out.
pub fn analyze(records: &[TweetRecord], normalizer: &Normalizer, params: &ReportParams) -> Result<Report> {
    let ReportParams {
        airline, from, to, ..
    } = *params;
    if from > to {
        return Err(Error::invalid(format!("from {from} is after to {to}")));
    }
    if params.top_k == 0 {
        return Err(Error::invalid("top_k must be at least 1"));
    }
    let mut selected: Vec<TweetRecord> = records
        .iter()
        .filter(|r| r.airline == airline && r.date() >= from && r.date() <= to)
        .cloned()
        .collect();
    if selected.is_empty() {
        return Err(Error::NoData(format!("no {airline} tweets between {from} and {to}")));
    }
    selected.sort_by(|a, b| (a.created_at, &a.tweet_id).cmp(&(b.created_at, &b.tweet_id)));

    let cfg = &params.series;
    let points = aggregate_daily(&selected, from, to, cfg.daily_score)?;
    let kept: Vec<usize> = (0..points.len())
        .filter(|&i| cfg.empty_days == EmptyDays::Include || points[i].n_tweets > 0)
        .collect();
    let kept_points: Vec<DailyPoint> = kept.iter().map(|&i| points[i].clone()).collect();
    if cfg.window == 0 || cfg.window > kept_points.len() {
        return Err(Error::invalid(format!(
            "window {} must be between 1 and the number of series days ({})",
            cfg.window,
            kept_points.len()
        )));
    }

    let (series, constant) = match znormalize(Some(airline), kept_points.clone()) {
        Ok(s) => (s, false),
        Err(Error::ZeroVariance) => {
            let raw: Vec<f64> = kept_points.iter().map(|p| p.raw_score).collect();
            let (mean, _) = mean_std(&raw);
            let s = SentimentSeries {
                airline: Some(airline),
                z_scores: vec![0.0; kept_points.len()],
                points: kept_points,
                mean,
                std: 0.0,
            };
            (s, true)
        }
        Err(e) => return Err(e),
    };
    let bands = bollinger(&series, cfg.window, cfg.multiplier, cfg.band_std)?;
    let breakouts = detect_breakouts(&series, &bands);

    let mut rows: Vec<SeriesRow> = points
        .iter()
        .map(|p| SeriesRow {
            date: p.date,
            n_tweets: p.n_tweets,
            n_positive: p.n_positive,
            n_negative: p.n_negative,
            raw_score: p.raw_score,
            z: None,
            sma: None,
            upper: None,
            lower: None,
            breakout_direction: None,
        })
        .collect();
    for (k, &i) in kept.iter().enumerate() {
        let row = &mut rows[i];
        row.z = Some(series.z_scores[k]);
        row.sma = bands.sma[k];
        row.upper = bands.upper[k];
        row.lower = bands.lower[k];
    }
    for b in &breakouts {
        rows[(b.date - from).num_days() as usize].breakout_direction = Some(b.direction);
    }

    let attributions = episodes(&breakouts)
        .into_iter()
        .map(|e| {
            let lo = e.start.checked_sub_days(Days::new(params.padding)).unwrap_or(e.start);
            let hi = e.end.checked_add_days(Days::new(params.padding)).unwrap_or(e.end);
            let docs: Vec<_> = selected
                .iter()
                .filter(|r| r.date() >= lo && r.date() <= hi)
                .map(|r| normalizer.normalize_doc(r))
                .collect();
            Attribution {
                start: e.start,
                end: e.end,
                directions: e.directions,
                words: count_tokens(&docs).top_k(params.top_k),
            }
        })
        .collect();

    Ok(Report {
        params: params.clone(),
        mean: series.mean,
        std: series.std,
        constant,
        rows,
        breakouts,
        attributions,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn flush_csv<W: Write>(w: csv::Writer<W>) -> Result<()> {
    w.into_inner().map_err(|e| Error::Io {
        path: "<csv>".into(),
        source: e.into_error(),
    })?;
    Ok(())
}

pub fn write_series_csv<W: Write>(report: &Report, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SERIES_HEADER)?;
    for r in &report.rows {
        w.write_record([
            r.date.to_string(),
            r.n_tweets.to_string(),
            r.n_positive.to_string(),
            r.n_negative.to_string(),
            r.raw_score.to_string(),
            opt(r.z),
            opt(r.sma),
            opt(r.upper),
            opt(r.lower),
            r.breakout_direction.map(|d| d.as_str().to_owned()).unwrap_or_default(),
        ])?;
    }
    flush_csv(w)
}

pub fn write_breakouts_csv<W: Write>(report: &Report, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "direction", "z", "band", "gap"])?;
    for b in &report.breakouts {
        w.write_record([
            b.date.to_string(),
            b.direction.as_str().to_owned(),
            b.z_value.to_string(),
            b.band_value.to_string(),
            b.gap.to_string(),
        ])?;
    }
    flush_csv(w)
}

/// Writes `<airline>-series.csv`, `<airline>-breakouts.csv` and one
/// `<airline>-words-<start>_<end>.csv` per breakout episode. Returns the
/// paths written, in that order.
pub fn write_report_files(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let slug = report.params.airline.slug();
    let mut written = Vec::new();
    let mut emit = |name: String, body: Vec<u8>| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    let mut buf = Vec::new();
    write_series_csv(report, &mut buf)?;
    emit(format!("{slug}-series.csv"), buf)?;
    let mut buf = Vec::new();
    write_breakouts_csv(report, &mut buf)?;
    emit(format!("{slug}-breakouts.csv"), buf)?;
    for a in &report.attributions {
        let mut buf = Vec::new();
        a.words.write_csv(&mut buf)?;
        emit(format!("{slug}-words-{}_{}.csv", a.start, a.end), buf)?;
    }
    Ok(written)
}
