//! Daily sentiment series, Z-normalization, simple moving averages,
//! Bollinger bands and breakout detection.
//!
//! Rolling statistics use trailing windows: the value at date `d` depends on
//! dates `d − w + 1 ..= d` only.

mod bands;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

pub use bands::{bollinger, detect_breakouts, rolling_std, sma, BandSeries, BandStd, Breakout, Direction};

use crate::airline::Airline;
use crate::corpus::TweetRecord;
use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: usize = 14;
pub const DEFAULT_MULTIPLIER: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DailyScore {
    /// `Σ (p_pos − p_neg)` over the day's tweets.
    #[default]
    Sum,
    /// The same sum divided by the day's tweet count.
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EmptyDays {
    /// Zero-tweet days stay in the series with raw score 0.
    #[default]
    Include,
    /// Zero-tweet days are left out of normalization and bands.
    Exclude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeriesConfig {
    pub window: usize,
    pub multiplier: f64,
    pub daily_score: DailyScore,
    pub empty_days: EmptyDays,
    pub band_std: BandStd,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            window: DEFAULT_WINDOW,
            multiplier: DEFAULT_MULTIPLIER,
            daily_score: DailyScore::Sum,
            empty_days: EmptyDays::Include,
            band_std: BandStd::Rolling,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyPoint {
    pub date: NaiveDate,
    pub n_tweets: usize,
    pub n_positive: usize,
    pub n_negative: usize,
    pub raw_score: f64,
}

impl DailyPoint {
    pub fn empty(date: NaiveDate) -> Self {
        DailyPoint {
            date,
            n_tweets: 0,
            n_positive: 0,
            n_negative: 0,
            raw_score: 0.0,
        }
    }
}

/// One point per date in `[from, to]`. Records outside the range are
/// ignored; records are summed in the order given.
pub fn aggregate_daily(
    records: &[TweetRecord],
    from: NaiveDate,
    to: NaiveDate,
    mode: DailyScore,
) -> Result<Vec<DailyPoint>> {
    if from > to {
        return Err(Error::invalid(format!("from {from} is after to {to}")));
    }
    let mut points: Vec<DailyPoint> = from.iter_days().take_while(|d| *d <= to).map(DailyPoint::empty).collect();
    for record in records {
        let date = record.date();
        if date < from || date > to {
            continue;
        }
        let (p_pos, p_neg) = record.probabilities()?;
        let point = &mut points[(date - from).num_days() as usize];
        point.n_tweets += 1;
        if p_pos > 0.5 {
            point.n_positive += 1;
        } else {
            point.n_negative += 1;
        }
        point.raw_score += p_pos - p_neg;
    }
    if mode == DailyScore::Mean {
        for p in &mut points {
            if p.n_tweets > 0 {
                p.raw_score /= p.n_tweets as f64;
            }
        }
    }
    Ok(points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentSeries {
    pub airline: Option<Airline>,
    pub points: Vec<DailyPoint>,
    pub z_scores: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

impl SentimentSeries {
    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.points.iter().map(|p| p.date)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Population mean and std. Values are shifted by the first element before
/// summing, so a constant slice gives its value and exactly 0.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let Some(&shift) = values.first() else {
        return (f64::NAN, f64::NAN);
    };
    let n = values.len() as f64;
    let offset = values.iter().map(|v| v - shift).sum::<f64>() / n;
    let var = values.iter().map(|v| (v - shift - offset).powi(2)).sum::<f64>() / n;
    (shift + offset, var.sqrt())
}

/// `z_d = (raw_d − μ) / s` with the population standard deviation `s`.
pub fn znormalize(airline: Option<Airline>, points: Vec<DailyPoint>) -> Result<SentimentSeries> {
    if points.len() < 2 {
        return Err(Error::invalid(format!(
            "Z-normalization needs at least 2 points, got {}",
            points.len()
        )));
    }
    let raw: Vec<f64> = points.iter().map(|p| p.raw_score).collect();
    let (mean, std) = mean_std(&raw);
    if std == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(SentimentSeries {
        airline,
        z_scores: raw.iter().map(|r| (r - mean) / std).collect(),
        points,
        mean,
        std,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};

    fn scored(id: &str, day: u32, p: f64) -> TweetRecord {
        let mut r = TweetRecord {
            tweet_id: id.into(),
            text: "x".into(),
            created_at: Utc.with_ymd_and_hms(2023, 2, day, 12, 0, 0).unwrap(),
            author_id: "a".into(),
            author_location: None,
            airline: Airline::American,
            p_positive: None,
            p_negative: None,
            lang: "en".into(),
            is_retweet: false,
        };
        r.p_positive = Some(p);
        r.p_negative = Some(1.0 - p);
        r
    }

    fn date(day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2023, 2, day).unwrap()
    }

    #[test]
    fn aggregate_examples() {
        let pts = aggregate_daily(&[scored("1", 1, 0.5)], date(1), date(1), DailyScore::Sum).unwrap();
        assert_eq!((pts[0].raw_score, pts[0].n_positive, pts[0].n_negative), (0.0, 0, 1));

        let pts = aggregate_daily(&[scored("1", 1, 1.0), scored("2", 1, 0.0)], date(1), date(1), DailyScore::Sum).unwrap();
        assert_eq!((pts[0].raw_score, pts[0].n_positive, pts[0].n_negative), (0.0, 1, 1));

        let three = [scored("1", 2, 0.9), scored("2", 2, 0.2), scored("3", 2, 0.4)];
        let pts = aggregate_daily(&three, date(1), date(3), DailyScore::Sum).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0], DailyPoint::empty(date(1)));
        assert!(pts[1].raw_score.abs() < 1e-12);
        assert_eq!((pts[1].n_tweets, pts[1].n_positive, pts[1].n_negative), (3, 1, 2));

        let pts = aggregate_daily(&three[..2], date(2), date(2), DailyScore::Mean).unwrap();
        assert!((pts[0].raw_score - 0.1).abs() < 1e-12);
    }

    #[test]
    fn aggregate_errors() {
        let mut r = scored("77", 1, 0.5);
        r.p_positive = None;
        r.p_negative = None;
        let err = aggregate_daily(&[r], date(1), date(1), DailyScore::Sum).unwrap_err();
        assert!(err.to_string().contains("77"));
        assert!(aggregate_daily(&[], date(2), date(1), DailyScore::Sum).is_err());
    }

    fn raw_points(raw: &[f64]) -> Vec<DailyPoint> {
        raw.iter()
            .enumerate()
            .map(|(i, r)| DailyPoint {
                raw_score: *r,
                ..DailyPoint::empty(date(1) + chrono::Days::new(i as u64))
            })
            .collect()
    }

    #[test]
    fn znormalize_examples() {
        let s = znormalize(None, raw_points(&[2.0, 4.0, 6.0])).unwrap();
        let expected = 2.0 / (8.0f64 / 3.0).sqrt();
        assert!((s.z_scores[0] + expected).abs() < 1e-12);
        assert_eq!(s.z_scores[1], 0.0);
        assert!((s.z_scores[2] - 1.2247).abs() < 1e-4);
        assert!(matches!(znormalize(None, raw_points(&[5.0, 5.0, 5.0])), Err(Error::ZeroVariance)));
        assert!(znormalize(None, raw_points(&[5.0])).is_err());
    }
}
