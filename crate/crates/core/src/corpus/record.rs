use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::airline::Airline;
use crate::error::{Error, Result};

/// One stored tweet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub tweet_id: String,
    pub text: String,
    #[serde(with = "utc_seconds")]
    pub created_at: DateTime<Utc>,
    pub author_id: String,
    pub author_location: Option<String>,
    pub airline: Airline,
    pub p_positive: Option<f64>,
    pub p_negative: Option<f64>,
    pub lang: String,
    pub is_retweet: bool,
}

impl TweetRecord {
    pub fn date(&self) -> NaiveDate {
        self.created_at.date_naive()
    }

    pub fn is_scored(&self) -> bool {
        self.p_positive.is_some() && self.p_negative.is_some()
    }

    /// Both probabilities, or [`Error::Unscored`].
    pub fn probabilities(&self) -> Result<(f64, f64)> {
        match (self.p_positive, self.p_negative) {
            (Some(p), Some(n)) => Ok((p, n)),
            _ => Err(Error::Unscored(self.tweet_id.clone())),
        }
    }

    pub fn set_probabilities(&mut self, (p_positive, p_negative): (f64, f64)) {
        self.p_positive = Some(p_positive);
        self.p_negative = Some(p_negative);
    }

    pub fn validate(&self) -> Result<()> {
        if self.tweet_id.is_empty() {
            return Err(Error::invalid("tweet_id is empty"));
        }
        for p in [self.p_positive, self.p_negative].into_iter().flatten() {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!(
                    "tweet {}: probability {p} outside [0, 1]",
                    self.tweet_id
                )));
            }
        }
        if let (Some(p), Some(n)) = (self.p_positive, self.p_negative) {
            if (p + n - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(format!(
                    "tweet {}: probabilities sum to {}",
                    self.tweet_id,
                    p + n
                )));
            }
        }
        if self.p_positive.is_some() != self.p_negative.is_some() {
            return Err(Error::invalid(format!(
                "tweet {}: only one probability set",
                self.tweet_id
            )));
        }
        Ok(())
    }
}

/// A record as it arrives from an ingestion source, before it is tagged with
/// an airline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRecord {
    pub tweet_id: String,
    pub text: String,
    #[serde(with = "utc_seconds")]
    pub created_at: DateTime<Utc>,
    pub author_id: String,
    #[serde(default)]
    pub author_location: Option<String>,
    pub lang: String,
    pub is_retweet: bool,
}

impl RawRecord {
    pub fn parse_line(line: &str) -> Result<Self> {
        let raw: RawRecord = serde_json::from_str(line)?;
        if raw.tweet_id.trim().is_empty() {
            return Err(Error::invalid("tweet_id is empty"));
        }
        if raw.text.is_empty() {
            return Err(Error::invalid("text is empty"));
        }
        Ok(raw)
    }

    pub fn into_record(self, airline: Airline) -> TweetRecord {
        TweetRecord {
            tweet_id: self.tweet_id,
            text: self.text,
            created_at: self.created_at,
            author_id: self.author_id,
            author_location: self.author_location,
            airline,
            p_positive: None,
            p_negative: None,
            lang: self.lang,
            is_retweet: self.is_retweet,
        }
    }
}

/// ISO-8601 timestamps: any offset is accepted on input and normalized to
/// UTC at second resolution; output is always `YYYY-MM-DDTHH:MM:SSZ`.
mod utc_seconds {
    use chrono::{DateTime, FixedOffset, SubsecRound, Utc};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ts: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&ts.format("%Y-%m-%dT%H:%M:%SZ"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let text = String::deserialize(d)?;
        let parsed: DateTime<FixedOffset> =
            DateTime::parse_from_rfc3339(&text).map_err(de::Error::custom)?;
        Ok(parsed.with_timezone(&Utc).trunc_subsecs(0))
    }
}
