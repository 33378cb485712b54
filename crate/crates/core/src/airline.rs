use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The ten carriers tracked by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Airline {
    American,
    United,
    Southwest,
    Delta,
    JetBlue,
    Alaska,
    Allegiant,
    Frontier,
    Hawaiian,
    Spirit,
}

impl Airline {
    pub const ALL: [Airline; 10] = [
        Airline::American,
        Airline::United,
        Airline::Southwest,
        Airline::Delta,
        Airline::JetBlue,
        Airline::Alaska,
        Airline::Allegiant,
        Airline::Frontier,
        Airline::Hawaiian,
        Airline::Spirit,
    ];

    /// Stable lowercase identifier used in paths, URLs and record files.
    pub fn slug(self) -> &'static str {
        match self {
            Airline::American => "american",
            Airline::United => "united",
            Airline::Southwest => "southwest",
            Airline::Delta => "delta",
            Airline::JetBlue => "jetblue",
            Airline::Alaska => "alaska",
            Airline::Allegiant => "allegiant",
            Airline::Frontier => "frontier",
            Airline::Hawaiian => "hawaiian",
            Airline::Spirit => "spirit",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Airline::American => "American Airlines",
            Airline::United => "United Airlines",
            Airline::Southwest => "Southwest Airlines",
            Airline::Delta => "Delta Air Lines",
            Airline::JetBlue => "JetBlue Airways",
            Airline::Alaska => "Alaska Airlines",
            Airline::Allegiant => "Allegiant Air",
            Airline::Frontier => "Frontier Airlines",
            Airline::Hawaiian => "Hawaiian Airlines",
            Airline::Spirit => "Spirit Airlines",
        }
    }

    /// Official Twitter handle, without the `@`.
    pub fn handle(self) -> &'static str {
        match self {
            Airline::American => "AmericanAir",
            Airline::United => "united",
            Airline::Southwest => "SouthwestAir",
            Airline::Delta => "Delta",
            Airline::JetBlue => "JetBlue",
            Airline::Alaska => "AlaskaAir",
            Airline::Allegiant => "Allegiant",
            Airline::Frontier => "FlyFrontier",
            Airline::Hawaiian => "HawaiianAir",
            Airline::Spirit => "SpiritAirlines",
        }
    }

    /// Default search query: the handle mention or the carrier name, English
    /// only, retweets excluded. The filters are parenthesized so they apply
    /// to both branches.
    pub fn default_query(self) -> String {
        let name = match self {
            Airline::JetBlue => "jetblue airways",
            Airline::Allegiant => "allegiant air",
            Airline::Delta => "delta airlines",
            other => {
                return format!(
                    "(@{} OR {} airlines) lang:en -is:retweet",
                    other.handle().to_lowercase(),
                    other.slug()
                )
            }
        };
        format!(
            "(@{} OR {}) lang:en -is:retweet",
            self.handle().to_lowercase(),
            name
        )
    }

    /// Words naming the carrier, removed before modeling.
    pub fn default_keywords(self) -> Vec<String> {
        let mut words: Vec<&str> = match self {
            Airline::American => vec!["american", "americanair", "americanairlines", "aa"],
            Airline::United => vec!["united", "uniteds", "unitedairlines"],
            Airline::Southwest => vec!["southwest", "southwestair", "southwestairlines", "swa"],
            Airline::Delta => vec!["delta", "deltas", "deltaairlines"],
            Airline::JetBlue => vec!["jetblue", "jetblues", "jetblueairways"],
            Airline::Alaska => vec!["alaska", "alaskaair", "alaskaairlines", "alaskas"],
            Airline::Allegiant => vec!["allegiant", "allegiantair", "allegiants"],
            Airline::Frontier => vec!["frontier", "flyfrontier", "frontierairlines", "frontiers"],
            Airline::Hawaiian => vec!["hawaiian", "hawaiianair", "hawaiianairlines"],
            Airline::Spirit => vec!["spirit", "spiritairlines", "spirits"],
        };
        words.extend(["airline", "airlines", "air", "airways", "lines"]);
        words.into_iter().map(str::to_owned).collect()
    }
}

impl fmt::Display for Airline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for Airline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let needle = s.trim().to_ascii_lowercase();
        Airline::ALL
            .into_iter()
            .find(|a| a.slug() == needle)
            .ok_or_else(|| Error::invalid(format!("unknown airline {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs_round_trip() {
        for airline in Airline::ALL {
            assert_eq!(airline.slug().parse::<Airline>().unwrap(), airline);
            let json = serde_json::to_string(&airline).unwrap();
            assert_eq!(json, format!("\"{}\"", airline.slug()));
        }
        assert!("lufthansa".parse::<Airline>().is_err());
    }

    #[test]
    fn united_default_query_follows_handle_or_name_pattern() {
        assert_eq!(
            Airline::United.default_query(),
            "(@united OR united airlines) lang:en -is:retweet"
        );
    }
}
