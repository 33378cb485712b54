//! Deterministic synthetic data: a labeled training corpus that is
//! separable by construction, and a two-airline tweet corpus with one
//! scripted negative anomaly per airline.
//!
//! The bundled files under `fixtures/` are the output of these generators;
//! a test keeps them in sync.

use chrono::{Days, Duration, NaiveDate, TimeZone, Utc};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::airline::Airline;
use crate::corpus::RawRecord;

pub const LABELED_SEED: u64 = 20_230_201;
pub const LABELED_ROWS: usize = 500;
pub const LABELED_POSITIVE: usize = 200;

const POSITIVE: &[&str] = &[
    "great", "thanks", "thank you", "love", "awesome", "amazing", "best", "friendly", "excellent",
    "wonderful", "smooth", "happy", "appreciate", "helpful", "perfect", "comfortable", "kind",
    "fantastic", "glad", "early",
];

const NEGATIVE: &[&str] = &[
    "delayed", "cancelled", "worst", "rude", "lost", "terrible", "awful", "stuck", "on hold",
    "never again", "disappointed", "refund", "broken", "waiting", "missed", "horrible", "angry",
    "ridiculous", "dirty", "late",
];

const FILLER: &[&str] = &[
    "flight", "crew", "seat", "gate", "bag", "plane", "trip", "service", "agent", "today",
    "boston", "denver", "chicago", "home", "staff", "customer", "ticket", "check in", "boarding",
    "connection",
];

const TRAINING_AIRLINES: &[(&str, &str)] = &[
    ("United", "united"),
    ("American", "AmericanAir"),
    ("Delta", "Delta"),
    ("Southwest", "SouthwestAir"),
    ("JetBlue", "JetBlue"),
    ("Alaska", "AlaskaAir"),
];

/// CSV in the Kaggle column layout subset `tweet_id,airline_sentiment,airline,text`.
pub fn labeled_corpus_csv() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(LABELED_SEED);
    let mut labels: Vec<bool> = (0..LABELED_ROWS).map(|i| i < LABELED_POSITIVE).collect();
    rand::seq::SliceRandom::shuffle(labels.as_mut_slice(), &mut rng);

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["tweet_id", "airline_sentiment", "airline", "text"])
        .expect("in-memory write");
    for (i, positive) in labels.into_iter().enumerate() {
        let (name, handle) = *TRAINING_AIRLINES.choose(&mut rng).expect("non-empty");
        let pool = if positive { POSITIVE } else { NEGATIVE };
        let mut picks = pool.choose_multiple(&mut rng, 2);
        let (a, b) = (picks.next().expect("two"), picks.next().expect("two"));
        let mut fill = FILLER.choose_multiple(&mut rng, 2);
        let (f1, f2) = (fill.next().expect("two"), fill.next().expect("two"));
        let text = match rng.random_range(0..4) {
            0 => format!("@{handle} {a} {f1} {f2}, {b}!"),
            1 => format!("@{handle} the {f1} was {a} and {b}"),
            2 => format!("{a} {f1} with @{handle} today. {b} {f2}"),
            _ => format!("@{handle} {f1}: {a}. {f2}: {b}."),
        };
        let id = format!("5700{:06}", 100_000 + i);
        let sentiment = if positive { "positive" } else { "negative" };
        w.write_record([id.as_str(), sentiment, name, text.as_str()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// First day of the fixture tweet corpus.
pub fn fixture_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2023, 2, 1).expect("valid date")
}

pub const FIXTURE_DAYS: u64 = 60;
pub const FIXTURE_AIRLINES: [Airline; 2] = [Airline::American, Airline::Delta];
pub const ANOMALY_TWEETS: usize = 40;

/// `(airline, anomaly date, token expected to head the word table)`.
pub fn scripted_anomalies() -> Vec<(Airline, NaiveDate, &'static str)> {
    vec![
        (Airline::American, fixture_start() + Days::new(34), "sobapictures"),
        (Airline::Delta, fixture_start() + Days::new(46), "cancel"),
    ]
}

const DAILY: &[&str] = &[
    "{h} flight delayed again, stuck at the gate for two hours",
    "{h} lost my bag on a connection, still waiting on a refund",
    "{h} worst customer service, agent was rude at check in",
    "{h} hold time is ridiculous, been waiting an hour",
    "{h} missed my connection because of the delay",
    "{h} seat was broken and the plane was dirty",
    "{h} terrible experience, never flying with you again",
    "{h} why is my flight late every single time",
    "{h} disappointed with the crew today, nobody helped",
    "{h} stuck on the tarmac, no update from the pilot",
    "{h} my bag is damaged and no one will answer",
    "{h} horrible boarding process, total chaos at the gate",
    "{h} still no refund for the cancelled trip",
    "{h} the wifi is broken and the seat will not recline",
    "{h} delayed three hours and missed the meeting",
    "{h} rude gate agent, awful attitude",
    "{h} waiting on hold again, this is ridiculous",
    "{h} lost luggage for the second time this month",
    "{h} late departure and no explanation",
    "{h} terrible food and a dirty cabin",
    "{h} thanks for the smooth flight and friendly crew",
    "{h} great service today, the agent was so helpful",
    "{h} love the new seats, very comfortable",
    "{h} amazing crew on my flight to {city}, thank you",
    "{h} best upgrade ever, appreciate it",
    "{h} excellent customer service, fixed my ticket fast",
    "{h} awesome landing and early arrival",
    "{h} thank you for taking care of my mom",
    "{h} friendly staff at the gate, great job",
    "{h} wonderful trip home, happy customer",
];

const AMERICAN_ANOMALY: &[&str] = &[
    "{h} @sobapictures luggage was stolen from the carousel, awful",
    "{h} @sobapictures stolen camera gear and no help from the agent",
    "{h} @sobapictures terrible, your staff lost all of his equipment",
    "{h} how do you lose @sobapictures bags and say nothing",
    "{h} shame on you for how @sobapictures was treated",
    "{h} @sobapictures deserves a refund and an apology",
    "{h} disgusting response to @sobapictures theft",
    "{h} @sobapictures horrible customer service, return the gear",
    "{h} the worst, @sobapictures lost thousands in equipment",
    "{h} never flying again after what happened to @sobapictures",
];

const DELTA_ANOMALY: &[&str] = &[
    "{h} cancelled with no warning, stranded in {city}",
    "{h} canceled again, third time this week",
    "{h} why cancel the whole route and not tell anyone",
    "{h} canceling everything tonight, the hold line is useless",
    "{h} cancelled and rebooked for tomorrow night, unacceptable",
    "{h} another cancel, no hotel and no refund",
    "{h} canceled at the gate after boarding, terrible",
    "{h} they cancelled the morning departures and nobody knows why",
    "{h} cancel after cancel, worst week of travel",
    "{h} canceled with no crew available, awful planning",
];

const LOCATIONS: &[Option<&str>] = &[
    Some("Dallas, TX"),
    None,
    Some("New York"),
    Some("Atlanta, GA"),
    None,
    Some("Los Angeles"),
    Some("Chicago"),
];

fn fill(template: &str, airline: Airline) -> String {
    let city = if airline == Airline::Delta { "Atlanta" } else { "Dallas" };
    template
        .replace("{h}", &format!("@{}", airline.handle()))
        .replace("{city}", city)
}

fn record(airline: Airline, day: u64, seq: usize, minutes: i64, text: String) -> RawRecord {
    let code = FIXTURE_AIRLINES.iter().position(|a| *a == airline).unwrap_or(9);
    let midnight = Utc.from_utc_datetime(
        &(fixture_start() + Days::new(day))
            .and_hms_opt(0, 0, 0)
            .expect("valid time"),
    );
    RawRecord {
        tweet_id: format!("16{code}{day:03}{seq:04}"),
        text,
        created_at: midnight + Duration::minutes(minutes),
        author_id: format!("{}", 900_000 + (seq * 7 + day as usize * 13) % 4_000),
        author_location: LOCATIONS[(seq + day as usize) % LOCATIONS.len()].map(str::to_owned),
        lang: "en".into(),
        is_retweet: false,
    }
}

/// Raw tweet records for one fixture airline, in JSONL form.
///
/// Every day carries the same thirty tweets in the same order, so ordinary
/// days have identical daily scores. The scripted day adds forty negative
/// tweets. A Spanish tweet and a retweet every tenth day do not match the
/// default query, and one record is repeated to exercise deduplication.
pub fn fixture_tweets_jsonl(airline: Airline) -> String {
    let anomaly = scripted_anomalies()
        .into_iter()
        .find(|(a, _, _)| *a == airline)
        .map(|(_, d, _)| (d - fixture_start()).num_days() as u64);
    let anomaly_pool = if airline == Airline::Delta {
        DELTA_ANOMALY
    } else {
        AMERICAN_ANOMALY
    };
    let mut out = String::new();
    let mut push = |r: &RawRecord| {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    };
    for day in 0..FIXTURE_DAYS {
        for (seq, template) in DAILY.iter().enumerate() {
            push(&record(airline, day, seq, 20 + 45 * seq as i64, fill(template, airline)));
        }
        if Some(day) == anomaly {
            for j in 0..ANOMALY_TWEETS {
                let template = anomaly_pool[j % anomaly_pool.len()];
                push(&record(airline, day, 100 + j, 13 * 60 + 11 * j as i64, fill(template, airline)));
            }
        }
        if day % 10 == 5 {
            let mut es = record(airline, day, 900, 6 * 60 + 5, format!("@{} vuelo retrasado otra vez", airline.handle()));
            es.lang = "es".into();
            push(&es);
            let mut rt = record(airline, day, 901, 7 * 60 + 5, format!("RT @traveler: @{} lost my bag", airline.handle()));
            rt.is_retweet = true;
            push(&rt);
        }
        if day == 20 {
            push(&record(airline, day, 0, 20, fill(DAILY[0], airline)));
        }
    }
    out
}

/// Random labels and feature vectors for solver tests.
pub fn random_points(rng: &mut impl Rng, n: usize, dim: usize) -> (Vec<Vec<f64>>, Vec<i8>) {
    loop {
        let xs: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let ys: Vec<i8> = (0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
        if ys.contains(&1) && ys.contains(&-1) {
            return (xs, ys);
        }
    }
}
