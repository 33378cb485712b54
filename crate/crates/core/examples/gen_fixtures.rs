//! Rewrites the bundled fixtures from the synthetic generators.
//!
//! `cargo run -p airsent-core --example gen_fixtures`

use std::path::Path;

use airsent_core::{synth, Airline};

fn main() -> std::io::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("labeled-500.csv"), synth::labeled_corpus_csv())?;
    for airline in [Airline::American, Airline::Delta] {
        std::fs::write(
            dir.join(format!("tweets-{}.jsonl", airline.slug())),
            synth::fixture_tweets_jsonl(airline),
        )?;
    }
    println!("fixtures written to {}", dir.display());
    Ok(())
}
