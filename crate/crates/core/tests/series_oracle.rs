mod support;

use airsent_core::series::{
    bollinger, detect_breakouts, mean_std, rolling_std, sma, znormalize, BandStd, DailyPoint, Direction,
    SentimentSeries,
};
use chrono::{Days, NaiveDate};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use support::oracles;

fn points(raw: &[f64]) -> Vec<DailyPoint> {
    let start = NaiveDate::from_ymd_opt(2022, 1, 1).unwrap();
    raw.iter()
        .enumerate()
        .map(|(i, r)| DailyPoint {
            raw_score: *r,
            ..DailyPoint::empty(start + Days::new(i as u64))
        })
        .collect()
}

fn noise(seed: u64, n: usize, sigma: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Normal::new(0.0, sigma).unwrap();
    (0..n).map(|_| dist.sample(&mut rng)).collect()
}

fn breakout_days(raw: &[f64], w: usize, k: f64) -> Vec<(usize, Direction)> {
    let series = znormalize(None, points(raw)).unwrap();
    let bands = bollinger(&series, w, k, BandStd::Rolling).unwrap();
    let start = series.points[0].date;
    detect_breakouts(&series, &bands)
        .into_iter()
        .map(|b| ((b.date - start).num_days() as usize, b.direction))
        .collect()
}

#[test]
fn rolling_statistics_match_naive_recomputation() {
    for seed in 0..20 {
        let z = noise(seed, 365, 1.0 + seed as f64);
        for w in [1, 7, 14, 30, 365] {
            let (means, stds) = oracles::naive_rolling(&z, w);
            let got_m = sma(&z, w).unwrap();
            let got_s = rolling_std(&z, w).unwrap();
            for d in 0..z.len() {
                match (got_m[d], means[d]) {
                    (Some(a), Some(b)) => assert!((a - b).abs() <= 1e-12, "sma w={w} d={d}"),
                    (None, None) => {}
                    other => panic!("alignment differs at {d}: {other:?}"),
                }
                if let (Some(a), Some(b)) = (got_s[d], stds[d]) {
                    assert!((a - b).abs() <= 1e-12, "std w={w} d={d}");
                }
            }
        }
    }
}

#[test]
fn z_normalization_moments() {
    for seed in 0..20 {
        let raw: Vec<f64> = noise(seed, 365, 3.0).iter().map(|v| v * 7.0 + 40.0).collect();
        let s = znormalize(None, points(&raw)).unwrap();
        let n = s.z_scores.len() as f64;
        let mean = s.z_scores.iter().sum::<f64>() / n;
        let std = (s.z_scores.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / n).sqrt();
        assert!(mean.abs() <= 1e-9);
        assert!((std - 1.0).abs() <= 1e-9);
        let full = sma(&s.z_scores, s.z_scores.len()).unwrap();
        assert!(full.last().unwrap().unwrap().abs() <= 1e-9);
    }
}

#[test]
fn injected_dip_is_flagged() {
    // Flat baseline: the dip is the only deviation.
    let mut raw = vec![0.0; 365];
    raw[100] = -3.0;
    assert_eq!(breakout_days(&raw, 14, 2.0), vec![(100, Direction::BelowLower)]);

    // Quiet noisy baseline (σ = 0.2): the dip is always caught.
    for seed in 0..20 {
        let mut raw = noise(seed, 365, 0.2);
        raw[100] -= 3.0;
        let flagged = breakout_days(&raw, 14, 2.0);
        assert!(flagged.contains(&(100, Direction::BelowLower)), "seed {seed}: {flagged:?}");
    }
}

#[test]
fn constant_series_flags_nothing() {
    let start = NaiveDate::from_ymd_opt(2022, 1, 1).unwrap();
    let series = SentimentSeries {
        airline: None,
        points: (0..60).map(|i| DailyPoint::empty(start + Days::new(i))).collect(),
        z_scores: vec![0.0; 60],
        mean: 0.0,
        std: 0.0,
    };
    let bands = bollinger(&series, 14, 2.0, BandStd::Rolling).unwrap();
    assert!(detect_breakouts(&series, &bands).is_empty());
}

#[test]
fn white_noise_band_coverage() {
    let z = noise(2023, 365, 1.0);
    let series = znormalize(None, points(&z)).unwrap();
    let bands = bollinger(&series, 14, 2.0, BandStd::Rolling).unwrap();
    let defined = (13..365).count();
    let outside = detect_breakouts(&series, &bands).len();
    let inside = (defined - outside) as f64 / defined as f64;
    assert!((0.86..=0.99).contains(&inside), "in-band fraction {inside}");
}

#[test]
fn bands_survive_serialization() {
    let raw = noise(4, 120, 1.0);
    let series = znormalize(None, points(&raw)).unwrap();
    let reloaded: SentimentSeries = serde_json::from_str(&serde_json::to_string(&series).unwrap()).unwrap();
    assert_eq!(reloaded, series);
    let a = detect_breakouts(&series, &bollinger(&series, 14, 2.0, BandStd::Rolling).unwrap());
    let b = detect_breakouts(&reloaded, &bollinger(&reloaded, 14, 2.0, BandStd::Rolling).unwrap());
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn breakouts_are_affine_invariant(seed in any::<u64>(), scale in 0.1..50.0f64, shift in -100.0..100.0f64) {
        let raw = noise(seed, 120, 1.0);
        let moved: Vec<f64> = raw.iter().map(|r| r * scale + shift).collect();
        // Exclude dates within rounding distance of a band edge.
        let series = znormalize(None, points(&raw)).unwrap();
        let bands = bollinger(&series, 14, 2.0, BandStd::Rolling).unwrap();
        let near_edge = (0..raw.len()).any(|i| {
            [bands.lower[i], bands.upper[i]].iter().flatten().any(|e| (series.z_scores[i] - e).abs() < 1e-9)
        });
        prop_assume!(!near_edge);
        prop_assert_eq!(breakout_days(&raw, 14, 2.0), breakout_days(&moved, 14, 2.0));
    }

    #[test]
    fn bands_bracket_sma(seed in any::<u64>(), w in 1usize..40, k in 0.1..4.0f64) {
        let raw = noise(seed, 100, 1.0);
        let series = znormalize(None, points(&raw)).unwrap();
        let b = bollinger(&series, w, k, BandStd::Rolling).unwrap();
        for i in 0..raw.len() {
            if let (Some(lo), Some(m), Some(hi), Some(s)) = (b.lower[i], b.sma[i], b.upper[i], b.std[i]) {
                prop_assert!(lo <= m && m <= hi);
                prop_assert_eq!(lo == hi, s == 0.0);
            }
        }
        let (mean, _) = mean_std(&series.z_scores);
        prop_assert!(mean.abs() < 1e-9);
    }
}
