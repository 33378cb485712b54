use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::SentimentSeries;
use crate::error::{Error, Result};

/// Which standard deviation sets the band width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BandStd {
    /// Rolling population std of the z series over the SMA window.
    #[default]
    Rolling,
    /// Rolling population std of the SMA line itself.
    SmaLine,
}

fn check_window(len: usize, window: usize) -> Result<()> {
    if window == 0 || window > len {
        return Err(Error::invalid(format!(
            "window {window} must be between 1 and the series length {len}"
        )));
    }
    Ok(())
}

/// Window mean accumulated relative to the window's first value, so a window
/// of identical values has exactly that value as its mean.
fn window_mean(values: &[f64]) -> f64 {
    let shift = values[0];
    shift + values.iter().map(|v| v - shift).sum::<f64>() / values.len() as f64
}

fn window_std(values: &[f64]) -> f64 {
    let mean = window_mean(values);
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64).sqrt()
}

/// Trailing mean; `None` for the first `window − 1` positions.
pub fn sma(values: &[f64], window: usize) -> Result<Vec<Option<f64>>> {
    check_window(values.len(), window)?;
    Ok(rolling(values, window, window_mean))
}

/// Trailing population standard deviation, same alignment as [`sma`].
pub fn rolling_std(values: &[f64], window: usize) -> Result<Vec<Option<f64>>> {
    check_window(values.len(), window)?;
    Ok(rolling(values, window, window_std))
}

fn rolling(values: &[f64], window: usize, stat: fn(&[f64]) -> f64) -> Vec<Option<f64>> {
    (0..values.len())
        .map(|d| (d + 1 >= window).then(|| stat(&values[d + 1 - window..=d])))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSeries {
    pub window: usize,
    pub multiplier: f64,
    pub std_mode: BandStd,
    pub sma: Vec<Option<f64>>,
    pub std: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
    pub lower: Vec<Option<f64>>,
}

pub fn bollinger(series: &SentimentSeries, window: usize, multiplier: f64, std_mode: BandStd) -> Result<BandSeries> {
    if !(multiplier > 0.0 && multiplier.is_finite()) {
        return Err(Error::invalid(format!("band multiplier must be positive, got {multiplier}")));
    }
    let z = &series.z_scores;
    let sma = sma(z, window)?;
    let std = match std_mode {
        BandStd::Rolling => rolling_std(z, window)?,
        BandStd::SmaLine => {
            let first = window - 1;
            let line: Vec<f64> = sma[first..].iter().map(|v| v.expect("defined")).collect();
            let mut out = vec![None; first];
            if window <= line.len() {
                out.extend(rolling_std(&line, window)?);
            } else {
                out.extend(vec![None; line.len()]);
            }
            out
        }
    };
    let band = |sign: f64| -> Vec<Option<f64>> {
        sma.iter()
            .zip(&std)
            .map(|(m, s)| Some(m.as_ref()? + sign * multiplier * s.as_ref()?))
            .collect()
    };
    Ok(BandSeries {
        window,
        multiplier,
        std_mode,
        upper: band(1.0),
        lower: band(-1.0),
        sma,
        std,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    BelowLower,
    AboveUpper,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::BelowLower => "below_lower",
            Direction::AboveUpper => "above_upper",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakout {
    pub date: NaiveDate,
    pub direction: Direction,
    pub z_value: f64,
    pub band_value: f64,
    pub gap: f64,
}

/// Dates where `z < lower` or `z > upper`, in date order.
pub fn detect_breakouts(series: &SentimentSeries, bands: &BandSeries) -> Vec<Breakout> {
    let mut out = Vec::new();
    for (i, point) in series.points.iter().enumerate() {
        let z = series.z_scores[i];
        let (Some(lower), Some(upper)) = (bands.lower[i], bands.upper[i]) else {
            continue;
        };
        let hit = if z < lower {
            Some((Direction::BelowLower, lower))
        } else if z > upper {
            Some((Direction::AboveUpper, upper))
        } else {
            None
        };
        if let Some((direction, band_value)) = hit {
            out.push(Breakout {
                date: point.date,
                direction,
                z_value: z,
                band_value,
                gap: (z - band_value).abs(),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::DailyPoint;
    use super::*;

    fn series_of(z: &[f64]) -> SentimentSeries {
        let start = NaiveDate::from_ymd_opt(2023, 1, 1).unwrap();
        SentimentSeries {
            airline: None,
            points: (0..z.len())
                .map(|i| DailyPoint::empty(start + chrono::Days::new(i as u64)))
                .collect(),
            z_scores: z.to_vec(),
            mean: 0.0,
            std: 1.0,
        }
    }

    #[test]
    fn sma_examples() {
        assert_eq!(sma(&[1.0, 2.0, 3.0, 4.0], 2).unwrap(), vec![None, Some(1.5), Some(2.5), Some(3.5)]);
        let z = [0.3, -1.7, 2.2];
        assert_eq!(sma(&z, 1).unwrap(), z.iter().map(|v| Some(*v)).collect::<Vec<_>>());
        assert!(sma(&z, 0).is_err());
        assert!(sma(&z, 4).is_err());
    }

    #[test]
    fn identical_window_is_exact() {
        let v = [0.1; 20];
        assert!(sma(&v, 7).unwrap().iter().flatten().all(|m| *m == 0.1));
        assert!(rolling_std(&v, 7).unwrap().iter().flatten().all(|s| *s == 0.0));
    }

    #[test]
    fn hand_computed_band() {
        let s = series_of(&[0.0, 0.0, 0.0, -4.0]);
        let b = bollinger(&s, 4, 2.0, BandStd::Rolling).unwrap();
        assert_eq!(b.sma[3], Some(-1.0));
        assert!((b.std[3].unwrap() - 3f64.sqrt()).abs() < 1e-12);
        assert!((b.lower[3].unwrap() - (-1.0 - 2.0 * 3f64.sqrt())).abs() < 1e-12);
        assert!(detect_breakouts(&s, &b).is_empty());
        assert!(bollinger(&s, 4, 0.0, BandStd::Rolling).is_err());
    }

    #[test]
    fn constant_series_has_collapsed_bands_and_no_breakouts() {
        let s = series_of(&[0.25; 30]);
        let b = bollinger(&s, 14, 2.0, BandStd::Rolling).unwrap();
        for i in 13..30 {
            assert_eq!(b.upper[i], b.sma[i]);
            assert_eq!(b.lower[i], b.sma[i]);
        }
        assert!(detect_breakouts(&s, &b).is_empty());
    }

    #[test]
    fn boundary_is_not_a_breakout() {
        // z equals the upper band exactly at index 1
        let s = series_of(&[0.0, 0.0]);
        let b = BandSeries {
            window: 1,
            multiplier: 2.0,
            std_mode: BandStd::Rolling,
            sma: vec![Some(0.0); 2],
            std: vec![Some(0.0); 2],
            upper: vec![Some(0.0); 2],
            lower: vec![Some(0.0); 2],
        };
        assert!(detect_breakouts(&s, &b).is_empty());
    }

    #[test]
    fn sma_line_mode_alignment() {
        let z: Vec<f64> = (0..10).map(|i| (i as f64).sin()).collect();
        let b = bollinger(&series_of(&z), 3, 2.0, BandStd::SmaLine).unwrap();
        assert!(b.std[3].is_none() && b.std[4].is_some());
        let line: Vec<f64> = b.sma[2..5].iter().map(|v| v.unwrap()).collect();
        let mean = line.iter().sum::<f64>() / 3.0;
        let expected = (line.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 3.0).sqrt();
        assert!((b.std[4].unwrap() - expected).abs() < 1e-12);
    }
}
