//! Per-frame orientation streams and the windowed circular median that
//! turns them into one orientation at the pass moment.

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::geometry::normalize_degrees;

/// Frames on each side of the pass moment (5-frame window at 25 fps).
pub const DEFAULT_WINDOW: u32 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientationSeries {
    pub player_id: String,
    /// `(frame, degrees)` with strictly increasing frames.
    pub samples: Vec<(i64, f64)>,
}

impl OrientationSeries {
    pub fn new(player_id: impl Into<String>, samples: Vec<(i64, f64)>) -> Result<Self, IoError> {
        let series = Self {
            player_id: player_id.into(),
            samples,
        };
        series.validate()?;
        Ok(series)
    }

    pub fn validate(&self) -> Result<(), IoError> {
        for w in self.samples.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(IoError::Orientation(format!(
                    "player `{}`: frame {} does not follow frame {}",
                    self.player_id, w[1].0, w[0].0
                )));
            }
        }
        if let Some((frame, deg)) = self.samples.iter().find(|(_, d)| !(0.0..360.0).contains(d)) {
            return Err(IoError::Orientation(format!(
                "player `{}`: orientation {deg} at frame {frame} is outside [0, 360)",
                self.player_id
            )));
        }
        Ok(())
    }

    /// Circular median of the samples in `[t - q, t + q]`.
    pub fn smooth(&self, t: i64, q: u32) -> Result<f64, IoError> {
        smooth_orientation(self, t, q)
    }
}

pub fn smooth_orientation(series: &OrientationSeries, t: i64, q: u32) -> Result<f64, IoError> {
    let q = i64::from(q);
    let window: Vec<f64> = series
        .samples
        .iter()
        .filter(|(f, _)| (t - q..=t + q).contains(f))
        .map(|&(_, d)| d)
        .collect();
    circular_median(&window).ok_or_else(|| {
        IoError::Orientation(format!(
            "no orientation samples for player `{}` within {} frames of {t}",
            series.player_id, q
        ))
    })
}

/// Circular mean direction in degrees; `None` when the resultant vanishes.
pub fn circular_mean(angles: &[f64]) -> Option<f64> {
    let (s, c) = angles.iter().fold((0.0, 0.0), |(s, c), a| {
        let (sa, ca) = a.to_radians().sin_cos();
        (s + sa, c + ca)
    });
    if s.hypot(c) <= 1e-9 * angles.len() as f64 {
        return None;
    }
    Some(normalize_degrees(s.atan2(c).to_degrees()))
}

/// Median of angles unwrapped around their circular mean. For an even
/// count the middle sample closer to the mean wins (the lower one on a tie).
/// Falls back to the first sample as the unwrap center when the mean is
/// undefined.
pub fn circular_median(angles: &[f64]) -> Option<f64> {
    let first = *angles.first()?;
    let center = circular_mean(angles).unwrap_or(first);
    let offset = |a: f64| {
        let d = (a - center).rem_euclid(360.0);
        if d > 180.0 {
            d - 360.0
        } else {
            d
        }
    };
    // Sort the samples themselves so the result is always one of them.
    let mut sorted: Vec<(f64, f64)> = angles.iter().map(|&a| (offset(a), a)).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = sorted.len();
    let pick = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        let (lo, hi) = (sorted[n / 2 - 1], sorted[n / 2]);
        // The mean of two samples is their midpoint up to rounding.
        if hi.0.abs() < lo.0.abs() - 1e-9 {
            hi
        } else {
            lo
        }
    };
    Some(normalize_degrees(pick.1))
}
