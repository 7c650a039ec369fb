//! Central arcs of circular empirical distributions.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::states::{circular_difference, normalize_angle};

/// Arc running counter-clockwise from `low` through `width` radians.
/// A width of `2π` is the whole circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircularInterval {
    pub low: f64,
    pub high: f64,
    pub width: f64,
}

impl CircularInterval {
    pub fn full_circle(anchor: f64) -> Self {
        let a = normalize_angle(anchor);
        Self {
            low: a,
            high: a,
            width: TAU,
        }
    }

    pub fn contains(&self, angle: f64) -> bool {
        if self.width >= TAU {
            return true;
        }
        (angle - self.low).rem_euclid(TAU) <= self.width
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Central `1 − alpha` arc of `samples` around `center`. Deviations are
/// unwrapped relative to `center`, so the arc always contains it.
pub fn central_arc(center: f64, samples: &[f64], alpha: f64) -> CircularInterval {
    if samples.is_empty() {
        return CircularInterval::full_circle(center);
    }
    let mut deviations: Vec<f64> = samples.iter().map(|&s| circular_difference(s, center)).collect();
    deviations.sort_by(f64::total_cmp);
    let lo = quantile(&deviations, alpha / 2.0).min(0.0);
    let hi = quantile(&deviations, 1.0 - alpha / 2.0).max(0.0);
    CircularInterval {
        low: normalize_angle(center + lo),
        high: normalize_angle(center + hi),
        width: hi - lo,
    }
}
