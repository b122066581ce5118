use crate::error::{Error, Result};

/// Number of histogram bins over `[0, 255]`.
pub const BINS: usize = 256;

/// Slope threshold rule for the histogram scans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mu {
    /// Fraction of the smoothed histogram's peak height.
    PeakFraction(f64),
    Absolute(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdParams {
    pub mu: Mu,
    /// Width of the moving-average filter; odd.
    pub smoothing_width: usize,
}

impl Default for ThresholdParams {
    fn default() -> Self {
        Self { mu: Mu::PeakFraction(0.005), smoothing_width: 5 }
    }
}

impl ThresholdParams {
    pub fn validate(&self) -> Result<()> {
        let mu_ok = match self.mu {
            Mu::PeakFraction(f) => f > 0.0,
            Mu::Absolute(m) => m > 0.0,
        };
        if !mu_ok {
            return Err(Error::invalid("mu must be positive"));
        }
        if self.smoothing_width == 0 || self.smoothing_width.is_multiple_of(2) {
            return Err(Error::invalid(format!("smoothing width must be odd, got {}", self.smoothing_width)));
        }
        Ok(())
    }

    /// Resolved slope threshold for a smoothed histogram.
    pub fn mu_for(&self, h: &[f64]) -> f64 {
        match self.mu {
            Mu::PeakFraction(f) => f * h.iter().copied().fold(0.0, f64::max),
            Mu::Absolute(m) => m,
        }
    }
}

/// Histogram bin of a value in `[0, 255]`.
pub fn bin_of(v: f64) -> usize {
    (v.floor().max(0.0) as usize).min(BINS - 1)
}

/// 256-bin histogram of values in `[0, 255]`.
pub fn histogram(values: &[f64]) -> Vec<f64> {
    let mut h = vec![0.0; BINS];
    for &v in values {
        h[bin_of(v)] += 1.0;
    }
    h
}

/// Centered moving average; windows are truncated at the ends.
pub fn smooth(h: &[f64], width: usize) -> Vec<f64> {
    let half = width / 2;
    (0..h.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(h.len() - 1);
            h[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

/// Central difference, one-sided at the ends.
pub fn derivative(h: &[f64], x: usize) -> f64 {
    let n = h.len();
    if n < 2 {
        0.0
    } else if x == 0 {
        h[1] - h[0]
    } else if x == n - 1 {
        h[n - 1] - h[n - 2]
    } else {
        0.5 * (h[x + 1] - h[x - 1])
    }
}

/// First index of the maximum.
pub fn argmax(h: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in h.iter().enumerate() {
        if v > h[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrayThreshold {
    pub th: usize,
    /// No bin qualified; `th` is the last bin.
    pub flagged: bool,
}

/// Smallest `x > argmax` with `|h'(x)| < mu`.
pub fn gray_threshold(h: &[f64], mu: f64) -> GrayThreshold {
    let peak = argmax(h);
    for x in peak + 1..h.len() {
        if derivative(h, x).abs() < mu {
            return GrayThreshold { th: x, flagged: false };
        }
    }
    GrayThreshold { th: h.len().saturating_sub(1), flagged: true }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RgbThreshold {
    /// Values above `lower` and below `upper` are background.
    pub lower: i64,
    pub upper: i64,
    /// A scan ran off the histogram; the bound was set past the end.
    pub flagged: bool,
}

/// Two-sided scan from the maximum: `lower` is the first `y < argmax` with
/// `h'(y) < mu`, `upper` the first `x > argmax` with `h'(x) > -mu`.
pub fn rgb_threshold(h: &[f64], mu: f64) -> RgbThreshold {
    let peak = argmax(h);
    let mut flagged = false;
    let lower = match (0..peak).rev().find(|&y| derivative(h, y) < mu) {
        Some(y) => y as i64,
        None => {
            flagged |= peak > 0;
            -1
        }
    };
    let upper = match (peak + 1..h.len()).find(|&x| derivative(h, x) > -mu) {
        Some(x) => x as i64,
        None => {
            flagged |= peak + 1 < h.len();
            h.len() as i64
        }
    };
    RgbThreshold { lower, upper, flagged }
}
