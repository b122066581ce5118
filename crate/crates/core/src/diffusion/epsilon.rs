use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Log-spaced grid of kernel scales.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonGrid {
    pub log_min: f64,
    pub log_max: f64,
    pub steps: usize,
}

impl EpsilonGrid {
    /// 64 points from `1e-3 * median` positive squared distance to `1e3 * max`.
    pub fn default_for(sq_dist: &DMatrix<f64>) -> Result<Self> {
        let median = median_positive(sq_dist).ok_or(Error::NoLinearRegion)?;
        let max = sq_dist.max();
        Ok(Self { log_min: (1e-3 * median).ln(), log_max: (1e3 * max).ln(), steps: 64 })
    }

    pub fn log_points(&self) -> Vec<f64> {
        let span = self.log_max - self.log_min;
        let last = (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.log_min + span * i as f64 / last).collect()
    }
}

/// Settings of the linear-region search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    /// Largest deviation of a slope from its run mean.
    pub slope_tol: f64,
    /// Run means must lie in `(min_slope, max_slope)`.
    pub min_slope: f64,
    pub max_slope: f64,
    /// Admissible normalized heights `(log S - log N) / log N` of a run.
    pub band: (f64, f64),
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { slope_tol: 0.1, min_slope: 0.05, max_slope: f64::INFINITY, band: (0.25, 0.75) }
    }
}

/// Result of scanning `S_eps` over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonScan {
    pub log_eps: Vec<f64>,
    pub log_s: Vec<f64>,
    /// Forward differences of `log S` against `log eps`; one fewer than grid points.
    pub slopes: Vec<f64>,
    pub chosen_epsilon: f64,
    /// Inclusive range of slope indices forming the linear run.
    pub run: (usize, usize),
    /// Least-squares slope of `log S` over the grid points of the run.
    pub fitted_slope: f64,
}

/// `S_eps = sum_{i,j} exp(-d(i,j)^2 / (2 eps))`.
pub fn sum_affinity(sq_dist: &DMatrix<f64>, epsilon: f64) -> f64 {
    let n = sq_dist.nrows();
    let scale = 2.0 * epsilon;
    let mut off = 0.0;
    for j in 0..n {
        let col = sq_dist.column(j);
        for i in j + 1..n {
            off += (-col[i] / scale).exp();
        }
    }
    n as f64 + 2.0 * off
}

/// Scans `S_eps` and picks `eps` in the middle of the longest linear run of
/// `log S` against `log eps`.
///
/// A run is a stretch of at least three consecutive slopes that stay within
/// `slope_tol` of their mean, with that mean inside the configured bounds
/// and every slope interval inside the height band. The band keeps the run
/// away from the two saturation plateaus (`S -> N` and `S -> N^2`) and the
/// noise-dominated knee near the bottom. The longest run wins; ties go to
/// the smallest `eps`.
pub fn choose_epsilon(sq_dist: &DMatrix<f64>, grid: EpsilonGrid, config: ScanConfig) -> Result<EpsilonScan> {
    if grid.steps < 8 {
        return Err(Error::invalid(format!("epsilon grid needs at least 8 steps, got {}", grid.steps)));
    }
    if !(grid.log_min.is_finite() && grid.log_max.is_finite() && grid.log_max > grid.log_min) {
        return Err(Error::invalid("epsilon grid bounds must be finite and increasing"));
    }
    let n = sq_dist.nrows();
    let log_eps = grid.log_points();
    let log_s: Vec<f64> = log_eps.par_iter().map(|&le| sum_affinity(sq_dist, le.exp()).ln()).collect();
    let slopes: Vec<f64> = (0..grid.steps - 1)
        .map(|i| (log_s[i + 1] - log_s[i]) / (log_eps[i + 1] - log_eps[i]))
        .collect();

    let ln_n = (n as f64).ln();
    let in_band: Vec<bool> = (0..slopes.len())
        .map(|i| {
            if ln_n <= 0.0 {
                return false;
            }
            let h = (0.5 * (log_s[i] + log_s[i + 1]) - ln_n) / ln_n;
            h >= config.band.0 && h <= config.band.1
        })
        .collect();

    let mut best: Option<(usize, usize)> = None;
    for lo in 0..slopes.len() {
        if !in_band[lo] {
            continue;
        }
        for hi in lo + 2..slopes.len() {
            if !in_band[hi] {
                break;
            }
            let run = &slopes[lo..=hi];
            let mean = run.iter().sum::<f64>() / run.len() as f64;
            let linear = run.iter().all(|s| (s - mean).abs() < config.slope_tol);
            if linear && mean > config.min_slope && mean < config.max_slope {
                let longer = best.is_none_or(|(a, b)| hi - lo > b - a);
                if longer {
                    best = Some((lo, hi));
                }
            }
        }
    }
    let (lo, hi) = best.ok_or(Error::NoLinearRegion)?;
    let chosen_epsilon = log_eps[(lo + hi).div_ceil(2)].exp();
    let fitted_slope = least_squares_slope(&log_eps[lo..=hi + 1], &log_s[lo..=hi + 1]);
    Ok(EpsilonScan { log_eps, log_s, slopes, chosen_epsilon, run: (lo, hi), fitted_slope })
}

/// How a kernel scale is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonChoice {
    Fixed(f64),
    /// Scan with the default grid; fall back to the median heuristic when no
    /// linear region exists.
    Auto,
}

/// Where a resolved kernel scale came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsilonSource {
    Fixed,
    Scan,
    /// Median positive squared distance, used when the scan found no linear region.
    Median,
}

/// Resolves an [`EpsilonChoice`] against the squared distances of the points
/// the kernel will act on. `ambient_dim` bounds the admissible slope.
pub fn resolve_epsilon(sq_dist: &DMatrix<f64>, choice: EpsilonChoice, ambient_dim: usize) -> Result<(f64, EpsilonSource)> {
    match choice {
        EpsilonChoice::Fixed(eps) => {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::invalid(format!("epsilon must be positive and finite, got {eps}")));
            }
            Ok((eps, EpsilonSource::Fixed))
        }
        EpsilonChoice::Auto => {
            let scan = EpsilonGrid::default_for(sq_dist).and_then(|grid| {
                let config = ScanConfig { max_slope: ambient_dim as f64, ..ScanConfig::default() };
                choose_epsilon(sq_dist, grid, config)
            });
            match scan {
                Ok(scan) => Ok((scan.chosen_epsilon, EpsilonSource::Scan)),
                Err(Error::NoLinearRegion) => Ok((median_positive(sq_dist).unwrap_or(1.0), EpsilonSource::Median)),
                Err(e) => Err(e),
            }
        }
    }
}

/// Median of the positive off-diagonal entries, `None` if there are none.
pub fn median_positive(sq_dist: &DMatrix<f64>) -> Option<f64> {
    let n = sq_dist.nrows();
    let mut pos: Vec<f64> = Vec::new();
    for j in 0..n {
        for i in j + 1..n {
            let v = sq_dist[(i, j)];
            if v > 0.0 {
                pos.push(v);
            }
        }
    }
    if pos.is_empty() {
        return None;
    }
    pos.sort_by(f64::total_cmp);
    let m = pos.len();
    Some(if m % 2 == 1 { pos[m / 2] } else { 0.5 * (pos[m / 2 - 1] + pos[m / 2]) })
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
