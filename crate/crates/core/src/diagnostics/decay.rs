use alloc::vec::Vec;

use crate::spacetime::BlackHoleParams;
use crate::{Error, Result};

// Needed without std; unused when a dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

/// Values below this are treated as numerical zero and dropped.
pub const NOISE_FLOOR: f64 = 1e-13;

/// Largest RMS residual of `log|u − c|` about the fitted line for which a
/// fit is declared good.
pub const MAX_LOG_RESIDUAL: f64 = 0.1;

/// Minimum number of points in a fit.
const MIN_POINTS: usize = 3;

/// Oscillation periods a good fit must span when oscillation is detected.
const MIN_PERIODS: f64 = 3.0;

/// Which part of a series is fitted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitWindow {
    /// Earliest time used; typically after the source has switched off.
    pub start: f64,
    pub end: f64,
    /// Leading fraction of `[start, end]` to discard, so that faster
    /// components have died out; `0` fits the whole window.
    pub discard: f64,
}

impl FitWindow {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end, discard: 0.5 }
    }

    /// Starts two light-crossing times `r_+ − r_-` after `source_end`.
    pub fn after_source(p: &BlackHoleParams, source_end: f64, end: f64) -> Self {
        Self::new(source_end + 2.0 * (p.r_plus() - p.r_minus()), end)
    }

    pub fn whole() -> Self {
        Self { start: f64::NEG_INFINITY, end: f64::INFINITY, discard: 0.0 }
    }
}

/// Least-squares fit of `log|u − c| ≈ log A − ν t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// `ν_fit`; positive for decaying data.
    pub rate: f64,
    pub amplitude: f64,
    /// Times of the first and last fitted points.
    pub window: (f64, f64),
    /// RMS residual in log space.
    pub log_residual: f64,
    pub points: usize,
    /// Whether the fit used the envelope (local maxima) of an oscillating
    /// signal.
    pub envelope: bool,
    /// Oscillation periods spanned, when oscillation was detected.
    pub periods: Option<f64>,
    pub good: bool,
}

/// Fits an exponential to `|y − c|` over `window`.
///
/// Oscillating data (at least three local maxima in the window) is fitted
/// on its envelope of local maxima; a fit spanning fewer than three
/// periods is not good. Values below [`NOISE_FLOOR`] are
/// masked. Fails with `InsufficientData` when fewer than three points
/// remain.
pub fn decay_fit(series: &[(f64, f64)], c: f64, window: FitWindow) -> Result<DecayFit> {
    let t_lo = window.start.max(series.first().map_or(f64::INFINITY, |s| s.0));
    let t_hi = window.end.min(series.last().map_or(f64::NEG_INFINITY, |s| s.0));
    if !(t_hi > t_lo) {
        return Err(Error::InsufficientData);
    }
    let cut = t_lo + window.discard.clamp(0.0, 0.95) * (t_hi - t_lo);
    let pts: Vec<(f64, f64)> =
        series.iter().filter(|(t, _)| *t >= cut && *t <= t_hi).map(|&(t, y)| (t, (y - c).abs())).collect();
    let maxima: Vec<(f64, f64)> = (1..pts.len().saturating_sub(1))
        .filter(|&i| pts[i].1 > pts[i - 1].1 && pts[i].1 >= pts[i + 1].1 && pts[i].1 >= NOISE_FLOOR)
        .map(|i| pts[i])
        .collect();
    let envelope = maxima.len() >= MIN_POINTS;
    let used: Vec<(f64, f64)> =
        if envelope { maxima } else { pts.into_iter().filter(|(_, y)| *y >= NOISE_FLOOR && y.is_finite()).collect() };
    if used.len() < MIN_POINTS {
        return Err(Error::InsufficientData);
    }
    let (slope, intercept, resid) = log_line(&used);
    // Consecutive maxima of |cos| are half a period apart.
    let periods = envelope.then(|| (used.len() - 1) as f64 / 2.0);
    let rate = -slope;
    let good = rate.is_finite() && resid <= MAX_LOG_RESIDUAL && periods.is_none_or(|p| p >= MIN_PERIODS);
    Ok(DecayFit {
        rate,
        amplitude: intercept.exp(),
        window: (used[0].0, used[used.len() - 1].0),
        log_residual: resid,
        points: used.len(),
        envelope,
        periods,
        good,
    })
}

/// `(slope, intercept, rms residual)` of the least-squares line through
/// `(t, log y)`.
fn log_line(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ml = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let (mut stt, mut stl) = (0.0, 0.0);
    for &(t, y) in pts {
        stt += (t - mt) * (t - mt);
        stl += (t - mt) * (y.ln() - ml);
    }
    let slope = if stt > 0.0 { stl / stt } else { 0.0 };
    let intercept = ml - slope * mt;
    let ss: f64 = pts.iter().map(|&(t, y)| (y.ln() - intercept - slope * t).powi(2)).sum();
    (slope, intercept, (ss / n).sqrt())
}
