//! Empirical mode decomposition, the comparison decomposer.

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::spline::{local_maxima, local_minima, mirrored_envelope, zero_crossings};

pub const SD_THRESHOLD: f64 = 0.3;
pub const MAX_SIFT_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct ImfSet {
    pub imfs: Vec<TimeSeries>,
    /// `original − Σ imfs`.
    pub residual: TimeSeries,
}

fn has_oscillation(x: &[f64]) -> bool {
    local_maxima(x).len() >= 2 && local_minima(x).len() >= 2
}

fn is_imf(x: &[f64]) -> bool {
    let extrema = local_maxima(x).len() + local_minima(x).len();
    extrema.abs_diff(zero_crossings(x)) <= 1
}

/// Mean of the upper and lower cubic envelopes, or `None` once the signal
/// runs out of extrema.
fn envelope_mean(h: &[f64]) -> Result<Option<Vec<f64>>> {
    let maxima = local_maxima(h);
    let minima = local_minima(h);
    if maxima.len() < 2 || minima.len() < 2 {
        return Ok(None);
    }
    let upper = mirrored_envelope(&maxima, h, h.len())?;
    let lower = mirrored_envelope(&minima, h, h.len())?;
    Ok(Some(
        upper.iter().zip(&lower).map(|(u, l)| 0.5 * (u + l)).collect(),
    ))
}

/// Extracts one IMF by repeatedly removing the envelope mean. Stops once the
/// Cauchy-type change ratio `Σ(h_prev−h)²/Σh_prev²` falls below
/// [`SD_THRESHOLD`] and the iterate satisfies the IMF extrema condition.
pub fn sift(signal: &TimeSeries, max_sift_iterations: usize) -> Result<TimeSeries> {
    if !has_oscillation(signal.values()) {
        return Err(Error::Monotone(
            "fewer than two maxima or minima; nothing left to sift".into(),
        ));
    }
    let mut h = signal.values().to_vec();
    for _ in 0..max_sift_iterations.max(1) {
        let Some(mean) = envelope_mean(&h)? else {
            break;
        };
        let denom: f64 = h.iter().map(|v| v * v).sum();
        let change: f64 = mean.iter().map(|m| m * m).sum();
        for (v, m) in h.iter_mut().zip(&mean) {
            *v -= m;
        }
        let sd = if denom > 0.0 { change / denom } else { 0.0 };
        if sd < SD_THRESHOLD && is_imf(&h) {
            break;
        }
    }
    TimeSeries::with_interval(h, signal.sample_interval())
}

pub fn emd_decompose(series: &TimeSeries, max_imfs: usize) -> Result<ImfSet> {
    let mut imfs = Vec::new();
    let mut rest = series.values().to_vec();
    while imfs.len() < max_imfs {
        let current = TimeSeries::with_interval(rest.clone(), series.sample_interval())?;
        let imf = match sift(&current, MAX_SIFT_ITERATIONS) {
            Ok(imf) => imf,
            Err(Error::Monotone(_)) => break,
            Err(e) => return Err(e),
        };
        for (r, v) in rest.iter_mut().zip(imf.values()) {
            *r -= v;
        }
        imfs.push(imf);
    }
    // Recompute by subtraction from the input so additivity does not depend
    // on the order rounding happened inside the loop.
    let mut residual = series.values().to_vec();
    for imf in &imfs {
        for (r, v) in residual.iter_mut().zip(imf.values()) {
            *r -= v;
        }
    }
    Ok(ImfSet {
        imfs,
        residual: TimeSeries::with_interval(residual, series.sample_interval())?,
    })
}
