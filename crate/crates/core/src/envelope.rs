//! Envelope extraction, carrier recovery and AM-FM reconstruction for the
//! envelope-forecasting path.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::sgvmd::mirror_extend;
use crate::spectral::{analytic_from_slice, analytic_signal, center_frequency, dft};
use crate::spline::{local_maxima, local_minima, mirrored_envelope};

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopePair {
    pub upper: TimeSeries,
    pub lower: TimeSeries,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Carrier {
    /// Unwrapped instantaneous phase in radians.
    pub instantaneous_phase: Vec<f64>,
    /// Normalized angular frequency used to extend the phase.
    pub base_frequency: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseRounding {
    /// Continue from the phase observed at the last sample.
    None,
    /// Continue from the last whole-cycle crossing of the interior phase.
    #[default]
    RoundToCycle,
}

/// Upper envelope through the analytic magnitude at the signal's maxima,
/// lower envelope through the negated magnitude at its minima.
pub fn extract_envelopes(component: &TimeSeries) -> Result<EnvelopePair> {
    let x = component.values();
    let n = x.len();
    let maxima = local_maxima(x);
    let minima = local_minima(x);
    if maxima.len() < 2 || minima.len() < 2 {
        return Err(Error::NotOscillatory(format!(
            "{} maxima and {} minima",
            maxima.len(),
            minima.len()
        )));
    }
    if n < 4 {
        return Err(Error::NotOscillatory("too short".into()));
    }
    // Reflecting both ends keeps the wrap-around jump out of the magnitude.
    let extended = analytic_from_slice(&mirror_extend(x))?.magnitude();
    let magnitude = &extended[n..2 * n];

    let mut upper = mirrored_envelope(&maxima, magnitude, n)?;
    let mut lower: Vec<f64> = mirrored_envelope(&minima, magnitude, n)?
        .into_iter()
        .map(|v| -v)
        .collect();
    for (u, l) in upper.iter_mut().zip(lower.iter_mut()) {
        if *u < *l {
            let mid = 0.5 * (*u + *l);
            *u = mid;
            *l = mid;
        }
    }
    Ok(EnvelopePair {
        upper: TimeSeries::with_interval(upper, component.sample_interval())?,
        lower: TimeSeries::with_interval(lower, component.sample_interval())?,
    })
}

pub fn unwrap_phase(wrapped: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(wrapped.len());
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for &p in wrapped {
        if let Some(q) = prev {
            let mut d = p - q;
            while d > PI {
                offset -= 2.0 * PI;
                d -= 2.0 * PI;
            }
            while d < -PI {
                offset += 2.0 * PI;
                d += 2.0 * PI;
            }
        }
        out.push(p + offset);
        prev = Some(p);
    }
    out
}

pub fn extract_carrier(component: &TimeSeries) -> Result<Carrier> {
    let phase = unwrap_phase(&analytic_signal(component)?.phase());
    let base_frequency = center_frequency(&dft(component)?)?;
    Ok(Carrier {
        instantaneous_phase: phase,
        base_frequency,
    })
}

/// Time (fractional sample index) and exact phase value of the last
/// whole-cycle crossing at least `margin` samples before the end.
fn last_cycle_anchor(phase: &[f64], margin: usize) -> Option<(f64, f64)> {
    let n = phase.len();
    let stop = n.checked_sub(margin + 1)?;
    let two_pi = 2.0 * PI;
    for t in (0..stop.min(n - 1)).rev() {
        let (a, b) = (phase[t], phase[t + 1]);
        let target = (b / two_pi).floor() * two_pi;
        if a < target && target <= b && b > a {
            let frac = (target - a) / (b - a);
            return Some((t as f64 + frac, target));
        }
    }
    None
}

/// Unit-amplitude continuation `cos(φ(T) + h·ω)` for `h = 1..=horizon`.
pub fn extend_carrier(
    carrier: &Carrier,
    horizon: usize,
    phase_rounding: PhaseRounding,
) -> Result<TimeSeries> {
    if horizon == 0 {
        return Err(Error::InvalidInput("horizon must be at least 1".into()));
    }
    let phase = &carrier.instantaneous_phase;
    if phase.is_empty() {
        return Err(Error::InvalidInput("carrier has no samples".into()));
    }
    let last = (phase.len() - 1) as f64;
    let w = carrier.base_frequency;
    let (anchor_t, anchor_phase) = match phase_rounding {
        PhaseRounding::None => (last, phase[phase.len() - 1]),
        PhaseRounding::RoundToCycle => {
            // keep clear of the boundary ripple: about one period, at most a quarter record
            let period = if w > 0.0 { (2.0 * PI / w).ceil() as usize } else { 0 };
            let margin = period.min(phase.len() / 4);
            last_cycle_anchor(phase, margin).unwrap_or((last, phase[phase.len() - 1]))
        }
    };
    let values = (1..=horizon)
        .map(|h| (anchor_phase + (last + h as f64 - anchor_t) * w).cos())
        .collect();
    TimeSeries::forecast(values)
}

/// Envelope times carrier: the upper envelope scales non-negative carrier
/// samples and `|lower|` the negative ones; the result is clamped to the
/// envelope band.
pub fn reconstruct_amfm(
    upper_forecast: &TimeSeries,
    lower_forecast: &TimeSeries,
    carrier_extension: &TimeSeries,
) -> Result<TimeSeries> {
    let n = carrier_extension.len();
    if upper_forecast.len() != n || lower_forecast.len() != n {
        return Err(Error::InvalidInput(format!(
            "length mismatch: upper {}, lower {}, carrier {}",
            upper_forecast.len(),
            lower_forecast.len(),
            n
        )));
    }
    let mut out = Vec::with_capacity(n);
    for t in 0..n {
        let (u, l, c) = (upper_forecast[t], lower_forecast[t], carrier_extension[t]);
        if u < l {
            return Err(Error::InconsistentEnvelope {
                index: t,
                upper: u,
                lower: l,
            });
        }
        let amplitude = if c >= 0.0 { u } else { l.abs() };
        out.push((amplitude * c).clamp(l, u));
    }
    TimeSeries::forecast(out)
}
