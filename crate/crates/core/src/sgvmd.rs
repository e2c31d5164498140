//! Sequential generalized variational mode decomposition.
//!
//! Modes are pulled out of the residual one at a time. Each extraction is a
//! fixed-point iteration of the closed-form minimizer
//!
//! ```text
//! û(ω) = f̂ᵣ(ω)·(1 + β(ω−ω_cʳ)²) / (1 + α(ω−ω_c)² + β(ω−ω_cʳ)²)
//! ```
//!
//! where `ω_c` is the center frequency of the current mode estimate and
//! `ω_cʳ` the center frequency of what it leaves behind. The filter gain is
//! evaluated at `|ω|` over the full two-sided grid so modes stay real.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::spectral::{bin_frequency, center_frequency, folded_frequency, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitStrategy {
    /// One-bin impulse at the residual's largest positive-frequency bin.
    SpectralPeak,
    /// Half of the residual, so the first center estimate is the residual's own.
    Flat,
    /// One-bin impulse at the bin nearest this normalized angular frequency.
    AtFrequency(f64),
}

/// Stopping threshold, either absolute spectral energy or a fraction of a
/// reference energy. In [`decompose`] the reference is the energy of the
/// mean-removed input, so a constant offset does not hide weak modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Threshold {
    Absolute(f64),
    Relative(f64),
}

impl Threshold {
    pub fn resolve(self, reference_energy: f64) -> f64 {
        match self {
            Threshold::Absolute(v) => v,
            Threshold::Relative(r) => r * reference_energy,
        }
    }

    fn value(self) -> f64 {
        match self {
            Threshold::Absolute(v) | Threshold::Relative(v) => v,
        }
    }
}

/// How the record is padded before transforming, so the transform's
/// implicit periodicity does not join the two ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// Transform the record as is.
    Periodic,
    /// `[reverse(x), x, reverse(x)]`.
    Mirror,
    /// Least-squares autoregressive extrapolation of half a record on each
    /// side, tapered back to the mean so the padded signal wraps smoothly.
    LinearPrediction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SgvmdParams {
    /// Weight of the current-mode narrowband term.
    pub alpha: f64,
    /// Weight of the remaining-signal narrowband term.
    pub beta: f64,
    /// Outer stop: residual energy `Σ r_t²` over the record.
    pub epsilon: Threshold,
    /// Inner stop: squared spectral distance between successive mode
    /// iterates.
    pub eta: Threshold,
    pub max_modes: usize,
    pub max_inner_iterations: usize,
    pub init_strategy: InitStrategy,
    pub boundary: Boundary,
    /// Autoregressive order for [`Boundary::LinearPrediction`], capped at a
    /// quarter of the record.
    pub extension_order: usize,
    /// Modes below `trend_cycles` cycles over the record are trends.
    pub trend_cycles: f64,
}

impl Default for SgvmdParams {
    fn default() -> Self {
        SgvmdParams {
            alpha: 1000.0,
            beta: 3.0,
            epsilon: Threshold::Relative(1e-3),
            eta: Threshold::Relative(1e-7),
            max_modes: 10,
            max_inner_iterations: 500,
            init_strategy: InitStrategy::SpectralPeak,
            boundary: Boundary::LinearPrediction,
            extension_order: 40,
            trend_cycles: 1.5,
        }
    }
}

impl SgvmdParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")))
            }
        };
        positive("alpha", self.alpha)?;
        positive("beta", self.beta)?;
        positive("epsilon", self.epsilon.value())?;
        positive("eta", self.eta.value())?;
        positive("trend_cycles", self.trend_cycles)?;
        if self.max_modes == 0 {
            return Err(Error::InvalidConfig("max_modes must be at least 1".into()));
        }
        if self.boundary == Boundary::LinearPrediction && self.extension_order == 0 {
            return Err(Error::InvalidConfig("extension_order must be at least 1".into()));
        }
        if self.max_inner_iterations == 0 {
            return Err(Error::InvalidConfig(
                "max_inner_iterations must be at least 1".into(),
            ));
        }
        if let InitStrategy::AtFrequency(w) = self.init_strategy {
            if !(0.0..=PI).contains(&w) {
                return Err(Error::InvalidConfig(format!(
                    "init frequency must lie in [0, π], got {w}"
                )));
            }
        }
        Ok(())
    }

    /// Trend/AM-FM boundary for a record of `n` samples.
    pub fn trend_threshold(&self, n: usize) -> f64 {
        default_trend_threshold(n) * self.trend_cycles / 1.5
    }
}

/// `2π·1.5/n`: fewer than one and a half cycles over the record.
pub fn default_trend_threshold(n: usize) -> f64 {
    2.0 * PI * 1.5 / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentKind {
    Trend,
    AmFm,
}

impl ComponentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ComponentKind::Trend => "trend",
            ComponentKind::AmFm => "am-fm",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeComponent {
    pub signal: TimeSeries,
    /// Transform of `signal`.
    pub spectrum: Spectrum,
    /// Normalized angular frequency reported by the converged extraction.
    pub center_frequency: f64,
    pub kind: ComponentKind,
    /// Inner iterations used.
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    pub modes: Vec<ModeComponent>,
    /// `original − Σ modes`.
    pub residual: TimeSeries,
    pub original: TimeSeries,
    /// `Σ residual_t²` over the record.
    pub residual_energy: f64,
    /// Stopped at `max_modes` with the residual still above `epsilon`.
    pub truncated: bool,
}

impl DecompositionResult {
    /// `Σ modes + residual`.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.original.len()];
        for m in &self.modes {
            for (o, v) in out.iter_mut().zip(m.signal.values()) {
                *o += v;
            }
        }
        for (o, v) in out.iter_mut().zip(self.residual.values()) {
            *o += v;
        }
        out
    }
}

pub fn classify_component(mode: &ModeComponent, trend_threshold: f64) -> ComponentKind {
    classify_frequency(mode.center_frequency, trend_threshold)
}

fn classify_frequency(center_frequency: f64, trend_threshold: f64) -> ComponentKind {
    if center_frequency < trend_threshold {
        ComponentKind::Trend
    } else {
        ComponentKind::AmFm
    }
}

fn check_lengths(a: &Spectrum, b: &Spectrum) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::InvalidInput(format!(
            "spectrum lengths differ: {} vs {}",
            a.n(),
            b.n()
        )));
    }
    Ok(())
}

/// Center frequency when the spectrum carries energy; `None` when it is
/// identically zero (the term it would weight vanishes anyway).
fn optional_center(spectrum: &Spectrum) -> Result<Option<f64>> {
    if spectrum.energy() == 0.0 {
        Ok(None)
    } else {
        center_frequency(spectrum).map(Some)
    }
}

/// Loss with both center frequencies supplied by the caller.
pub fn sgvmd_loss_with_centers(
    residual_prev: &Spectrum,
    mode: &Spectrum,
    omega_c: f64,
    omega_c_r: f64,
    params: &SgvmdParams,
) -> Result<f64> {
    check_lengths(residual_prev, mode)?;
    let n = mode.n();
    let mut fidelity = 0.0;
    let mut own = 0.0;
    let mut rest = 0.0;
    for (k, (f, u)) in residual_prev.bins().iter().zip(mode.bins()).enumerate() {
        let w = folded_frequency(k, n);
        let r = (f - u).norm_sqr();
        fidelity += r;
        own += u.norm_sqr() * (w - omega_c).powi(2);
        rest += r * (w - omega_c_r).powi(2);
    }
    Ok(fidelity + params.alpha * own + params.beta * rest)
}

/// `‖f̂ᵣ − û‖² + α‖û(ω−ω_c)‖² + β‖(f̂ᵣ−û)(ω−ω_cʳ)‖²` with both center
/// frequencies taken from the arguments.
pub fn sgvmd_loss(residual_prev: &Spectrum, mode: &Spectrum, params: &SgvmdParams) -> Result<f64> {
    check_lengths(residual_prev, mode)?;
    let remaining = subtract(residual_prev, mode);
    let omega_c = optional_center(mode)?.unwrap_or(0.0);
    let omega_c_r = optional_center(&remaining)?.unwrap_or(0.0);
    sgvmd_loss_with_centers(residual_prev, mode, omega_c, omega_c_r, params)
}

/// Closed-form minimizer of the loss for fixed center frequencies.
pub fn sgvmd_update(
    residual_prev: &Spectrum,
    omega_c: f64,
    omega_c_r: f64,
    params: &SgvmdParams,
) -> Spectrum {
    let n = residual_prev.n();
    let bins = residual_prev
        .bins()
        .iter()
        .enumerate()
        .map(|(k, f)| f * update_gain(folded_frequency(k, n), omega_c, omega_c_r, params))
        .collect();
    Spectrum::new(bins)
}

fn update_gain(w: f64, omega_c: f64, omega_c_r: f64, params: &SgvmdParams) -> f64 {
    let rest = params.beta * (w - omega_c_r).powi(2);
    (1.0 + rest) / (1.0 + params.alpha * (w - omega_c).powi(2) + rest)
}

fn subtract(a: &Spectrum, b: &Spectrum) -> Spectrum {
    Spectrum::new(a.bins().iter().zip(b.bins()).map(|(x, y)| x - y).collect())
}

fn squared_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum()
}

fn impulse_at(residual: &Spectrum, k: usize) -> Spectrum {
    let n = residual.n();
    let mut out = Spectrum::zeros(n);
    out.bins_mut()[k] = residual.bins()[k];
    if k != 0 && n - k != k {
        out.bins_mut()[n - k] = residual.bins()[n - k];
    }
    out
}

fn initial_mode(residual: &Spectrum, strategy: InitStrategy) -> Spectrum {
    let n = residual.n();
    match strategy {
        InitStrategy::SpectralPeak => {
            let mut best = 0;
            let mut best_mag = -1.0;
            // first maximum wins ties
            for (k, b) in residual.bins()[..=n / 2].iter().enumerate() {
                let m = b.norm_sqr();
                if m > best_mag {
                    best_mag = m;
                    best = k;
                }
            }
            impulse_at(residual, best)
        }
        InitStrategy::Flat => residual.scale(0.5),
        InitStrategy::AtFrequency(w) => {
            let k = ((w * n as f64 / (2.0 * PI)).round() as usize).min(n / 2);
            impulse_at(residual, k)
        }
    }
}

/// Raw output of one inner loop.
#[derive(Debug, Clone)]
pub(crate) struct Extraction {
    pub spectrum: Spectrum,
    pub center_frequency: f64,
    pub iterations: usize,
}

pub(crate) fn extract_spectrum(
    residual_prev: &Spectrum,
    params: &SgvmdParams,
    eta: f64,
) -> Result<Extraction> {
    let mut mode = initial_mode(residual_prev, params.init_strategy);
    if mode.energy() == 0.0 {
        // chosen bin is empty; fall back to the residual's own center
        mode = residual_prev.scale(0.5);
    }
    let mut trace = Vec::new();
    for s in 1..=params.max_inner_iterations {
        let omega_c = center_frequency(&mode)?;
        let remaining = subtract(residual_prev, &mode);
        let omega_c_r = optional_center(&remaining)?.unwrap_or(omega_c);
        let next = sgvmd_update(residual_prev, omega_c, omega_c_r, params);
        let change = squared_distance(next.bins(), mode.bins());
        trace.push(change);
        mode = next;
        if change <= eta {
            let center = center_frequency(&mode)?;
            return Ok(Extraction {
                spectrum: mode,
                center_frequency: center,
                iterations: s,
            });
        }
    }
    Err(Error::ConvergenceFailure {
        iterations: params.max_inner_iterations,
        last_change: trace.last().copied().unwrap_or(f64::NAN),
        trace,
    })
}

/// Extracts one mode from a residual spectrum. `eta` is resolved against the
/// residual's own energy.
pub fn extract_mode(residual_prev: &Spectrum, params: &SgvmdParams) -> Result<ModeComponent> {
    params.validate()?;
    let energy = residual_prev.energy();
    let time_energy = energy / residual_prev.n() as f64;
    if time_energy <= params.epsilon.resolve(time_energy) {
        return Err(Error::InvalidInput(
            "residual energy is already below epsilon".into(),
        ));
    }
    let ex = extract_spectrum(residual_prev, params, params.eta.resolve(energy))?;
    let signal = TimeSeries::new(ex.spectrum.inverse_real()?)?;
    let n = signal.len();
    Ok(ModeComponent {
        signal,
        kind: classify_frequency(ex.center_frequency, params.trend_threshold(n)),
        spectrum: ex.spectrum,
        center_frequency: ex.center_frequency,
        iterations: ex.iterations,
    })
}

/// `[reverse(x), x, reverse(x)]`.
pub(crate) fn mirror_extend(x: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(3 * x.len());
    out.extend(x.iter().rev());
    out.extend_from_slice(x);
    out.extend(x.iter().rev());
    out
}

/// Forward extrapolation of `len` samples from a least-squares AR(`order`)
/// fit to `x` (already centred). `None` if the fit fails or diverges.
fn ar_extrapolate(x: &[f64], order: usize, len: usize) -> Option<Vec<f64>> {
    let n = x.len();
    let rows = n - order;
    let design = DMatrix::from_fn(rows, order, |r, j| x[r + order - 1 - j]);
    let target = DVector::from_fn(rows, |r, _| x[r + order]);
    let coef = design.svd(true, true).solve(&target, 1e-12).ok()?;
    let bound = 10.0 * x.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut hist = x[n - order..].to_vec();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let k = hist.len();
        let v: f64 = coef.iter().enumerate().map(|(j, a)| a * hist[k - 1 - j]).sum();
        if !v.is_finite() || v.abs() > bound {
            return None;
        }
        hist.push(v);
        out.push(v);
    }
    Some(out)
}

/// Raised-cosine fade to zero over the second half of an extension;
/// `k` counts outward from the record.
fn taper(k: usize, len: usize) -> f64 {
    let flat = len / 2;
    if k < flat {
        1.0
    } else {
        let s = (k - flat + 1) as f64 / (len - flat) as f64;
        0.5 * (1.0 + (PI * s).cos())
    }
}

/// `[left, x, right]` with AR extrapolation in both directions.
pub(crate) fn predictive_extend(x: &[f64], order: usize) -> Option<Vec<f64>> {
    let n = x.len();
    let order = order.min(n / 4);
    if order == 0 {
        return None;
    }
    let len = n / 2;
    let mean = x.iter().sum::<f64>() / n as f64;
    let centred: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let right = ar_extrapolate(&centred, order, len)?;
    let reversed: Vec<f64> = centred.iter().rev().copied().collect();
    let left = ar_extrapolate(&reversed, order, len)?;
    let mut out = Vec::with_capacity(n + 2 * len);
    out.extend((0..len).rev().map(|k| mean + left[k] * taper(k, len)));
    out.extend_from_slice(x);
    out.extend((0..len).map(|k| mean + right[k] * taper(k, len)));
    Some(out)
}

/// Padded signal and the offset of the record within it.
fn extend(series: &TimeSeries, params: &SgvmdParams) -> (Vec<f64>, usize) {
    let x = series.values();
    let n = x.len();
    match params.boundary {
        Boundary::Periodic => (x.to_vec(), 0),
        Boundary::Mirror => (mirror_extend(x), n),
        Boundary::LinearPrediction => match predictive_extend(x, params.extension_order) {
            Some(padded) => (padded, n / 2),
            None => {
                log::warn!("linear-prediction extension diverged; mirroring instead");
                (mirror_extend(x), n)
            }
        },
    }
}

fn window_energy(residual: &Spectrum, offset: usize, n: usize) -> Result<f64> {
    Ok(residual.inverse_real()?[offset..offset + n]
        .iter()
        .map(|v| v * v)
        .sum())
}

/// Extracts modes from the padded record until the residual energy over
/// the record falls to `epsilon` or `max_modes` is reached. Relative
/// thresholds refer to the record's energy about its mean (its full
/// energy when constant).
pub fn decompose(series: &TimeSeries, params: &SgvmdParams) -> Result<DecompositionResult> {
    params.validate()?;
    let n = series.len();
    let (analysed, offset) = extend(series, params);
    let mut residual = Spectrum::from_real(&analysed);

    let x = series.values();
    let mean = x.iter().sum::<f64>() / n as f64;
    let fluctuation: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    let reference = if fluctuation > 0.0 { fluctuation } else { series.energy() };
    let epsilon = params.epsilon.resolve(reference);
    // spectral energies carry a factor of the padded length
    let eta = params.eta.resolve(reference * analysed.len() as f64);
    let threshold = params.trend_threshold(n);

    let mut modes = Vec::new();
    let mut residual_energy = series.energy();
    while residual_energy > epsilon && modes.len() < params.max_modes {
        let ex = extract_spectrum(&residual, params, eta)?;
        for (r, u) in residual.bins_mut().iter_mut().zip(ex.spectrum.bins()) {
            *r -= u;
        }
        residual_energy = window_energy(&residual, offset, n)?;
        let full = ex.spectrum.inverse_real()?;
        let signal = TimeSeries::with_interval(
            full[offset..offset + n].to_vec(),
            series.sample_interval(),
        )?;
        log::debug!(
            "mode {} center {:.6} after {} iterations, residual energy {:.6e}",
            modes.len() + 1,
            ex.center_frequency,
            ex.iterations,
            residual_energy
        );
        modes.push(ModeComponent {
            spectrum: Spectrum::from_real(signal.values()),
            signal,
            center_frequency: ex.center_frequency,
            kind: classify_frequency(ex.center_frequency, threshold),
            iterations: ex.iterations,
        });
    }

    let mut rest = x.to_vec();
    for m in &modes {
        for (r, v) in rest.iter_mut().zip(m.signal.values()) {
            *r -= v;
        }
    }
    Ok(DecompositionResult {
        truncated: residual_energy > epsilon,
        residual_energy,
        residual: TimeSeries::with_interval(rest, series.sample_interval())?,
        original: series.clone(),
        modes,
    })
}

/// Center frequency expressed in bins of an `n`-sample record.
pub fn frequency_to_bins(omega: f64, n: usize) -> f64 {
    omega / bin_frequency(1, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(n: usize, bin: f64, amp: f64, phase: f64) -> Vec<f64> {
        (0..n)
            .map(|t| amp * (2.0 * PI * bin * t as f64 / n as f64 + phase).cos())
            .collect()
    }

    fn correlation(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let mut sab = 0.0;
        let mut saa = 0.0;
        let mut sbb = 0.0;
        for (x, y) in a.iter().zip(b) {
            sab += (x - ma) * (y - mb);
            saa += (x - ma).powi(2);
            sbb += (y - mb).powi(2);
        }
        sab / (saa * sbb).sqrt()
    }

    fn params_no_mirror() -> SgvmdParams {
        SgvmdParams {
            boundary: Boundary::Periodic,
            ..SgvmdParams::default()
        }
    }

    #[test]
    fn loss_of_exact_extraction_is_own_term_only() {
        let x = tone(64, 5.0, 1.0, 0.3);
        let f = Spectrum::from_real(&x);
        let p = SgvmdParams::default();
        let loss = sgvmd_loss(&f, &f, &p).unwrap();
        let wc = center_frequency(&f).unwrap();
        let own: f64 = f
            .bins()
            .iter()
            .enumerate()
            .map(|(k, b)| b.norm_sqr() * (folded_frequency(k, 64) - wc).powi(2))
            .sum();
        assert!((loss - p.alpha * own).abs() <= 1e-12 * loss.max(1.0));
    }

    #[test]
    fn loss_of_null_mode_is_residual_energy() {
        let x: Vec<f64> = (0..32).map(|t| ((t * 7) % 5) as f64 - 2.0).collect();
        let f = Spectrum::from_real(&x);
        let p = SgvmdParams {
            beta: f64::MIN_POSITIVE,
            ..SgvmdParams::default()
        };
        let loss = sgvmd_loss(&f, &Spectrum::zeros(32), &p).unwrap();
        assert!((loss - f.energy()).abs() <= 1e-9 * f.energy());
    }

    #[test]
    fn on_center_bin_passes_unchanged_without_beta() {
        let x = tone(64, 6.0, 1.0, 0.0);
        let f = Spectrum::from_real(&x);
        let p = SgvmdParams {
            beta: 1e-300,
            ..SgvmdParams::default()
        };
        let wc = bin_frequency(6, 64);
        let u = sgvmd_update(&f, wc, 1.0, &p);
        assert!((u.bins()[6] - f.bins()[6]).norm() < 1e-12);
        assert!((u.bins()[58] - f.bins()[58]).norm() < 1e-12);
        for k in 0..64 {
            let w = folded_frequency(k, 64);
            let expect = f.bins()[k] / (1.0 + p.alpha * (w - wc).powi(2));
            assert!((u.bins()[k] - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn update_keeps_conjugate_symmetry() {
        let x: Vec<f64> = (0..50).map(|t| (t as f64 * 0.37).sin() + 0.1 * t as f64).collect();
        let f = Spectrum::from_real(&x);
        let u = sgvmd_update(&f, 0.4, 1.1, &SgvmdParams::default());
        for k in 1..50 {
            assert!((u.bins()[k] - u.bins()[50 - k].conj()).norm() < 1e-9);
        }
        assert!(u.inverse_real().is_ok());
    }

    #[test]
    fn pure_tone_is_recovered() {
        let n = 256;
        let x = tone(n, 17.0, 2.0, 0.4);
        let f = Spectrum::from_real(&x);
        let mode = extract_mode(&f, &params_no_mirror()).unwrap();
        assert!(correlation(mode.signal.values(), &x) >= 0.999);
        assert_eq!(mode.kind, ComponentKind::AmFm);
        assert!((frequency_to_bins(mode.center_frequency, n) - 17.0).abs() < 0.05);
    }

    #[test]
    fn stronger_of_two_tones_comes_first() {
        let n = 512;
        let strong = tone(n, 20.0, 3.0, 0.0);
        let weak = tone(n, 80.0, 1.0, 1.0);
        let x: Vec<f64> = strong.iter().zip(&weak).map(|(a, b)| a + b).collect();
        let f = Spectrum::from_real(&x);
        let mode = extract_mode(&f, &params_no_mirror()).unwrap();
        assert!(correlation(mode.signal.values(), &strong) >= 0.99);

        let p = SgvmdParams {
            init_strategy: InitStrategy::AtFrequency(bin_frequency(80, n)),
            ..params_no_mirror()
        };
        let mode = extract_mode(&f, &p).unwrap();
        assert!(correlation(mode.signal.values(), &weak) >= 0.99);
    }

    #[test]
    fn converged_mode_is_a_fixed_point() {
        let n = 256;
        let x: Vec<f64> = tone(n, 10.0, 1.0, 0.0)
            .iter()
            .zip(tone(n, 40.0, 0.7, 0.5))
            .map(|(a, b)| a + b)
            .collect();
        let f = Spectrum::from_real(&x);
        let p = params_no_mirror();
        let eta = p.eta.resolve(f.energy());
        let ex = extract_spectrum(&f, &p, eta).unwrap();
        let wc = center_frequency(&ex.spectrum).unwrap();
        let wr = center_frequency(&subtract(&f, &ex.spectrum)).unwrap();
        let again = sgvmd_update(&f, wc, wr, &p);
        assert!(squared_distance(again.bins(), ex.spectrum.bins()) <= eta);
    }

    #[test]
    fn zero_series_has_no_modes() {
        let s = TimeSeries::zeros(100).unwrap();
        let d = decompose(&s, &SgvmdParams::default()).unwrap();
        assert!(d.modes.is_empty());
        assert!(!d.truncated);
        assert!(d.residual.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn truncation_is_flagged_not_raised() {
        let n = 300;
        let x: Vec<f64> = (0..n)
            .map(|t| {
                let t = t as f64;
                (0.21 * t).cos() + (0.9 * t).sin() + (1.7 * t).cos() + 0.01 * t
            })
            .collect();
        let p = SgvmdParams {
            max_modes: 1,
            ..SgvmdParams::default()
        };
        let d = decompose(&TimeSeries::new(x).unwrap(), &p).unwrap();
        assert_eq!(d.modes.len(), 1);
        assert!(d.truncated);
    }

    #[test]
    fn convergence_failure_carries_trace() {
        let x = tone(128, 9.0, 1.0, 0.0);
        let f = Spectrum::from_real(&x);
        let p = SgvmdParams {
            max_inner_iterations: 1,
            eta: Threshold::Absolute(1e-300),
            init_strategy: InitStrategy::Flat,
            ..params_no_mirror()
        };
        match extract_mode(&f, &p) {
            Err(Error::ConvergenceFailure { iterations, trace, .. }) => {
                assert_eq!(iterations, 1);
                assert_eq!(trace.len(), 1);
            }
            other => panic!("expected convergence failure, got {other:?}"),
        }
    }

    #[test]
    fn classification_tie_goes_to_am_fm() {
        let x = tone(64, 3.0, 1.0, 0.0);
        let mut mode = extract_mode(&Spectrum::from_real(&x), &params_no_mirror()).unwrap();
        mode.center_frequency = 0.0;
        assert_eq!(classify_component(&mode, 0.1), ComponentKind::Trend);
        mode.center_frequency = PI / 4.0;
        assert_eq!(
            classify_component(&mode, default_trend_threshold(64)),
            ComponentKind::AmFm
        );
        mode.center_frequency = 0.1;
        assert_eq!(classify_component(&mode, 0.1), ComponentKind::AmFm);
    }

    #[test]
    fn invalid_params_are_rejected() {
        let bad = SgvmdParams {
            alpha: 0.0,
            ..SgvmdParams::default()
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        let bad = SgvmdParams {
            max_modes: 0,
            ..SgvmdParams::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn predictive_extension_continues_a_tone() {
        let n = 400;
        let w = 2.0 * PI * 13.3 / n as f64;
        let x: Vec<f64> = (0..n).map(|t| 5.0 + (w * t as f64).sin()).collect();
        let padded = predictive_extend(&x, 20).unwrap();
        assert_eq!(padded.len(), 2 * n);
        let len = n / 2;
        assert_eq!(&padded[len..len + n], &x[..]);
        for k in 0..len / 2 {
            let after = 5.0 + (w * (n + k) as f64).sin();
            let before = 5.0 + (w * -((k + 1) as f64)).sin();
            assert!((padded[len + n + k] - after).abs() < 1e-6, "right {k}");
            assert!((padded[len - 1 - k] - before).abs() < 1e-6, "left {k}");
        }
        assert!((padded[0] - 5.0).abs() < 0.05 && (padded[2 * n - 1] - 5.0).abs() < 0.05);
    }

    #[test]
    fn mirror_extension_layout() {
        assert_eq!(
            mirror_extend(&[1.0, 2.0, 3.0]),
            vec![3.0, 2.0, 1.0, 1.0, 2.0, 3.0, 3.0, 2.0, 1.0]
        );
    }
}
