//! Frequency-domain primitives shared by the decomposition modules.
//!
//! Forward transform uses the negative exponent with no scaling; the inverse
//! carries the `1/n` factor. Bin `k` of an `n`-point spectrum sits at the
//! normalized angular frequency `2πk/n` (radians per sample).

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Imaginary residue (relative to the largest real sample, floored at one)
/// tolerated when inverting a spectrum to a real series.
pub const REAL_RESIDUE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    bins: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(bins: Vec<Complex64>) -> Self {
        Spectrum { bins }
    }

    pub fn zeros(n: usize) -> Self {
        Spectrum {
            bins: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// Transform of an arbitrary real slice (any length, including extended
    /// signals that are not themselves a validated series).
    pub fn from_real(values: &[f64]) -> Self {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        if !buf.is_empty() {
            FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
        }
        Spectrum { bins: buf }
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn bins_mut(&mut self) -> &mut [Complex64] {
        &mut self.bins
    }

    pub fn into_bins(self) -> Vec<Complex64> {
        self.bins
    }

    /// Original series length.
    pub fn n(&self) -> usize {
        self.bins.len()
    }

    /// Normalized angular frequency of bin `k`.
    pub fn frequency(&self, k: usize) -> f64 {
        bin_frequency(k, self.n())
    }

    /// Two-sided energy `Σ|X_k|²`.
    pub fn energy(&self) -> f64 {
        self.bins.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Energy in bins `0..=n/2`.
    pub fn positive_energy(&self) -> f64 {
        self.bins[..=self.n() / 2].iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn scale(&self, c: f64) -> Spectrum {
        Spectrum {
            bins: self.bins.iter().map(|b| b * c).collect(),
        }
    }

    /// Inverse transform without the realness check.
    pub fn inverse_complex(&self) -> Vec<Complex64> {
        let n = self.n();
        let mut buf = self.bins.clone();
        if n > 0 {
            FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
            let inv = 1.0 / n as f64;
            buf.iter_mut().for_each(|c| *c *= inv);
        }
        buf
    }

    /// Inverse transform of a conjugate-symmetric spectrum into real samples.
    pub fn inverse_real(&self) -> Result<Vec<f64>> {
        let out = self.inverse_complex();
        let scale = out.iter().fold(1.0_f64, |m, c| m.max(c.re.abs()));
        let residue = out.iter().fold(0.0_f64, |m, c| m.max(c.im.abs()));
        let tolerance = REAL_RESIDUE_TOLERANCE * scale;
        if residue > tolerance {
            return Err(Error::NonRealResult { residue, tolerance });
        }
        Ok(out.into_iter().map(|c| c.re).collect())
    }
}

/// Normalized angular frequency `2πk/n`.
pub fn bin_frequency(k: usize, n: usize) -> f64 {
    2.0 * PI * k as f64 / n as f64
}

/// `|ω|` of bin `k` on the two-sided grid: bins above `n/2` fold onto their
/// negative-frequency magnitude `2π(n-k)/n`.
pub fn folded_frequency(k: usize, n: usize) -> f64 {
    bin_frequency(k.min(n - k), n)
}

pub fn dft(series: &TimeSeries) -> Result<Spectrum> {
    if series.len() < 2 {
        return Err(Error::InvalidInput("dft needs at least 2 samples".into()));
    }
    Ok(Spectrum::from_real(series.values()))
}

pub fn idft(spectrum: &Spectrum) -> Result<TimeSeries> {
    if spectrum.n() < 2 {
        return Err(Error::InvalidInput("idft needs at least 2 bins".into()));
    }
    TimeSeries::new(spectrum.inverse_real()?)
}

/// Complex analytic signal `x + j·H[x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSignal {
    samples: Vec<Complex64>,
}

impl AnalyticSignal {
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Instantaneous amplitude.
    pub fn magnitude(&self) -> Vec<f64> {
        self.samples.iter().map(|c| c.norm()).collect()
    }

    /// Wrapped instantaneous phase in `(-π, π]`.
    pub fn phase(&self) -> Vec<f64> {
        self.samples.iter().map(|c| c.arg()).collect()
    }
}

pub fn analytic_signal(series: &TimeSeries) -> Result<AnalyticSignal> {
    analytic_from_slice(series.values())
}

pub(crate) fn analytic_from_slice(values: &[f64]) -> Result<AnalyticSignal> {
    let n = values.len();
    if n < 4 {
        return Err(Error::InvalidInput(format!(
            "analytic signal needs at least 4 samples, got {n}"
        )));
    }
    let mut spec = Spectrum::from_real(values).into_bins();
    let half = n / 2;
    // DC (and Nyquist for even n) keep unit weight; strictly positive bins double.
    for (k, b) in spec.iter_mut().enumerate() {
        if k == 0 || (n.is_multiple_of(2) && k == half) {
            continue;
        }
        if k <= (n - 1) / 2 {
            *b *= 2.0;
        } else {
            *b = Complex64::new(0.0, 0.0);
        }
    }
    let mut samples = Spectrum::new(spec).inverse_complex();
    // Real part is the input by construction; pin it to remove rounding.
    for (s, &v) in samples.iter_mut().zip(values) {
        s.re = v;
    }
    Ok(AnalyticSignal { samples })
}

/// Energy-weighted mean frequency over bins `0..=n/2`.
pub fn center_frequency(spectrum: &Spectrum) -> Result<f64> {
    let n = spectrum.n();
    if n == 0 {
        return Err(Error::DegenerateSpectrum("empty spectrum".into()));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, b) in spectrum.bins()[..=n / 2].iter().enumerate() {
        let p = b.norm_sqr();
        num += bin_frequency(k, n) * p;
        den += p;
    }
    if den <= 0.0 || !den.is_finite() {
        return Err(Error::DegenerateSpectrum(
            "zero positive-frequency energy".into(),
        ));
    }
    Ok(num / den)
}
