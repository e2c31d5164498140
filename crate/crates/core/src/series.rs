use std::ops::Index;

use crate::error::{Error, Result};

/// Uniformly sampled real-valued sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    sample_interval: f64,
}

impl TimeSeries {
    /// Builds a series of at least two finite samples with unit spacing.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_interval(values, 1.0)
    }

    pub fn with_interval(values: Vec<f64>, sample_interval: f64) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "series needs at least 2 samples, got {}",
                values.len()
            )));
        }
        Self::checked(values, sample_interval)
    }

    /// Forecast output: a single step is allowed.
    pub fn forecast(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty forecast".into()));
        }
        Self::checked(values, 1.0)
    }

    fn checked(values: Vec<f64>, sample_interval: f64) -> Result<Self> {
        if !(sample_interval.is_finite() && sample_interval > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sample interval must be positive, got {sample_interval}"
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value {} at index {i}",
                values[i]
            )));
        }
        Ok(TimeSeries {
            values,
            sample_interval,
        })
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(vec![0.0; len])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sample_interval(&self) -> f64 {
        self.sample_interval
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sum of squared samples.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Contiguous sub-range, keeping the sample interval.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start > end || end > self.len() {
            return Err(Error::InvalidInput(format!(
                "slice {start}..{end} out of range for length {}",
                self.len()
            )));
        }
        Self::with_interval(self.values[start..end].to_vec(), self.sample_interval)
    }
}

impl Index<usize> for TimeSeries {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}
