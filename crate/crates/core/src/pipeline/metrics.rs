//! Point-forecast error metrics.

use crate::error::{Error, Result};
use crate::series::TimeSeries;

fn paired<'a>(actual: &'a TimeSeries, predicted: &'a TimeSeries) -> Result<(&'a [f64], &'a [f64])> {
    if actual.len() != predicted.len() {
        return Err(Error::InvalidInput(format!(
            "length mismatch: {} actuals vs {} predictions",
            actual.len(),
            predicted.len()
        )));
    }
    Ok((actual.values(), predicted.values()))
}

pub fn rmse(actual: &TimeSeries, predicted: &TimeSeries) -> Result<f64> {
    let (y, p) = paired(actual, predicted)?;
    let ss: f64 = y.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((ss / y.len() as f64).sqrt())
}

/// Mean of `|y − ŷ| / |y|` as a fraction (not percent).
pub fn mape(actual: &TimeSeries, predicted: &TimeSeries) -> Result<f64> {
    let (y, p) = paired(actual, predicted)?;
    if let Some(i) = y.iter().position(|&v| v == 0.0) {
        return Err(Error::DivisionDomain(i));
    }
    let s: f64 = y.iter().zip(p).map(|(a, b)| ((a - b) / a).abs()).sum();
    Ok(s / y.len() as f64)
}

pub fn mae(actual: &TimeSeries, predicted: &TimeSeries) -> Result<f64> {
    let (y, p) = paired(actual, predicted)?;
    let s: f64 = y.iter().zip(p).map(|(a, b)| (a - b).abs()).sum();
    Ok(s / y.len() as f64)
}
