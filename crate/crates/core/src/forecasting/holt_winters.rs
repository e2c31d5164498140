//! Multiplicative Holt-Winters (triple exponential smoothing).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoltWintersParams {
    #[serde(default = "default_alpha")]
    pub level_alpha: f64,
    #[serde(default = "default_beta")]
    pub trend_beta: f64,
    #[serde(default = "default_gamma")]
    pub season_gamma: f64,
    pub season_length: usize,
}

fn default_alpha() -> f64 {
    0.91
}

fn default_beta() -> f64 {
    0.5
}

fn default_gamma() -> f64 {
    1.0
}

impl HoltWintersParams {
    /// Smoothing constants 0.91 / 0.5 / 1; the season length has no natural
    /// default and must be chosen for the data.
    pub fn with_season_length(season_length: usize) -> Self {
        HoltWintersParams {
            level_alpha: default_alpha(),
            trend_beta: default_beta(),
            season_gamma: default_gamma(),
            season_length,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for (name, v) in [
            ("level_alpha", self.level_alpha),
            ("trend_beta", self.trend_beta),
            ("season_gamma", self.season_gamma),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::InvalidConfig(format!("{name} must lie in (0, 1], got {v}")));
            }
        }
        if self.season_length < 2 || self.season_length > n / 2 {
            return Err(Error::InvalidConfig(format!(
                "season_length must lie in [2, {}], got {}",
                n / 2,
                self.season_length
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoltWintersState {
    pub level: f64,
    pub trend: f64,
    /// The last `m` seasonal indices; entry `i` applies to time `T+1+i`
    /// modulo `m`.
    pub seasonal: Vec<f64>,
    /// One-step-ahead fitted values for `t ≥ m`; `NaN` before.
    pub fitted: Vec<f64>,
}

pub fn fit_holt_winters(series: &TimeSeries, params: &HoltWintersParams) -> Result<HoltWintersState> {
    let y = series.values();
    let n = y.len();
    params.validate(n)?;
    if let Some(i) = y.iter().position(|&v| v <= 0.0) {
        return Err(Error::MultiplicativeDomain(format!(
            "value {} at index {i} is not positive",
            y[i]
        )));
    }
    let m = params.season_length;
    let mean1 = y[..m].iter().sum::<f64>() / m as f64;
    let mean2 = y[m..2 * m].iter().sum::<f64>() / m as f64;
    let mut level = mean1;
    let mut trend = (mean2 - mean1) / m as f64;
    // s[t mod m] holds the most recent index for that season position
    let mut season: Vec<f64> = (0..m)
        .map(|i| 0.5 * (y[i] / mean1 + y[m + i] / mean2))
        .collect();

    let (a, b, g) = (params.level_alpha, params.trend_beta, params.season_gamma);
    let mut fitted = vec![f64::NAN; n];
    for t in m..n {
        let s_prev = season[t % m];
        fitted[t] = (level + trend) * s_prev;
        let new_level = a * (y[t] / s_prev) + (1.0 - a) * (level + trend);
        trend = b * (new_level - level) + (1.0 - b) * trend;
        level = new_level;
        season[t % m] = g * (y[t] / level) + (1.0 - g) * s_prev;
    }
    let seasonal = (0..m).map(|i| season[(n + i) % m]).collect();
    Ok(HoltWintersState {
        level,
        trend,
        seasonal,
        fitted,
    })
}

/// `ŷ_{T+h} = (ℓ_T + h·b_T)·s_{T+h−m⌈h/m⌉}`.
pub fn forecast_holt_winters(state: &HoltWintersState, horizon: usize) -> Result<TimeSeries> {
    if horizon == 0 {
        return Err(Error::InvalidInput("horizon must be at least 1".into()));
    }
    let m = state.seasonal.len();
    let values = (1..=horizon)
        .map(|h| (state.level + h as f64 * state.trend) * state.seasonal[(h - 1) % m])
        .collect();
    TimeSeries::forecast(values)
}
