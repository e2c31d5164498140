//! Forecasting methods, the chronological train/test protocol, and the
//! benchmark driver that scores every configured method on the same split.

pub mod metrics;
pub mod reference;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::emd::emd_decompose;
use crate::envelope::{extend_carrier, extract_carrier, extract_envelopes, reconstruct_amfm, PhaseRounding};
use crate::error::{Error, Result};
use crate::forecasting::arima::undifference_forecast;
use crate::forecasting::{
    difference, fit_holt_winters, forecast_arima, forecast_holt_winters, select_order_with,
    ArimaOrder, FitOptions, HoltWintersParams,
};
use crate::series::TimeSeries;
use crate::sgvmd::{decompose, ComponentKind, SgvmdParams};

pub use metrics::{mae, mape, rmse};

pub const MIN_TRAIN: usize = 100;
pub const MIN_TEST: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Arima,
    HoltWinters,
    EmdArima,
    SgvmdArima,
    SgvmdEArima,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Arima,
        Method::HoltWinters,
        Method::EmdArima,
        Method::SgvmdArima,
        Method::SgvmdEArima,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Arima => "arima",
            Method::HoltWinters => "holt-winters",
            Method::EmdArima => "emd-arima",
            Method::SgvmdArima => "sgvmd-arima",
            Method::SgvmdEArima => "sgvmd-e-arima",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method '{s}'")))
    }
}

/// Order-search bounds shared by every ARIMA fit in a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArimaSearch {
    pub max_p: usize,
    pub max_q: usize,
    pub d: usize,
    /// Estimate a mean on the differenced series.
    pub drift: bool,
}

impl Default for ArimaSearch {
    fn default() -> Self {
        ArimaSearch {
            max_p: 10,
            max_q: 10,
            d: 1,
            drift: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub split_ratio: f64,
    pub sgvmd: SgvmdParams,
    pub arima_search: ArimaSearch,
    /// Required only when holt-winters is among the methods.
    pub holt_winters: Option<HoltWintersParams>,
    pub methods: Vec<Method>,
    pub emd_max_imfs: usize,
    pub phase_rounding: PhaseRounding,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            split_ratio: 0.9,
            sgvmd: SgvmdParams::default(),
            arima_search: ArimaSearch::default(),
            holt_winters: None,
            methods: Method::ALL.to_vec(),
            emd_max_imfs: 10,
            phase_rounding: PhaseRounding::RoundToCycle,
        }
    }
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "split_ratio must lie in (0, 1), got {}",
                self.split_ratio
            )));
        }
        self.sgvmd.validate()?;
        let s = &self.arima_search;
        if s.max_p > crate::forecasting::arima::MAX_ARMA_ORDER
            || s.max_q > crate::forecasting::arima::MAX_ARMA_ORDER
            || s.d > crate::forecasting::arima::MAX_DIFFERENCE
        {
            return Err(Error::InvalidConfig(format!(
                "arima search bounds ({}, {}, {}) exceed limits",
                s.max_p, s.d, s.max_q
            )));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("no methods selected".into()));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(Error::InvalidConfig(format!("method '{m}' listed twice")));
            }
        }
        if self.methods.contains(&Method::HoltWinters) && self.holt_winters.is_none() {
            return Err(Error::InvalidConfig(
                "holt-winters needs holt_winters.season_length".into(),
            ));
        }
        if self.emd_max_imfs == 0 {
            return Err(Error::InvalidConfig("emd_max_imfs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Chronological split at `⌊ratio·n⌋` with no size guard.
pub fn split_at_ratio(series: &TimeSeries, ratio: f64) -> Result<(TimeSeries, TimeSeries)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidConfig(format!("split ratio must lie in (0, 1), got {ratio}")));
    }
    let n = series.len();
    let cut = (ratio * n as f64).floor() as usize;
    if cut < 2 || n - cut < 1 {
        return Err(Error::InvalidConfig(format!("ratio {ratio} leaves an empty side of {n} points")));
    }
    let test = TimeSeries::forecast(series.values()[cut..].to_vec())?;
    Ok((series.slice(0, cut)?, test))
}

/// Chronological split that leaves at least `MIN_TRAIN` training and
/// `MIN_TEST` test points.
pub fn split(series: &TimeSeries, ratio: f64) -> Result<(TimeSeries, TimeSeries)> {
    let (train, test) = split_at_ratio(series, ratio)?;
    if train.len() < MIN_TRAIN || test.len() < MIN_TEST {
        return Err(Error::InvalidConfig(format!(
            "split {}/{} needs at least {MIN_TRAIN} training and {MIN_TEST} test points",
            train.len(),
            test.len()
        )));
    }
    Ok((train, test))
}

/// How one component was carried forward.
#[derive(Debug, Clone, PartialEq)]
pub enum ForecastPath {
    Arima(ArimaOrder),
    /// The differenced component is constant and is continued exactly.
    Deterministic { d: usize },
    Envelope { upper: Box<ForecastPath>, lower: Box<ForecastPath> },
    HoltWinters,
}

impl fmt::Display for ForecastPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForecastPath::Arima(o) => write!(f, "arima{o}"),
            ForecastPath::Deterministic { d } => write!(f, "deterministic(d={d})"),
            ForecastPath::Envelope { upper, lower } => write!(f, "envelope[{upper};{lower}]"),
            ForecastPath::HoltWinters => f.write_str("holt-winters"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentForecast {
    /// `mode-1`, `imf-2`, `residual`, ...
    pub label: String,
    pub kind: Option<ComponentKind>,
    pub center_frequency: Option<f64>,
    pub path: ForecastPath,
    /// The training-segment component the model was fitted on.
    pub train: TimeSeries,
    pub forecast: TimeSeries,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodForecast {
    pub method: Method,
    pub predictions: TimeSeries,
    /// Present for the decomposition methods; predictions are the sum of
    /// these forecasts in order.
    pub components: Option<Vec<ComponentForecast>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastReport {
    pub method: Method,
    pub predictions: TimeSeries,
    pub actuals: TimeSeries,
    pub rmse: f64,
    /// `None` when an actual value is zero.
    pub mape: Option<f64>,
    pub mae: f64,
    pub per_component_detail: Option<Vec<ComponentForecast>>,
}

impl ForecastReport {
    pub fn evaluate(forecast: MethodForecast, actuals: &TimeSeries) -> Result<Self> {
        let rmse = rmse(actuals, &forecast.predictions)?;
        let mae = mae(actuals, &forecast.predictions)?;
        let mape = match mape(actuals, &forecast.predictions) {
            Ok(v) => Some(v),
            Err(Error::DivisionDomain(i)) => {
                log::warn!("{}: MAPE undefined, actual {i} is zero", forecast.method);
                None
            }
            Err(e) => return Err(e),
        };
        Ok(ForecastReport {
            method: forecast.method,
            predictions: forecast.predictions,
            actuals: actuals.clone(),
            rmse,
            mape,
            mae,
            per_component_detail: forecast.components,
        })
    }
}

/// Forecasts one series with the minimum-AIC ARIMA within `search`.
pub fn forecast_series(
    series: &TimeSeries,
    search: &ArimaSearch,
    horizon: usize,
) -> Result<(ForecastPath, TimeSeries)> {
    let d = search.d;
    let (w, _) = difference(series, d)?;
    let first = w[0];
    if w.values().iter().all(|&v| v == first) {
        let ext = undifference_forecast(series.values(), d, vec![first; horizon]);
        return Ok((ForecastPath::Deterministic { d }, TimeSeries::forecast(ext)?));
    }
    let options = FitOptions { drift: search.drift };
    let (order, model) = select_order_with(series, search.max_p, search.max_q, d, options)?;
    Ok((ForecastPath::Arima(order), forecast_arima(&model, series, horizon)?))
}

fn check_horizon(horizon: usize) -> Result<()> {
    if horizon == 0 {
        return Err(Error::InvalidInput("horizon must be at least 1".into()));
    }
    Ok(())
}

fn sum_components(components: &[ComponentForecast], horizon: usize) -> Result<TimeSeries> {
    let mut total = vec![0.0; horizon];
    for c in components {
        for (t, v) in total.iter_mut().zip(c.forecast.values()) {
            *t += v;
        }
    }
    TimeSeries::forecast(total)
}

pub fn run_arima(train: &TimeSeries, horizon: usize, config: &BenchmarkConfig) -> Result<MethodForecast> {
    check_horizon(horizon)?;
    let (_, predictions) = forecast_series(train, &config.arima_search, horizon)?;
    Ok(MethodForecast {
        method: Method::Arima,
        predictions,
        components: None,
    })
}

pub fn run_holt_winters(
    train: &TimeSeries,
    horizon: usize,
    config: &BenchmarkConfig,
) -> Result<MethodForecast> {
    check_horizon(horizon)?;
    let params = config.holt_winters.as_ref().ok_or_else(|| {
        Error::InvalidConfig("holt-winters needs holt_winters.season_length".into())
    })?;
    let state = fit_holt_winters(train, params)?;
    Ok(MethodForecast {
        method: Method::HoltWinters,
        predictions: forecast_holt_winters(&state, horizon)?,
        components: None,
    })
}

pub fn run_emd_arima(train: &TimeSeries, horizon: usize, config: &BenchmarkConfig) -> Result<MethodForecast> {
    check_horizon(horizon)?;
    let set = emd_decompose(train, config.emd_max_imfs)?;
    let parts: Vec<(String, &TimeSeries)> = set
        .imfs
        .iter()
        .enumerate()
        .map(|(i, imf)| (format!("imf-{}", i + 1), imf))
        .chain(std::iter::once(("residual".to_string(), &set.residual)))
        .collect();
    let components = parts
        .par_iter()
        .enumerate()
        .map(|(i, (label, series))| {
            let (path, forecast) = forecast_series(series, &config.arima_search, horizon)
                .map_err(|e| e.in_component(i))?;
            Ok(ComponentForecast {
                label: label.clone(),
                kind: None,
                center_frequency: None,
                path,
                train: (*series).clone(),
                forecast,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MethodForecast {
        method: Method::EmdArima,
        predictions: sum_components(&components, horizon)?,
        components: Some(components),
    })
}

fn envelope_forecast(
    mode: &TimeSeries,
    horizon: usize,
    config: &BenchmarkConfig,
) -> Result<Option<(ForecastPath, TimeSeries)>> {
    let envelopes = match extract_envelopes(mode) {
        Ok(e) => e,
        Err(Error::NotOscillatory(why)) => {
            log::info!("component is not oscillatory ({why}); forecasting it directly");
            return Ok(None);
        }
        Err(e) => return Err(e),
    };
    let (upper_path, upper) = forecast_series(&envelopes.upper, &config.arima_search, horizon)?;
    let (lower_path, lower) = forecast_series(&envelopes.lower, &config.arima_search, horizon)?;
    // Envelopes are signed magnitudes; a forecast drifting through zero is
    // held at zero rather than flipping the band.
    let upper = TimeSeries::forecast(upper.values().iter().map(|v| v.max(0.0)).collect())?;
    let lower = TimeSeries::forecast(lower.values().iter().map(|v| v.min(0.0)).collect())?;
    let carrier = extend_carrier(&extract_carrier(mode)?, horizon, config.phase_rounding)?;
    let forecast = reconstruct_amfm(&upper, &lower, &carrier)?;
    let path = ForecastPath::Envelope {
        upper: Box::new(upper_path),
        lower: Box::new(lower_path),
    };
    Ok(Some((path, forecast)))
}

fn run_sgvmd(
    train: &TimeSeries,
    horizon: usize,
    config: &BenchmarkConfig,
    envelopes: bool,
) -> Result<MethodForecast> {
    check_horizon(horizon)?;
    let decomposition = decompose(train, &config.sgvmd)?;
    let components = decomposition
        .modes
        .par_iter()
        .enumerate()
        .map(|(i, mode)| {
            let via_envelope = if envelopes && mode.kind == ComponentKind::AmFm {
                envelope_forecast(&mode.signal, horizon, config).map_err(|e| e.in_component(i))?
            } else {
                None
            };
            let (path, forecast) = match via_envelope {
                Some(found) => found,
                None => forecast_series(&mode.signal, &config.arima_search, horizon)
                    .map_err(|e| e.in_component(i))?,
            };
            Ok(ComponentForecast {
                label: format!("mode-{}", i + 1),
                kind: Some(mode.kind),
                center_frequency: Some(mode.center_frequency),
                path,
                train: mode.signal.clone(),
                forecast,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MethodForecast {
        method: if envelopes { Method::SgvmdEArima } else { Method::SgvmdArima },
        predictions: sum_components(&components, horizon)?,
        components: Some(components),
    })
}

/// SGVMD on the training segment, one ARIMA per mode, forecasts summed.
/// The decomposition residual is treated as noise and not forecast.
pub fn run_sgvmd_arima(train: &TimeSeries, horizon: usize, config: &BenchmarkConfig) -> Result<MethodForecast> {
    run_sgvmd(train, horizon, config, false)
}

/// As [`run_sgvmd_arima`], but AM-FM modes are forecast through their
/// envelopes and an extended carrier.
pub fn run_sgvmd_e_arima(train: &TimeSeries, horizon: usize, config: &BenchmarkConfig) -> Result<MethodForecast> {
    run_sgvmd(train, horizon, config, true)
}

pub fn run_method(
    method: Method,
    train: &TimeSeries,
    horizon: usize,
    config: &BenchmarkConfig,
) -> Result<MethodForecast> {
    match method {
        Method::Arima => run_arima(train, horizon, config),
        Method::HoltWinters => run_holt_winters(train, horizon, config),
        Method::EmdArima => run_emd_arima(train, horizon, config),
        Method::SgvmdArima => run_sgvmd_arima(train, horizon, config),
        Method::SgvmdEArima => run_sgvmd_e_arima(train, horizon, config),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutcome {
    pub method: Method,
    pub result: std::result::Result<ForecastReport, Error>,
}

/// Splits, runs every configured method on the same training segment and
/// scores each on the test segment. Outcomes come back in configured order;
/// a failing method does not stop the others.
pub fn run_benchmark(series: &TimeSeries, config: &BenchmarkConfig) -> Result<Vec<MethodOutcome>> {
    config.validate()?;
    let (train, test) = split(series, config.split_ratio)?;
    let horizon = test.len();
    let outcomes: Vec<MethodOutcome> = config
        .methods
        .par_iter()
        .map(|&method| {
            let result = run_method(method, &train, horizon, config)
                .and_then(|f| ForecastReport::evaluate(f, &test));
            if let Err(e) = &result {
                log::warn!("{method} failed: {e}");
            }
            MethodOutcome { method, result }
        })
        .collect();
    if outcomes.iter().all(|o| o.result.is_err()) {
        return Err(Error::BenchmarkFailure);
    }
    Ok(outcomes)
}
