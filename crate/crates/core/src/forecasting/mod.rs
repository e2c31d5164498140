//! Single-series prediction models.

pub mod arima;
pub mod holt_winters;

pub use arima::{
    difference, fit_arima, fit_arima_with, forecast_arima, integrate, select_order,
    select_order_with, ArimaModel, ArimaOrder, FitDiagnostics, FitOptions,
};
pub use holt_winters::{
    fit_holt_winters, forecast_holt_winters, HoltWintersParams, HoltWintersState,
};
