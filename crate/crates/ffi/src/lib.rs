//! C ABI over `sgvmd-core`.
//!
//! Every fallible call returns an [`SgvmdStatus`]; on anything other than
//! `SGVMD_OK` a message is available from [`sgvmd_last_error`] on the same
//! thread until the next failing call. Handles are opaque, owned by the
//! caller, and released with their `_free` function. Panics never cross the
//! boundary; they surface as `SGVMD_PANIC`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sgvmd_core::pipeline::{self, BenchmarkConfig, Method};
use sgvmd_core::sgvmd::{self, Boundary, DecompositionResult, SgvmdParams, Threshold};
use sgvmd_core::{Error, TimeSeries};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgvmdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    InvalidConfig = 3,
    NonRealResult = 4,
    DegenerateSpectrum = 5,
    ConvergenceFailure = 6,
    NotOscillatory = 7,
    FitFailure = 8,
    DomainError = 9,
    OutOfRange = 10,
    Other = 98,
    Panic = 99,
}

impl From<&Error> for SgvmdStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Component { source, .. } => SgvmdStatus::from(&**source),
            Error::InvalidInput(_) | Error::Parse { .. } => SgvmdStatus::InvalidInput,
            Error::InvalidConfig(_) => SgvmdStatus::InvalidConfig,
            Error::NonRealResult { .. } => SgvmdStatus::NonRealResult,
            Error::DegenerateSpectrum(_) => SgvmdStatus::DegenerateSpectrum,
            Error::ConvergenceFailure { .. } => SgvmdStatus::ConvergenceFailure,
            Error::Monotone(_) | Error::NotOscillatory(_) | Error::InconsistentEnvelope { .. } => {
                SgvmdStatus::NotOscillatory
            }
            Error::FitFailure(_) | Error::BenchmarkFailure => SgvmdStatus::FitFailure,
            Error::MultiplicativeDomain(_) | Error::DivisionDomain(_) => SgvmdStatus::DomainError,
            Error::Io(_) => SgvmdStatus::Other,
        }
    }
}

/// Forecasting method selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgvmdMethod {
    Arima = 0,
    HoltWinters = 1,
    EmdArima = 2,
    SgvmdArima = 3,
    SgvmdEArima = 4,
}

impl From<SgvmdMethod> for Method {
    fn from(m: SgvmdMethod) -> Self {
        match m {
            SgvmdMethod::Arima => Method::Arima,
            SgvmdMethod::HoltWinters => Method::HoltWinters,
            SgvmdMethod::EmdArima => Method::EmdArima,
            SgvmdMethod::SgvmdArima => Method::SgvmdArima,
            SgvmdMethod::SgvmdEArima => Method::SgvmdEArima,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgvmdBoundary {
    Periodic = 0,
    Mirror = 1,
    LinearPrediction = 2,
}

/// Decomposition and forecasting settings. Opaque.
pub struct SgvmdConfig {
    inner: BenchmarkConfig,
}

/// Result of [`sgvmd_decompose`]. Opaque.
pub struct SgvmdDecomposition {
    inner: DecompositionResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, converting errors and panics into a status plus last-error text.
fn guard(f: impl FnOnce() -> Result<(), (SgvmdStatus, String)>) -> SgvmdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SgvmdStatus::Ok,
        Ok(Err((status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            SgvmdStatus::Panic
        }
    }
}

fn core(e: Error) -> (SgvmdStatus, String) {
    (SgvmdStatus::from(&e), e.to_string())
}

fn null(what: &str) -> (SgvmdStatus, String) {
    (SgvmdStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], (SgvmdStatus, String)> {
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn series(data: *const f64, len: usize) -> Result<TimeSeries, (SgvmdStatus, String)> {
    TimeSeries::new(slice(data, len, "data")?.to_vec()).map_err(core)
}

unsafe fn write_out(src: &[f64], out: *mut f64, out_len: usize) -> Result<(), (SgvmdStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    if out_len < src.len() {
        return Err((
            SgvmdStatus::OutOfRange,
            format!("output buffer holds {out_len} values, need {}", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    Ok(())
}

/// Message of the last failing call on this thread, or null if none.
/// Valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn sgvmd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sgvmd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// New configuration with library defaults.
#[no_mangle]
pub extern "C" fn sgvmd_config_new() -> *mut SgvmdConfig {
    // Holt-Winters joins once a season length is set.
    let mut inner = BenchmarkConfig::default();
    inner.methods.retain(|m| *m != Method::HoltWinters);
    Box::into_raw(Box::new(SgvmdConfig { inner }))
}

#[no_mangle]
pub unsafe extern "C" fn sgvmd_config_free(config: *mut SgvmdConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

unsafe fn with_config(config: *mut SgvmdConfig, f: impl FnOnce(&mut BenchmarkConfig)) -> SgvmdStatus {
    guard(|| {
        let cfg = config.as_mut().ok_or_else(|| null("config"))?;
        let mut next = cfg.inner.clone();
        f(&mut next);
        next.validate().map_err(core)?;
        cfg.inner = next;
        Ok(())
    })
}

/// Penalty weights; only their ratio matters.
#[no_mangle]
pub unsafe extern "C" fn sgvmd_config_set_penalties(config: *mut SgvmdConfig, alpha: f64, beta: f64) -> SgvmdStatus {
    with_config(config, |c| {
        c.sgvmd.alpha = alpha;
        c.sgvmd.beta = beta;
    })
}

/// Residual-energy stop relative to the input's energy about its mean.
#[no_mangle]
pub unsafe extern "C" fn sgvmd_config_set_epsilon(config: *mut SgvmdConfig, relative: f64) -> SgvmdStatus {
    with_config(config, |c| c.sgvmd.epsilon = Threshold::Relative(relative))
}

#[no_mangle]
pub unsafe extern "C" fn sgvmd_config_set_max_modes(config: *mut SgvmdConfig, max_modes: usize) -> SgvmdStatus {
    with_config(config, |c| c.sgvmd.max_modes = max_modes)
}

#[no_mangle]
pub unsafe extern "C" fn sgvmd_config_set_boundary(config: *mut SgvmdConfig, boundary: SgvmdBoundary) -> SgvmdStatus {
    with_config(config, |c| {
        c.sgvmd.boundary = match boundary {
            SgvmdBoundary::Periodic => Boundary::Periodic,
            SgvmdBoundary::Mirror => Boundary::Mirror,
            SgvmdBoundary::LinearPrediction => Boundary::LinearPrediction,
        }
    })
}

/// ARIMA order-search bounds and differencing order.
#[no_mangle]
pub unsafe extern "C" fn sgvmd_config_set_arima_search(
    config: *mut SgvmdConfig,
    max_p: usize,
    max_q: usize,
    d: usize,
) -> SgvmdStatus {
    with_config(config, |c| {
        c.arima_search.max_p = max_p;
        c.arima_search.max_q = max_q;
        c.arima_search.d = d;
    })
}

/// Enables Holt-Winters with default smoothing and this season length.
#[no_mangle]
pub unsafe extern "C" fn sgvmd_config_set_season_length(config: *mut SgvmdConfig, season_length: usize) -> SgvmdStatus {
    with_config(config, |c| {
        c.holt_winters = Some(sgvmd_core::forecasting::HoltWintersParams::with_season_length(season_length));
        if !c.methods.contains(&Method::HoltWinters) {
            c.methods.push(Method::HoltWinters);
        }
    })
}

/// Sets `*out` to a new decomposition of `data[0..len]`; free it with
/// [`sgvmd_decomposition_free`].
#[no_mangle]
pub unsafe extern "C" fn sgvmd_decompose(
    config: *const SgvmdConfig,
    data: *const f64,
    len: usize,
    out: *mut *mut SgvmdDecomposition,
) -> SgvmdStatus {
    guard(|| {
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let params: &SgvmdParams = &cfg.inner.sgvmd;
        let result = sgvmd::decompose(&series(data, len)?, params).map_err(core)?;
        *out = Box::into_raw(Box::new(SgvmdDecomposition { inner: result }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn sgvmd_decomposition_free(d: *mut SgvmdDecomposition) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of extracted modes; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn sgvmd_decomposition_mode_count(d: *const SgvmdDecomposition) -> usize {
    d.as_ref().map_or(0, |d| d.inner.modes.len())
}

/// Samples per mode (the input length); 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn sgvmd_decomposition_len(d: *const SgvmdDecomposition) -> usize {
    d.as_ref().map_or(0, |d| d.inner.residual.len())
}

/// Whether extraction stopped at the mode cap rather than the energy stop.
#[no_mangle]
pub unsafe extern "C" fn sgvmd_decomposition_truncated(d: *const SgvmdDecomposition) -> bool {
    d.as_ref().is_some_and(|d| d.inner.truncated)
}

/// Copies mode `index` into `out`, which must hold at least
/// [`sgvmd_decomposition_len`] values.
#[no_mangle]
pub unsafe extern "C" fn sgvmd_decomposition_mode(
    d: *const SgvmdDecomposition,
    index: usize,
    out: *mut f64,
    out_len: usize,
) -> SgvmdStatus {
    guard(|| {
        let d = d.as_ref().ok_or_else(|| null("decomposition"))?;
        let mode = d.inner.modes.get(index).ok_or_else(|| {
            (
                SgvmdStatus::OutOfRange,
                format!("mode {index} requested, {} available", d.inner.modes.len()),
            )
        })?;
        write_out(mode.signal.values(), out, out_len)
    })
}

/// Normalized angular center frequency of mode `index` in `[0, π]`.
#[no_mangle]
pub unsafe extern "C" fn sgvmd_decomposition_center_frequency(
    d: *const SgvmdDecomposition,
    index: usize,
    out: *mut f64,
) -> SgvmdStatus {
    guard(|| {
        let d = d.as_ref().ok_or_else(|| null("decomposition"))?;
        let mode = d
            .inner
            .modes
            .get(index)
            .ok_or_else(|| (SgvmdStatus::OutOfRange, format!("no mode {index}")))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = mode.center_frequency;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn sgvmd_decomposition_residual(
    d: *const SgvmdDecomposition,
    out: *mut f64,
    out_len: usize,
) -> SgvmdStatus {
    guard(|| {
        let d = d.as_ref().ok_or_else(|| null("decomposition"))?;
        write_out(d.inner.residual.values(), out, out_len)
    })
}

/// Fits `method` on `train[0..len]` and writes `horizon` forecasts to `out`.
#[no_mangle]
pub unsafe extern "C" fn sgvmd_forecast(
    config: *const SgvmdConfig,
    method: SgvmdMethod,
    train: *const f64,
    len: usize,
    horizon: usize,
    out: *mut f64,
    out_len: usize,
) -> SgvmdStatus {
    guard(|| {
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        let train = series(train, len)?;
        let f = pipeline::run_method(method.into(), &train, horizon, &cfg.inner).map_err(core)?;
        write_out(f.predictions.values(), out, out_len)
    })
}

/// RMSE, MAPE and MAE of `predicted` against `actual`. `mape` is NaN when
/// an actual value is zero; the other two are still written.
#[no_mangle]
pub unsafe extern "C" fn sgvmd_metrics(
    actual: *const f64,
    predicted: *const f64,
    len: usize,
    rmse: *mut f64,
    mape: *mut f64,
    mae: *mut f64,
) -> SgvmdStatus {
    guard(|| {
        let a = series(actual, len)?;
        let p = TimeSeries::forecast(slice(predicted, len, "predicted")?.to_vec()).map_err(core)?;
        let (rmse, mape, mae) = (
            rmse.as_mut().ok_or_else(|| null("rmse"))?,
            mape.as_mut().ok_or_else(|| null("mape"))?,
            mae.as_mut().ok_or_else(|| null("mae"))?,
        );
        *rmse = pipeline::rmse(&a, &p).map_err(core)?;
        *mae = pipeline::mae(&a, &p).map_err(core)?;
        *mape = match pipeline::mape(&a, &p) {
            Ok(v) => v,
            Err(Error::DivisionDomain(_)) => f64::NAN,
            Err(e) => return Err(core(e)),
        };
        Ok(())
    })
}

/// Human-readable status name, static.
#[no_mangle]
pub extern "C" fn sgvmd_status_name(status: SgvmdStatus) -> *const c_char {
    let s: &'static CStr = match status {
        SgvmdStatus::Ok => c"ok",
        SgvmdStatus::NullPointer => c"null-pointer",
        SgvmdStatus::InvalidInput => c"invalid-input",
        SgvmdStatus::InvalidConfig => c"invalid-config",
        SgvmdStatus::NonRealResult => c"non-real-result",
        SgvmdStatus::DegenerateSpectrum => c"degenerate-spectrum",
        SgvmdStatus::ConvergenceFailure => c"convergence-failure",
        SgvmdStatus::NotOscillatory => c"not-oscillatory",
        SgvmdStatus::FitFailure => c"fit-failure",
        SgvmdStatus::DomainError => c"domain-error",
        SgvmdStatus::OutOfRange => c"out-of-range",
        SgvmdStatus::Other => c"other",
        SgvmdStatus::Panic => c"panic",
    };
    s.as_ptr()
}
