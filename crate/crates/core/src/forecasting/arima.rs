//! ARIMA(p, d, q) in mean form,
//!
//! ```text
//! w_t − μ = Σ φ_i (w_{t−i} − μ) + e_t − Σ θ_j e_{t−j}
//! ```
//!
//! where `w` is the d-times differenced series. Parameters are estimated by
//! conditional sum of squares (pre-sample innovations fixed at zero) with a
//! Levenberg-Marquardt search started from zero and from Hannan-Rissanen
//! estimates.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

pub const MAX_ARMA_ORDER: usize = 20;
pub const MAX_DIFFERENCE: usize = 2;

/// Order selection skips fits whose AR part grows faster than this per
/// step; roots just inside the unit circle (undamped oscillations estimated
/// with a hair of growth) stay admissible.
pub const MAX_AR_GROWTH: f64 = 1.001;

const MAX_LM_ITERATIONS: usize = 200;
const PARAM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
}

impl ArimaOrder {
    pub fn new(p: usize, d: usize, q: usize) -> Result<Self> {
        let order = ArimaOrder { p, d, q };
        order.validate()?;
        Ok(order)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p > MAX_ARMA_ORDER || self.q > MAX_ARMA_ORDER {
            return Err(Error::InvalidInput(format!(
                "p and q must be at most {MAX_ARMA_ORDER}, got ({}, {})",
                self.p, self.q
            )));
        }
        if self.d > MAX_DIFFERENCE {
            return Err(Error::InvalidInput(format!(
                "d must be at most {MAX_DIFFERENCE}, got {}",
                self.d
            )));
        }
        if self.p + self.q == 0 && self.d == 0 {
            return Err(Error::InvalidInput(
                "ARIMA(0,0,0) has nothing to model".into(),
            ));
        }
        Ok(())
    }
}

impl std::fmt::Display for ArimaOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.p, self.d, self.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FitOptions {
    /// Estimate μ on the differenced series even when `d ≥ 1`.
    pub drift: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitDiagnostics {
    /// Conditional sum of squared residuals.
    pub css: f64,
    /// Gaussian log-likelihood evaluated at the CSS estimate.
    pub log_likelihood: f64,
    /// `n·ln σ̂² + 2(p+q+1)` with `n` the number of residuals.
    pub aic: f64,
    /// One-step residuals on the differenced series, aligned to its end.
    pub residuals: Vec<f64>,
    /// AR polynomial has all roots outside the unit circle.
    pub stationary: bool,
    /// Largest modulus among the inverse AR roots (0 without AR terms).
    pub ar_spectral_radius: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArimaModel {
    pub order: ArimaOrder,
    pub mu: f64,
    pub ar_coefficients: Vec<f64>,
    pub ma_coefficients: Vec<f64>,
    pub sigma2: f64,
    pub fit_diagnostics: FitDiagnostics,
}

fn difference_values(x: &[f64], d: usize) -> (Vec<f64>, Vec<f64>) {
    let mut cur = x.to_vec();
    let mut initial = Vec::with_capacity(d);
    for _ in 0..d {
        initial.push(cur[0]);
        cur = cur.windows(2).map(|w| w[1] - w[0]).collect();
    }
    (cur, initial)
}

/// `d`-fold first differences plus the leading value of each level, which
/// [`integrate`] needs to undo them.
pub fn difference(series: &TimeSeries, d: usize) -> Result<(TimeSeries, Vec<f64>)> {
    if d > MAX_DIFFERENCE {
        return Err(Error::InvalidInput(format!("d must be at most {MAX_DIFFERENCE}")));
    }
    if series.len() <= d {
        return Err(Error::InvalidInput(format!(
            "length {} too short for {d} differences",
            series.len()
        )));
    }
    let (values, initial) = difference_values(series.values(), d);
    Ok((TimeSeries::forecast(values)?, initial))
}

pub fn integrate(diffs: &TimeSeries, initial_values: &[f64]) -> Result<TimeSeries> {
    if initial_values.len() > MAX_DIFFERENCE {
        return Err(Error::InvalidInput(format!(
            "at most {MAX_DIFFERENCE} initial values, got {}",
            initial_values.len()
        )));
    }
    let mut cur = diffs.values().to_vec();
    for &start in initial_values.iter().rev() {
        let mut out = Vec::with_capacity(cur.len() + 1);
        out.push(start);
        for v in &cur {
            let prev = out[out.len() - 1];
            out.push(prev + v);
        }
        cur = out;
    }
    TimeSeries::forecast(cur)
}

/// Parameter layout: `[μ?, φ_1..φ_p, θ_1..θ_q]`.
#[derive(Debug, Clone, Copy)]
struct Layout {
    p: usize,
    q: usize,
    mean: bool,
}

impl Layout {
    fn len(&self) -> usize {
        self.mean as usize + self.p + self.q
    }

    fn split<'a>(&self, params: &'a [f64]) -> (f64, &'a [f64], &'a [f64]) {
        let off = self.mean as usize;
        let mu = if self.mean { params[0] } else { 0.0 };
        (mu, &params[off..off + self.p], &params[off + self.p..])
    }
}

/// Residuals `e_t` for `t = p..m` and optionally their Jacobian (rows
/// aligned with the residuals, columns with the parameter layout).
fn css_residuals(
    w: &[f64],
    layout: Layout,
    params: &[f64],
    jacobian: Option<&mut DMatrix<f64>>,
) -> Vec<f64> {
    let (mu, phi, theta) = layout.split(params);
    let (p, q) = (layout.p, layout.q);
    let m = w.len();
    let rows = m - p;
    let mut e = vec![0.0; rows];
    let k = layout.len();
    let mut jac = jacobian;
    for r in 0..rows {
        let t = r + p;
        let mut v = w[t] - mu;
        for i in 0..p {
            v -= phi[i] * (w[t - 1 - i] - mu);
        }
        for j in 0..q {
            if r > j {
                v += theta[j] * e[r - 1 - j];
            }
        }
        e[r] = v;
        if let Some(jm) = jac.as_deref_mut() {
            for c in 0..k {
                let mut g = if layout.mean && c == 0 {
                    -1.0 + phi.iter().sum::<f64>()
                } else if c < layout.mean as usize + p {
                    let i = c - layout.mean as usize;
                    -(w[t - 1 - i] - mu)
                } else {
                    let j = c - layout.mean as usize - p;
                    if r > j {
                        e[r - 1 - j]
                    } else {
                        0.0
                    }
                };
                for jj in 0..q {
                    if r > jj {
                        g += theta[jj] * jm[(r - 1 - jj, c)];
                    }
                }
                jm[(r, c)] = g;
            }
        }
    }
    e
}

fn sum_sq(e: &[f64]) -> f64 {
    e.iter().map(|v| v * v).sum()
}

struct LmOutcome {
    params: Vec<f64>,
    css: f64,
    iterations: usize,
    converged: bool,
}

fn levenberg_marquardt(w: &[f64], layout: Layout, start: Vec<f64>) -> LmOutcome {
    let k = layout.len();
    let rows = w.len() - layout.p;
    let mut params = start;
    let mut jac = DMatrix::<f64>::zeros(rows, k);
    let mut e = css_residuals(w, layout, &params, Some(&mut jac));
    let mut css = sum_sq(&e);
    if k == 0 {
        return LmOutcome {
            params,
            css,
            iterations: 0,
            converged: true,
        };
    }
    let mut lambda = 1e-3;
    for it in 1..=MAX_LM_ITERATIONS {
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let grad = &jt * DVector::from_column_slice(&e);
        let mut improved = false;
        while lambda < 1e12 {
            let mut a = jtj.clone();
            for d in 0..k {
                a[(d, d)] += lambda * jtj[(d, d)].max(1e-12);
            }
            let Some(chol) = a.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let step = chol.solve(&(-&grad));
            let trial: Vec<f64> = params.iter().zip(step.iter()).map(|(p, s)| p + s).collect();
            let te = css_residuals(w, layout, &trial, None);
            let tcss = sum_sq(&te);
            if tcss.is_finite() && tcss <= css {
                let step_norm = step.amax();
                let scale = params.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
                let rel_gain = (css - tcss) / css.max(f64::MIN_POSITIVE);
                params = trial;
                e = css_residuals(w, layout, &params, Some(&mut jac));
                css = tcss;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                if step_norm < PARAM_TOLERANCE * scale || rel_gain < 1e-15 {
                    return LmOutcome {
                        params,
                        css,
                        iterations: it,
                        converged: true,
                    };
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            // no descent direction left at any damping: stationary point
            return LmOutcome {
                params,
                css,
                iterations: it,
                converged: true,
            };
        }
    }
    LmOutcome {
        params,
        css,
        iterations: MAX_LM_ITERATIONS,
        converged: false,
    }
}

fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Option<DVector<f64>> {
    x.clone().svd(true, true).solve(y, 1e-12).ok()
}

/// Hannan-Rissanen: long autoregression for innovation estimates, then a
/// linear regression on lagged values and lagged innovations.
fn hannan_rissanen(w: &[f64], layout: Layout, mu: f64) -> Option<Vec<f64>> {
    let (p, q) = (layout.p, layout.q);
    let m = w.len();
    let c: Vec<f64> = w.iter().map(|v| v - mu).collect();
    let mut innov = vec![0.0; m];
    let long = if q > 0 {
        (p + q).max(((m as f64).ln() * 2.0).ceil() as usize).min(m / 4)
    } else {
        0
    };
    if q > 0 {
        if long == 0 || m <= 2 * long + 1 {
            return None;
        }
        let rows = m - long;
        let x = DMatrix::from_fn(rows, long, |r, j| c[r + long - 1 - j]);
        let y = DVector::from_fn(rows, |r, _| c[r + long]);
        let a = least_squares(&x, &y)?;
        for t in long..m {
            let mut v = c[t];
            for j in 0..long {
                v -= a[j] * c[t - 1 - j];
            }
            innov[t] = v;
        }
    }
    let start = long + q.max(p);
    if m <= start + p + q + 1 {
        return None;
    }
    let rows = m - start;
    let x = DMatrix::from_fn(rows, p + q, |r, j| {
        let t = r + start;
        if j < p {
            c[t - 1 - j]
        } else {
            -innov[t - 1 - (j - p)]
        }
    });
    let y = DVector::from_fn(rows, |r, _| c[r + start]);
    let b = least_squares(&x, &y)?;
    let mut out = Vec::with_capacity(layout.len());
    if layout.mean {
        out.push(mu);
    }
    out.extend(b.iter().copied());
    Some(out)
}

/// Largest eigenvalue modulus of the AR companion matrix.
pub fn ar_spectral_radius(ar: &[f64]) -> f64 {
    let p = ar.len();
    if p == 0 {
        return 0.0;
    }
    let companion = DMatrix::from_fn(p, p, |r, c| {
        if r == 0 {
            ar[c]
        } else if r == c + 1 {
            1.0
        } else {
            0.0
        }
    });
    companion
        .complex_eigenvalues()
        .iter()
        .fold(0.0_f64, |m, z| m.max(z.norm()))
}

/// Step-down (reverse Levinson) test: all AR roots outside the unit circle.
pub fn is_stationary(ar: &[f64]) -> bool {
    let mut a = ar.to_vec();
    while let Some(&kappa) = a.last() {
        if !kappa.is_finite() || kappa.abs() >= 1.0 {
            return false;
        }
        let k = a.len();
        let denom = 1.0 - kappa * kappa;
        let prev: Vec<f64> = (0..k - 1)
            .map(|j| (a[j] + kappa * a[k - 2 - j]) / denom)
            .collect();
        a = prev;
    }
    true
}

pub fn fit_arima(series: &TimeSeries, order: ArimaOrder) -> Result<ArimaModel> {
    fit_arima_with(series, order, FitOptions::default())
}

pub fn fit_arima_with(
    series: &TimeSeries,
    order: ArimaOrder,
    options: FitOptions,
) -> Result<ArimaModel> {
    order.validate()?;
    let ArimaOrder { p, d, q } = order;
    if series.len() <= d + p + q + 1 {
        return Err(Error::InvalidInput(format!(
            "length {} too short for ARIMA{order}",
            series.len()
        )));
    }
    let (w, _) = difference_values(series.values(), d);
    let layout = Layout {
        p,
        q,
        mean: d == 0 || options.drift,
    };
    let mean = if layout.mean {
        w.iter().sum::<f64>() / w.len() as f64
    } else {
        0.0
    };

    let mut zero = vec![0.0; layout.len()];
    if layout.mean {
        zero[0] = mean;
    }
    let mut starts = vec![zero];
    if p + q > 0 {
        if let Some(hr) = hannan_rissanen(&w, layout, mean) {
            if hr.iter().all(|v| v.is_finite()) {
                starts.push(hr);
            }
        }
    }

    let best = starts
        .into_iter()
        .map(|s| levenberg_marquardt(&w, layout, s))
        .filter(|o| o.converged && o.css.is_finite())
        .min_by(|a, b| a.css.total_cmp(&b.css))
        .ok_or_else(|| {
            Error::FitFailure(format!("ARIMA{order}: optimizer did not converge"))
        })?;

    let (mu, phi, theta) = layout.split(&best.params);
    let residuals = css_residuals(&w, layout, &best.params, None);
    let n = residuals.len() as f64;
    let sigma2 = best.css / n;
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::FitFailure(format!(
            "ARIMA{order}: degenerate innovation variance {sigma2}"
        )));
    }
    let log_likelihood = -0.5 * n * ((2.0 * std::f64::consts::PI * sigma2).ln() + 1.0);
    let aic = n * sigma2.ln() + 2.0 * (p + q + 1) as f64;
    let stationary = is_stationary(phi);
    if !stationary {
        log::warn!("ARIMA{order}: AR estimate is not stationary");
    }
    Ok(ArimaModel {
        order,
        mu,
        ar_coefficients: phi.to_vec(),
        ma_coefficients: theta.to_vec(),
        sigma2,
        fit_diagnostics: FitDiagnostics {
            css: best.css,
            log_likelihood,
            aic,
            residuals,
            stationary,
            ar_spectral_radius: ar_spectral_radius(phi),
            iterations: best.iterations,
        },
    })
}

/// Recursive multi-step forecast from the end of `last_observations`, with
/// future innovations at zero. The model's fitted residual tail supplies the
/// MA memory.
pub fn forecast_arima(
    model: &ArimaModel,
    last_observations: &TimeSeries,
    horizon: usize,
) -> Result<TimeSeries> {
    let ArimaOrder { p, d, q } = model.order;
    if horizon == 0 {
        return Err(Error::InvalidInput("horizon must be at least 1".into()));
    }
    if last_observations.len() < p + d || last_observations.len() <= d {
        return Err(Error::InvalidInput(format!(
            "need at least {} observations for ARIMA{}, got {}",
            (p + d).max(d + 1),
            model.order,
            last_observations.len()
        )));
    }
    let resid = &model.fit_diagnostics.residuals;
    if resid.len() < q {
        return Err(Error::InvalidInput(format!(
            "need {q} fitted residuals, model has {}",
            resid.len()
        )));
    }

    let x = last_observations.values();
    let (w, _) = difference_values(x, d);
    let mu = model.mu;
    let mut hist: Vec<f64> = w[w.len() - p..].to_vec();
    let mut shocks: Vec<f64> = resid[resid.len() - q..].to_vec();
    let mut wf = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let mut v = mu;
        for (i, phi) in model.ar_coefficients.iter().enumerate() {
            v += phi * (hist[hist.len() - 1 - i] - mu);
        }
        for (j, theta) in model.ma_coefficients.iter().enumerate() {
            v -= theta * shocks[shocks.len() - 1 - j];
        }
        wf.push(v);
        if p > 0 {
            hist.push(v);
        }
        if q > 0 {
            shocks.push(0.0);
        }
    }

    TimeSeries::forecast(undifference_forecast(x, d, wf))
}

/// Maps forecasts of the `d`-times differenced series back to levels,
/// seeding each integration with the last observed value at that level.
pub(crate) fn undifference_forecast(x: &[f64], d: usize, forecast: Vec<f64>) -> Vec<f64> {
    let mut levels = vec![x.to_vec()];
    for _ in 0..d {
        let prev = &levels[levels.len() - 1];
        let next: Vec<f64> = prev.windows(2).map(|w| w[1] - w[0]).collect();
        levels.push(next);
    }
    let mut cur = forecast;
    for level in (0..d).rev() {
        let mut acc = levels[level][levels[level].len() - 1];
        cur = cur
            .into_iter()
            .map(|v| {
                acc += v;
                acc
            })
            .collect();
    }
    cur
}

pub fn select_order(series: &TimeSeries, max_p: usize, max_q: usize, d: usize) -> Result<ArimaOrder> {
    select_order_with(series, max_p, max_q, d, FitOptions::default()).map(|(o, _)| o)
}

/// Minimum-AIC order over the `(p, q)` grid, also returning the fitted
/// model. Fits whose AR part grows by more than [`MAX_AR_GROWTH`] per step
/// are chosen only when nothing else fits, since their multi-step forecasts
/// diverge. Candidates are fitted in parallel; ties
/// resolve after all finish by smaller `p+q`, then smaller `p`.
pub fn select_order_with(
    series: &TimeSeries,
    max_p: usize,
    max_q: usize,
    d: usize,
    options: FitOptions,
) -> Result<(ArimaOrder, ArimaModel)> {
    if max_p > MAX_ARMA_ORDER || max_q > MAX_ARMA_ORDER || d > MAX_DIFFERENCE {
        return Err(Error::InvalidInput(format!(
            "search bounds ({max_p}, {d}, {max_q}) exceed limits"
        )));
    }
    let grid: Vec<ArimaOrder> = (0..=max_p)
        .flat_map(|p| (0..=max_q).map(move |q| ArimaOrder { p, d, q }))
        .filter(|o| o.validate().is_ok())
        .collect();
    let fits: Vec<Option<ArimaModel>> = grid
        .par_iter()
        .map(|&o| fit_arima_with(series, o, options).ok())
        .collect();
    let mut best: Option<ArimaModel> = None;
    for model in fits.into_iter().flatten() {
        let better = match &best {
            None => true,
            Some(b) => order_preferred(&model, b),
        };
        if better {
            best = Some(model);
        }
    }
    best.map(|m| (m.order, m)).ok_or_else(|| {
        Error::FitFailure(format!(
            "no ARIMA order in (0..={max_p}, {d}, 0..={max_q}) could be fitted"
        ))
    })
}

fn order_preferred(a: &ArimaModel, b: &ArimaModel) -> bool {
    let admissible = |m: &ArimaModel| m.fit_diagnostics.ar_spectral_radius <= MAX_AR_GROWTH;
    let (sa, sb) = (admissible(a), admissible(b));
    if sa != sb {
        return sa;
    }
    let key = |m: &ArimaModel| (m.fit_diagnostics.aic, m.order.p + m.order.q, m.order.p);
    let (ka, kb) = (key(a), key(b));
    match ka.0.total_cmp(&kb.0) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => (ka.1, ka.2) < (kb.1, kb.2),
    }
}
