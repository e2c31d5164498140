//! Natural cubic interpolation and extrema helpers shared by EMD and the
//! envelope extractor.

use crate::error::{Error, Result};

/// Natural cubic spline through strictly increasing knots.
#[derive(Debug, Clone)]
pub struct NaturalCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl NaturalCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let k = x.len();
        if k < 2 || y.len() != k {
            return Err(Error::InvalidInput(format!(
                "spline needs at least 2 matching knots, got {} x and {} y",
                k,
                y.len()
            )));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("spline knots must increase".into()));
        }
        let mut m = vec![0.0; k];
        if k > 2 {
            // Thomas algorithm on the interior second-derivative system.
            let n = k - 2;
            let mut diag = vec![0.0; n];
            let mut upper = vec![0.0; n];
            let mut rhs = vec![0.0; n];
            for i in 0..n {
                let h0 = x[i + 1] - x[i];
                let h1 = x[i + 2] - x[i + 1];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h1 - (y[i + 1] - y[i]) / h0);
            }
            for i in 1..n {
                let lower = x[i + 1] - x[i];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[n] = rhs[n - 1] / diag[n - 1];
            for i in (0..n - 1).rev() {
                m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
            }
        }
        Ok(NaturalCubic { x, y, m })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = self.x.len();
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            p if p >= k => k - 2,
            p => p - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    /// Values at sample positions `0..len`.
    pub fn sample(&self, len: usize) -> Vec<f64> {
        (0..len).map(|t| self.eval(t as f64)).collect()
    }
}

/// Indices of local maxima. A flat top counts once, at its first sample.
pub fn local_maxima(x: &[f64]) -> Vec<usize> {
    extrema(x, |a, b| a > b)
}

pub fn local_minima(x: &[f64]) -> Vec<usize> {
    extrema(x, |a, b| a < b)
}

fn extrema(x: &[f64], beats: impl Fn(f64, f64) -> bool) -> Vec<usize> {
    let mut out = Vec::new();
    let n = x.len();
    let mut i = 1;
    while i + 1 < n {
        if beats(x[i], x[i - 1]) {
            let mut j = i;
            while j + 1 < n && x[j + 1] == x[i] {
                j += 1;
            }
            if j + 1 < n && beats(x[i], x[j + 1]) {
                out.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

pub fn zero_crossings(x: &[f64]) -> usize {
    x.windows(2)
        .filter(|w| (w[0] < 0.0 && w[1] >= 0.0) || (w[0] >= 0.0 && w[1] < 0.0))
        .count()
}

/// Spline through `(idx, values[idx])`, with the two extrema nearest each
/// end reflected across the boundary so the curve does not swing freely
/// past the outermost knots.
pub fn mirrored_envelope(idx: &[usize], values: &[f64], len: usize) -> Result<Vec<f64>> {
    if idx.len() < 2 {
        return Err(Error::InvalidInput("envelope needs at least 2 knots".into()));
    }
    let last = (len - 1) as f64;
    let mut xs = Vec::with_capacity(idx.len() + 4);
    let mut ys = Vec::with_capacity(idx.len() + 4);
    for &i in idx[..2].iter().rev() {
        if i > 0 {
            xs.push(-(i as f64));
            ys.push(values[i]);
        }
    }
    for &i in idx {
        xs.push(i as f64);
        ys.push(values[i]);
    }
    for &i in idx[idx.len() - 2..].iter().rev() {
        let r = 2.0 * last - i as f64;
        if r > last {
            xs.push(r);
            ys.push(values[i]);
        }
    }
    // knots landing on the same position after reflection would be degenerate
    let mut px = Vec::with_capacity(xs.len());
    let mut py = Vec::with_capacity(ys.len());
    for (x, y) in xs.into_iter().zip(ys) {
        if px.last().is_none_or(|&p| x > p) {
            px.push(x);
            py.push(y);
        }
    }
    Ok(NaturalCubic::new(px, py)?.sample(len))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubic_interior_and_line() {
        let s = NaturalCubic::new(vec![0.0, 1.0], vec![1.0, 3.0]).unwrap();
        assert!((s.eval(0.25) - 1.5).abs() < 1e-15);
        assert!((s.eval(2.0) - 5.0).abs() < 1e-12);

        let xs: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        let s = NaturalCubic::new(xs, ys).unwrap();
        assert!((s.eval(2.5) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn passes_through_knots() {
        let xs = vec![0.0, 1.5, 2.0, 4.0, 7.0];
        let ys = vec![1.0, -2.0, 0.5, 3.0, 0.0];
        let s = NaturalCubic::new(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((s.eval(*x) - y).abs() < 1e-12);
        }
    }

    #[test]
    fn extrema_and_crossings() {
        let x = [0.0, 2.0, 1.0, 1.0, 3.0, 3.0, -1.0, 0.5];
        assert_eq!(local_maxima(&x), vec![1, 4]);
        assert_eq!(local_minima(&x), vec![2, 6]);
        assert_eq!(zero_crossings(&x), 2);
    }

    #[test]
    fn rejects_unsorted_knots() {
        assert!(NaturalCubic::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
    }
}
