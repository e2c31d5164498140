use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use sgvmd_core::spectral::{analytic_signal, center_frequency, dft, idft, Spectrum};
use sgvmd_core::TimeSeries;

fn naive_dft(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(t, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (k * t) as f64 / n as f64))
                .sum()
        })
        .collect()
}

fn samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3..1e3f64, 2..200)
}

proptest! {
    #[test]
    fn matches_direct_summation(x in prop::collection::vec(-10.0..10.0f64, 2..64)) {
        let fast = Spectrum::from_real(&x);
        let slow = naive_dft(&x);
        let scale = x.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        for (a, b) in fast.bins().iter().zip(&slow) {
            prop_assert!((a - b).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn parseval(x in samples()) {
        let s = dft(&TimeSeries::new(x.clone()).unwrap()).unwrap();
        let time: f64 = x.iter().map(|v| v * v).sum();
        prop_assert!((s.energy() / x.len() as f64 - time).abs() <= 1e-10 * time.max(1.0));
    }

    #[test]
    fn round_trip(x in samples()) {
        let ts = TimeSeries::new(x.clone()).unwrap();
        let back = idft(&dft(&ts).unwrap()).unwrap();
        let scale = ts.max_abs().max(1.0);
        for (a, b) in back.values().iter().zip(&x) {
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn scaling_is_linear(x in samples(), c in -50.0..50.0f64) {
        let s = Spectrum::from_real(&x);
        let scaled: Vec<f64> = x.iter().map(|v| c * v).collect();
        let t = Spectrum::from_real(&scaled);
        let tol = 1e-11 * x.iter().map(|v| v.abs()).sum::<f64>().max(1.0) * c.abs().max(1.0);
        for (a, b) in t.bins().iter().zip(s.scale(c).bins()) {
            prop_assert!((a - b).norm() <= tol);
        }
    }

    #[test]
    fn center_frequency_is_within_band(x in samples()) {
        prop_assume!(x.iter().any(|v| *v != 0.0));
        let w = center_frequency(&Spectrum::from_real(&x)).unwrap();
        prop_assert!((0.0..=PI + 1e-12).contains(&w));
    }

    #[test]
    fn analytic_real_part_is_the_input(x in prop::collection::vec(-10.0..10.0f64, 4..128)) {
        let a = analytic_signal(&TimeSeries::new(x.clone()).unwrap()).unwrap();
        for (s, v) in a.samples().iter().zip(&x) {
            prop_assert_eq!(s.re, *v);
        }
    }
}

#[test]
fn tone_center_lands_on_its_bin() {
    let n = 512;
    let x: Vec<f64> = (0..n).map(|t| (2.0 * PI * 37.0 * t as f64 / n as f64).sin()).collect();
    let w = center_frequency(&Spectrum::from_real(&x)).unwrap();
    assert!((w - 2.0 * PI * 37.0 / n as f64).abs() < 1e-12);
}

#[test]
fn analytic_magnitude_of_a_tone_is_flat() {
    let n = 400;
    let x: Vec<f64> = (0..n).map(|t| 3.0 * (2.0 * PI * 20.0 * t as f64 / n as f64).cos()).collect();
    let a = analytic_signal(&TimeSeries::new(x).unwrap()).unwrap();
    assert!(a.magnitude().iter().all(|m| (m - 3.0).abs() < 1e-10));
}

#[test]
fn non_symmetric_spectrum_is_not_real() {
    let mut s = Spectrum::from_real(&[1.0, 2.0, 3.0, 4.0]);
    s.bins_mut()[1] += Complex64::new(0.0, 5.0);
    assert!(idft(&s).is_err());
}
