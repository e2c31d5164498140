//! Published results for the two real-world benchmark series, kept for
//! context only: the underlying data are not available, so these are never
//! used as test targets. Rows are `(method, rmse, mape, mae)`.

pub type ReferenceRow = (&'static str, f64, f64, f64);

/// Online-store sales series (1000 points, 100-point test window).
pub const EXAMPLE_A: [ReferenceRow; 6] = [
    ("arima", 920.539008, 0.046712, 784.678901),
    ("holt-winters", 1003.134259, 0.051554, 831.312812),
    ("lstm", 775.315002, 0.035625, 573.177551),
    ("emd-arima", 717.039878, 0.035505, 589.845088),
    ("sgvmd-arima", 589.603168, 0.025120, 416.3842711),
    ("sgvmd-e-arima", 560.219180, 0.025635, 424.867215),
];

pub const EXAMPLE_B: [ReferenceRow; 6] = [
    ("arima", 27.986811, 0.158452, 23.626623),
    ("holt-winters", 34.498434, 0.201383, 29.460192),
    ("lstm", 22.555809, 0.128462, 19.437229),
    ("emd-arima", 17.007021, 0.085877, 13.264099),
    ("sgvmd-arima", 15.105131, 0.076254, 11.781843),
    ("sgvmd-e-arima", 16.082900, 0.078981, 12.210334),
];
