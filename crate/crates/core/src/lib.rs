pub mod emd;
pub mod cli;
pub mod envelope;
pub mod error;
pub mod forecasting;
pub mod pipeline;
pub mod series;
pub mod sgvmd;
pub mod spectral;
pub mod spline;
pub mod synth;

pub use error::{Error, Result};
pub use series::TimeSeries;
