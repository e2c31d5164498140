use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("spectrum inverse is not real: imaginary residue {residue:e} exceeds {tolerance:e}")]
    NonRealResult { residue: f64, tolerance: f64 },

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("mode extraction did not converge after {iterations} iterations (last change {last_change:e})")]
    ConvergenceFailure {
        iterations: usize,
        last_change: f64,
        /// Successive-iterate squared differences, one per inner iteration.
        trace: Vec<f64>,
    },

    #[error("signal is monotone: {0}")]
    Monotone(String),

    #[error("component is not oscillatory: {0}")]
    NotOscillatory(String),

    #[error("inconsistent envelopes at index {index}: upper {upper} < lower {lower}")]
    InconsistentEnvelope { index: usize, upper: f64, lower: f64 },

    #[error("fit failure: {0}")]
    FitFailure(String),

    #[error("multiplicative model requires positive values: {0}")]
    MultiplicativeDomain(String),

    #[error("division by zero actual value at index {0}")]
    DivisionDomain(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("component {index}: {source}")]
    Component {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("every benchmark method failed")]
    BenchmarkFailure,

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// Stable machine-readable category, printed by the CLI on failure.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::NonRealResult { .. } => "non-real-result",
            Error::DegenerateSpectrum(_) => "degenerate-spectrum",
            Error::ConvergenceFailure { .. } => "convergence-failure",
            Error::Monotone(_) => "monotone-signal",
            Error::NotOscillatory(_) => "not-oscillatory",
            Error::InconsistentEnvelope { .. } => "inconsistent-envelope",
            Error::FitFailure(_) => "fit-failure",
            Error::MultiplicativeDomain(_) => "multiplicative-domain",
            Error::DivisionDomain(_) => "division-domain",
            Error::InvalidConfig(_) => "invalid-config",
            Error::Component { source, .. } => source.category(),
            Error::BenchmarkFailure => "benchmark-failure",
            Error::Io(_) => "io",
            Error::Parse { .. } => "parse",
        }
    }

    pub(crate) fn in_component(self, index: usize) -> Self {
        Error::Component {
            index,
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
