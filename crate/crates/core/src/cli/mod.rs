//! `sgvmd` command line: decompose, forecast, benchmark and synth.

pub mod commands;
pub mod config;
pub mod io;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::envelope::PhaseRounding;
use crate::error::{Error, Result};
use crate::pipeline::Method;
use crate::sgvmd::{Boundary, Threshold};
use config::{RunConfig, ValueColumn};

#[derive(Parser, Debug)]
#[command(name = "sgvmd", version, about = "Sequential mode decomposition and decomposition-based forecasting")]
pub struct Cli {
    /// TOML run configuration; flags override its values
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing)
    #[arg(long, short = 'o', global = true)]
    pub output_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Split a series into modes and a residual
    Decompose {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        sgvmd: SgvmdArgs,
    },
    /// Forecast the test segment with one method and score it
    Forecast {
        #[command(flatten)]
        input: InputArgs,
        /// arima, holt-winters, emd-arima, sgvmd-arima or sgvmd-e-arima
        #[arg(long)]
        method: Method,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sgvmd: SgvmdArgs,
    },
    /// Score every configured method on the same split
    Benchmark {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated subset of methods
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<Method>>,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sgvmd: SgvmdArgs,
    },
    /// Write a seeded trend-plus-tones series and its true components
    Synth {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n: Option<usize>,
        /// Number of AM tones
        #[arg(long)]
        tones: Option<usize>,
        #[arg(long)]
        noise: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        offset: Option<f64>,
        /// File name inside the output directory
        #[arg(long, default_value = "synth.csv")]
        name: String,
    },
}

#[derive(Args, Debug, Default)]
pub struct InputArgs {
    /// Delimited text file, one observation per row
    #[arg(long, short = 'i')]
    pub input: Option<PathBuf>,
    /// Value column: header name, 0-based index, or "auto"
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long)]
    pub delimiter: Option<char>,
    /// The first row holds data, not column names
    #[arg(long)]
    pub no_header: bool,
}

#[derive(Args, Debug, Default)]
pub struct ModelArgs {
    #[arg(long)]
    pub split_ratio: Option<f64>,
    #[arg(long)]
    pub max_p: Option<usize>,
    #[arg(long)]
    pub max_q: Option<usize>,
    /// Differencing order for every ARIMA fit
    #[arg(long)]
    pub d: Option<usize>,
    /// Holt-Winters season length
    #[arg(long)]
    pub season_length: Option<usize>,
    #[arg(long)]
    pub emd_max_imfs: Option<usize>,
    /// Carrier phase continuation: none or round-to-cycle
    #[arg(long)]
    pub phase_rounding: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct SgvmdArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Residual-energy stop, relative to the record's energy about its mean
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub max_modes: Option<usize>,
    /// periodic, mirror or linear-prediction
    #[arg(long)]
    pub boundary: Option<String>,
}

fn parse_kebab<T: serde::de::DeserializeOwned>(what: &str, s: &str) -> Result<T> {
    T::deserialize(serde::de::value::StrDeserializer::<serde::de::value::Error>::new(s))
        .map_err(|_| Error::InvalidConfig(format!("unknown {what} '{s}'")))
}

impl InputArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(p) = &self.input {
            cfg.input.path = Some(p.clone());
        }
        if let Some(c) = &self.column {
            cfg.input.value_column = ValueColumn::parse(c);
        }
        if let Some(d) = self.delimiter {
            cfg.input.delimiter = d;
        }
        if self.no_header {
            cfg.input.has_header = false;
        }
    }
}

impl ModelArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        let b = &mut cfg.benchmark;
        if let Some(v) = self.split_ratio {
            b.split_ratio = v;
        }
        if let Some(v) = self.max_p {
            b.arima_search.max_p = v;
        }
        if let Some(v) = self.max_q {
            b.arima_search.max_q = v;
        }
        if let Some(v) = self.d {
            b.arima_search.d = v;
        }
        if let Some(m) = self.season_length {
            match &mut b.holt_winters {
                Some(hw) => hw.season_length = m,
                None => b.holt_winters = Some(crate::forecasting::HoltWintersParams::with_season_length(m)),
            }
        }
        if let Some(v) = self.emd_max_imfs {
            b.emd_max_imfs = v;
        }
        if let Some(s) = &self.phase_rounding {
            b.phase_rounding = parse_kebab::<PhaseRounding>("phase rounding", s)?;
        }
        Ok(())
    }
}

impl SgvmdArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        let p = &mut cfg.benchmark.sgvmd;
        if let Some(v) = self.alpha {
            p.alpha = v;
        }
        if let Some(v) = self.beta {
            p.beta = v;
        }
        if let Some(v) = self.epsilon {
            p.epsilon = Threshold::Relative(v);
        }
        if let Some(v) = self.max_modes {
            p.max_modes = v;
        }
        if let Some(s) = &self.boundary {
            p.boundary = parse_kebab::<Boundary>("boundary", s)?;
        }
        Ok(())
    }
}

impl Cli {
    /// Config file first, then flags on top.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(dir) = &self.output_dir {
            cfg.output.dir = dir.clone();
        }
        match &self.command {
            Command::Decompose { input, sgvmd } => {
                input.apply(&mut cfg);
                sgvmd.apply(&mut cfg)?;
            }
            Command::Forecast { input, model, sgvmd, .. } => {
                input.apply(&mut cfg);
                model.apply(&mut cfg)?;
                sgvmd.apply(&mut cfg)?;
            }
            Command::Benchmark { input, methods, model, sgvmd } => {
                input.apply(&mut cfg);
                model.apply(&mut cfg)?;
                sgvmd.apply(&mut cfg)?;
                if let Some(m) = methods {
                    cfg.benchmark.methods = m.clone();
                }
            }
            Command::Synth { seed, n, tones, noise, offset, .. } => {
                if let Some(v) = seed {
                    cfg.seed = *v;
                }
                if let Some(v) = n {
                    cfg.synth.n = *v;
                }
                if let Some(v) = tones {
                    cfg.synth.tones = *v;
                }
                if let Some(v) = noise {
                    cfg.synth.noise_std = *v;
                }
                if let Some(v) = offset {
                    cfg.synth.offset = *v;
                }
            }
        }
        Ok(cfg)
    }

    pub fn run(&self) -> Result<Vec<PathBuf>> {
        let cfg = self.resolve()?;
        match &self.command {
            Command::Decompose { .. } => commands::cmd_decompose(&cfg),
            Command::Forecast { method, .. } => commands::cmd_forecast(&cfg, *method),
            Command::Benchmark { .. } => commands::cmd_benchmark(&cfg),
            Command::Synth { name, .. } => commands::cmd_synth(&cfg, name),
        }
    }
}

/// Parses arguments, runs, and maps failures to a one-line
/// `error: <category>: <message>` on stderr with exit code 1.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match cli.run() {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("error: {}: {message}", e.category());
            1
        }
    }
}
