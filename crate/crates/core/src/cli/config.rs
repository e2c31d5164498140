//! Run configuration: a TOML file with dotted sections, overridden field by
//! field from the command line.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::BenchmarkConfig;
use crate::synth::SynthParams;

/// Column holding the values: a header name or a 0-based index.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueColumn {
    /// The `value` column if the header has one, else the last column.
    #[default]
    Auto,
    Index(usize),
    Name(String),
}

impl ValueColumn {
    pub fn parse(s: &str) -> Self {
        match s.parse::<usize>() {
            Ok(i) => ValueColumn::Index(i),
            Err(_) if s == "auto" => ValueColumn::Auto,
            Err(_) => ValueColumn::Name(s.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputOptions {
    pub path: Option<PathBuf>,
    #[serde(deserialize_with = "column_from_toml")]
    pub value_column: ValueColumn,
    pub delimiter: char,
    pub has_header: bool,
}

fn column_from_toml<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<ValueColumn, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Index(usize),
        Name(String),
    }
    Ok(match Raw::deserialize(d)? {
        Raw::Index(i) => ValueColumn::Index(i),
        Raw::Name(s) => ValueColumn::parse(&s),
    })
}

impl Default for InputOptions {
    fn default() -> Self {
        InputOptions {
            path: None,
            value_column: ValueColumn::Auto,
            delimiter: ',',
            has_header: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputOptions {
    pub dir: PathBuf,
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions { dir: PathBuf::from("out") }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: InputOptions,
    pub output: OutputOptions,
    /// Seed for synthetic data.
    pub seed: u64,
    pub benchmark: BenchmarkConfig,
    pub synth: SynthParams,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start].matches('\n').count() + 1)
                .unwrap_or(0);
            Error::Parse {
                line,
                message: e.message().to_string(),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}
