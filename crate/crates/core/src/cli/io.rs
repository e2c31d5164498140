//! Delimited-text ingestion and output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::cli::config::{InputOptions, ValueColumn};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Fewest usable rows any command accepts. Forecasting and benchmarking
/// additionally need the split guards to hold.
pub const MIN_ROWS: usize = 120;

/// Reads one value per row from the configured column.
pub fn ingest(path: &Path, options: &InputOptions) -> Result<TimeSeries> {
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ingest_reader(file, options)
}

pub fn ingest_reader<R: std::io::Read>(reader: R, options: &InputOptions) -> Result<TimeSeries> {
    if !options.delimiter.is_ascii() {
        return Err(Error::InvalidConfig(format!(
            "delimiter must be a single ASCII character, got {:?}",
            options.delimiter
        )));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(options.delimiter as u8)
        .has_headers(options.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let header: Option<Vec<String>> = if options.has_header {
        let h = rdr.headers().map_err(|e| csv_error(&e))?;
        Some(h.iter().map(str::to_string).collect())
    } else {
        None
    };
    let fixed = match (&options.value_column, &header) {
        (ValueColumn::Index(i), _) => Some(*i),
        (ValueColumn::Name(name), Some(h)) => Some(h.iter().position(|c| c == name).ok_or_else(|| {
            Error::InvalidInput(format!("no column named '{name}' in header {h:?}"))
        })?),
        (ValueColumn::Name(name), None) => {
            return Err(Error::InvalidInput(format!(
                "column '{name}' requested but the file has no header"
            )))
        }
        (ValueColumn::Auto, Some(h)) => h.iter().position(|c| c == "value"),
        (ValueColumn::Auto, None) => None,
    };

    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(&e))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.iter().all(|c| c.is_empty()) {
            continue;
        }
        let col = fixed.unwrap_or(record.len() - 1);
        let cell = record.get(col).ok_or_else(|| Error::Parse {
            line,
            message: format!("row has {} columns, column {col} missing", record.len()),
        })?;
        let v: f64 = cell.parse().map_err(|_| Error::Parse {
            line,
            message: format!("'{cell}' is not a number"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                line,
                message: format!("'{cell}' is not finite"),
            });
        }
        values.push(v);
    }
    if values.len() < MIN_ROWS {
        return Err(Error::InvalidInput(format!(
            "{} usable rows, need at least {MIN_ROWS}",
            values.len()
        )));
    }
    TimeSeries::new(values)
}

fn csv_error(e: &csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

/// Exact, locale-free float text: 17 significant digits round-trip.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a header line and rows of cells, comma-delimited.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    writeln!(w, "{}", header.join(",")).map_err(io)?;
    for row in rows {
        writeln!(w, "{}", row.join(",")).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// `index,value` rows.
pub fn write_series(path: &Path, values: &[f64]) -> Result<()> {
    let rows: Vec<Vec<String>> = values
        .iter()
        .enumerate()
        .map(|(i, v)| vec![i.to_string(), fmt_f64(*v)])
        .collect();
    write_table(path, &["index", "value"], &rows)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> InputOptions {
        InputOptions::default()
    }

    fn rows(n: usize, f: impl Fn(usize) -> String) -> String {
        (0..n).map(|i| f(i) + "\n").collect()
    }

    #[test]
    fn single_column_without_header() {
        let text = rows(1000, |i| format!("{}", i as f64 * 0.5));
        let o = InputOptions {
            has_header: false,
            ..opts()
        };
        let s = ingest_reader(text.as_bytes(), &o).unwrap();
        assert_eq!(s.len(), 1000);
        assert_eq!(s[3], 1.5);
    }

    #[test]
    fn column_by_index_and_name() {
        let text = "a,b,c\n".to_string() + &rows(150, |i| format!("x,{i},{}", 2 * i));
        let o = InputOptions {
            value_column: ValueColumn::Index(2),
            ..opts()
        };
        assert_eq!(ingest_reader(text.as_bytes(), &o).unwrap()[10], 20.0);
        let o = InputOptions {
            value_column: ValueColumn::Name("b".into()),
            ..opts()
        };
        assert_eq!(ingest_reader(text.as_bytes(), &o).unwrap()[10], 10.0);
        let o = InputOptions {
            value_column: ValueColumn::Name("z".into()),
            ..opts()
        };
        assert!(matches!(ingest_reader(text.as_bytes(), &o), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn auto_prefers_value_header() {
        let text = "value,other\n".to_string() + &rows(130, |i| format!("{i},-1"));
        assert_eq!(ingest_reader(text.as_bytes(), &opts()).unwrap()[5], 5.0);
        let text = "t,y\n".to_string() + &rows(130, |i| format!("0,{i}"));
        assert_eq!(ingest_reader(text.as_bytes(), &opts()).unwrap()[5], 5.0);
    }

    #[test]
    fn bad_cell_names_its_line() {
        let mut text = "value\n".to_string() + &rows(200, |i| i.to_string());
        text = text.replacen("\n5\n", "\nabc\n", 1);
        match ingest_reader(text.as_bytes(), &opts()) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 7);
                assert!(message.contains("abc"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn too_few_rows() {
        let text = "value\n".to_string() + &rows(119, |i| i.to_string());
        assert!(matches!(ingest_reader(text.as_bytes(), &opts()), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn float_text_round_trips() {
        for v in [0.1, -3.25e-300, 1.0 / 3.0, 12345.678901234] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(4.0), "4.0000000000000000e0");
    }
}
