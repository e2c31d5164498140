use std::path::{Path, PathBuf};

use crate::cli::config::RunConfig;
use crate::cli::io::{fmt_f64, ingest, write_series, write_table, write_text};
use crate::error::{Error, Result};
use crate::pipeline::{run_benchmark, run_method, split, ForecastReport, Method, MethodOutcome};
use crate::series::TimeSeries;
use crate::sgvmd::{decompose, frequency_to_bins};
use crate::synth::generate;

fn output_dir(cfg: &RunConfig) -> Result<&Path> {
    let dir = cfg.output.dir.as_path();
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn load_input(cfg: &RunConfig) -> Result<TimeSeries> {
    let path = cfg
        .input
        .path
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("no input file given".into()))?;
    ingest(path, &cfg.input)
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// `mode_<k>.csv` per mode, `residual.csv`, and `summary.csv`.
pub fn cmd_decompose(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let series = load_input(cfg)?;
    let dir = output_dir(cfg)?;
    let result = decompose(&series, &cfg.benchmark.sgvmd)?;
    if result.truncated {
        log::warn!(
            "stopped at {} modes with residual energy {:e} above epsilon",
            result.modes.len(),
            result.residual_energy
        );
    }
    let total = series.energy();
    let share = |e: f64| if total > 0.0 { e / total } else { 0.0 };
    let n = series.len();

    let mut files = Vec::new();
    let mut rows = Vec::new();
    for (i, mode) in result.modes.iter().enumerate() {
        let path = dir.join(format!("mode_{}.csv", i + 1));
        write_series(&path, mode.signal.values())?;
        files.push(path);
        let energy = mode.signal.energy();
        rows.push(vec![
            format!("mode-{}", i + 1),
            mode.kind.as_str().to_string(),
            fmt_f64(mode.center_frequency),
            fmt_f64(frequency_to_bins(mode.center_frequency, n)),
            fmt_f64(energy),
            fmt_f64(share(energy)),
            mode.iterations.to_string(),
        ]);
    }
    let path = dir.join("residual.csv");
    write_series(&path, result.residual.values())?;
    files.push(path);
    let energy = result.residual.energy();
    rows.push(vec![
        "residual".into(),
        "residual".into(),
        String::new(),
        String::new(),
        fmt_f64(energy),
        fmt_f64(share(energy)),
        String::new(),
    ]);
    let path = dir.join("summary.csv");
    write_table(
        &path,
        &["component", "kind", "center_frequency", "center_bin", "energy", "energy_share", "iterations"],
        &rows,
    )?;
    files.push(path);
    Ok(files)
}

fn metric_row(r: &ForecastReport) -> Vec<String> {
    vec![
        r.method.to_string(),
        fmt_f64(r.rmse),
        opt_f64(r.mape),
        fmt_f64(r.mae),
    ]
}

/// `predictions.csv`, `metrics.csv`, `plot.csv`, and for decomposition
/// methods `components.csv` plus `components_summary.csv`.
pub fn cmd_forecast(cfg: &RunConfig, method: Method) -> Result<Vec<PathBuf>> {
    let series = load_input(cfg)?;
    let mut bench = cfg.benchmark.clone();
    bench.methods = vec![method];
    bench.validate()?;
    let (train, test) = split(&series, bench.split_ratio)?;
    let forecast = run_method(method, &train, test.len(), &bench)?;
    let report = ForecastReport::evaluate(forecast, &test)?;
    let dir = output_dir(cfg)?;
    let offset = train.len();
    let mut files = Vec::new();

    let rows: Vec<Vec<String>> = (0..test.len())
        .map(|h| {
            let (a, p) = (report.actuals[h], report.predictions[h]);
            vec![(offset + h).to_string(), fmt_f64(a), fmt_f64(p), fmt_f64(a - p)]
        })
        .collect();
    let path = dir.join("predictions.csv");
    write_table(&path, &["index", "actual", "predicted", "error"], &rows)?;
    files.push(path);

    let path = dir.join("metrics.csv");
    write_table(&path, &["method", "rmse", "mape", "mae"], &[metric_row(&report)])?;
    files.push(path);

    let rows: Vec<Vec<String>> = (0..series.len())
        .map(|t| {
            if t < offset {
                vec![t.to_string(), fmt_f64(series[t]), String::new(), String::new()]
            } else {
                let h = t - offset;
                vec![t.to_string(), String::new(), fmt_f64(series[t]), fmt_f64(report.predictions[h])]
            }
        })
        .collect();
    let path = dir.join("plot.csv");
    write_table(&path, &["index", "train", "test", "predicted"], &rows)?;
    files.push(path);

    if let Some(components) = &report.per_component_detail {
        let mut header = vec!["index".to_string()];
        header.extend(components.iter().map(|c| c.label.clone()));
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows: Vec<Vec<String>> = (0..test.len())
            .map(|h| {
                let mut row = vec![(offset + h).to_string()];
                row.extend(components.iter().map(|c| fmt_f64(c.forecast[h])));
                row
            })
            .collect();
        let path = dir.join("components.csv");
        write_table(&path, &header, &rows)?;
        files.push(path);

        let rows: Vec<Vec<String>> = components
            .iter()
            .map(|c| {
                vec![
                    c.label.clone(),
                    c.kind.map(|k| k.as_str().to_string()).unwrap_or_default(),
                    opt_f64(c.center_frequency),
                    c.path.to_string(),
                ]
            })
            .collect();
        let path = dir.join("components_summary.csv");
        write_table(&path, &["component", "kind", "center_frequency", "model"], &rows)?;
        files.push(path);
    }
    Ok(files)
}

type MetricGetter = fn(&ForecastReport) -> Option<f64>;

/// For each outcome, the metric columns where it is smallest (ties share).
fn best_marks(outcomes: &[MethodOutcome]) -> Vec<Vec<&'static str>> {
    let metrics: [(&str, MetricGetter); 3] = [
        ("rmse", |r| Some(r.rmse)),
        ("mape", |r| r.mape),
        ("mae", |r| Some(r.mae)),
    ];
    let mut marks = vec![Vec::new(); outcomes.len()];
    for (name, get) in metrics {
        let values: Vec<Option<f64>> = outcomes
            .iter()
            .map(|o| o.result.as_ref().ok().and_then(get))
            .collect();
        let best = values.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        for (i, v) in values.iter().enumerate() {
            if *v == Some(best) {
                marks[i].push(name);
            }
        }
    }
    marks
}

fn human_table(outcomes: &[MethodOutcome], marks: &[Vec<&str>]) -> String {
    let cell = |v: Option<f64>, best: bool| match v {
        Some(v) => format!("{v:.6}{}", if best { "*" } else { " " }),
        None => "-".to_string(),
    };
    let mut out = format!("{:<16}{:>20}{:>20}{:>20}\n", "Model", "RMSE", "MAPE", "MAE");
    for (o, m) in outcomes.iter().zip(marks) {
        match &o.result {
            Ok(r) => out += &format!(
                "{:<16}{:>20}{:>20}{:>20}\n",
                o.method.as_str(),
                cell(Some(r.rmse), m.contains(&"rmse")),
                cell(r.mape, m.contains(&"mape")),
                cell(Some(r.mae), m.contains(&"mae")),
            ),
            Err(e) => out += &format!("{:<16}  failed: {}\n", o.method.as_str(), e.category()),
        }
    }
    out += "* best in column\n";
    out
}

/// `metrics.csv` (delimited), `metrics.txt` (aligned, best marked) and
/// `predictions.csv` with one column per successful method.
pub fn cmd_benchmark(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let series = load_input(cfg)?;
    let outcomes = run_benchmark(&series, &cfg.benchmark)?;
    let dir = output_dir(cfg)?;
    let marks = best_marks(&outcomes);
    let mut files = Vec::new();

    let rows: Vec<Vec<String>> = outcomes
        .iter()
        .zip(&marks)
        .map(|(o, m)| match &o.result {
            Ok(r) => {
                let mut row = metric_row(r);
                row.insert(1, "ok".into());
                row.push(m.join(";"));
                row
            }
            Err(e) => vec![
                o.method.to_string(),
                format!("failed:{}", e.category()),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ],
        })
        .collect();
    let path = dir.join("metrics.csv");
    write_table(&path, &["method", "status", "rmse", "mape", "mae", "best"], &rows)?;
    files.push(path);

    let path = dir.join("metrics.txt");
    write_text(&path, &human_table(&outcomes, &marks))?;
    files.push(path);

    let ok: Vec<&ForecastReport> = outcomes.iter().filter_map(|o| o.result.as_ref().ok()).collect();
    let actuals = &ok[0].actuals;
    let offset = series.len() - actuals.len();
    let mut header = vec!["index".to_string(), "actual".to_string()];
    header.extend(ok.iter().map(|r| r.method.to_string()));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = (0..actuals.len())
        .map(|h| {
            let mut row = vec![(offset + h).to_string(), fmt_f64(actuals[h])];
            row.extend(ok.iter().map(|r| fmt_f64(r.predictions[h])));
            row
        })
        .collect();
    let path = dir.join("predictions.csv");
    write_table(&path, &header, &rows)?;
    files.push(path);
    Ok(files)
}

/// The series, `<stem>.components.csv` with the exact parts, and
/// `<stem>.params.csv` with the generating parameters.
pub fn cmd_synth(cfg: &RunConfig, name: &str) -> Result<Vec<PathBuf>> {
    let s = generate(&cfg.synth, cfg.seed)?;
    let dir = output_dir(cfg)?;
    let stem = Path::new(name)
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::InvalidConfig(format!("bad output name '{name}'")))?;
    let mut files = Vec::new();

    let path = dir.join(name);
    write_series(&path, s.series.values())?;
    files.push(path);

    let mut header = vec!["index".to_string(), "trend".to_string()];
    header.extend((1..=s.tones.len()).map(|k| format!("tone_{k}")));
    header.push("noise".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = (0..s.series.len())
        .map(|t| {
            let mut row = vec![t.to_string()];
            row.extend(s.components.iter().map(|c| fmt_f64(c[t])));
            row.push(fmt_f64(s.noise[t]));
            row
        })
        .collect();
    let path = dir.join(format!("{stem}.components.csv"));
    write_table(&path, &header, &rows)?;
    files.push(path);

    let p = &cfg.synth;
    let mut rows: Vec<Vec<String>> = vec![
        vec!["series".into(), "seed".into(), cfg.seed.to_string()],
        vec!["series".into(), "n".into(), p.n.to_string()],
        vec!["series".into(), "noise_std".into(), fmt_f64(p.noise_std)],
        vec!["trend".into(), "offset".into(), fmt_f64(p.offset)],
        vec!["trend".into(), "scale".into(), fmt_f64(p.trend_scale)],
    ];
    for (i, c) in s.trend_coefficients.iter().enumerate() {
        rows.push(vec!["trend".into(), format!("c{i}"), fmt_f64(*c)]);
    }
    for (k, tone) in s.tones.iter().enumerate() {
        let label = format!("tone_{}", k + 1);
        rows.push(vec![label.clone(), "bin".into(), tone.bin.to_string()]);
        for (name, v) in [
            ("frequency", tone.frequency),
            ("amplitude", tone.amplitude),
            ("depth", tone.depth),
            ("modulation_cycles", tone.modulation_cycles),
            ("modulation_phase", tone.modulation_phase),
            ("carrier_phase", tone.carrier_phase),
        ] {
            rows.push(vec![label.clone(), name.into(), fmt_f64(v)]);
        }
    }
    let path = dir.join(format!("{stem}.params.csv"));
    write_table(&path, &["component", "parameter", "value"], &rows)?;
    files.push(path);
    Ok(files)
}
