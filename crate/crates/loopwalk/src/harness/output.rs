//! Rendering sweep rows to CSV and JSON.
//!
//! All floating-point values go through one formatter (12 significant
//! digits, trailing zeros trimmed) so outputs are byte-stable across runs
//! and worker counts.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::SweepRow;
use crate::noise::NoiseKind;

pub const CSV_HEADER: [&str; 14] = [
    "label", "n", "k", "r", "noise", "P", "delta_phase", "theta", "delta_init", "eta", "t", "te",
    "trace", "mid",
];

pub const DIST_CSV_HEADER: [&str; 4] = ["label", "t", "site", "probability"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format {other:?}"))),
        }
    }
}

pub fn noise_name(kind: NoiseKind) -> &'static str {
    match kind {
        NoiseKind::None => "none",
        NoiseKind::Depolarizing => "depolarizing",
        NoiseKind::Dephasing => "dephasing",
    }
}

/// Shortest fixed-or-scientific rendering with 12 significant digits,
/// matching printf's %.12g.
pub fn format_value(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    // Round to 12 significant digits first; the exponent of the rounded
    // value decides between fixed and scientific notation.
    let sci = format!("{x:.11e}");
    let epos = sci.find('e').expect("scientific formatting always has an exponent");
    let exp: i32 = sci[epos + 1..].parse().expect("exponent is an integer");
    if (-4..12).contains(&exp) {
        let prec = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.prec$}"))
    } else {
        let mantissa = trim_zeros(sci[..epos].to_string());
        format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

fn opt_value(x: Option<f64>) -> String {
    x.map(format_value).unwrap_or_default()
}

fn csv_err(context: &str, e: csv::Error) -> Error {
    Error::io(context.to_string(), io::Error::other(e))
}

/// Write the main table as CSV. An optional comment line (already prefixed
/// with '#') goes above the header.
pub fn write_rows_csv<W: Write>(mut w: W, rows: &[SweepRow], comment: Option<&str>) -> Result<()> {
    if let Some(c) = comment {
        writeln!(w, "{c}").map_err(|e| Error::io("writing csv comment", e))?;
    }
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(CSV_HEADER).map_err(|e| csv_err("writing csv header", e))?;
    for row in rows {
        wtr.write_record(&[
            row.label.clone(),
            row.n.to_string(),
            row.k.to_string(),
            format_value(row.r),
            noise_name(row.noise).to_string(),
            format_value(row.p),
            format_value(row.delta_phase),
            opt_value(row.theta),
            format_value(row.delta_init),
            format_value(row.eta),
            row.record.t.to_string(),
            format_value(row.record.te),
            format_value(row.record.trace),
            opt_value(row.record.mid),
        ])
        .map_err(|e| csv_err("writing csv row", e))?;
    }
    wtr.flush().map_err(|e| Error::io("flushing csv", e))?;
    Ok(())
}

/// Per-site occupation rows for every step that recorded a distribution.
pub fn write_distribution_csv<W: Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(DIST_CSV_HEADER).map_err(|e| csv_err("writing csv header", e))?;
    for row in rows {
        if let Some(dist) = &row.record.distribution {
            for (site, p) in dist.iter().enumerate() {
                wtr.write_record(&[
                    row.label.clone(),
                    row.record.t.to_string(),
                    site.to_string(),
                    format_value(*p),
                ])
                .map_err(|e| csv_err("writing csv row", e))?;
            }
        }
    }
    wtr.flush().map_err(|e| Error::io("flushing csv", e))?;
    Ok(())
}

#[derive(Serialize)]
struct JsonRow<'a> {
    label: &'a str,
    n: usize,
    k: usize,
    r: f64,
    noise: &'a str,
    #[serde(rename = "P")]
    p: f64,
    delta_phase: f64,
    theta: Option<f64>,
    delta_init: f64,
    eta: f64,
    t: usize,
    te: f64,
    trace: f64,
    mid: Option<f64>,
}

#[derive(Serialize)]
struct JsonDistRow<'a> {
    label: &'a str,
    t: usize,
    site: usize,
    probability: f64,
}

/// Write the main table as a JSON array mirroring the CSV columns.
pub fn write_rows_json<W: Write>(mut w: W, rows: &[SweepRow]) -> Result<()> {
    let out: Vec<JsonRow> = rows
        .iter()
        .map(|row| JsonRow {
            label: &row.label,
            n: row.n,
            k: row.k,
            r: row.r,
            noise: noise_name(row.noise),
            p: row.p,
            delta_phase: row.delta_phase,
            theta: row.theta,
            delta_init: row.delta_init,
            eta: row.eta,
            t: row.record.t,
            te: row.record.te,
            trace: row.record.trace,
            mid: row.record.mid,
        })
        .collect();
    serde_json::to_writer_pretty(&mut w, &out)
        .map_err(|e| Error::io("writing json", io::Error::other(e)))?;
    writeln!(w).map_err(|e| Error::io("writing json", e))?;
    Ok(())
}

pub fn write_distribution_json<W: Write>(mut w: W, rows: &[SweepRow]) -> Result<()> {
    let mut out = Vec::new();
    for row in rows {
        if let Some(dist) = &row.record.distribution {
            for (site, p) in dist.iter().enumerate() {
                out.push(JsonDistRow {
                    label: &row.label,
                    t: row.record.t,
                    site,
                    probability: *p,
                });
            }
        }
    }
    serde_json::to_writer_pretty(&mut w, &out)
        .map_err(|e| Error::io("writing json", io::Error::other(e)))?;
    writeln!(w).map_err(|e| Error::io("writing json", e))?;
    Ok(())
}

/// Sibling path for distribution rows: `runs/fig2.csv` -> `runs/fig2.dist.csv`.
pub fn distribution_sibling(path: &Path) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let name = match path.extension().and_then(|s| s.to_str()) {
        Some(ext) => format!("{stem}.dist.{ext}"),
        None => format!("{stem}.dist"),
    };
    path.with_file_name(name)
}

/// Files produced by one write.
#[derive(Debug, Clone)]
pub struct WriteReport {
    pub main: PathBuf,
    pub distribution: Option<PathBuf>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(format!("creating {}", path.display()), e))
}

/// Write rows (and, when any step recorded a distribution, the sibling
/// distribution file) to `path` in the given format.
pub fn write_rows_to_path(
    path: &Path,
    format: OutputFormat,
    rows: &[SweepRow],
    comment: Option<&str>,
) -> Result<WriteReport> {
    match format {
        OutputFormat::Csv => write_rows_csv(create(path)?, rows, comment)?,
        OutputFormat::Json => write_rows_json(create(path)?, rows)?,
    }
    let has_dist = rows.iter().any(|r| r.record.distribution.is_some());
    let distribution = if has_dist {
        let sibling = distribution_sibling(path);
        match format {
            OutputFormat::Csv => write_distribution_csv(create(&sibling)?, rows)?,
            OutputFormat::Json => write_distribution_json(create(&sibling)?, rows)?,
        }
        Some(sibling)
    } else {
        None
    };
    Ok(WriteReport { main: path.to_path_buf(), distribution })
}
