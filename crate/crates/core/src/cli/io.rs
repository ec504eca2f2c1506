//! Signal and table ingestion (CSV, WAV) and CSV output.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::CliError;

/// Relative tolerance on the spacing of a time column.
const SPACING_TOL: f64 = 1e-9;

/// Formats with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_row(rec: &csv::StringRecord) -> Option<Vec<f64>> {
    rec.iter().map(|f| f.trim().parse::<f64>().ok()).collect()
}

/// Reads a numeric CSV table. A first row that does not parse as numbers is
/// taken as a header and returned separately.
pub fn read_table(path: &Path) -> Result<(Option<Vec<String>>, Vec<Vec<f64>>), CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::io(path, e))?;
    let mut header = None;
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::io(path, e))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        match parse_row(&rec) {
            Some(r) => rows.push(r),
            None if line == 0 => header = Some(rec.iter().map(|s| s.to_ascii_lowercase()).collect()),
            None => {
                return Err(CliError::Input(format!(
                    "{}: line {} is not numeric",
                    path.display(),
                    line + 1
                )))
            }
        }
    }
    if let Some(w) = rows.first().map(Vec::len) {
        if let Some(i) = rows.iter().position(|r| r.len() != w) {
            return Err(CliError::Input(format!(
                "{}: row {} has {} columns, expected {w}",
                path.display(),
                i + 1,
                rows[i].len()
            )));
        }
    }
    Ok((header, rows))
}

/// One sample per line (optional `value` header), or `time,value` with a
/// uniformly spaced time column.
pub fn read_signal_csv(path: &Path) -> Result<Vec<f64>, CliError> {
    let (_, rows) = read_table(path)?;
    let width = rows.first().map_or(1, Vec::len);
    match width {
        1 => Ok(rows.into_iter().map(|r| r[0]).collect()),
        2 => {
            let t: Vec<f64> = rows.iter().map(|r| r[0]).collect();
            if t.len() >= 2 {
                let step = t[1] - t[0];
                if !(step > 0.0) {
                    return Err(CliError::Input(format!("{}: time column must increase", path.display())));
                }
                for (i, w) in t.windows(2).enumerate() {
                    if ((w[1] - w[0]) - step).abs() > SPACING_TOL * step.abs() {
                        return Err(CliError::Input(format!(
                            "{}: non-uniform time column at row {}",
                            path.display(),
                            i + 2
                        )));
                    }
                }
            }
            Ok(rows.into_iter().map(|r| r[1]).collect())
        }
        w => Err(CliError::Input(format!(
            "{}: expected 1 or 2 columns, found {w}",
            path.display()
        ))),
    }
}

/// PCM 16-bit mono WAV scaled to `[-1, 1)`.
pub fn read_wav(path: &Path) -> Result<Vec<f64>, CliError> {
    let mut rdr = hound::WavReader::open(path).map_err(|e| CliError::io(path, e))?;
    let spec = rdr.spec();
    if spec.channels != 1 || spec.bits_per_sample != 16 || spec.sample_format != hound::SampleFormat::Int {
        return Err(CliError::Input(format!(
            "{}: unsupported WAV encoding ({} channels, {} bits, {:?}); need PCM 16-bit mono",
            path.display(),
            spec.channels,
            spec.bits_per_sample,
            spec.sample_format
        )));
    }
    rdr.samples::<i16>()
        .map(|s| s.map(|v| v as f64 / 32768.0).map_err(|e| CliError::io(path, e)))
        .collect()
}

/// Dispatches on the file extension.
pub fn read_signal(path: &Path) -> Result<Vec<f64>, CliError> {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("wav") => read_wav(path),
        _ => read_signal_csv(path),
    }
}

/// Writes columns side by side under `header`.
pub fn write_columns(path: &Path, header: &[String], columns: &[&[f64]]) -> Result<(), CliError> {
    let rows = columns.first().map_or(0, |c| c.len());
    let mut out = String::with_capacity(rows * columns.len() * 25);
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..rows {
        for (j, c) in columns.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&fmt_value(c[i]));
        }
        out.push('\n');
    }
    write_file(path, out.as_bytes())
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(bytes).map_err(|e| CliError::io(path, e))
}
