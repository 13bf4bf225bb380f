//! CSV files. Headers are always written; reals use 17 significant digits
//! so every double survives a round trip.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use vds_core::Complex64;

use crate::error::{HarnessError, Result};

/// 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn finish(path: &Path, mut w: csv::Writer<BufWriter<File>>) -> Result<()> {
    w.flush().map_err(|e| HarnessError::io(path, e))
}

/// Writes `header` then `rows`, each already formatted.
pub fn write_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(header).map_err(|e| HarnessError::csv(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| HarnessError::csv(path, e))?;
    }
    finish(path, w)
}

/// Reads a headed CSV, checking the header, and returns the data rows.
pub fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| HarnessError::csv(path, e))?;
    let found = r.headers().map_err(|e| HarnessError::csv(path, e))?.clone();
    if found.iter().collect::<Vec<_>>() != header {
        return Err(HarnessError::parse(
            path.display().to_string(),
            1,
            format!("expected header `{}`", header.join(",")),
        ));
    }
    r.records().collect::<Result<_, _>>().map_err(|e| HarnessError::csv(path, e))
}

fn field<T: std::str::FromStr>(path: &Path, row: usize, record: &csv::StringRecord, k: usize) -> Result<T> {
    let text = record.get(k).unwrap_or("");
    text.parse()
        .map_err(|_| HarnessError::parse(path.display().to_string(), row + 2, format!("cannot parse `{text}`")))
}

/// Indexed reals: column 0 must run 0, 1, 2, … in order.
fn read_indexed<T>(path: &Path, header: &[&str], mut value: impl FnMut(usize, &csv::StringRecord) -> Result<T>) -> Result<Vec<T>> {
    let rows = read_rows(path, header)?;
    let mut out = Vec::with_capacity(rows.len());
    for (k, record) in rows.iter().enumerate() {
        let index: usize = field(path, k, record, 0)?;
        if index != k {
            return Err(HarnessError::parse(path.display().to_string(), k + 2, format!("index {index}, expected {k}")));
        }
        out.push(value(k, record)?);
    }
    Ok(out)
}

pub fn write_profile(path: &Path, p: &[f64]) -> Result<()> {
    write_rows(path, &["index", "p"], p.iter().enumerate().map(|(i, v)| vec![i.to_string(), fmt_real(*v)]))
}

pub fn read_profile(path: &Path) -> Result<Vec<f64>> {
    read_indexed(path, &["index", "p"], |k, r| field(path, k, r, 1))
}

/// Profiles for several budgets in long form `(m, index, p)`.
pub fn write_profiles_long(path: &Path, profiles: &[(usize, Vec<f64>)]) -> Result<()> {
    let rows = profiles.iter().flat_map(|(m, p)| {
        p.iter().enumerate().map(move |(i, v)| vec![m.to_string(), i.to_string(), fmt_real(*v)])
    });
    write_rows(path, &["m", "index", "p"], rows)
}

pub fn write_signal(path: &Path, x: &[Complex64]) -> Result<()> {
    write_rows(
        path,
        &["index", "re", "im"],
        x.iter().enumerate().map(|(i, v)| vec![i.to_string(), fmt_real(v.re), fmt_real(v.im)]),
    )
}

pub fn read_signal(path: &Path) -> Result<Vec<Complex64>> {
    read_indexed(path, &["index", "re", "im"], |k, r| Ok(Complex64::new(field(path, k, r, 1)?, field(path, k, r, 2)?)))
}

pub fn write_indices(path: &Path, omega: &[usize]) -> Result<()> {
    write_rows(path, &["index"], omega.iter().map(|i| vec![i.to_string()]))
}

/// Named real columns sharing an index column.
pub fn write_columns(path: &Path, names: &[&str], columns: &[&[f64]]) -> Result<()> {
    let n = columns.first().map_or(0, |c| c.len());
    let mut header = vec!["index"];
    header.extend_from_slice(names);
    write_rows(path, &header, (0..n).map(|i| {
        let mut row = vec![i.to_string()];
        row.extend(columns.iter().map(|c| fmt_real(c[i])));
        row
    }))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| HarnessError::io(path, e))
}
