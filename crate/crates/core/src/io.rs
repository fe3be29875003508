//! Plain-text artifact helpers.
//!
//! Reals are written with 17 significant digits so every CSV round-trips
//! bit-exactly.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn parse_f64(field: &str, path: &Path) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Input(format!("{}: `{field}` is not a number", path.display())))
}

pub fn write_csv<I, R>(path: &Path, header: &[String], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::Writer::from_writer(BufWriter::new(file));
    writer
        .write_record(header)
        .map_err(|e| Error::csv(path, e))?;
    for row in rows {
        let row: Vec<String> = row.into_iter().collect();
        writer.write_record(&row).map_err(|e| Error::csv(path, e))?;
    }
    writer
        .flush()
        .map_err(|e| Error::io(path, e))
}

/// Header and string rows of a CSV file.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    if !path.exists() {
        return Err(Error::MissingArtifact(path.to_path_buf()));
    }
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(BufReader::new(file));
    let header = reader
        .headers()
        .map_err(|e| Error::csv(path, e))?
        .iter()
        .map(String::from)
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        rows.push(record.iter().map(String::from).collect());
    }
    Ok((header, rows))
}

/// Write a labelled numeric matrix: `label_name,col_1..col_n`.
pub fn write_labeled_matrix(
    path: &Path,
    label_name: &str,
    col_prefix: &str,
    labels: &[String],
    values: &DMatrix<f64>,
) -> Result<()> {
    let header: Vec<String> = std::iter::once(label_name.to_string())
        .chain((1..=values.ncols()).map(|c| format!("{col_prefix}{c}")))
        .collect();
    let rows = labels.iter().enumerate().map(|(r, label)| {
        std::iter::once(label.clone())
            .chain(values.row(r).iter().map(|v| fmt_f64(*v)))
            .collect::<Vec<_>>()
    });
    write_csv(path, &header, rows)
}

/// Inverse of [`write_labeled_matrix`].
pub fn read_labeled_matrix(path: &Path) -> Result<(Vec<String>, DMatrix<f64>)> {
    let (header, rows) = read_csv(path)?;
    let ncols = header.len().saturating_sub(1);
    let mut labels = Vec::with_capacity(rows.len());
    let mut data = Vec::with_capacity(rows.len() * ncols);
    for row in &rows {
        if row.len() != ncols + 1 {
            return Err(Error::Shape(format!(
                "{}: row has {} fields, expected {}",
                path.display(),
                row.len(),
                ncols + 1
            )));
        }
        labels.push(row[0].clone());
        for field in &row[1..] {
            data.push(parse_f64(field, path)?);
        }
    }
    Ok((labels, DMatrix::from_row_slice(rows.len(), ncols, &data)))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}
