//! Numeric CSV: one header row, `,` separator, LF line endings, 17
//! significant digits.

use std::path::Path;

use nalgebra::DVector;

use crate::error::{Error, Result};

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(1, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        kind => Error::Parse { file: path.to_path_buf(), line, message: format!("{kind:?}") },
    }
}

/// Formats `rows` under `header`. Every row must have one value per column.
pub fn format_csv<'a>(header: &[String], rows: impl IntoIterator<Item = &'a [f64]>) -> String {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut record = Vec::new();
    // Writing into a Vec cannot fail.
    writer.write_record(header).expect("in-memory write");
    for row in rows {
        record.clear();
        record.extend(row.iter().map(|v| format!("{v:.16e}")));
        writer.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory write")).expect("ASCII output")
}

pub fn write_csv<'a>(
    path: impl AsRef<Path>,
    header: &[String],
    rows: impl IntoIterator<Item = &'a [f64]>,
) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_csv(header, rows)).map_err(|e| Error::io(path, e))
}

/// Header and rows of a numeric CSV file.
pub fn read_csv(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = reader.headers().map_err(|e| csv_error(path, e))?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let row = record
            .iter()
            .map(|t| {
                t.parse::<f64>().map_err(|_| Error::Parse {
                    file: path.to_path_buf(),
                    line,
                    message: format!("invalid number `{t}`"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// Writes a vector as a single-column CSV named `column`.
pub fn write_vector_csv(path: impl AsRef<Path>, column: &str, v: &DVector<f64>) -> Result<()> {
    write_csv(path, &[column.to_string()], v.as_slice().chunks(1))
}

pub fn read_vector_csv(path: impl AsRef<Path>) -> Result<DVector<f64>> {
    let path = path.as_ref();
    let (header, rows) = read_csv(path)?;
    if header.len() != 1 {
        return Err(Error::Parse {
            file: path.to_path_buf(),
            line: 1,
            message: format!("expected one column, found {}", header.len()),
        });
    }
    Ok(DVector::from_iterator(rows.len(), rows.into_iter().map(|r| r[0])))
}
