//! Matrix Market exchange format, dense real matrices.
//!
//! Both `array` and `coordinate` layouts are read, with `general`,
//! `symmetric` or `skew-symmetric` storage and `real`, `double` or
//! `integer` fields. Symmetric storage is expanded on read. Matrices are
//! written as `array real general` with 17 significant digits, so a write
//! followed by a read reproduces every entry exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Array,
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix_market(&text, path)
}

/// Parses Matrix Market text; `origin` is only used in error messages.
pub fn parse_matrix_market(text: &str, origin: &Path) -> Result<DMatrix<f64>> {
    let fail = |line: usize, message: String| Error::Parse { file: origin.to_path_buf(), line, message };

    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| fail(1, "empty file".into()))?;
    let (layout, symmetry) = parse_header(header).map_err(|m| fail(1, m))?;

    // Remaining whitespace-separated tokens, tagged with their line number.
    let mut tokens = lines
        .filter(|(_, l)| !l.trim_start().starts_with('%'))
        .flat_map(|(n, l)| l.split_whitespace().map(move |t| (n, t)));
    let last_line = text.lines().count().max(1);

    let mut next_usize = |what: &str| -> Result<(usize, usize)> {
        let (n, tok) = tokens.next().ok_or_else(|| fail(last_line, format!("missing {what}")))?;
        tok.parse::<usize>().map(|v| (n, v)).map_err(|_| fail(n, format!("invalid {what} `{tok}`")))
    };
    let (_, rows) = next_usize("row count")?;
    let (size_line, cols) = next_usize("column count")?;
    if symmetry != Symmetry::General && rows != cols {
        return Err(fail(size_line, format!("{rows}x{cols} matrix cannot use symmetric storage")));
    }
    let nnz = match layout {
        Layout::Coordinate => Some(next_usize("entry count")?.1),
        Layout::Array => None,
    };

    let mut next_f64 = |what: &str| -> Result<(usize, f64)> {
        let (n, tok) = tokens.next().ok_or_else(|| fail(last_line, format!("missing {what}")))?;
        let v = tok.parse::<f64>().map_err(|_| fail(n, format!("invalid {what} `{tok}`")))?;
        if !v.is_finite() {
            return Err(fail(n, format!("non-finite {what} `{tok}`")));
        }
        Ok((n, v))
    };

    let mut a = DMatrix::zeros(rows, cols);
    let place = |a: &mut DMatrix<f64>, i: usize, j: usize, v: f64| match symmetry {
        Symmetry::General => a[(i, j)] = v,
        Symmetry::Symmetric => {
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
        Symmetry::Skew => {
            a[(i, j)] = v;
            a[(j, i)] = -v;
        }
    };

    match nnz {
        None => {
            for j in 0..cols {
                let start = match symmetry {
                    Symmetry::General => 0,
                    Symmetry::Symmetric => j,
                    Symmetry::Skew => j + 1,
                };
                for i in start..rows {
                    let (_, v) = next_f64("value")?;
                    place(&mut a, i, j, v);
                }
            }
        }
        Some(nnz) => {
            for _ in 0..nnz {
                let (n, i) = next_f64("row index")?;
                let (_, j) = next_f64("column index")?;
                let (_, v) = next_f64("value")?;
                let index = |x: f64, bound: usize| {
                    (x.fract() == 0.0 && x >= 1.0 && x <= bound as f64).then_some(x as usize - 1)
                };
                let (Some(i), Some(j)) = (index(i, rows), index(j, cols)) else {
                    return Err(fail(n, format!("entry ({i}, {j}) outside a {rows}x{cols} matrix")));
                };
                match symmetry {
                    Symmetry::Symmetric if i < j => {
                        return Err(fail(n, "symmetric storage expects the lower triangle".into()))
                    }
                    Symmetry::Skew if i <= j => {
                        return Err(fail(n, "skew-symmetric storage expects the strict lower triangle".into()))
                    }
                    _ => {}
                }
                place(&mut a, i, j, v);
            }
        }
    }
    if let Some((n, tok)) = tokens.next() {
        return Err(fail(n, format!("unexpected trailing data `{tok}`")));
    }
    Ok(a)
}

fn parse_header(header: &str) -> std::result::Result<(Layout, Symmetry), String> {
    let words: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(format!("expected `%%MatrixMarket matrix <format> real <symmetry>`, found `{header}`"));
    }
    let layout = match words[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(format!("unsupported format `{other}`")),
    };
    if !matches!(words[3].as_str(), "real" | "double" | "integer") {
        return Err(format!("unsupported field `{}`, only real data is read", words[3]));
    }
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::Skew,
        other => return Err(format!("unsupported symmetry `{other}`")),
    };
    Ok((layout, symmetry))
}

pub fn format_matrix_market(a: &DMatrix<f64>) -> String {
    let mut out = String::with_capacity(24 * a.len() + 64);
    out.push_str("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(out, "{} {}", a.nrows(), a.ncols());
    // DMatrix storage is column-major, the order the array layout expects.
    for v in a.iter() {
        let _ = writeln!(out, "{v:.16e}");
    }
    out
}

pub fn write_matrix_market(path: impl AsRef<Path>, a: &DMatrix<f64>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_matrix_market(a)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn parse(text: &str) -> Result<DMatrix<f64>> {
        parse_matrix_market(text, Path::new("t.mtx"))
    }

    #[test]
    fn coordinate_symmetric_expands() {
        let k = parse("%%MatrixMarket matrix coordinate real symmetric\n% stiffness\n2 2 3\n1 1 2\n2 1 -1\n2 2 2\n")
            .unwrap();
        assert_eq!(k, dmatrix![2.0, -1.0; -1.0, 2.0]);
    }

    #[test]
    fn array_general_is_column_major() {
        let a = parse("%%MatrixMarket matrix array real general\n2 3\n1\n2\n3\n4\n5\n6\n").unwrap();
        assert_eq!(a, dmatrix![1.0, 3.0, 5.0; 2.0, 4.0, 6.0]);
    }

    #[test]
    fn array_symmetric_reads_lower_triangle() {
        let a = parse("%%MatrixMarket matrix array real symmetric\n2 2\n1\n2\n3\n").unwrap();
        assert_eq!(a, dmatrix![1.0, 2.0; 2.0, 3.0]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse("%%MatrixMarket matrix array real general\n2 1\n1.0\nabc\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
        let err = parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse("%%MatrixMarket matrix array complex general\n1 1\n1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        assert!(parse("%%MatrixMarket matrix array real general\n2 1\n1.0\n").is_err());
    }

    #[test]
    fn round_trip_is_exact() {
        let a = dmatrix![0.1, 1.0 / 3.0, -2.5e-300; f64::MAX, f64::MIN_POSITIVE, -0.0];
        let back = parse(&format_matrix_market(&a)).unwrap();
        assert!(a.iter().zip(back.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn empty_shapes_round_trip() {
        let a = DMatrix::<f64>::zeros(3, 0);
        assert_eq!(parse(&format_matrix_market(&a)).unwrap().shape(), (3, 0));
    }
}
