//! Dense matrix ingestion from CSV and Matrix Market files.
//!
//! CSV files are header-free and row-major; a single row or a single column is
//! read as a vector. Matrix Market files may be `coordinate` or `array`,
//! `real`/`integer`, and `general`/`symmetric`/`skew-symmetric`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};

use crate::trace_io::digest_bytes;
use crate::{Error, Result};

/// A matrix together with the SHA-256 digest of the bytes it was parsed from.
#[derive(Clone, Debug)]
pub struct LoadedMatrix {
    pub matrix: Array2<f64>,
    pub digest: String,
}

/// Loads a matrix, picking Matrix Market for `.mtx` files and CSV otherwise.
pub fn load_matrix(path: impl AsRef<Path>) -> Result<LoadedMatrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let is_mtx = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("mtx"));
    let matrix = if is_mtx {
        parse_matrix_market(&bytes, path)?
    } else {
        parse_csv_matrix(&bytes, path)?
    };
    Ok(LoadedMatrix {
        matrix,
        digest: digest_bytes(&bytes),
    })
}

/// Loads a vector stored as a one-row or one-column matrix.
pub fn load_vector(path: impl AsRef<Path>) -> Result<(Array1<f64>, String)> {
    let path = path.as_ref();
    let loaded = load_matrix(path)?;
    let (m, n) = loaded.matrix.dim();
    if m != 1 && n != 1 {
        return Err(Error::invalid(format!(
            "{}: expected a vector, found a {m}x{n} matrix",
            path.display()
        )));
    }
    let v = Array1::from_iter(loaded.matrix.iter().copied());
    Ok((v, loaded.digest))
}

fn parse_error(path: &Path, line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message: message.into(),
    }
}

pub fn parse_csv_matrix(bytes: &[u8], path: &Path) -> Result<Array2<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(bytes);
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(path, line, 0, e.to_string())
        })?;
        let line = record.position().map_or(rows + 1, |p| p.line() as usize);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        for (j, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| {
                parse_error(path, line, j + 1, format!("not a number: {field:?}"))
            })?;
            data.push(value);
        }
        match cols {
            None => cols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(parse_error(
                    path,
                    line,
                    0,
                    format!("row has {} fields, expected {c}", record.len()),
                ))
            }
            _ => {}
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| parse_error(path, 1, 0, "empty matrix"))?;
    Ok(Array2::from_shape_vec((rows, cols), data).expect("rectangular by construction"))
}

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
}

pub fn parse_matrix_market(bytes: &[u8], path: &Path) -> Result<Array2<f64>> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| parse_error(path, 0, 0, format!("not UTF-8: {e}")))?;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_error(path, 1, 0, "missing header"))?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_error(path, 1, 1, "expected '%%MatrixMarket matrix ...' header"));
    }
    let coordinate = match tokens[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(parse_error(path, 1, 0, format!("unsupported format {other}"))),
    };
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(parse_error(
            path,
            1,
            0,
            format!("unsupported field type {}", tokens[3]),
        ));
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::Skew,
        other => return Err(parse_error(path, 1, 0, format!("unsupported symmetry {other}"))),
    };

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = body
        .next()
        .ok_or_else(|| parse_error(path, 0, 0, "missing size line"))?;
    let size: Vec<usize> = size
        .split_whitespace()
        .enumerate()
        .map(|(j, t)| {
            t.parse()
                .map_err(|_| parse_error(path, size_line, j + 1, format!("bad size {t:?}")))
        })
        .collect::<Result<_>>()?;
    let (rows, cols) = match size.as_slice() {
        [r, c, _] if coordinate => (*r, *c),
        [r, c] if !coordinate => (*r, *c),
        _ => return Err(parse_error(path, size_line, 0, "malformed size line")),
    };
    if rows == 0 || cols == 0 {
        return Err(parse_error(path, size_line, 0, "matrix has a zero dimension"));
    }
    let mut m = Array2::zeros((rows, cols));

    let place = |m: &mut Array2<f64>, i: usize, j: usize, v: f64| match symmetry {
        Symmetry::General => m[[i, j]] = v,
        Symmetry::Symmetric => {
            m[[i, j]] = v;
            m[[j, i]] = v;
        }
        Symmetry::Skew => {
            m[[i, j]] = v;
            m[[j, i]] = -v;
        }
    };

    if coordinate {
        let nnz = size[2];
        let mut seen = 0;
        for (line, l) in body {
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 3 {
                return Err(parse_error(path, line, 0, "expected 'row col value'"));
            }
            let i: usize = t[0]
                .parse()
                .map_err(|_| parse_error(path, line, 1, "bad row index"))?;
            let j: usize = t[1]
                .parse()
                .map_err(|_| parse_error(path, line, 2, "bad column index"))?;
            let v: f64 = t[2]
                .parse()
                .map_err(|_| parse_error(path, line, 3, "bad value"))?;
            if i == 0 || j == 0 || i > rows || j > cols {
                return Err(parse_error(path, line, 0, format!("entry ({i},{j}) out of bounds")));
            }
            place(&mut m, i - 1, j - 1, v);
            seen += 1;
        }
        if seen != nnz {
            return Err(parse_error(
                path,
                0,
                0,
                format!("expected {nnz} entries, found {seen}"),
            ));
        }
    } else {
        // column-major, lower triangle only for symmetric kinds
        let mut slots = Vec::new();
        for j in 0..cols {
            let start = match symmetry {
                Symmetry::General => 0,
                Symmetry::Symmetric => j,
                Symmetry::Skew => j + 1,
            };
            for i in start..rows {
                slots.push((i, j));
            }
        }
        let mut it = slots.into_iter();
        for (line, l) in body {
            let v: f64 = l
                .trim()
                .parse()
                .map_err(|_| parse_error(path, line, 1, "bad value"))?;
            let (i, j) = it
                .next()
                .ok_or_else(|| parse_error(path, line, 0, "too many entries"))?;
            place(&mut m, i, j, v);
        }
        if it.next().is_some() {
            return Err(parse_error(path, 0, 0, "too few entries"));
        }
    }
    Ok(m)
}

/// Header-free, row-major CSV with full-precision floats.
pub fn format_csv_matrix(m: &Array2<f64>) -> String {
    let mut out = String::new();
    for row in m.rows() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

pub fn write_csv_matrix(path: impl AsRef<Path>, m: &Array2<f64>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_csv_matrix(m)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    fn p() -> &'static Path {
        Path::new("test")
    }

    #[test]
    fn csv_round_trip() {
        let m = arr2(&[[1.0, -2.5], [0.1, 3e-200]]);
        let text = format_csv_matrix(&m);
        assert_eq!(parse_csv_matrix(text.as_bytes(), p()).unwrap(), m);
    }

    #[test]
    fn csv_ragged_rows_rejected() {
        assert!(parse_csv_matrix(b"1,2\n3\n", p()).is_err());
    }

    #[test]
    fn csv_bad_number_reports_position() {
        let err = parse_csv_matrix(b"1,2\n3,x\n", p()).unwrap_err();
        match err {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (2, 2)),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn matrix_market_coordinate_general() {
        let text = "%%MatrixMarket matrix coordinate real general\n% comment\n2 3 2\n1 1 1.5\n2 3 -2\n";
        let m = parse_matrix_market(text.as_bytes(), p()).unwrap();
        assert_eq!(m, arr2(&[[1.5, 0.0, 0.0], [0.0, 0.0, -2.0]]));
    }

    #[test]
    fn matrix_market_coordinate_symmetric() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1\n2 1 4\n";
        let m = parse_matrix_market(text.as_bytes(), p()).unwrap();
        assert_eq!(m, arr2(&[[1.0, 4.0], [4.0, 0.0]]));
    }

    #[test]
    fn matrix_market_array_is_column_major() {
        let text = "%%MatrixMarket matrix array real general\n2 2\n1\n3\n2\n4\n";
        let m = parse_matrix_market(text.as_bytes(), p()).unwrap();
        assert_eq!(m, arr2(&[[1.0, 2.0], [3.0, 4.0]]));
    }

    #[test]
    fn matrix_market_out_of_bounds_rejected() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n";
        assert!(parse_matrix_market(text.as_bytes(), p()).is_err());
    }

    #[test]
    fn load_vector_from_column_and_row() {
        let dir = tempfile::tempdir().unwrap();
        let col = dir.path().join("c.csv");
        fs::write(&col, "1\n2\n3\n").unwrap();
        let row = dir.path().join("r.csv");
        fs::write(&row, "1,2,3\n").unwrap();
        let (a, da) = load_vector(&col).unwrap();
        let (b, db) = load_vector(&row).unwrap();
        assert_eq!(a, b);
        assert_ne!(da, db);
        assert_eq!(da.len(), 64);
    }
}
