use super::{DenseMatrix, DenseVector};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use thiserror::Error;

/// MatrixMarket dense-array I/O errors. Parse failures carry the file path
/// and one-based line number.
#[derive(Debug, Error)]
pub enum MtxError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
}

const BANNER: &str = "%%MatrixMarket matrix array real general";

fn io_err(path: &Path, source: std::io::Error) -> MtxError {
    MtxError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> MtxError {
    MtxError::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Writes `m` in MatrixMarket dense-array format: the general real banner,
/// a dimension line, then entries in column-major order, one per line,
/// with 17 significant decimal digits so every f64 round-trips exactly.
pub fn write_matrix(path: &Path, m: &DenseMatrix) -> Result<(), MtxError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let body = (|| -> std::io::Result<()> {
        write!(w, "{}\n{} {}\n", BANNER, m.rows(), m.cols())?;
        for j in 0..m.cols() {
            for i in 0..m.rows() {
                write!(w, "{:.16e}\n", m.get(i, j))?;
            }
        }
        w.flush()
    })();
    body.map_err(|e| io_err(path, e))
}

/// Writes a vector as an `n x 1` dense array.
pub fn write_vector(path: &Path, v: &DenseVector) -> Result<(), MtxError> {
    let m = DenseMatrix::from_fn(v.len(), 1, |i, _| v[i]);
    write_matrix(path, &m)
}

/// Reads a MatrixMarket dense-array file written by [`write_matrix`] (or
/// any conforming writer): banner, optional `%` comments, dimensions, then
/// exactly `rows * cols` finite values in column-major order.
pub fn read_matrix(path: &Path) -> Result<DenseMatrix, MtxError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();

    // Banner line. Keyword comparison is case-insensitive, matching common
    // MatrixMarket readers; the canonical form is what we write.
    let (idx, first) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file, expected MatrixMarket banner"))?;
    let first = first.map_err(|e| io_err(path, e))?;
    let banner_tokens: Vec<String> = first.split_whitespace().map(str::to_lowercase).collect();
    let expected_banner: Vec<String> = BANNER.split_whitespace().map(str::to_lowercase).collect();
    if banner_tokens != expected_banner {
        return Err(parse_err(
            path,
            idx + 1,
            format!("unsupported banner {:?}, expected {:?}", first, BANNER),
        ));
    }

    // Dimension line, after any % comments.
    let mut dims: Option<(usize, usize)> = None;
    for (idx, line) in lines.by_ref() {
        let line = line.map_err(|e| io_err(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut it = trimmed.split_whitespace();
        let r = it
            .next()
            .and_then(|t| t.parse::<usize>().ok())
            .ok_or_else(|| parse_err(path, idx + 1, "malformed dimension line"))?;
        let c = it
            .next()
            .and_then(|t| t.parse::<usize>().ok())
            .ok_or_else(|| parse_err(path, idx + 1, "malformed dimension line"))?;
        if it.next().is_some() {
            return Err(parse_err(
                path,
                idx + 1,
                "dimension line must hold exactly two integers",
            ));
        }
        dims = Some((r, c));
        break;
    }
    let (rows, cols) = dims.ok_or_else(|| parse_err(path, 1, "missing dimension line"))?;

    let expected = rows * cols;
    let mut values = Vec::with_capacity(expected);
    let mut last_line = 0usize;
    for (idx, line) in lines.by_ref() {
        let line = line.map_err(|e| io_err(path, e))?;
        last_line = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        if values.len() == expected {
            return Err(parse_err(
                path,
                idx + 1,
                format!("trailing content after {} entries", expected),
            ));
        }
        let v: f64 = trimmed
            .parse()
            .map_err(|_| parse_err(path, idx + 1, format!("malformed value {:?}", trimmed)))?;
        if !v.is_finite() {
            return Err(parse_err(
                path,
                idx + 1,
                format!("non-finite value {:?}", trimmed),
            ));
        }
        values.push(v);
    }
    if values.len() != expected {
        return Err(parse_err(
            path,
            last_line,
            format!(
                "unexpected end of file: expected {} entries, found {}",
                expected,
                values.len()
            ),
        ));
    }

    // Values arrive column-major; DenseMatrix stores row-major.
    let mut data = vec![0.0f64; expected];
    for j in 0..cols {
        for i in 0..rows {
            data[i * cols + j] = values[j * rows + i];
        }
    }
    DenseMatrix::new(rows, cols, data)
        .map_err(|e| parse_err(path, last_line, format!("invalid matrix data: {}", e)))
}

/// Reads a vector stored as a single-column dense array.
pub fn read_vector(path: &Path) -> Result<DenseVector, MtxError> {
    let m = read_matrix(path)?;
    if m.cols() != 1 {
        return Err(parse_err(
            path,
            2,
            format!("expected a single-column array, got {} columns", m.cols()),
        ));
    }
    Ok(DenseVector::from_fn(m.rows(), |i| m.get(i, 0)))
}
