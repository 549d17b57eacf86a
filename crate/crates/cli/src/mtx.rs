//! Matrix Market reader and writer for real general matrices.
//!
//! Both the dense `array` and sparse `coordinate` layouts are read;
//! coordinate entries are densified and duplicates summed. Output is always
//! `array`, with values in shortest round-trip form. Vectors are `array`
//! files with one column.

use std::fs;
use std::path::Path;

use trunclsq_core::bench::format_f64;
use trunclsq_core::{DenseMatrix, Vector};

/// Entry count above which a declared matrix is refused instead of allocated.
pub const MAX_ENTRIES: usize = 1 << 28;

#[derive(Debug, thiserror::Error)]
pub enum MtxError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: field `{field}` is not supported, only `real`")]
    NonReal { line: usize, field: String },
    #[error("{0}")]
    Shape(String),
}

fn parse_err(line: usize, message: impl Into<String>) -> MtxError {
    MtxError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Array,
    Coordinate,
}

/// Numbered lines that are neither blank nor comments.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .skip(1)
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'))
}

fn parse_header(text: &str) -> Result<Layout, MtxError> {
    let first = text
        .lines()
        .next()
        .ok_or_else(|| parse_err(1, "empty file"))?;
    let tokens: Vec<String> = first
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(parse_err(1, "missing %%MatrixMarket banner"));
    }
    if tokens.len() != 5 {
        return Err(parse_err(
            1,
            "banner needs object, format, field and symmetry",
        ));
    }
    if tokens[1] != "matrix" {
        return Err(parse_err(
            1,
            format!("object `{}` is not supported", tokens[1]),
        ));
    }
    let layout = match tokens[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(parse_err(1, format!("format `{other}` is not supported"))),
    };
    if tokens[3] != "real" {
        return Err(MtxError::NonReal {
            line: 1,
            field: tokens[3].clone(),
        });
    }
    if tokens[4] != "general" {
        return Err(parse_err(
            1,
            format!("symmetry `{}` is not supported", tokens[4]),
        ));
    }
    Ok(layout)
}

fn parse_usize(line: usize, tok: &str, what: &str) -> Result<usize, MtxError> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, format!("invalid {what} `{tok}`")))
}

fn parse_value(line: usize, tok: &str) -> Result<f64, MtxError> {
    let v = tok
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("invalid value `{tok}`")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value `{tok}`")));
    }
    Ok(v)
}

fn checked_size(line: usize, rows: usize, cols: usize) -> Result<usize, MtxError> {
    if rows == 0 || cols == 0 {
        return Err(parse_err(line, "dimensions must be positive"));
    }
    rows.checked_mul(cols)
        .filter(|&len| len <= MAX_ENTRIES)
        .ok_or_else(|| parse_err(line, format!("dimensions {rows}x{cols} are too large")))
}

/// Parses Matrix Market text into a dense matrix.
pub fn parse_matrix(text: &str) -> Result<DenseMatrix, MtxError> {
    let layout = parse_header(text)?;
    let mut lines = content_lines(text);
    let (size_line, size) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing size line"))?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    let want = if layout == Layout::Array { 2 } else { 3 };
    if dims.len() != want {
        return Err(parse_err(
            size_line,
            format!("size line needs {want} integers"),
        ));
    }
    let rows = parse_usize(size_line, dims[0], "row count")?;
    let cols = parse_usize(size_line, dims[1], "column count")?;
    let len = checked_size(size_line, rows, cols)?;
    let mut last_line = size_line;

    let data = match layout {
        Layout::Array => {
            let mut data = Vec::with_capacity(len);
            for (ln, l) in lines {
                last_line = ln;
                let mut toks = l.split_whitespace();
                let tok = toks.next().unwrap_or_default();
                if toks.next().is_some() {
                    return Err(parse_err(ln, "expected one value per line"));
                }
                if data.len() == len {
                    return Err(parse_err(ln, format!("more than {len} values")));
                }
                data.push(parse_value(ln, tok)?);
            }
            if data.len() != len {
                return Err(parse_err(
                    last_line,
                    format!("expected {len} values, found {}", data.len()),
                ));
            }
            data
        }
        Layout::Coordinate => {
            let nnz = parse_usize(size_line, dims[2], "entry count")?;
            let mut data = vec![0.0; len];
            let mut seen = 0usize;
            for (ln, l) in lines {
                last_line = ln;
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(parse_err(ln, "expected `row col value`"));
                }
                if seen == nnz {
                    return Err(parse_err(ln, format!("more than {nnz} entries")));
                }
                let i = parse_usize(ln, toks[0], "row index")?;
                let j = parse_usize(ln, toks[1], "column index")?;
                if i == 0 || i > rows || j == 0 || j > cols {
                    return Err(parse_err(
                        ln,
                        format!("index ({i}, {j}) outside {rows}x{cols}"),
                    ));
                }
                let slot = &mut data[(j - 1) * rows + (i - 1)];
                *slot += parse_value(ln, toks[2])?;
                if !slot.is_finite() {
                    return Err(parse_err(ln, "summed entry overflows"));
                }
                seen += 1;
            }
            if seen != nnz {
                return Err(parse_err(
                    last_line,
                    format!("expected {nnz} entries, found {seen}"),
                ));
            }
            data
        }
    };
    DenseMatrix::new(rows, cols, data).map_err(|e| MtxError::Shape(e.to_string()))
}

/// Parses a one-column Matrix Market file into a vector.
pub fn parse_vector(text: &str) -> Result<Vector, MtxError> {
    let m = parse_matrix(text)?;
    if m.cols() != 1 {
        return Err(MtxError::Shape(format!(
            "expected a single column, found {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Vector::new(m.into_data()).map_err(|e| MtxError::Shape(e.to_string()))
}

/// `array` layout text for `m`.
pub fn format_matrix(m: &DenseMatrix) -> String {
    let mut out = String::from("%%MatrixMarket matrix array real general\n");
    out.push_str(&format!("{} {}\n", m.rows(), m.cols()));
    for v in m.data() {
        out.push_str(&format_f64(*v));
        out.push('\n');
    }
    out
}

pub fn format_vector(v: &Vector) -> String {
    format_matrix(&v.to_column())
}

fn read(path: &Path) -> Result<String, MtxError> {
    fs::read_to_string(path).map_err(|source| MtxError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), MtxError> {
    fs::write(path, text).map_err(|source| MtxError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_matrix(path: &Path) -> Result<DenseMatrix, MtxError> {
    parse_matrix(&read(path)?)
}

pub fn load_vector(path: &Path) -> Result<Vector, MtxError> {
    parse_vector(&read(path)?)
}

pub fn save_matrix(path: &Path, m: &DenseMatrix) -> Result<(), MtxError> {
    write(path, &format_matrix(m))
}

pub fn save_vector(path: &Path, v: &Vector) -> Result<(), MtxError> {
    write(path, &format_vector(v))
}
