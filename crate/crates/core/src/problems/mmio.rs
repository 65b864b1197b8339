//! Matrix Market reader and writer.
//!
//! Supported headers: `%%MatrixMarket matrix {coordinate|array} {real|integer|complex}
//! {general|symmetric|hermitian}`. Symmetric and Hermitian storage is expanded on read.
//! `pattern` files are rejected because they carry no values.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
}

struct Parsed {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

/// Dense matrix from a Matrix Market file.
pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    let p = parse_file(path.as_ref())?;
    let mut m = ComplexMatrix::zeros(p.rows, p.cols);
    for (i, j, v) in p.entries {
        m[(i, j)] += v;
    }
    Ok(m)
}

/// Sparse matrix from a Matrix Market file.
pub fn load_matrix_market_sparse(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let p = parse_file(path.as_ref())?;
    CsrMatrix::from_triplets(p.rows, p.cols, &p.entries)
}

fn parse_file(path: &Path) -> Result<Parsed> {
    let text = fs::read_to_string(path)?;
    parse(&text, &path.display().to_string())
}

fn parse(text: &str, path: &str) -> Result<Parsed> {
    let err = |line: usize, message: String| Error::Parse { path: path.to_string(), line, message };
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));

    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(err(1, format!("invalid Matrix Market header `{header}`")));
    }
    let layout = match tokens[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(err(1, format!("unknown format `{other}`"))),
    };
    let field = match tokens[3].as_str() {
        "real" | "integer" | "double" => Field::Real,
        "complex" => Field::Complex,
        "pattern" => return Err(Error::UnsupportedField("pattern".into())),
        other => return Err(err(1, format!("unknown field `{other}`"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(Error::UnsupportedField(other.into())),
    };

    let mut data = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });

    let (size_line, size) = data.next().ok_or_else(|| err(1, "missing size line".into()))?;
    let dims = parse_usizes(size, size_line, path)?;
    let expected = if layout == Layout::Coordinate { 3 } else { 2 };
    if dims.len() != expected {
        return Err(err(size_line, format!("expected {expected} integers on the size line")));
    }
    let (rows, cols) = (dims[0], dims[1]);
    if symmetry != Symmetry::General && rows != cols {
        return Err(err(size_line, "symmetric storage requires a square matrix".into()));
    }

    let width = if field == Field::Complex { 2 } else { 1 };
    let mut stored = Vec::new();
    match layout {
        Layout::Coordinate => {
            let nnz = dims[2];
            for _ in 0..nnz {
                let (ln, l) = data.next().ok_or_else(|| err(size_line, format!("expected {nnz} entries")))?;
                let parts: Vec<&str> = l.split_whitespace().collect();
                if parts.len() != 2 + width {
                    return Err(err(ln, format!("expected {} fields, found {}", 2 + width, parts.len())));
                }
                let index = |s: &str, bound: usize| -> Result<usize> {
                    let k: usize = s.parse().map_err(|_| err(ln, format!("invalid index `{s}`")))?;
                    if k == 0 || k > bound {
                        return Err(err(ln, format!("index {k} out of range 1..={bound}")));
                    }
                    Ok(k - 1)
                };
                let i = index(parts[0], rows)?;
                let j = index(parts[1], cols)?;
                stored.push((i, j, parse_value(&parts[2..], ln, path)?));
            }
        }
        Layout::Array => {
            let positions: Vec<(usize, usize)> = match symmetry {
                Symmetry::General => (0..cols).flat_map(|j| (0..rows).map(move |i| (i, j))).collect(),
                _ => (0..cols).flat_map(|j| (j..rows).map(move |i| (i, j))).collect(),
            };
            for (i, j) in positions {
                let (ln, l) = data
                    .next()
                    .ok_or_else(|| err(size_line, "array data ends early".into()))?;
                let parts: Vec<&str> = l.split_whitespace().collect();
                if parts.len() != width {
                    return Err(err(ln, format!("expected {width} fields, found {}", parts.len())));
                }
                stored.push((i, j, parse_value(&parts, ln, path)?));
            }
        }
    }
    if let Some((ln, _)) = data.next() {
        return Err(err(ln, "unexpected trailing data".into()));
    }

    let mut entries = Vec::with_capacity(stored.len() * 2);
    for (i, j, v) in stored {
        entries.push((i, j, v));
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => entries.push((j, i, v)),
                Symmetry::Hermitian => entries.push((j, i, v.conj())),
            }
        }
    }
    Ok(Parsed { rows, cols, entries })
}

fn parse_usizes(s: &str, line: usize, path: &str) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|t| {
            t.parse().map_err(|_| Error::Parse {
                path: path.to_string(),
                line,
                message: format!("invalid integer `{t}`"),
            })
        })
        .collect()
}

fn parse_value(parts: &[&str], line: usize, path: &str) -> Result<Complex64> {
    let num = |s: &str| -> Result<f64> {
        s.parse().map_err(|_| Error::Parse {
            path: path.to_string(),
            line,
            message: format!("invalid number `{s}`"),
        })
    };
    Ok(match parts {
        [re] => Complex64::new(num(re)?, 0.0),
        [re, im] => Complex64::new(num(re)?, num(im)?),
        _ => unreachable!("field width checked by caller"),
    })
}

fn is_real(values: impl Iterator<Item = Complex64>) -> bool {
    values.into_iter().all(|v| v.im == 0.0)
}

fn push_value(out: &mut String, v: Complex64, real: bool) {
    // `{:e}` prints the shortest representation that round-trips
    if real {
        let _ = writeln!(out, "{:e}", v.re);
    } else {
        let _ = writeln!(out, "{:e} {:e}", v.re, v.im);
    }
}

/// Writes a dense matrix in `array general` layout, `real` when every entry is real.
pub fn write_matrix_market(path: impl AsRef<Path>, m: &ComplexMatrix) -> Result<()> {
    let real = (0..m.ncols()).all(|j| is_real(m.col(j).iter().copied()));
    let mut out = format!(
        "%%MatrixMarket matrix array {} general\n{} {}\n",
        if real { "real" } else { "complex" },
        m.nrows(),
        m.ncols()
    );
    for j in 0..m.ncols() {
        for &v in m.col(j) {
            push_value(&mut out, v, real);
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes a sparse matrix in `coordinate general` layout.
pub fn write_matrix_market_sparse(path: impl AsRef<Path>, m: &CsrMatrix) -> Result<()> {
    let real = is_real(m.triplets().map(|t| t.2));
    let mut out = format!(
        "%%MatrixMarket matrix coordinate {} general\n{} {} {}\n",
        if real { "real" } else { "complex" },
        m.nrows(),
        m.ncols(),
        m.nnz()
    );
    for (i, j, v) in m.triplets() {
        let _ = write!(out, "{} {} ", i + 1, j + 1);
        push_value(&mut out, v, real);
    }
    fs::write(path, out)?;
    Ok(())
}
