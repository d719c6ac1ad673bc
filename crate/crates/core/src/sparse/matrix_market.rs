//! Matrix Market coordinate-format ingestion and output.
//!
//! Supports the `real`, `integer`, and `pattern` fields with `general` or
//! `symmetric` symmetry. Indices are 1-based on disk and 0-based in memory.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::csr::{CooTriplet, CsrMatrix, SparseError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

/// What ingestion did beyond parsing, for callers that care about input
/// hygiene.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReadStats {
    /// Entries declared on the size line.
    pub declared_nnz: usize,
    /// Duplicate coordinates fused by addition.
    pub duplicates_fused: usize,
    /// Whether symmetric storage was expanded to general storage.
    pub expanded_symmetric: bool,
}

fn malformed(msg: impl Into<String>) -> SparseError {
    SparseError::Malformed(msg.into())
}

fn parse_header(line: &str) -> Result<(Field, Symmetry), SparseError> {
    let mut words = line.split_whitespace();
    if words.next() != Some("%%MatrixMarket") {
        return Err(malformed("first line must start with %%MatrixMarket"));
    }
    if words.next() != Some("matrix") {
        return Err(malformed("object must be \"matrix\""));
    }
    if words.next() != Some("coordinate") {
        return Err(malformed("format must be \"coordinate\""));
    }
    let field = match words.next() {
        Some("real") => Field::Real,
        Some("integer") => Field::Integer,
        Some("pattern") => Field::Pattern,
        Some(other) => return Err(malformed(format!("unsupported field \"{other}\""))),
        None => return Err(malformed("missing field in header")),
    };
    let symmetry = match words.next() {
        Some("general") => Symmetry::General,
        Some("symmetric") => Symmetry::Symmetric,
        Some(other) => return Err(malformed(format!("unsupported symmetry \"{other}\""))),
        None => return Err(malformed("missing symmetry in header")),
    };
    Ok((field, symmetry))
}

/// Reads a Matrix Market coordinate file into CSR form.
///
/// Rows come out sorted and duplicate-free; duplicate coordinates in the
/// file are fused by addition and counted in the returned [`ReadStats`].
/// With `expand_symmetric` set, a `symmetric` file is expanded to general
/// storage: every off-diagonal `(i, j)` also produces `(j, i)`, while
/// diagonal entries are not doubled. Without the flag the stored triangle
/// is kept as-is. `pattern` entries get the value 1.
pub fn read_matrix_market<S: Scalar>(
    path: impl AsRef<Path>,
    expand_symmetric: bool,
) -> Result<(CsrMatrix<S>, ReadStats), SparseError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| SparseError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut lines = BufReader::new(file).lines();

    let header = lines
        .next()
        .ok_or_else(|| malformed("empty file"))?
        .map_err(|source| SparseError::Io {
            path: path.display().to_string(),
            source,
        })?;
    let (field, symmetry) = parse_header(&header)?;

    let mut dims: Option<(usize, usize, usize)> = None;
    let mut triplets: Vec<CooTriplet<S>> = Vec::new();
    let mut seen = 0usize;

    for line in lines {
        let line = line.map_err(|source| SparseError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut words = trimmed.split_whitespace();
        match dims {
            None => {
                let m: usize = words
                    .next()
                    .ok_or_else(|| malformed("missing row count"))?
                    .parse()
                    .map_err(|_| malformed("cannot parse row count"))?;
                let n: usize = words
                    .next()
                    .ok_or_else(|| malformed("missing column count"))?
                    .parse()
                    .map_err(|_| malformed("cannot parse column count"))?;
                let nnz: usize = words
                    .next()
                    .ok_or_else(|| malformed("missing entry count"))?
                    .parse()
                    .map_err(|_| malformed("cannot parse entry count"))?;
                if m as u64 > u32::MAX as u64 || n as u64 > u32::MAX as u64 {
                    return Err(SparseError::DimensionOverflow(format!(
                        "{m}x{n} exceeds 32-bit indexing"
                    )));
                }
                triplets.reserve(if symmetry == Symmetry::Symmetric && expand_symmetric {
                    nnz * 2
                } else {
                    nnz
                });
                dims = Some((m, n, nnz));
            }
            Some((m, n, nnz)) => {
                if seen == nnz {
                    return Err(malformed(format!("more than {nnz} declared entries")));
                }
                let i: u64 = words
                    .next()
                    .ok_or_else(|| malformed("missing row index"))?
                    .parse()
                    .map_err(|_| malformed("cannot parse row index"))?;
                let j: u64 = words
                    .next()
                    .ok_or_else(|| malformed("missing column index"))?
                    .parse()
                    .map_err(|_| malformed("cannot parse column index"))?;
                let value = match field {
                    Field::Pattern => S::one(),
                    Field::Real | Field::Integer => {
                        let raw: f64 = words
                            .next()
                            .ok_or_else(|| malformed("missing value"))?
                            .parse()
                            .map_err(|_| malformed("cannot parse value"))?;
                        S::from_f64(raw)
                    }
                };
                if i < 1 || i > m as u64 || j < 1 || j > n as u64 {
                    return Err(SparseError::IndexOutOfRange {
                        row: i,
                        col: j,
                        num_rows: m,
                        num_cols: n,
                    });
                }
                let (row, col) = (i as u32 - 1, j as u32 - 1);
                triplets.push(CooTriplet { row, col, value });
                if symmetry == Symmetry::Symmetric && expand_symmetric && row != col {
                    triplets.push(CooTriplet {
                        row: col,
                        col: row,
                        value,
                    });
                }
                seen += 1;
            }
        }
    }

    let (m, n, nnz) = dims.ok_or_else(|| malformed("missing size line"))?;
    if seen != nnz {
        return Err(malformed(format!("declared {nnz} entries, found {seen}")));
    }
    let (matrix, duplicates_fused) = CsrMatrix::from_coo(m, n, triplets)?;
    Ok((
        matrix,
        ReadStats {
            declared_nnz: nnz,
            duplicates_fused,
            expanded_symmetric: symmetry == Symmetry::Symmetric && expand_symmetric,
        },
    ))
}

/// Writes `m` as a general real coordinate file.
///
/// Values print through Rust's shortest round-trip formatting, so reading
/// the file back reproduces the matrix exactly.
pub fn write_matrix_market<S: Scalar>(
    m: &CsrMatrix<S>,
    path: impl AsRef<Path>,
) -> Result<(), SparseError> {
    let path = path.as_ref();
    let io_err = |source| SparseError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    (|| {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", m.num_rows(), m.num_cols(), m.nnz())?;
        for t in m.triplets() {
            writeln!(w, "{} {} {}", t.row + 1, t.col + 1, t.value)?;
        }
        w.flush()
    })()
    .map_err(io_err)
}
