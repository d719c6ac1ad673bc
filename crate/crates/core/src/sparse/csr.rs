use std::fmt;

use crate::scalar::Scalar;

/// Errors from constructing or ingesting sparse matrices.
#[derive(Debug, thiserror::Error)]
pub enum SparseError {
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed matrix market file: {0}")]
    Malformed(String),
    #[error("entry ({row}, {col}) out of range for a {num_rows}x{num_cols} matrix")]
    IndexOutOfRange {
        row: u64,
        col: u64,
        num_rows: usize,
        num_cols: usize,
    },
    #[error("matrix dimensions overflow the index type: {0}")]
    DimensionOverflow(String),
    #[error("invalid CSR structure: {0:?}")]
    InvalidStructure(Vec<Violation>),
}

/// One coordinate-format entry. Intermediate form used by file ingestion
/// and test generators; `CsrMatrix::from_coo` turns a list of these into
/// sorted CSR storage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CooTriplet<S> {
    pub row: u32,
    pub col: u32,
    pub value: S,
}

/// Compressed sparse row matrix: the universal operand of the pipeline.
///
/// Storage uses 32-bit column indices and 64-bit row offsets, so candidate
/// counts beyond 4G entries do not overflow the pointer array. Within every
/// row the column indices are strictly increasing, and explicit zero values
/// are kept: multiplication never prunes entries whose values cancel, which
/// keeps nonzero counts independent of summation order.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<S> {
    num_rows: usize,
    num_cols: usize,
    row_ptr: Vec<u64>,
    col_idx: Vec<u32>,
    values: Vec<S>,
}

/// A broken CSR invariant found by [`validate`]. Violations are data, not
/// errors: probing a suspect matrix returns the full list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    RowPtrEmpty,
    RowPtrFirstNotZero,
    RowPtrNonMonotone { row: usize },
    RowPtrLastMismatch { last: u64, nnz: usize },
    ArrayLengthMismatch { col_idx: usize, values: usize },
    RowUnsorted { row: usize },
    RowDuplicateCol { row: usize, col: u32 },
    ColOutOfRange { row: usize, col: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RowPtrEmpty => write!(f, "row pointer array is empty"),
            Violation::RowPtrFirstNotZero => write!(f, "row_ptr[0] != 0"),
            Violation::RowPtrNonMonotone { row } => {
                write!(f, "row_ptr decreases at row {row}")
            }
            Violation::RowPtrLastMismatch { last, nnz } => {
                write!(f, "row_ptr ends at {last} but nnz is {nnz}")
            }
            Violation::ArrayLengthMismatch { col_idx, values } => {
                write!(f, "col_idx has {col_idx} entries but values has {values}")
            }
            Violation::RowUnsorted { row } => write!(f, "row {row} has unsorted columns"),
            Violation::RowDuplicateCol { row, col } => {
                write!(f, "row {row} stores column {col} twice")
            }
            Violation::ColOutOfRange { row, col } => {
                write!(f, "row {row} references out-of-range column {col}")
            }
        }
    }
}

/// Checks every CSR invariant of `m`; empty result means the matrix is
/// well formed.
pub fn validate<S: Scalar>(m: &CsrMatrix<S>) -> Vec<Violation> {
    let mut out = Vec::new();
    let rp = &m.row_ptr;
    if rp.is_empty() {
        out.push(Violation::RowPtrEmpty);
        return out;
    }
    if rp[0] != 0 {
        out.push(Violation::RowPtrFirstNotZero);
    }
    for row in 1..rp.len() {
        if rp[row] < rp[row - 1] {
            out.push(Violation::RowPtrNonMonotone { row });
        }
    }
    if m.col_idx.len() != m.values.len() {
        out.push(Violation::ArrayLengthMismatch {
            col_idx: m.col_idx.len(),
            values: m.values.len(),
        });
    }
    if *rp.last().unwrap() != m.col_idx.len() as u64 {
        out.push(Violation::RowPtrLastMismatch {
            last: *rp.last().unwrap(),
            nnz: m.col_idx.len(),
        });
    }
    if !out.is_empty() {
        // Range checks below would index out of bounds on broken pointers.
        return out;
    }
    for row in 0..m.num_rows {
        let cols = &m.col_idx[rp[row] as usize..rp[row + 1] as usize];
        for pair in cols.windows(2) {
            if pair[0] > pair[1] {
                out.push(Violation::RowUnsorted { row });
                break;
            }
        }
        for pair in cols.windows(2) {
            if pair[0] == pair[1] {
                out.push(Violation::RowDuplicateCol { row, col: pair[0] });
                break;
            }
        }
        for &c in cols {
            if c as usize >= m.num_cols {
                out.push(Violation::ColOutOfRange { row, col: c });
                break;
            }
        }
    }
    out
}

impl<S: Scalar> CsrMatrix<S> {
    /// Builds a matrix from raw CSR arrays, rejecting any invariant
    /// violation.
    pub fn new(
        num_rows: usize,
        num_cols: usize,
        row_ptr: Vec<u64>,
        col_idx: Vec<u32>,
        values: Vec<S>,
    ) -> Result<Self, SparseError> {
        if row_ptr.len() != num_rows + 1 {
            return Err(SparseError::InvalidStructure(vec![
                Violation::RowPtrLastMismatch {
                    last: row_ptr.len() as u64,
                    nnz: num_rows + 1,
                },
            ]));
        }
        let m = Self::from_raw_parts_unchecked(num_rows, num_cols, row_ptr, col_idx, values);
        let violations = validate(&m);
        if violations.is_empty() {
            Ok(m)
        } else {
            Err(SparseError::InvalidStructure(violations))
        }
    }

    /// Builds without validation. Callers own the invariants; [`validate`]
    /// accepts the result either way, which is how malformed matrices are
    /// constructed in tests.
    pub fn from_raw_parts_unchecked(
        num_rows: usize,
        num_cols: usize,
        row_ptr: Vec<u64>,
        col_idx: Vec<u32>,
        values: Vec<S>,
    ) -> Self {
        CsrMatrix {
            num_rows,
            num_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Sorts, bounds-checks, and duplicate-fuses coordinate entries into
    /// CSR form. Duplicate coordinates are summed; the count of fused
    /// entries is returned alongside the matrix.
    pub fn from_coo(
        num_rows: usize,
        num_cols: usize,
        mut triplets: Vec<CooTriplet<S>>,
    ) -> Result<(Self, usize), SparseError> {
        for t in &triplets {
            if t.row as usize >= num_rows || t.col as usize >= num_cols {
                return Err(SparseError::IndexOutOfRange {
                    row: t.row as u64,
                    col: t.col as u64,
                    num_rows,
                    num_cols,
                });
            }
        }
        triplets.sort_unstable_by_key(|t| (t.row, t.col));

        let mut row_ptr = vec![0u64; num_rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        let mut fused = 0usize;
        for t in triplets {
            // row_ptr[r + 1] holds the running entry count of row r until the
            // prefix sum below, so a nonzero count means col_idx.last() is in
            // the current row.
            if let (Some(&last_col), true) = (col_idx.last(), row_ptr[t.row as usize + 1] > 0) {
                if last_col == t.col {
                    let last: &mut S = values.last_mut().unwrap();
                    *last += t.value;
                    fused += 1;
                    continue;
                }
            }
            col_idx.push(t.col);
            values.push(t.value);
            row_ptr[t.row as usize + 1] += 1;
        }
        for i in 0..num_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok((
            Self::from_raw_parts_unchecked(num_rows, num_cols, row_ptr, col_idx, values),
            fused,
        ))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_raw_parts_unchecked(
            n,
            n,
            (0..=n as u64).collect(),
            (0..n as u32).collect(),
            vec![S::one(); n],
        )
    }

    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    pub fn num_cols(&self) -> usize {
        self.num_cols
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row_ptr(&self) -> &[u64] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[u32] {
        &self.col_idx
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[u32], &[S]) {
        let lo = self.row_ptr[i] as usize;
        let hi = self.row_ptr[i + 1] as usize;
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    #[inline]
    pub fn row_nnz(&self, i: usize) -> usize {
        (self.row_ptr[i + 1] - self.row_ptr[i]) as usize
    }

    /// Entry bytes of the stored matrix (indices + values, no pointers).
    pub fn storage_bytes(&self) -> u64 {
        self.nnz() as u64 * crate::scalar::entry_bytes::<S>()
    }

    /// All entries as coordinate triplets, row-major.
    pub fn triplets(&self) -> Vec<CooTriplet<S>> {
        let mut out = Vec::with_capacity(self.nnz());
        for i in 0..self.num_rows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                out.push(CooTriplet {
                    row: i as u32,
                    col: c,
                    value: v,
                });
            }
        }
        out
    }

    /// Same nonzero pattern, and values equal within `rel` relative
    /// tolerance (with an equal-magnitude absolute floor).
    pub fn approx_eq(&self, other: &Self, rel: f64) -> bool {
        self.num_rows == other.num_rows
            && self.num_cols == other.num_cols
            && self.row_ptr == other.row_ptr
            && self.col_idx == other.col_idx
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(&x, &y)| crate::scalar::approx_eq(x, y, rel))
    }
}
