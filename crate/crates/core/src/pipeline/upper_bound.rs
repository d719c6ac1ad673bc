//! Stage 1: per-row upper bounds of the result size.

use crate::oracle::OracleError;
use crate::par;
use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

/// Per-row upper bounds `u_i` of `nnz(c_i*)`:
/// `u_i = sum of nnz(b_j*) over the nonzeros a_ij of row i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpperBoundArray {
    u: Vec<u64>,
}

impl UpperBoundArray {
    pub fn from_vec(u: Vec<u64>) -> Self {
        UpperBoundArray { u }
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.u
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Sum of all bounds; equals the candidate entry count `flops / 2`.
    pub fn total(&self) -> u64 {
        self.u.iter().sum()
    }
}

/// Computes the upper-bound array; rows are independent, one logical worker
/// per row.
pub fn stage1_upper_bound<S: Scalar>(
    a: &CsrMatrix<S>,
    b: &CsrMatrix<S>,
) -> Result<UpperBoundArray, OracleError> {
    if a.num_cols() != b.num_rows() {
        return Err(OracleError::DimensionMismatch {
            a_rows: a.num_rows(),
            a_cols: a.num_cols(),
            b_rows: b.num_rows(),
            b_cols: b.num_cols(),
        });
    }
    let u = par::map_rows(a.num_rows(), |i| {
        let (a_cols, _) = a.row(i);
        a_cols.iter().map(|&j| b.row_nnz(j as usize) as u64).sum()
    });
    Ok(UpperBoundArray::from_vec(u))
}
