//! Stage 4: compact the temporary matrix into the final CSR result.

use super::temp_matrix::TempMatrix;
use super::PipelineError;
use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

/// Sums the per-row counts into the exact-size row pointer array, then
/// copies every finished row out of its slot. Empty rows need no copy;
/// non-empty copies are independent and run in parallel.
pub fn stage4_arrange<S: Scalar>(
    tmp: &TempMatrix<S>,
    row_nnz: &[u64],
    num_cols: usize,
) -> Result<CsrMatrix<S>, PipelineError> {
    let m = tmp.num_rows();
    assert_eq!(row_nnz.len(), m, "row count vector length mismatch");

    let mut row_ptr = Vec::with_capacity(m + 1);
    row_ptr.push(0u64);
    for (row, &nnz) in row_nnz.iter().enumerate() {
        let used = tmp.slot(row).used() as u64;
        if used != nnz {
            return Err(PipelineError::InconsistentRowCount {
                row: row as u32,
                used,
                expected: nnz,
            });
        }
        row_ptr.push(row_ptr[row] + nnz);
    }
    let nnz_total = row_ptr[m] as usize;

    let mut col_idx = vec![0u32; nnz_total];
    let mut values = vec![S::zero(); nnz_total];
    copy_rows(tmp, &row_ptr, &mut col_idx, &mut values);

    let c = CsrMatrix::from_raw_parts_unchecked(m, num_cols, row_ptr, col_idx, values);
    debug_assert!(crate::sparse::validate(&c).is_empty());
    Ok(c)
}

#[cfg(feature = "parallel")]
fn copy_rows<S: Scalar>(
    tmp: &TempMatrix<S>,
    row_ptr: &[u64],
    col_idx: &mut [u32],
    values: &mut [S],
) {
    // Row output ranges come from a prefix sum, so they tile the output
    // arrays; recursive splitting hands each branch a disjoint slice.
    fn split<S: Scalar>(
        tmp: &TempMatrix<S>,
        rows: std::ops::Range<usize>,
        row_ptr: &[u64],
        col_idx: &mut [u32],
        values: &mut [S],
    ) {
        const LEAF_ROWS: usize = 512;
        if rows.len() <= LEAF_ROWS {
            let base = row_ptr[rows.start] as usize;
            for row in rows {
                let slot = tmp.slot(row);
                let lo = row_ptr[row] as usize - base;
                let hi = row_ptr[row + 1] as usize - base;
                col_idx[lo..hi].copy_from_slice(slot.cols());
                values[lo..hi].copy_from_slice(slot.vals());
            }
            return;
        }
        let mid = rows.start + rows.len() / 2;
        let cut = (row_ptr[mid] - row_ptr[rows.start]) as usize;
        let (lc, rc) = col_idx.split_at_mut(cut);
        let (lv, rv) = values.split_at_mut(cut);
        rayon::join(
            || split(tmp, rows.start..mid, row_ptr, lc, lv),
            || split(tmp, mid..rows.end, row_ptr, rc, rv),
        );
    }
    split(tmp, 0..tmp.num_rows(), row_ptr, col_idx, values);
}

#[cfg(not(feature = "parallel"))]
fn copy_rows<S: Scalar>(
    tmp: &TempMatrix<S>,
    row_ptr: &[u64],
    col_idx: &mut [u32],
    values: &mut [S],
) {
    for row in 0..tmp.num_rows() {
        let slot = tmp.slot(row);
        let lo = row_ptr[row] as usize;
        let hi = row_ptr[row + 1] as usize;
        col_idx[lo..hi].copy_from_slice(slot.cols());
        values[lo..hi].copy_from_slice(slot.vals());
    }
}
