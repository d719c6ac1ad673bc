//! Reference SpGEMM implementations used as ground truth for every kernel
//! path.
//!
//! [`spgemm_gustavson`] is the row-wise algorithm over a dense sparse
//! accumulator; [`spgemm_dense_check`] is an independent second oracle for
//! tiny instances that densifies both operands. Both keep the
//! no-cancellation convention: an output position is stored whenever at
//! least one candidate product touches it, even if the values sum to zero.

use crate::scalar::{approx_eq, Scalar};
use crate::sparse::CsrMatrix;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("dimension mismatch: left is {a_rows}x{a_cols}, right is {b_rows}x{b_cols}")]
    DimensionMismatch {
        a_rows: usize,
        a_cols: usize,
        b_rows: usize,
        b_cols: usize,
    },
    #[error("dense check limited to {limit} cells, got {requested}")]
    SizeGuard { requested: u128, limit: u128 },
}

fn check_dims<S: Scalar>(a: &CsrMatrix<S>, b: &CsrMatrix<S>) -> Result<(), OracleError> {
    if a.num_cols() != b.num_rows() {
        return Err(OracleError::DimensionMismatch {
            a_rows: a.num_rows(),
            a_cols: a.num_cols(),
            b_rows: b.num_rows(),
            b_cols: b.num_cols(),
        });
    }
    Ok(())
}

/// Dense-vector sparse accumulator: a dense value array plus an occupancy
/// map and the list of touched columns.
pub struct SparseAccumulator<S> {
    dense_values: Vec<S>,
    occupied_flags: Vec<bool>,
    touched_list: Vec<u32>,
}

impl<S: Scalar> SparseAccumulator<S> {
    pub fn new(num_cols: usize) -> Self {
        SparseAccumulator {
            dense_values: vec![S::zero(); num_cols],
            occupied_flags: vec![false; num_cols],
            touched_list: Vec::new(),
        }
    }

    /// Adds `value` at `col`, marking the column touched on first contact.
    #[inline]
    pub fn scatter(&mut self, col: u32, value: S) {
        let c = col as usize;
        if self.occupied_flags[c] {
            self.dense_values[c] += value;
        } else {
            self.occupied_flags[c] = true;
            self.dense_values[c] = value;
            self.touched_list.push(col);
        }
    }

    pub fn touched(&self) -> &[u32] {
        &self.touched_list
    }

    /// Drains the accumulated row in ascending column order and resets the
    /// accumulator for the next row.
    pub fn gather_sorted(&mut self, cols_out: &mut Vec<u32>, vals_out: &mut Vec<S>) {
        self.touched_list.sort_unstable();
        for &c in &self.touched_list {
            cols_out.push(c);
            vals_out.push(self.dense_values[c as usize]);
            self.occupied_flags[c as usize] = false;
        }
        self.touched_list.clear();
    }
}

/// Row-wise reference SpGEMM.
///
/// Accumulation runs in input order (nonzeros of `a_i*` ascending, then the
/// matching row of `b` ascending), so results are a deterministic baseline
/// for the pipeline kernels, whose merge order differs.
pub fn spgemm_gustavson<S: Scalar>(
    a: &CsrMatrix<S>,
    b: &CsrMatrix<S>,
) -> Result<CsrMatrix<S>, OracleError> {
    check_dims(a, b)?;
    let mut acc = SparseAccumulator::new(b.num_cols());
    let mut row_ptr = Vec::with_capacity(a.num_rows() + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0u64);
    for i in 0..a.num_rows() {
        let (a_cols, a_vals) = a.row(i);
        for (&j, &a_ij) in a_cols.iter().zip(a_vals) {
            let (b_cols, b_vals) = b.row(j as usize);
            for (&k, &b_jk) in b_cols.iter().zip(b_vals) {
                acc.scatter(k, a_ij * b_jk);
            }
        }
        acc.gather_sorted(&mut col_idx, &mut values);
        row_ptr.push(col_idx.len() as u64);
    }
    Ok(CsrMatrix::from_raw_parts_unchecked(
        a.num_rows(),
        b.num_cols(),
        row_ptr,
        col_idx,
        values,
    ))
}

const DENSE_CHECK_CELL_LIMIT: u128 = 1 << 22;

/// Independent oracle for small instances via dense triple loops.
///
/// Values accumulate in a dense array; the output pattern is tracked
/// separately as the union of candidate positions, so entries that sum to
/// zero are still emitted as stored zeros.
pub fn spgemm_dense_check<S: Scalar>(
    a: &CsrMatrix<S>,
    b: &CsrMatrix<S>,
) -> Result<CsrMatrix<S>, OracleError> {
    check_dims(a, b)?;
    let (m, k, n) = (a.num_rows(), a.num_cols(), b.num_cols());
    for cells in [m as u128 * k as u128, k as u128 * n as u128, m as u128 * n as u128] {
        if cells > DENSE_CHECK_CELL_LIMIT {
            return Err(OracleError::SizeGuard {
                requested: cells,
                limit: DENSE_CHECK_CELL_LIMIT,
            });
        }
    }

    let mut a_dense = vec![S::zero(); m * k];
    let mut a_present = vec![false; m * k];
    for t in a.triplets() {
        a_dense[t.row as usize * k + t.col as usize] = t.value;
        a_present[t.row as usize * k + t.col as usize] = true;
    }
    let mut b_dense = vec![S::zero(); k * n];
    let mut b_present = vec![false; k * n];
    for t in b.triplets() {
        b_dense[t.row as usize * n + t.col as usize] = t.value;
        b_present[t.row as usize * n + t.col as usize] = true;
    }

    let mut c_dense = vec![S::zero(); m * n];
    let mut c_present = vec![false; m * n];
    for i in 0..m {
        for j in 0..k {
            for col in 0..n {
                c_dense[i * n + col] += a_dense[i * k + j] * b_dense[j * n + col];
                c_present[i * n + col] |= a_present[i * k + j] && b_present[j * n + col];
            }
        }
    }

    let mut row_ptr = Vec::with_capacity(m + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0u64);
    for i in 0..m {
        for col in 0..n {
            if c_present[i * n + col] {
                col_idx.push(col as u32);
                values.push(c_dense[i * n + col]);
            }
        }
        row_ptr.push(col_idx.len() as u64);
    }
    Ok(CsrMatrix::from_raw_parts_unchecked(m, n, row_ptr, col_idx, values))
}

/// Arithmetic operation count of `a * b`: one multiply and one add per
/// candidate product. Half of this is the entry count of the expanded
/// candidate matrix, i.e. the upper-bound size of the result.
pub fn count_flops<S: Scalar>(a: &CsrMatrix<S>, b: &CsrMatrix<S>) -> Result<u64, OracleError> {
    check_dims(a, b)?;
    let mut candidates = 0u64;
    for i in 0..a.num_rows() {
        let (a_cols, _) = a.row(i);
        for &j in a_cols {
            candidates += b.row_nnz(j as usize) as u64;
        }
    }
    Ok(candidates * 2)
}

/// How a computed product differs from the oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum VerifyFailure {
    DimensionMismatch,
    PatternMismatch { row: usize },
    ValueMismatch { row: usize, col: u32, expected: f64, actual: f64 },
}

/// Compares `c` against the Gustavson oracle for `a * b`: the column
/// pattern must match exactly, values within `S::REL_TOL`.
pub fn verify_against_oracle<S: Scalar>(
    a: &CsrMatrix<S>,
    b: &CsrMatrix<S>,
    c: &CsrMatrix<S>,
) -> Result<(), VerifyFailure> {
    let expected = spgemm_gustavson(a, b).map_err(|_| VerifyFailure::DimensionMismatch)?;
    if expected.num_rows() != c.num_rows() || expected.num_cols() != c.num_cols() {
        return Err(VerifyFailure::DimensionMismatch);
    }
    for i in 0..expected.num_rows() {
        let (want_cols, want_vals) = expected.row(i);
        let (got_cols, got_vals) = c.row(i);
        if want_cols != got_cols {
            return Err(VerifyFailure::PatternMismatch { row: i });
        }
        for ((&col, &want), &got) in want_cols.iter().zip(want_vals).zip(got_vals) {
            if !approx_eq(want, got, S::REL_TOL) {
                return Err(VerifyFailure::ValueMismatch {
                    row: i,
                    col,
                    expected: want.to_f64(),
                    actual: got.to_f64(),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::{validate, CooTriplet};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    pub(crate) fn random_csr(
        rng: &mut StdRng,
        rows: usize,
        cols: usize,
        density: f64,
    ) -> CsrMatrix<f64> {
        let mut triplets = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if rng.random::<f64>() < density {
                    triplets.push(CooTriplet {
                        row: r as u32,
                        col: c as u32,
                        // Small integer values keep double sums exact.
                        value: rng.random_range(-4..=4) as f64,
                    });
                }
            }
        }
        CsrMatrix::from_coo(rows, cols, triplets).unwrap().0
    }

    #[test]
    fn identity_times_identity() {
        let i3 = CsrMatrix::<f64>::identity(3);
        let c = spgemm_gustavson(&i3, &i3).unwrap();
        assert_eq!(c, i3);
    }

    #[test]
    fn nilpotent_square_is_empty() {
        // A = [[0,1],[0,0]]: row 1 of A is empty, so A^2 has no candidates.
        let a = CsrMatrix::new(2, 2, vec![0, 1, 1], vec![1], vec![1.0]).unwrap();
        let c = spgemm_gustavson(&a, &a).unwrap();
        assert_eq!(c.nnz(), 0);
        assert_eq!(c.row_ptr(), &[0, 0, 0]);
    }

    #[test]
    fn dense_check_identity_and_hand_case() {
        let i2 = CsrMatrix::<f64>::identity(2);
        let m = CsrMatrix::new(2, 2, vec![0, 2, 4], vec![0, 1, 0, 1], vec![
            1.0, 2.0, 3.0, 4.0,
        ])
        .unwrap();
        assert_eq!(spgemm_dense_check(&i2, &m).unwrap(), m);

        // [[1,1],[0,1]]^2 = [[1,2],[0,1]]
        let u = CsrMatrix::new(2, 2, vec![0, 2, 3], vec![0, 1, 1], vec![1.0, 1.0, 1.0]).unwrap();
        let sq = spgemm_dense_check(&u, &u).unwrap();
        assert_eq!(sq.row(0), (&[0u32, 1][..], &[1.0, 2.0][..]));
        assert_eq!(sq.row(1), (&[1u32][..], &[1.0][..]));
    }

    #[test]
    fn cancellation_keeps_explicit_zero() {
        // (1)(1) + (-1)(1) = 0 at position (0,0): the entry must be stored.
        let a = CsrMatrix::new(1, 2, vec![0, 2], vec![0, 1], vec![1.0, -1.0]).unwrap();
        let b = CsrMatrix::new(2, 1, vec![0, 1, 2], vec![0, 0], vec![1.0, 1.0]).unwrap();
        for c in [spgemm_gustavson(&a, &b).unwrap(), spgemm_dense_check(&a, &b).unwrap()] {
            assert_eq!(c.nnz(), 1);
            assert_eq!(c.values(), &[0.0]);
        }
    }

    #[test]
    fn gustavson_matches_dense_check_on_random_inputs() {
        let mut rng = StdRng::seed_from_u64(7);
        for trial in 0..40 {
            let n = 2 + (trial % 12);
            let a = random_csr(&mut rng, n, n, 0.3);
            let g = spgemm_gustavson(&a, &a).unwrap();
            let d = spgemm_dense_check(&a, &a).unwrap();
            assert_eq!(g, d);
            assert!(validate(&g).is_empty());
        }
    }

    #[test]
    fn flops_of_identity_square() {
        let i3 = CsrMatrix::<f64>::identity(3);
        assert_eq!(count_flops(&i3, &i3).unwrap(), 6);
    }

    #[test]
    fn flops_match_enumeration() {
        let mut rng = StdRng::seed_from_u64(11);
        let a = random_csr(&mut rng, 16, 16, 0.25);
        let b = random_csr(&mut rng, 16, 16, 0.25);
        let mut candidates = 0u64;
        for t in a.triplets() {
            candidates += b.row_nnz(t.col as usize) as u64;
        }
        assert_eq!(count_flops(&a, &b).unwrap(), candidates * 2);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = CsrMatrix::<f64>::identity(2);
        let b = CsrMatrix::<f64>::identity(3);
        assert!(spgemm_gustavson(&a, &b).is_err());
        assert!(spgemm_dense_check(&a, &b).is_err());
        assert!(count_flops(&a, &b).is_err());
    }

    #[test]
    fn verify_flags_wrong_values_and_pattern() {
        let i2 = CsrMatrix::<f64>::identity(2);
        assert_eq!(verify_against_oracle(&i2, &i2, &i2), Ok(()));

        let wrong_val =
            CsrMatrix::new(2, 2, vec![0, 1, 2], vec![0, 1], vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            verify_against_oracle(&i2, &i2, &wrong_val),
            Err(VerifyFailure::ValueMismatch { row: 1, .. })
        ));

        let wrong_pattern =
            CsrMatrix::new(2, 2, vec![0, 1, 2], vec![1, 1], vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            verify_against_oracle(&i2, &i2, &wrong_pattern),
            Err(VerifyFailure::PatternMismatch { row: 0 })
        ));
    }
}
