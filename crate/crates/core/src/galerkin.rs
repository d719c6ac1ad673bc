//! Sparse triple products `R * A * P` with both association orders, plus a
//! plain aggregation prolongator for self-contained test inputs.
//!
//! The coarse-grid operator of an algebraic multigrid hierarchy is the
//! product of three sparse matrices: the transposed prolongator, the
//! system matrix, and the prolongator. Both `(R A) P` and `R (A P)` are
//! driven through the pipeline and must agree.

use serde::Serialize;

use crate::pipeline::{spgemm_with_config, PipelineConfig, PipelineError, SpgemmReport, Strategy};
use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

#[derive(Debug, thiserror::Error)]
pub enum GalerkinError {
    #[error("prolongator needs a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("degenerate blocking factor {block} for {rows} rows")]
    DegenerateBlocking { block: usize, rows: usize },
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

/// Assignment of every fine row to one aggregate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregationMap {
    pub aggregate_of: Vec<u32>,
    pub num_aggregates: usize,
}

impl AggregationMap {
    /// Blocks of `block` consecutive rows per aggregate.
    pub fn blocked(num_rows: usize, block: usize) -> Result<Self, GalerkinError> {
        if block == 0 || block > num_rows {
            return Err(GalerkinError::DegenerateBlocking {
                block,
                rows: num_rows,
            });
        }
        let aggregate_of: Vec<u32> = (0..num_rows).map(|i| (i / block) as u32).collect();
        let num_aggregates = num_rows.div_ceil(block);
        Ok(AggregationMap {
            aggregate_of,
            num_aggregates,
        })
    }
}

/// Unsmoothed aggregation prolongator: `n x num_aggregates` with exactly
/// one unit entry per row. Every column is nonempty by construction.
pub fn build_prolongator<S: Scalar>(
    a: &CsrMatrix<S>,
    block: usize,
) -> Result<CsrMatrix<S>, GalerkinError> {
    if a.num_rows() != a.num_cols() {
        return Err(GalerkinError::NotSquare {
            rows: a.num_rows(),
            cols: a.num_cols(),
        });
    }
    let map = AggregationMap::blocked(a.num_rows(), block)?;
    let n = a.num_rows();
    Ok(CsrMatrix::from_raw_parts_unchecked(
        n,
        map.num_aggregates,
        (0..=n as u64).collect(),
        map.aggregate_of,
        vec![S::one(); n],
    ))
}

/// Exact CSR transpose with sorted rows (counting sort over columns).
pub fn transpose<S: Scalar>(m: &CsrMatrix<S>) -> CsrMatrix<S> {
    let rows_out = m.num_cols();
    let mut row_ptr = vec![0u64; rows_out + 1];
    for &c in m.col_idx() {
        row_ptr[c as usize + 1] += 1;
    }
    for i in 0..rows_out {
        row_ptr[i + 1] += row_ptr[i];
    }
    let mut cursor = row_ptr.clone();
    let mut col_idx = vec![0u32; m.nnz()];
    let mut values = vec![S::zero(); m.nnz()];
    for row in 0..m.num_rows() {
        let (cols, vals) = m.row(row);
        for (&c, &v) in cols.iter().zip(vals) {
            let at = cursor[c as usize] as usize;
            col_idx[at] = row as u32;
            values[at] = v;
            cursor[c as usize] += 1;
        }
    }
    CsrMatrix::from_raw_parts_unchecked(rows_out, m.num_rows(), row_ptr, col_idx, values)
}

/// Association order of the triple product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GalerkinOrder {
    /// `(R A) P`
    RaThenP,
    /// `R (A P)`
    ApThenR,
}

impl GalerkinOrder {
    pub fn name(self) -> &'static str {
        match self {
            GalerkinOrder::RaThenP => "ra_then_p",
            GalerkinOrder::ApThenR => "ap_then_r",
        }
    }
}

/// Computes `transpose(p) * a * p` in the given order; returns the coarse
/// operator and the two multiply reports.
pub fn galerkin_product<S: Scalar>(
    p: &CsrMatrix<S>,
    a: &CsrMatrix<S>,
    order: GalerkinOrder,
) -> Result<(CsrMatrix<S>, [SpgemmReport; 2]), GalerkinError> {
    galerkin_product_with(p, a, order, Strategy::Hybrid, &PipelineConfig::default())
}

pub fn galerkin_product_with<S: Scalar>(
    p: &CsrMatrix<S>,
    a: &CsrMatrix<S>,
    order: GalerkinOrder,
    strategy: Strategy,
    cfg: &PipelineConfig,
) -> Result<(CsrMatrix<S>, [SpgemmReport; 2]), GalerkinError> {
    if a.num_rows() != a.num_cols() {
        return Err(GalerkinError::NotSquare {
            rows: a.num_rows(),
            cols: a.num_cols(),
        });
    }
    if a.num_cols() != p.num_rows() {
        return Err(GalerkinError::Pipeline(PipelineError::DimensionMismatch {
            a_rows: a.num_rows(),
            a_cols: a.num_cols(),
            b_rows: p.num_rows(),
            b_cols: p.num_cols(),
        }));
    }
    let r = transpose(p);
    match order {
        GalerkinOrder::RaThenP => {
            let (ra, rep1) = spgemm_with_config(&r, a, strategy, cfg)?;
            let (coarse, rep2) = spgemm_with_config(&ra, p, strategy, cfg)?;
            Ok((coarse, [rep1, rep2]))
        }
        GalerkinOrder::ApThenR => {
            let (ap, rep1) = spgemm_with_config(a, p, strategy, cfg)?;
            let (coarse, rep2) = spgemm_with_config(&r, &ap, strategy, cfg)?;
            Ok((coarse, [rep1, rep2]))
        }
    }
}

/// One level of a coarsening hierarchy.
#[derive(Debug)]
pub struct CoarseLevel<S> {
    pub operator: CsrMatrix<S>,
    pub reports: [SpgemmReport; 2],
}

/// Repeatedly coarsens `a` with blocked aggregation until `levels` levels
/// exist or the operator has fewer than `stop_below` rows.
pub fn coarsen_hierarchy<S: Scalar>(
    a: &CsrMatrix<S>,
    block: usize,
    levels: usize,
    stop_below: usize,
    order: GalerkinOrder,
) -> Result<Vec<CoarseLevel<S>>, GalerkinError> {
    let mut out = Vec::new();
    let mut current = a.clone();
    for _ in 0..levels {
        if current.num_rows() < stop_below.max(block) {
            break;
        }
        let p = build_prolongator(&current, block)?;
        let (coarse, reports) = galerkin_product(&p, &current, order)?;
        current = coarse.clone();
        out.push(CoarseLevel {
            operator: coarse,
            reports,
        });
    }
    Ok(out)
}
