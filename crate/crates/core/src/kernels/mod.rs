//! Stage 3: the differentiated row-computation kernels.
//!
//! Rows are dispatched by bin group: trivial handling for empty and
//! single-candidate rows, an index-value pair heap for rows of up to 32
//! candidates, expansion/bitonic sort/compression up to 512, and staged
//! merge-insertion with progressive growth beyond that. A row's bin alone
//! decides its kernel; each kernel writes only its own row slot.

mod heap;
mod merge_insert;

pub(crate) mod esc;

pub use esc::EscWorkspace;
pub use heap::HeapWorkspace;
pub use merge_insert::MergeWorkspace;

use crate::par;
use crate::pipeline::{
    BinGroup, BinSet, FaultSite, PipelineConfig, PipelineError, RowSlot, TempMatrix, TempShared,
};
use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

/// One candidate product `a_ij * b_jk` headed for output column `col`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateEntry<S> {
    pub col: u32,
    pub value: S,
}

/// Expands every candidate product of `row`, in input order. With
/// `pattern_only` the multiplications are suppressed and zeros are staged
/// instead; the output pattern is unaffected.
#[inline]
fn expand_candidates<S: Scalar>(
    row: usize,
    a: &CsrMatrix<S>,
    b: &CsrMatrix<S>,
    pattern_only: bool,
    out: &mut Vec<CandidateEntry<S>>,
) {
    out.clear();
    let (a_cols, a_vals) = a.row(row);
    for (&j, &a_ij) in a_cols.iter().zip(a_vals) {
        let (b_cols, b_vals) = b.row(j as usize);
        for (&k, &b_jk) in b_cols.iter().zip(b_vals) {
            let value = if pattern_only { S::zero() } else { a_ij * b_jk };
            out.push(CandidateEntry { col: k, value });
        }
    }
}

/// Scratch buffers reused across rows by one worker.
pub struct KernelWorkspaces<S> {
    candidates: Vec<CandidateEntry<S>>,
    heap: HeapWorkspace<S>,
    esc: EscWorkspace<S>,
    merge: MergeWorkspace<S>,
}

impl<S: Scalar> KernelWorkspaces<S> {
    pub fn new() -> Self {
        KernelWorkspaces {
            candidates: Vec::new(),
            heap: HeapWorkspace::new(),
            esc: EscWorkspace::new(),
            merge: MergeWorkspace::new(),
        }
    }
}

impl<S: Scalar> Default for KernelWorkspaces<S> {
    fn default() -> Self {
        Self::new()
    }
}

/// Groups 1 and 2: nothing to do, or exactly one candidate product.
fn trivial_row<S: Scalar>(
    slot: &mut RowSlot<S>,
    a: &CsrMatrix<S>,
    b: &CsrMatrix<S>,
    pattern_only: bool,
    fault: Option<FaultSite>,
) -> usize {
    match slot.group() {
        BinGroup::Empty => {
            slot.set_used(0);
            0
        }
        BinGroup::Singleton => {
            // u = 1: exactly one nonzero a_ij whose b-row holds one entry.
            let (a_cols, a_vals) = a.row(slot.row() as usize);
            for (&j, &a_ij) in a_cols.iter().zip(a_vals) {
                let (b_cols, b_vals) = b.row(j as usize);
                if let (Some(&k), Some(&b_jk)) = (b_cols.first(), b_vals.first()) {
                    let mut value = if pattern_only { S::zero() } else { a_ij * b_jk };
                    if fault == Some(FaultSite::TrivialDouble) {
                        value += value;
                    }
                    slot.write_row(&[k], &[value]);
                    return 1;
                }
            }
            unreachable!("group-2 row without a candidate entry");
        }
        other => panic!("trivial kernel dispatched for group {other:?}"),
    }
}

/// Runs the kernel of every non-empty bin; rows inside a bin execute as
/// independent work items writing disjoint slots.
pub fn stage3_compute<S: Scalar>(
    a: &CsrMatrix<S>,
    b: &CsrMatrix<S>,
    bins: &BinSet,
    tmp: &mut TempMatrix<S>,
    cfg: &PipelineConfig,
    pattern_only: bool,
) -> Result<(), PipelineError> {
    for bin in 0..bins.num_bins() {
        if bins.counter(bin) == 0 {
            continue;
        }
        let group = bins.group_of_bin(bin);
        let (slots, shared) = tmp.bin_batch(bin);
        par::try_for_each_slot(slots, KernelWorkspaces::<S>::new, |ws, slot| {
            compute_row(slot, shared, a, b, ws, cfg, group, pattern_only).map(|_| ())
        })?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn compute_row<S: Scalar>(
    slot: &mut RowSlot<S>,
    shared: &TempShared,
    a: &CsrMatrix<S>,
    b: &CsrMatrix<S>,
    ws: &mut KernelWorkspaces<S>,
    cfg: &PipelineConfig,
    group: BinGroup,
    pattern_only: bool,
) -> Result<usize, PipelineError> {
    match group {
        BinGroup::Empty | BinGroup::Singleton => {
            Ok(trivial_row(slot, a, b, pattern_only, cfg.fault))
        }
        BinGroup::Heap => {
            expand_candidates(slot.row() as usize, a, b, pattern_only, &mut ws.candidates);
            Ok(heap::heap_row(slot, &ws.candidates, &mut ws.heap, cfg.fault))
        }
        BinGroup::Esc => {
            expand_candidates(slot.row() as usize, a, b, pattern_only, &mut ws.candidates);
            Ok(esc::esc_row(slot, &ws.candidates, &mut ws.esc, cfg.fault))
        }
        BinGroup::Merge => {
            merge_insert::merge_row(slot, shared, a, b, &mut ws.merge, cfg, pattern_only)
        }
    }
}

/// Computes one row through the kernel of its bin group; single-row entry
/// point mirroring the stage-3 dispatch.
pub fn compute_single_row<S: Scalar>(
    row: usize,
    a: &CsrMatrix<S>,
    b: &CsrMatrix<S>,
    tmp: &mut TempMatrix<S>,
    cfg: &PipelineConfig,
) -> Result<usize, PipelineError> {
    let mut ws = KernelWorkspaces::new();
    let (slot, shared) = tmp.row_batch(row);
    let group = slot.group();
    compute_row(slot, shared, a, b, &mut ws, cfg, group, false)
}

/// Trivial kernel (groups 1-2) for one row.
pub fn kernel_trivial<S: Scalar>(
    row: usize,
    a: &CsrMatrix<S>,
    b: &CsrMatrix<S>,
    tmp: &mut TempMatrix<S>,
) -> usize {
    trivial_row(tmp.slot_mut(row), a, b, false, None)
}

/// Heap kernel (group 3) for one row.
pub fn kernel_heap<S: Scalar>(
    row: usize,
    a: &CsrMatrix<S>,
    b: &CsrMatrix<S>,
    tmp: &mut TempMatrix<S>,
) -> usize {
    let mut candidates = Vec::new();
    expand_candidates(row, a, b, false, &mut candidates);
    heap::heap_row(tmp.slot_mut(row), &candidates, &mut HeapWorkspace::new(), None)
}

/// Bitonic ESC kernel (group 4) for one row.
pub fn kernel_bitonic_esc<S: Scalar>(
    row: usize,
    a: &CsrMatrix<S>,
    b: &CsrMatrix<S>,
    tmp: &mut TempMatrix<S>,
) -> usize {
    let mut candidates = Vec::new();
    expand_candidates(row, a, b, false, &mut candidates);
    esc::esc_row(tmp.slot_mut(row), &candidates, &mut EscWorkspace::new(), None)
}

/// Merge-insert kernel (group 5) for one row.
pub fn kernel_merge_insert<S: Scalar>(
    row: usize,
    a: &CsrMatrix<S>,
    b: &CsrMatrix<S>,
    tmp: &mut TempMatrix<S>,
    cfg: &PipelineConfig,
) -> Result<usize, PipelineError> {
    let (slot, shared) = tmp.row_batch(row);
    merge_insert::merge_row(slot, shared, a, b, &mut MergeWorkspace::new(), cfg, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{stage1_upper_bound, stage2_binning};
    use crate::sparse::CooTriplet;

    fn temp_for(a: &CsrMatrix<f64>, b: &CsrMatrix<f64>) -> TempMatrix<f64> {
        let u = stage1_upper_bound(a, b).unwrap();
        stage2_binning(&u, &PipelineConfig::default()).1
    }

    #[test]
    fn trivial_kernel_empty_row() {
        // Row 1 of A is empty, so row 1 of the product is too.
        let a = CsrMatrix::new(2, 2, vec![0, 1, 1], vec![0], vec![1.0]).unwrap();
        let mut tmp = temp_for(&a, &a);
        assert_eq!(kernel_trivial(1, &a, &a, &mut tmp), 0);
    }

    #[test]
    fn trivial_kernel_single_product() {
        // a_0* = {(0, 2.0)}, b_0* = {(1, 3.0)}  =>  c_0* = {(1, 6.0)}.
        let a = CsrMatrix::new(1, 1, vec![0, 1], vec![0], vec![2.0]).unwrap();
        let (b, _) = CsrMatrix::from_coo(1, 2, vec![CooTriplet {
            row: 0,
            col: 1,
            value: 3.0,
        }])
        .unwrap();
        let mut tmp = temp_for(&a, &b);
        assert_eq!(kernel_trivial(0, &a, &b, &mut tmp), 1);
        assert_eq!(tmp.slot(0).cols(), &[1]);
        assert_eq!(tmp.slot(0).vals(), &[6.0]);
    }

    #[test]
    fn trivial_kernel_identity_rows() {
        let i3 = CsrMatrix::<f64>::identity(3);
        let mut tmp = temp_for(&i3, &i3);
        for row in 0..3 {
            assert_eq!(kernel_trivial(row, &i3, &i3, &mut tmp), 1);
            assert_eq!(tmp.slot(row).vals(), &[1.0]);
        }
    }

    #[test]
    fn single_row_dispatch_matches_group() {
        let a = CsrMatrix::<f64>::identity(4);
        let mut tmp = temp_for(&a, &a);
        for row in 0..4 {
            assert_eq!(
                compute_single_row(row, &a, &a, &mut tmp, &PipelineConfig::default()).unwrap(),
                1
            );
        }
    }
}
