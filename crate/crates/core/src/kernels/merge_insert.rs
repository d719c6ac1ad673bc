//! Merge method for rows with more than 512 candidates.
//!
//! The resulting sequence is kept sorted and duplicate-free at all times,
//! which turns the expensive random inserts into merges of sorted
//! sequences. Per input nonzero `a_ij`, the scaled row `a_ij * b_j*` runs
//! through four sub-steps:
//!
//! 1. binary-search every staged column against the resulting sequence,
//!    adding values into hits and masking them as duplicates,
//! 2. prefix-sum the unmasked entries into placement positions,
//! 3. compact the survivors,
//! 4. merge survivors and resulting sequence into one sorted sequence
//!    (merge path; a serial two-pointer merge is the debug fallback).
//!
//! The resulting sequence lives in a workspace whose permitted length
//! mirrors the row's allocated capacity. If a merge would overflow, the
//! kernel records its position in the input row as a checkpoint, dumps the
//! sequence to the row slot, requests doubled capacity, and resumes from
//! the checkpoint.

use crate::merge_lab::{merge_path_into, serial_merge_into};
use crate::pipeline::{FaultSite, PipelineConfig, PipelineError, RowSlot, TempShared};
use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

pub struct MergeWorkspace<S> {
    result_cols: Vec<u32>,
    result_vals: Vec<S>,
    /// Scaled entries of the current input row.
    staged_cols: Vec<u32>,
    staged_vals: Vec<S>,
    /// Duplicate flags of the staged entries.
    mask: Vec<bool>,
    /// Prefix-summed placement positions of the survivors.
    positions: Vec<u32>,
    surv_cols: Vec<u32>,
    surv_vals: Vec<S>,
    merged_cols: Vec<u32>,
    merged_vals: Vec<S>,
    /// Next unprocessed nonzero of the input row; only ever advances.
    checkpoint: usize,
}

impl<S: Scalar> MergeWorkspace<S> {
    pub fn new() -> Self {
        MergeWorkspace {
            result_cols: Vec::new(),
            result_vals: Vec::new(),
            staged_cols: Vec::new(),
            staged_vals: Vec::new(),
            mask: Vec::new(),
            positions: Vec::new(),
            surv_cols: Vec::new(),
            surv_vals: Vec::new(),
            merged_cols: Vec::new(),
            merged_vals: Vec::new(),
            checkpoint: 0,
        }
    }
}

impl<S: Scalar> Default for MergeWorkspace<S> {
    fn default() -> Self {
        Self::new()
    }
}

pub(super) fn merge_row<S: Scalar>(
    slot: &mut RowSlot<S>,
    shared: &TempShared,
    a: &CsrMatrix<S>,
    b: &CsrMatrix<S>,
    ws: &mut MergeWorkspace<S>,
    cfg: &PipelineConfig,
    pattern_only: bool,
) -> Result<usize, PipelineError> {
    let no_accumulate = cfg.fault == Some(FaultSite::MergeNoAccumulate);
    let row = slot.row() as usize;
    let mut capacity = slot.capacity();
    ws.result_cols.clear();
    ws.result_vals.clear();
    ws.checkpoint = 0;

    let (a_cols, a_vals) = a.row(row);
    while ws.checkpoint < a_cols.len() {
        let j = a_cols[ws.checkpoint] as usize;
        let a_ij = a_vals[ws.checkpoint];
        let (b_cols, b_vals) = b.row(j);

        // Stage the scaled input row.
        ws.staged_cols.clear();
        ws.staged_vals.clear();
        ws.staged_cols.extend_from_slice(b_cols);
        if pattern_only {
            ws.staged_vals.resize(b_vals.len(), S::zero());
        } else {
            ws.staged_vals.extend(b_vals.iter().map(|&v| a_ij * v));
        }

        // (1) Fuse entries whose column already exists in the result.
        ws.mask.clear();
        ws.mask.resize(ws.staged_cols.len(), false);
        for (t, &c) in ws.staged_cols.iter().enumerate() {
            if let Ok(hit) = ws.result_cols.binary_search(&c) {
                if !no_accumulate {
                    ws.result_vals[hit] += ws.staged_vals[t];
                }
                ws.mask[t] = true;
            }
        }

        // (2) Prefix-sum the unmasked entries into contiguous positions.
        ws.positions.clear();
        let mut survivors = 0u32;
        for &masked in &ws.mask {
            ws.positions.push(survivors);
            survivors += u32::from(!masked);
        }
        let survivors = survivors as usize;

        // (3) Copy the non-duplicate entries to their positions.
        ws.surv_cols.resize(survivors, 0);
        ws.surv_vals.resize(survivors, S::zero());
        for (t, &masked) in ws.mask.iter().enumerate() {
            if !masked {
                let at = ws.positions[t] as usize;
                ws.surv_cols[at] = ws.staged_cols[t];
                ws.surv_vals[at] = ws.staged_vals[t];
            }
        }

        // The merge needs room for both sequences. Checkpoint, dump, and
        // regrow until it fits; the workspace keeps the sequence, so the
        // reload after regrowth is implicit.
        while ws.result_cols.len() + survivors > capacity {
            slot.write_row(&ws.result_cols, &ws.result_vals);
            capacity = shared.regrow(slot)?;
        }

        // (4) Merge the two sorted sequences.
        if survivors > 0 {
            if cfg.serial_merge_fallback {
                serial_merge_into(
                    &ws.result_cols,
                    &ws.result_vals,
                    &ws.surv_cols,
                    &ws.surv_vals,
                    &mut ws.merged_cols,
                    &mut ws.merged_vals,
                );
            } else {
                merge_path_into(
                    &ws.result_cols,
                    &ws.result_vals,
                    &ws.surv_cols,
                    &ws.surv_vals,
                    cfg.merge_lanes,
                    &mut ws.merged_cols,
                    &mut ws.merged_vals,
                );
            }
            std::mem::swap(&mut ws.result_cols, &mut ws.merged_cols);
            std::mem::swap(&mut ws.result_vals, &mut ws.merged_vals);
            // Step (1) removed every shared column, so ties are impossible.
            debug_assert!(
                ws.result_cols.windows(2).all(|w| w[0] < w[1]),
                "equal-column tie survived fusion in row {row}"
            );
        }
        ws.checkpoint += 1;
    }

    slot.write_row(&ws.result_cols, &ws.result_vals);
    Ok(ws.result_cols.len())
}
