//! The temporary resulting matrix written by the stage-3 kernels.
//!
//! Row storage is laid out bin-major: all rows of bin 0 first, then bin 1,
//! and so on. Stage 3 can then hand every bin to its kernel as one
//! contiguous batch of independent row slots. A row-to-slot table maps back
//! to matrix order for the final arrangement.
//!
//! Long rows (bin group 5) start at a fixed capacity and grow by doubling.
//! Growth is the only operation that touches shared state: the event log
//! and the byte counters. Two growth flavors are supported: allocate-fresh
//! -and-copy, which models devices that cannot resize an allocation, and
//! in-place extension, which models re-allocatable shared memory. Both
//! leave the same resident footprint; they differ in copied bytes.

use std::ops::Range;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use super::binning::{BinGroup, BinSet};
use super::config::PipelineConfig;
use super::upper_bound::UpperBoundArray;
use super::PipelineError;
use crate::scalar::{entry_bytes, Scalar};

/// How group-5 rows obtain more space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum RegrowMode {
    /// Allocate a fresh doubled block and copy the existing entries.
    #[default]
    AllocCopy,
    /// Extend the existing block without copying.
    InPlace,
}

/// One capacity change of one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReallocEvent {
    pub row: u32,
    pub old_capacity: usize,
    pub new_capacity: usize,
}

/// Storage of one output row: fixed-capacity column/value arrays plus the
/// entry count the kernel has committed.
#[derive(Debug)]
pub struct RowSlot<S> {
    row: u32,
    group: BinGroup,
    upper_bound: u64,
    hard_cap: usize,
    cap: usize,
    used: usize,
    cols: Vec<u32>,
    vals: Vec<S>,
}

impl<S: Scalar> RowSlot<S> {
    pub fn row(&self) -> u32 {
        self.row
    }

    pub fn group(&self) -> BinGroup {
        self.group
    }

    pub fn upper_bound(&self) -> u64 {
        self.upper_bound
    }

    pub fn capacity(&self) -> usize {
        self.cap
    }

    pub fn used(&self) -> usize {
        self.used
    }

    pub fn cols(&self) -> &[u32] {
        &self.cols[..self.used]
    }

    pub fn vals(&self) -> &[S] {
        &self.vals[..self.used]
    }

    /// Commits a finished row. Panics if the kernel overran its capacity;
    /// kernels must regrow before writing.
    pub fn write_row(&mut self, cols: &[u32], vals: &[S]) {
        assert!(
            cols.len() <= self.cap,
            "row {}: writing {} entries into capacity {}",
            self.row,
            cols.len(),
            self.cap
        );
        debug_assert_eq!(cols.len(), vals.len());
        self.cols[..cols.len()].copy_from_slice(cols);
        self.vals[..vals.len()].copy_from_slice(vals);
        self.used = cols.len();
    }

    pub fn set_used(&mut self, used: usize) {
        assert!(used <= self.cap);
        self.used = used;
    }

    /// Mutable access to the backing arrays for kernels that build the row
    /// directly in place.
    pub fn buffers_mut(&mut self) -> (&mut [u32], &mut [S]) {
        (&mut self.cols[..self.cap], &mut self.vals[..self.cap])
    }
}

/// Shared growth bookkeeping: the only state stage-3 workers contend on.
#[derive(Debug)]
pub struct TempShared {
    realloc_log: Mutex<Vec<ReallocEvent>>,
    resident_bytes: AtomicU64,
    copied_bytes: AtomicU64,
    mode: RegrowMode,
    entry_bytes: u64,
}

impl TempShared {
    /// Doubles `slot`'s capacity, logging the event. Fails if the doubled
    /// capacity would exceed the row's hard cap, which can only happen
    /// through a kernel logic fault.
    pub fn regrow<S: Scalar>(&self, slot: &mut RowSlot<S>) -> Result<usize, PipelineError> {
        let old_cap = slot.cap;
        let new_cap = old_cap * 2;
        if new_cap > slot.hard_cap {
            return Err(PipelineError::RegrowLogicFault {
                row: slot.row,
                requested: new_cap,
                hard_cap: slot.hard_cap,
            });
        }
        match self.mode {
            RegrowMode::AllocCopy => {
                let mut cols = vec![0u32; new_cap];
                let mut vals = vec![S::zero(); new_cap];
                cols[..slot.used].copy_from_slice(&slot.cols[..slot.used]);
                vals[..slot.used].copy_from_slice(&slot.vals[..slot.used]);
                slot.cols = cols;
                slot.vals = vals;
                self.copied_bytes
                    .fetch_add(slot.used as u64 * self.entry_bytes, Ordering::Relaxed);
            }
            RegrowMode::InPlace => {
                slot.cols.resize(new_cap, 0);
                slot.vals.resize(new_cap, S::zero());
            }
        }
        slot.cap = new_cap;
        self.resident_bytes
            .fetch_add((new_cap - old_cap) as u64 * self.entry_bytes, Ordering::Relaxed);
        self.realloc_log.lock().unwrap().push(ReallocEvent {
            row: slot.row,
            old_capacity: old_cap,
            new_capacity: new_cap,
        });
        Ok(new_cap)
    }
}

/// How row capacities are chosen at allocation time.
#[derive(Debug, Clone, Copy)]
pub enum CapacityRule<'a> {
    /// Upper-bound capacity for groups 1-4, a fixed starting capacity with
    /// 2x growth for group 5.
    Hybrid,
    /// Explicit per-row capacities (upper-bound and precise strategies).
    PerRow(&'a [u64]),
}

/// The temporary matrix: one slot per output row plus shared bookkeeping.
#[derive(Debug)]
pub struct TempMatrix<S> {
    slots: Vec<RowSlot<S>>,
    slot_of_row: Vec<u32>,
    bin_ranges: Vec<Range<usize>>,
    shared: TempShared,
}

fn next_pow2(x: u64) -> u64 {
    x.max(1).next_power_of_two()
}

impl<S: Scalar> TempMatrix<S> {
    /// Allocates slots for every row, bin-major, with capacities from
    /// `rule`.
    pub fn allocate(
        u: &UpperBoundArray,
        bins: &BinSet,
        rule: CapacityRule,
        cfg: &PipelineConfig,
    ) -> Self {
        let m = u.len();
        let mut slots = Vec::with_capacity(m);
        let mut slot_of_row = vec![0u32; m];
        let mut bin_ranges = Vec::with_capacity(bins.num_bins());
        let us = u.as_slice();

        for bin in 0..bins.num_bins() {
            let start = slots.len();
            let group = bins.group_of_bin(bin);
            for &row in bins.bin(bin) {
                let ui = us[row as usize];
                let cap = match rule {
                    CapacityRule::Hybrid => match group {
                        BinGroup::Merge => cfg.group5_initial_capacity,
                        _ => ui as usize,
                    },
                    CapacityRule::PerRow(caps) => caps[row as usize] as usize,
                };
                let hard_cap = match group {
                    BinGroup::Merge => {
                        let default = next_pow2(ui) as usize;
                        cfg.hard_cap_override.unwrap_or(default).max(cap)
                    }
                    // Short rows never regrow; their capacity is final.
                    _ => cap,
                };
                slot_of_row[row as usize] = slots.len() as u32;
                slots.push(RowSlot {
                    row,
                    group,
                    upper_bound: ui,
                    hard_cap,
                    cap,
                    used: 0,
                    cols: vec![0u32; cap],
                    vals: vec![S::zero(); cap],
                });
            }
            bin_ranges.push(start..slots.len());
        }

        let initial_bytes: u64 = slots.iter().map(|s| s.cap as u64).sum::<u64>() * entry_bytes::<S>();
        TempMatrix {
            slots,
            slot_of_row,
            bin_ranges,
            shared: TempShared {
                realloc_log: Mutex::new(Vec::new()),
                resident_bytes: AtomicU64::new(initial_bytes),
                copied_bytes: AtomicU64::new(0),
                mode: cfg.regrow_mode,
                entry_bytes: entry_bytes::<S>(),
            },
        }
    }

    pub fn num_rows(&self) -> usize {
        self.slot_of_row.len()
    }

    pub fn slot(&self, row: usize) -> &RowSlot<S> {
        &self.slots[self.slot_of_row[row] as usize]
    }

    pub fn slot_mut(&mut self, row: usize) -> &mut RowSlot<S> {
        &mut self.slots[self.slot_of_row[row] as usize]
    }

    pub fn shared(&self) -> &TempShared {
        &self.shared
    }

    /// The slots of one bin as a contiguous batch, plus the shared growth
    /// state. Rows inside the batch are independent work items.
    pub fn bin_batch(&mut self, bin: usize) -> (&mut [RowSlot<S>], &TempShared) {
        let range = self.bin_ranges[bin].clone();
        (&mut self.slots[range], &self.shared)
    }

    /// One row's slot plus the shared growth state.
    pub fn row_batch(&mut self, row: usize) -> (&mut RowSlot<S>, &TempShared) {
        let s = self.slot_of_row[row] as usize;
        (&mut self.slots[s], &self.shared)
    }

    /// Per-row committed entry counts, in matrix row order.
    pub fn row_counts(&self) -> Vec<u64> {
        self.slot_of_row
            .iter()
            .map(|&s| self.slots[s as usize].used as u64)
            .collect()
    }

    /// Entry bytes currently allocated across all row slots.
    pub fn resident_bytes(&self) -> u64 {
        self.shared.resident_bytes.load(Ordering::Relaxed)
    }

    /// Entry bytes moved by allocate-and-copy growth.
    pub fn copied_bytes(&self) -> u64 {
        self.shared.copied_bytes.load(Ordering::Relaxed)
    }

    /// Growth events sorted by (row, new capacity) so reports are
    /// deterministic regardless of worker interleaving.
    pub fn realloc_log(&self) -> Vec<ReallocEvent> {
        let mut log = self.shared.realloc_log.lock().unwrap().clone();
        log.sort_unstable_by_key(|e| (e.row, e.new_capacity));
        log
    }

    /// Bytes by which group-5 rows overshot their upper bound: the 2x
    /// progression can land above `u_i`, which is how the hybrid strategy
    /// occasionally allocates more than the upper-bound strategy.
    pub fn group5_overshoot_bytes(&self) -> u64 {
        self.slots
            .iter()
            .filter(|s| s.group == BinGroup::Merge)
            .map(|s| (s.cap as u64).saturating_sub(s.upper_bound) * self.shared.entry_bytes)
            .sum()
    }
}
