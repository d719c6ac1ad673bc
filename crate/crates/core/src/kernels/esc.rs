//! Expansion, sorting, compression for rows with 33 to 512 candidates.
//!
//! The candidates are expanded into an array padded to the next power of
//! two with sentinel columns, sorted by a basic bitonic network, and
//! compressed by marking segment heads, prefix-summing the marks into
//! output positions, and reducing each equal-column segment's values.

use super::CandidateEntry;
use crate::pipeline::{FaultSite, RowSlot};
use crate::scalar::Scalar;

/// Columns are widened to `u64` inside the workspace so the sentinel can
/// never collide with a real index.
const SENTINEL: u64 = u64::MAX;

pub struct EscWorkspace<S> {
    entries: Vec<(u64, S)>,
    heads: Vec<u32>,
    scan: Vec<u32>,
}

impl<S: Scalar> EscWorkspace<S> {
    pub fn new() -> Self {
        EscWorkspace {
            entries: Vec::new(),
            heads: Vec::new(),
            scan: Vec::new(),
        }
    }
}

impl<S: Scalar> Default for EscWorkspace<S> {
    fn default() -> Self {
        Self::new()
    }
}

/// Basic bitonic sort network over a power-of-two length, ascending by
/// key. Pairs move together.
pub(crate) fn bitonic_sort_pairs<S: Copy>(entries: &mut [(u64, S)]) {
    let n = entries.len();
    debug_assert!(n.is_power_of_two() || n == 0);
    let mut k = 2;
    while k <= n {
        let mut j = k / 2;
        while j > 0 {
            for i in 0..n {
                let l = i ^ j;
                if l > i {
                    let ascending = i & k == 0;
                    if (ascending && entries[i].0 > entries[l].0)
                        || (!ascending && entries[i].0 < entries[l].0)
                    {
                        entries.swap(i, l);
                    }
                }
            }
            j /= 2;
        }
        k *= 2;
    }
}

pub(super) fn esc_row<S: Scalar>(
    slot: &mut RowSlot<S>,
    candidates: &[CandidateEntry<S>],
    ws: &mut EscWorkspace<S>,
    fault: Option<FaultSite>,
) -> usize {
    let no_compress = fault == Some(FaultSite::EscNoCompress);
    let n = candidates.len();
    if n == 0 {
        slot.set_used(0);
        return 0;
    }

    ws.entries.clear();
    ws.entries
        .extend(candidates.iter().map(|c| (c.col as u64, c.value)));
    ws.entries.resize(n.next_power_of_two(), (SENTINEL, S::zero()));
    bitonic_sort_pairs(&mut ws.entries);

    // Mark segment heads over the real entries (sentinels sorted last).
    let entries = &ws.entries[..n];
    ws.heads.clear();
    ws.heads.extend((0..n).map(|i| {
        u32::from(i == 0 || entries[i].0 != entries[i - 1].0 || no_compress)
    }));

    // Inclusive prefix-sum scan: scan[i] - 1 is the output position of the
    // segment containing entry i.
    ws.scan.clear();
    let mut acc = 0u32;
    for &h in &ws.heads {
        acc += h;
        ws.scan.push(acc);
    }
    let used = acc as usize;

    let (cols_out, vals_out) = slot.buffers_mut();
    for (i, &(col, val)) in entries.iter().enumerate() {
        let at = (ws.scan[i] - 1) as usize;
        if ws.heads[i] == 1 {
            cols_out[at] = col as u32;
            vals_out[at] = val;
        } else {
            vals_out[at] += val;
        }
    }
    slot.set_used(used);
    used
}
