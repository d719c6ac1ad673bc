//! Heap method for rows with 2 to 32 candidate products.
//!
//! All candidates are loaded into an implicit binary max-heap keyed on the
//! column index. A duplicate-eliminating variant of heapsort then drains
//! it: every delete-max either *fuses* into the head of the resulting
//! sequence (root column equals the head's column, values add) or is
//! prepended to the sequence. Because pops come out in non-increasing
//! column order, the sequence grows from the tail of the same array and is
//! sorted ascending and duplicate-free at every step.

use super::CandidateEntry;
use crate::pipeline::{FaultSite, RowSlot};
use crate::scalar::Scalar;

/// One array holds both regions: `pairs[..heap_len]` is the heap,
/// `pairs[result_start..]` the resulting sequence. The regions never
/// overlap; each delete-max shrinks the heap by one and grows the result
/// by at most one.
pub struct HeapWorkspace<S> {
    pairs: Vec<(u32, S)>,
}

impl<S: Scalar> HeapWorkspace<S> {
    pub fn new() -> Self {
        HeapWorkspace { pairs: Vec::new() }
    }
}

impl<S: Scalar> Default for HeapWorkspace<S> {
    fn default() -> Self {
        Self::new()
    }
}

#[inline]
fn sift_down<S: Scalar>(pairs: &mut [(u32, S)], mut at: usize, len: usize) {
    loop {
        let left = 2 * at + 1;
        if left >= len {
            return;
        }
        let mut largest = if pairs[left].0 > pairs[at].0 { left } else { at };
        let right = left + 1;
        if right < len && pairs[right].0 > pairs[largest].0 {
            largest = right;
        }
        if largest == at {
            return;
        }
        pairs.swap(at, largest);
        at = largest;
    }
}

/// Sorted ascending by column with no duplicates; the mid-algorithm
/// invariant of the resulting sequence.
fn result_region_ok<S: Scalar>(result: &[(u32, S)]) -> bool {
    result.windows(2).all(|w| w[0].0 < w[1].0)
}

pub(super) fn heap_row<S: Scalar>(
    slot: &mut RowSlot<S>,
    candidates: &[CandidateEntry<S>],
    ws: &mut HeapWorkspace<S>,
    fault: Option<FaultSite>,
) -> usize {
    let no_fuse = fault == Some(FaultSite::HeapNoFuse);
    let n = candidates.len();
    ws.pairs.clear();
    ws.pairs.extend(candidates.iter().map(|c| (c.col, c.value)));

    let pairs = &mut ws.pairs[..];
    for at in (0..n / 2).rev() {
        sift_down(pairs, at, n);
    }

    let mut heap_len = n;
    let mut result_start = n;
    while heap_len > 0 {
        // Delete-max: take the root out and restore the heap property
        // before the root lands in the result region, so the shrinking
        // heap and the growing sequence never overlap.
        let root = pairs[0];
        heap_len -= 1;
        if heap_len > 0 {
            pairs[0] = pairs[heap_len];
            sift_down(pairs, 0, heap_len);
        }
        if result_start < n && pairs[result_start].0 == root.0 && !no_fuse {
            // Root fuses into the first entry of the resulting sequence.
            pairs[result_start].1 += root.1;
        } else {
            result_start -= 1;
            pairs[result_start] = root;
        }
        debug_assert!(heap_len <= result_start, "heap and result regions overlap");
        debug_assert!(
            no_fuse || result_region_ok(&pairs[result_start..n]),
            "resulting sequence lost its order"
        );
    }

    let used = n - result_start;
    let result = &pairs[result_start..n];
    let (cols_out, vals_out) = slot.buffers_mut();
    for (t, &(c, v)) in result.iter().enumerate() {
        cols_out[t] = c;
        vals_out[t] = v;
    }
    slot.set_used(used);
    used
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{
        BinSet, CapacityRule, PipelineConfig, TempMatrix, UpperBoundArray,
    };

    fn slot_for(u: u64) -> TempMatrix<f64> {
        let cfg = PipelineConfig::default();
        let ub = UpperBoundArray::from_vec(vec![u]);
        let bins = BinSet::build(&ub, &cfg);
        TempMatrix::allocate(&ub, &bins, CapacityRule::Hybrid, &cfg)
    }

    fn run(candidates: &[(u32, f64)]) -> (Vec<u32>, Vec<f64>) {
        let mut tmp = slot_for(candidates.len() as u64);
        let cands: Vec<CandidateEntry<f64>> = candidates
            .iter()
            .map(|&(col, value)| CandidateEntry { col, value })
            .collect();
        let used = heap_row(
            tmp.slot_mut(0),
            &cands,
            &mut HeapWorkspace::new(),
            None,
        );
        let slot = tmp.slot(0);
        assert_eq!(used, slot.used());
        (slot.cols().to_vec(), slot.vals().to_vec())
    }

    #[test]
    fn fusion_example() {
        let (cols, vals) = run(&[(5, 1.0), (3, 2.0), (5, 4.0)]);
        assert_eq!(cols, vec![3, 5]);
        assert_eq!(vals, vec![2.0, 5.0]);
    }

    #[test]
    fn all_same_column_fuses_to_one() {
        let (cols, vals) = run(&[(7, 1.0), (7, 2.0), (7, 3.0), (7, 4.0)]);
        assert_eq!(cols, vec![7]);
        assert_eq!(vals, vec![10.0]);
    }

    #[test]
    fn distinct_columns_sort() {
        let (cols, vals) = run(&[(9, 1.0), (1, 2.0), (4, 3.0)]);
        assert_eq!(cols, vec![1, 4, 9]);
        assert_eq!(vals, vec![2.0, 3.0, 1.0]);
    }

    #[test]
    fn random_rows_match_a_sorted_fold() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..200 {
            let n = rng.random_range(2..=32usize);
            let candidates: Vec<(u32, f64)> = (0..n)
                .map(|_| (rng.random_range(0..16u32), rng.random_range(-3..=3) as f64))
                .collect();
            let (cols, vals) = run(&candidates);

            let mut expected: Vec<(u32, f64)> = Vec::new();
            let mut sorted = candidates.clone();
            sorted.sort_by_key(|&(c, _)| c);
            for (c, v) in sorted {
                match expected.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => expected.push((c, v)),
                }
            }
            assert_eq!(cols, expected.iter().map(|e| e.0).collect::<Vec<_>>());
            assert_eq!(vals, expected.iter().map(|e| e.1).collect::<Vec<_>>());
        }
    }

    #[test]
    fn no_fuse_fault_leaves_duplicates() {
        let mut tmp = slot_for(3);
        let cands = vec![
            CandidateEntry { col: 5, value: 1.0 },
            CandidateEntry { col: 5, value: 4.0 },
            CandidateEntry { col: 3, value: 2.0 },
        ];
        let used = heap_row(
            tmp.slot_mut(0),
            &cands,
            &mut HeapWorkspace::new(),
            Some(FaultSite::HeapNoFuse),
        );
        assert_eq!(used, 3);
        assert_eq!(tmp.slot(0).cols(), &[3, 5, 5]);
    }
}
