//! Stage 2: assign output rows to bins by upper-bound size.
//!
//! 38 bins in five groups drive both kernel dispatch and the hybrid
//! pre-allocation. With the default thresholds:
//!
//! | bins    | upper bound `u`      | group | kernel                  |
//! |---------|----------------------|-------|-------------------------|
//! | 0       | 0                    | 1     | nothing to do           |
//! | 1       | 1                    | 2     | single product          |
//! | 2..=32  | exactly the bin id   | 3     | heap                    |
//! | 33..=36 | 33-64, 65-128, 129-256, 257-512 | 4 | bitonic ESC  |
//! | 37      | > 512                | 5     | merge-insert, 2x growth |
//!
//! Binning runs sequentially: it is a handful of linear traverses.

use serde::Serialize;

use super::config::PipelineConfig;
use super::upper_bound::UpperBoundArray;

/// The five row classes, ordered by upper-bound size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BinGroup {
    /// `u = 0`: empty output row.
    Empty,
    /// `u = 1`: one candidate product.
    Singleton,
    /// `2 <= u <= 32`: heap kernel.
    Heap,
    /// `33 <= u <= 512`: expansion / bitonic sort / compression kernel.
    Esc,
    /// `u > 512`: staged merge-insert kernel with progressive growth.
    Merge,
}

impl BinGroup {
    /// Group id 1..=5.
    pub fn id(self) -> u8 {
        match self {
            BinGroup::Empty => 1,
            BinGroup::Singleton => 2,
            BinGroup::Heap => 3,
            BinGroup::Esc => 4,
            BinGroup::Merge => 5,
        }
    }
}

/// Row indices distributed over the bins.
#[derive(Debug, Clone)]
pub struct BinSet {
    bins: Vec<Vec<u32>>,
    counters: Vec<usize>,
    cfg: BinLayout,
}

/// The bin boundaries, fixed at binning time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinLayout {
    /// Largest upper bound with its own single-size bin (bin ids 2..=max).
    pub singleton_max: u32,
    /// Upper limits of the four range bins.
    pub range_bounds: [u32; 4],
}

impl Default for BinLayout {
    fn default() -> Self {
        BinLayout {
            singleton_max: 32,
            range_bounds: [64, 128, 256, 512],
        }
    }
}

impl BinLayout {
    pub fn num_bins(&self) -> usize {
        self.singleton_max as usize + 6
    }

    /// Bin id for an upper bound.
    pub fn bin_for(&self, u: u64) -> usize {
        if u <= self.singleton_max as u64 {
            // Bins 0 and 1 are the empty/singleton groups; 2..=max map to
            // their own size.
            return u as usize;
        }
        let base = self.singleton_max as usize + 1;
        for (k, &bound) in self.range_bounds.iter().enumerate() {
            if u <= bound as u64 {
                return base + k;
            }
        }
        base + self.range_bounds.len()
    }

    pub fn group_of_bin(&self, bin: usize) -> BinGroup {
        match bin {
            0 => BinGroup::Empty,
            1 => BinGroup::Singleton,
            b if b <= self.singleton_max as usize => BinGroup::Heap,
            b if b < self.num_bins() - 1 => BinGroup::Esc,
            _ => BinGroup::Merge,
        }
    }
}

impl BinSet {
    /// Distributes every row into exactly one bin (one linear traverse).
    pub fn build(u: &UpperBoundArray, cfg: &PipelineConfig) -> BinSet {
        let layout = cfg.bin_layout;
        let mut bins = vec![Vec::new(); layout.num_bins()];
        for (row, &ui) in u.as_slice().iter().enumerate() {
            bins[layout.bin_for(ui)].push(row as u32);
        }
        let counters = bins.iter().map(Vec::len).collect();
        BinSet {
            bins,
            counters,
            cfg: layout,
        }
    }

    pub fn num_bins(&self) -> usize {
        self.bins.len()
    }

    pub fn bin(&self, id: usize) -> &[u32] {
        &self.bins[id]
    }

    /// Host-side row counter of a bin; kernels are only issued for bins
    /// with a nonzero count.
    pub fn counter(&self, id: usize) -> usize {
        self.counters[id]
    }

    pub fn counters(&self) -> &[usize] {
        &self.counters
    }

    pub fn group_of_bin(&self, id: usize) -> BinGroup {
        self.cfg.group_of_bin(id)
    }

    pub fn layout(&self) -> &BinLayout {
        &self.cfg
    }

    pub fn group_of_u(&self, u: u64) -> BinGroup {
        self.cfg.group_of_bin(self.cfg.bin_for(u))
    }

    /// Total rows across all bins.
    pub fn total_rows(&self) -> usize {
        self.counters.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin_of(u: u64) -> usize {
        BinLayout::default().bin_for(u)
    }

    #[test]
    fn boundary_values_land_in_expected_bins() {
        // Boundaries of every range in the dispatch table.
        assert_eq!(bin_of(0), 0);
        assert_eq!(bin_of(1), 1);
        assert_eq!(bin_of(2), 2);
        assert_eq!(bin_of(32), 32);
        assert_eq!(bin_of(33), 33);
        assert_eq!(bin_of(64), 33);
        assert_eq!(bin_of(65), 34);
        assert_eq!(bin_of(128), 34);
        assert_eq!(bin_of(129), 35);
        assert_eq!(bin_of(256), 35);
        assert_eq!(bin_of(257), 36);
        assert_eq!(bin_of(512), 36);
        assert_eq!(bin_of(513), 37);
        assert_eq!(bin_of(1 << 40), 37);
    }

    #[test]
    fn build_places_example_rows() {
        let u = UpperBoundArray::from_vec(vec![0, 1, 2, 32, 33, 512, 513]);
        let bins = BinSet::build(&u, &PipelineConfig::default());
        assert_eq!(bins.bin(0), &[0]);
        assert_eq!(bins.bin(1), &[1]);
        assert_eq!(bins.bin(2), &[2]);
        assert_eq!(bins.bin(32), &[3]);
        assert_eq!(bins.bin(33), &[4]);
        assert_eq!(bins.bin(36), &[5]);
        assert_eq!(bins.bin(37), &[6]);
        assert_eq!(bins.total_rows(), 7);
        assert_eq!(bins.num_bins(), 38);
    }

    #[test]
    fn counters_match_bin_lengths() {
        let u = UpperBoundArray::from_vec((0..1000).map(|i| (i * 7) % 600).collect());
        let bins = BinSet::build(&u, &PipelineConfig::default());
        for b in 0..bins.num_bins() {
            assert_eq!(bins.counter(b), bins.bin(b).len());
        }
        assert_eq!(bins.total_rows(), 1000);
    }

    #[test]
    fn groups_partition_the_bins() {
        let layout = BinLayout::default();
        let ids: Vec<u8> = (0..layout.num_bins())
            .map(|b| layout.group_of_bin(b).id())
            .collect();
        assert_eq!(ids[0], 1);
        assert_eq!(ids[1], 2);
        assert!(ids[2..=32].iter().all(|&g| g == 3));
        assert!(ids[33..=36].iter().all(|&g| g == 4));
        assert_eq!(ids[37], 5);
    }

    #[test]
    fn custom_thresholds_shift_the_ranges() {
        let layout = BinLayout {
            singleton_max: 8,
            range_bounds: [16, 32, 64, 128],
        };
        assert_eq!(layout.num_bins(), 14);
        assert_eq!(layout.bin_for(8), 8);
        assert_eq!(layout.bin_for(9), 9);
        assert_eq!(layout.bin_for(128), 12);
        assert_eq!(layout.bin_for(129), 13);
        assert_eq!(layout.group_of_bin(13), BinGroup::Merge);
    }

    #[test]
    fn rebinning_recovers_range_membership() {
        let u = UpperBoundArray::from_vec((0..4096).map(|i| (i * 31) % 2000).collect());
        let bins = BinSet::build(&u, &PipelineConfig::default());
        let layout = BinLayout::default();
        let mut seen = vec![0u32; u.len()];
        for b in 0..bins.num_bins() {
            for &row in bins.bin(b) {
                seen[row as usize] += 1;
                let ui = u.as_slice()[row as usize];
                assert_eq!(layout.bin_for(ui), b, "row {row} with u={ui} in bin {b}");
            }
        }
        assert!(seen.iter().all(|&s| s == 1));
    }
}
