//! Pipeline tuning knobs.

use super::binning::BinLayout;
use super::temp_matrix::RegrowMode;

/// Fault injection sites for verification coverage. Each flips one piece
/// of kernel fusion logic; mutation tests assert that oracle verification
/// catches every one of them. Never set outside tests.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultSite {
    /// Group-2 kernel writes a doubled product value.
    TrivialDouble,
    /// Heap kernel stops fusing equal columns.
    HeapNoFuse,
    /// ESC kernel skips duplicate compression.
    EscNoCompress,
    /// Merge kernel drops the value accumulation of fused entries.
    MergeNoAccumulate,
}

/// Configuration of binning thresholds, pre-allocation, and kernel
/// behavior. The defaults mirror the sizes the bins were designed around
/// (thread-bunch width 32, scratchpad working size 256); they are
/// parameters because those sizes are hardware-generation specific.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub bin_layout: BinLayout,
    /// Starting capacity of group-5 rows under hybrid pre-allocation.
    pub group5_initial_capacity: usize,
    pub regrow_mode: RegrowMode,
    /// Worker lanes of the merge-path step inside the merge kernel.
    pub merge_lanes: usize,
    /// Use the serial two-pointer merge instead of merge path (debug aid).
    pub serial_merge_fallback: bool,
    /// Cap on group-5 regrowth; default is the row's upper bound rounded
    /// up to a power of two.
    pub hard_cap_override: Option<usize>,
    #[doc(hidden)]
    pub fault: Option<FaultSite>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            bin_layout: BinLayout::default(),
            group5_initial_capacity: 256,
            regrow_mode: RegrowMode::default(),
            merge_lanes: 4,
            serial_merge_fallback: false,
            hard_cap_override: None,
            fault: None,
        }
    }
}
