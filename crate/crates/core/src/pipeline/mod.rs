//! The four-stage SpGEMM pipeline and its memory pre-allocation
//! strategies.

mod arrange;
mod binning;
mod config;
mod temp_matrix;
mod upper_bound;

pub use arrange::stage4_arrange;
pub use binning::{BinGroup, BinLayout, BinSet};
pub use config::{FaultSite, PipelineConfig};
pub use temp_matrix::{
    CapacityRule, ReallocEvent, RegrowMode, RowSlot, TempMatrix, TempShared,
};
pub use upper_bound::{stage1_upper_bound, UpperBoundArray};

use serde::Serialize;

use crate::kernels::stage3_compute;
use crate::oracle::{count_flops, OracleError};
use crate::par::timed;
use crate::scalar::{entry_bytes, Scalar};
use crate::sparse::CsrMatrix;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("dimension mismatch: left is {a_rows}x{a_cols}, right is {b_rows}x{b_cols}")]
    DimensionMismatch {
        a_rows: usize,
        a_cols: usize,
        b_rows: usize,
        b_cols: usize,
    },
    #[error(
        "row {row}: requested capacity {requested} beyond hard cap {hard_cap}; \
         growth past the upper bound means a kernel logic fault"
    )]
    RegrowLogicFault {
        row: u32,
        requested: usize,
        hard_cap: usize,
    },
    #[error("row {row}: kernel committed {used} entries but {expected} were expected")]
    InconsistentRowCount { row: u32, used: u64, expected: u64 },
}

impl From<OracleError> for PipelineError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::DimensionMismatch {
                a_rows,
                a_cols,
                b_rows,
                b_cols,
            } => PipelineError::DimensionMismatch {
                a_rows,
                a_cols,
                b_rows,
                b_cols,
            },
            OracleError::SizeGuard { .. } => unreachable!("pipeline never runs the dense check"),
        }
    }
}

/// Memory pre-allocation strategy for the temporary matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Upper-bound capacities for short rows, fixed start plus 2x growth
    /// for long rows.
    Hybrid,
    /// Capacity `u_i` for every row.
    UpperBound,
    /// A pattern-only pre-pass computes exact capacities first.
    Precise,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Hybrid => "hybrid",
            Strategy::UpperBound => "upper_bound",
            Strategy::Precise => "precise",
        }
    }
}

/// Wall-clock seconds per stage.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct StageSeconds {
    pub upper_bound: f64,
    pub binning: f64,
    pub compute: f64,
    pub arrange: f64,
    /// Full pattern-only pipeline time; present only for the precise
    /// strategy.
    pub precise_prepass: Option<f64>,
}

impl StageSeconds {
    /// Time of the computational stages (3 and 4).
    pub fn compute_and_arrange(&self) -> f64 {
        self.compute + self.arrange
    }

    pub fn total(&self) -> f64 {
        self.upper_bound
            + self.binning
            + self.compute
            + self.arrange
            + self.precise_prepass.unwrap_or(0.0)
    }
}

/// Temporary-matrix entry bytes each strategy would allocate for this
/// product. All three are filled on every run so strategies can be
/// compared from a single execution.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StrategyBytes {
    pub precise: u64,
    pub upper_bound: u64,
    pub hybrid: u64,
}

/// Everything measured about one pipeline execution.
#[derive(Debug, Clone, Serialize)]
pub struct SpgemmReport {
    pub precision: &'static str,
    pub strategy: Strategy,
    pub num_rows: usize,
    pub num_cols: usize,
    pub nnz_a: u64,
    pub nnz_b: u64,
    /// `2 *` candidate count: one multiply and one add each.
    pub flops: u64,
    /// Entry count of the expanded candidate matrix; always `flops / 2`.
    pub nnz_upper: u64,
    pub nnz_result: u64,
    pub stage_seconds: StageSeconds,
    pub temp_bytes: StrategyBytes,
    /// Rows per bin, in bin order.
    pub bin_rows: Vec<u64>,
    pub realloc_count: usize,
    /// Entry bytes moved by allocate-and-copy growth in this run.
    pub bytes_copied_on_regrow: u64,
    /// Bytes by which 2x growth overshot `u_i` on group-5 rows under
    /// hybrid sizing.
    pub group5_overshoot_bytes: u64,
    pub realloc_log: Vec<ReallocEvent>,
}

/// Stage 2 as one operation: bin every row and allocate the hybrid-sized
/// temporary matrix.
pub fn stage2_binning<S: Scalar>(
    u: &UpperBoundArray,
    cfg: &PipelineConfig,
) -> (BinSet, TempMatrix<S>) {
    let bins = BinSet::build(u, cfg);
    let tmp = TempMatrix::allocate(u, &bins, CapacityRule::Hybrid, cfg);
    (bins, tmp)
}

/// Hybrid-rule temporary bytes, computable from the final row sizes: a
/// group-5 row's capacity is the first value of the doubling chain that
/// holds its result.
fn hybrid_temp_entries(
    u: &UpperBoundArray,
    bins: &BinSet,
    row_nnz: &[u64],
    cfg: &PipelineConfig,
) -> (u64, u64) {
    let mut entries = 0u64;
    let mut overshoot = 0u64;
    for (row, &ui) in u.as_slice().iter().enumerate() {
        match bins.group_of_u(ui) {
            BinGroup::Merge => {
                let mut cap = cfg.group5_initial_capacity as u64;
                while cap < row_nnz[row] {
                    cap *= 2;
                }
                entries += cap;
                overshoot += cap.saturating_sub(ui);
            }
            _ => entries += ui,
        }
    }
    (entries, overshoot)
}

/// Multiplies `a * b` through the four-stage pipeline with default
/// configuration.
pub fn spgemm<S: Scalar>(
    a: &CsrMatrix<S>,
    b: &CsrMatrix<S>,
    strategy: Strategy,
) -> Result<(CsrMatrix<S>, SpgemmReport), PipelineError> {
    spgemm_with_config(a, b, strategy, &PipelineConfig::default())
}

/// Multiplies `a * b` through the four-stage pipeline.
pub fn spgemm_with_config<S: Scalar>(
    a: &CsrMatrix<S>,
    b: &CsrMatrix<S>,
    strategy: Strategy,
    cfg: &PipelineConfig,
) -> Result<(CsrMatrix<S>, SpgemmReport), PipelineError> {
    let (u, t_upper) = timed(|| stage1_upper_bound(a, b));
    let u = u?;
    let flops = count_flops(a, b)?;
    debug_assert_eq!(flops, 2 * u.total());

    // Stage 2: binning plus temporary-matrix allocation under the chosen
    // sizing rule.
    let mut prepass_seconds = None;
    let (bins, t_bins) = timed(|| BinSet::build(&u, cfg));

    let precise_counts;
    let (mut tmp, t_alloc) = match strategy {
        Strategy::Hybrid => timed(|| TempMatrix::allocate(&u, &bins, CapacityRule::Hybrid, cfg)),
        Strategy::UpperBound => {
            timed(|| TempMatrix::allocate(&u, &bins, CapacityRule::PerRow(u.as_slice()), cfg))
        }
        Strategy::Precise => {
            // Pattern-only pre-pass in the same computational pattern,
            // values suppressed, to learn the exact row sizes.
            let (counts, t_pre) = timed(|| -> Result<Vec<u64>, PipelineError> {
                let mut pre = TempMatrix::allocate(&u, &bins, CapacityRule::Hybrid, cfg);
                stage3_compute(a, b, &bins, &mut pre, cfg, true)?;
                Ok(pre.row_counts())
            });
            precise_counts = counts?;
            prepass_seconds = Some(t_pre);
            timed(|| TempMatrix::allocate(&u, &bins, CapacityRule::PerRow(&precise_counts), cfg))
        }
    };

    let (r3, t_compute) = timed(|| stage3_compute(a, b, &bins, &mut tmp, cfg, false));
    r3?;
    let row_nnz = tmp.row_counts();

    let (c, t_arrange) = timed(|| stage4_arrange(&tmp, &row_nnz, b.num_cols()));
    let c = c?;

    let e = entry_bytes::<S>();
    let (hybrid_entries, overshoot_entries) = hybrid_temp_entries(&u, &bins, &row_nnz, cfg);
    if strategy == Strategy::Hybrid {
        debug_assert_eq!(hybrid_entries * e, tmp.resident_bytes());
    }

    let report = SpgemmReport {
        precision: S::NAME,
        strategy,
        num_rows: a.num_rows(),
        num_cols: b.num_cols(),
        nnz_a: a.nnz() as u64,
        nnz_b: b.nnz() as u64,
        flops,
        nnz_upper: u.total(),
        nnz_result: c.nnz() as u64,
        stage_seconds: StageSeconds {
            upper_bound: t_upper,
            binning: t_bins + t_alloc,
            compute: t_compute,
            arrange: t_arrange,
            precise_prepass: prepass_seconds,
        },
        temp_bytes: StrategyBytes {
            precise: c.nnz() as u64 * e,
            upper_bound: u.total() * e,
            hybrid: hybrid_entries * e,
        },
        bin_rows: bins.counters().iter().map(|&c| c as u64).collect(),
        realloc_count: tmp.realloc_log().len(),
        bytes_copied_on_regrow: tmp.copied_bytes(),
        group5_overshoot_bytes: overshoot_entries * e,
        realloc_log: tmp.realloc_log(),
    };
    Ok((c, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{spgemm_gustavson, verify_against_oracle};
    use crate::sparse::{gen_poisson, CooTriplet, Stencil};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_square(rng: &mut StdRng, n: usize, density: f64) -> CsrMatrix<f64> {
        let mut triplets = Vec::new();
        for r in 0..n {
            for c in 0..n {
                if rng.random::<f64>() < density {
                    triplets.push(CooTriplet {
                        row: r as u32,
                        col: c as u32,
                        value: rng.random_range(-3..=3) as f64,
                    });
                }
            }
        }
        CsrMatrix::from_coo(n, n, triplets).unwrap().0
    }

    #[test]
    fn identity_through_every_strategy() {
        let i3 = CsrMatrix::<f64>::identity(3);
        for strategy in [Strategy::Hybrid, Strategy::UpperBound, Strategy::Precise] {
            let (c, report) = spgemm(&i3, &i3, strategy).unwrap();
            assert_eq!(c, i3);
            assert_eq!(report.flops, 6);
            assert_eq!(report.nnz_upper, 3);
            assert_eq!(report.nnz_result, 3);
        }
    }

    #[test]
    fn poisson_square_matches_oracle_every_strategy() {
        let a = gen_poisson::<f64>(Stencil::TwoD5pt, &[16, 16]).unwrap();
        let want = spgemm_gustavson(&a, &a).unwrap();
        for strategy in [Strategy::Hybrid, Strategy::UpperBound, Strategy::Precise] {
            let (c, report) = spgemm(&a, &a, strategy).unwrap();
            assert_eq!(c, want, "strategy {strategy:?}");
            assert_eq!(report.nnz_result as usize, want.nnz());
            assert_eq!(report.nnz_upper * 2, report.flops);
        }
    }

    #[test]
    fn random_matrices_cover_all_groups_and_verify() {
        let mut rng = StdRng::seed_from_u64(21);
        // Dense enough that u_i > 512 occurs (n = 96, d = 0.35 gives
        // u ~ n * d^2 * n ~ 1000+ per row).
        let a = random_square(&mut rng, 96, 0.35);
        let (c, report) = spgemm(&a, &a, Strategy::Hybrid).unwrap();
        verify_against_oracle(&a, &a, &c).unwrap();
        assert!(report.bin_rows[37] > 0, "expected group-5 rows");
    }

    #[test]
    fn strategy_bytes_are_consistent() {
        let mut rng = StdRng::seed_from_u64(5);
        let a = random_square(&mut rng, 80, 0.3);
        let mut reports = Vec::new();
        for strategy in [Strategy::Hybrid, Strategy::UpperBound, Strategy::Precise] {
            let (_, report) = spgemm(&a, &a, strategy).unwrap();
            reports.push(report);
        }
        // The analytic byte figures must agree across strategies.
        for pair in reports.windows(2) {
            assert_eq!(pair[0].temp_bytes.precise, pair[1].temp_bytes.precise);
            assert_eq!(pair[0].temp_bytes.upper_bound, pair[1].temp_bytes.upper_bound);
            assert_eq!(pair[0].temp_bytes.hybrid, pair[1].temp_bytes.hybrid);
        }
        let r = &reports[0];
        assert!(r.temp_bytes.hybrid >= r.temp_bytes.precise);
        assert!(
            r.temp_bytes.hybrid <= r.temp_bytes.upper_bound + r.group5_overshoot_bytes,
            "hybrid {} vs upper {} + overshoot {}",
            r.temp_bytes.hybrid,
            r.temp_bytes.upper_bound,
            r.group5_overshoot_bytes
        );
    }

    #[test]
    fn determinism_across_runs() {
        let mut rng = StdRng::seed_from_u64(17);
        let a = random_square(&mut rng, 64, 0.3);
        let (c1, r1) = spgemm(&a, &a, Strategy::Hybrid).unwrap();
        let (c2, r2) = spgemm(&a, &a, Strategy::Hybrid).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(r1.realloc_log, r2.realloc_log);
        assert_eq!(r1.bin_rows, r2.bin_rows);
        assert_eq!(r1.temp_bytes.hybrid, r2.temp_bytes.hybrid);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = CsrMatrix::<f64>::identity(2);
        let b = CsrMatrix::<f64>::identity(3);
        assert!(matches!(
            spgemm(&a, &b, Strategy::Hybrid),
            Err(PipelineError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn upper_bound_is_safe_and_sums_to_half_flops() {
        let mut rng = StdRng::seed_from_u64(33);
        let a = random_square(&mut rng, 48, 0.25);
        let u = stage1_upper_bound(&a, &a).unwrap();
        let (c, report) = spgemm(&a, &a, Strategy::Hybrid).unwrap();
        assert_eq!(u.total(), report.flops / 2);
        for i in 0..c.num_rows() {
            assert!(u.as_slice()[i] >= c.row_nnz(i) as u64);
        }
    }
}
