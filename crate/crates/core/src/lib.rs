//! rowbin: sparse matrix-matrix multiplication (SpGEMM) organized as a
//! four-stage pipeline.
//!
//! The multiplication `C = A * B` of two CSR matrices runs through:
//!
//! 1. **Upper bound** — for every output row `i`, compute
//!    `u_i = sum of nnz(b_j*) over the nonzeros a_ij`, a safe over-estimate
//!    of `nnz(c_i*)`.
//! 2. **Binning** — assign each row to one of 38 bins (five bin groups) by
//!    its upper bound, and size a temporary matrix: exact-upper-bound
//!    capacity for short rows, a fixed 256-entry starting capacity with 2x
//!    progressive growth for long rows (the *hybrid* pre-allocation).
//! 3. **Row computation** — three differentiated kernels: an index-value
//!    pair heap for rows with up to 32 candidates, expansion/bitonic
//!    sort/compression for rows up to 512, and staged merge-insertion
//!    (binary-search fusion + merge-path merging) for longer rows.
//! 4. **Arrangement** — prefix-sum the per-row counts and compact the
//!    temporary matrix into the final exact-size CSR result.
//!
//! [`pipeline::spgemm`] is the main entry point. [`oracle`] holds reference
//! implementations (Gustavson's algorithm and a dense check) that every
//! kernel is tested against. [`merge_lab`] contains the merge-algorithm
//! candidates and a comparative benchmark harness, and [`galerkin`] drives
//! sparse triple products `R * A * P` on top of the pipeline.
//!
//! ```
//! use rowbin::sparse::{gen_poisson, Stencil};
//! use rowbin::pipeline::{spgemm, Strategy};
//!
//! let a = gen_poisson::<f64>(Stencil::TwoD5pt, &[32, 32]).unwrap();
//! let (c, report) = spgemm(&a, &a, Strategy::Hybrid).unwrap();
//! assert_eq!(report.nnz_result, c.nnz() as u64);
//! ```

pub mod galerkin;
pub mod kernels;
pub mod merge_lab;
pub mod oracle;
pub mod pipeline;
pub mod scalar;
pub mod sparse;

mod par;

pub use scalar::Scalar;
pub use sparse::{CooTriplet, CsrMatrix};
