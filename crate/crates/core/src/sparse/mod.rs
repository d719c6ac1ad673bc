//! Sparse matrix data types, Matrix Market ingestion, and finite-difference
//! stencil generators.

mod csr;
mod matrix_market;
mod stencil;

pub use csr::{validate, CooTriplet, CsrMatrix, SparseError, Violation};
pub use matrix_market::{read_matrix_market, write_matrix_market, ReadStats};
pub use stencil::{gen_poisson, Stencil};
