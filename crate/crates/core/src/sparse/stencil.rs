//! Finite-difference Poisson matrices on regular grids.
//!
//! These are the standard test inputs for sparse triple products: the
//! diagonal carries the full stencil neighbor count (Dirichlet boundaries
//! keep the diagonal constant) and every in-grid neighbor contributes -1.

use std::str::FromStr;

use super::csr::{CsrMatrix, SparseError};
use crate::scalar::Scalar;

/// Supported finite-difference stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    TwoD5pt,
    TwoD9pt,
    ThreeD7pt,
    ThreeD27pt,
}

impl Stencil {
    pub fn name(self) -> &'static str {
        match self {
            Stencil::TwoD5pt => "2d5pt",
            Stencil::TwoD9pt => "2d9pt",
            Stencil::ThreeD7pt => "3d7pt",
            Stencil::ThreeD27pt => "3d27pt",
        }
    }

    /// Grid dimensionality (2 or 3).
    pub fn dims(self) -> usize {
        match self {
            Stencil::TwoD5pt | Stencil::TwoD9pt => 2,
            Stencil::ThreeD7pt | Stencil::ThreeD27pt => 3,
        }
    }

    /// Neighbor offsets, excluding the center point.
    fn offsets(self) -> Vec<[i64; 3]> {
        let mut out = Vec::new();
        match self {
            Stencil::TwoD5pt => {
                for (dx, dy) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
                    out.push([dx, dy, 0]);
                }
            }
            Stencil::TwoD9pt => {
                for dx in -1..=1 {
                    for dy in -1..=1 {
                        if (dx, dy) != (0, 0) {
                            out.push([dx, dy, 0]);
                        }
                    }
                }
            }
            Stencil::ThreeD7pt => {
                for (dx, dy, dz) in [
                    (-1, 0, 0),
                    (1, 0, 0),
                    (0, -1, 0),
                    (0, 1, 0),
                    (0, 0, -1),
                    (0, 0, 1),
                ] {
                    out.push([dx, dy, dz]);
                }
            }
            Stencil::ThreeD27pt => {
                for dx in -1..=1 {
                    for dy in -1..=1 {
                        for dz in -1..=1 {
                            if (dx, dy, dz) != (0, 0, 0) {
                                out.push([dx, dy, dz]);
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

impl FromStr for Stencil {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "2d5pt" => Ok(Stencil::TwoD5pt),
            "2d9pt" => Ok(Stencil::TwoD9pt),
            "3d7pt" => Ok(Stencil::ThreeD7pt),
            "3d27pt" => Ok(Stencil::ThreeD27pt),
            other => Err(format!(
                "unknown stencil \"{other}\" (expected 2d5pt, 2d9pt, 3d7pt, or 3d27pt)"
            )),
        }
    }
}

/// Builds the finite-difference Poisson matrix of `stencil` on a grid of
/// the given dimensions. `dims.len()` must match the stencil and every
/// extent must be at least 1.
pub fn gen_poisson<S: Scalar>(stencil: Stencil, dims: &[usize]) -> Result<CsrMatrix<S>, SparseError> {
    if dims.len() != stencil.dims() {
        return Err(SparseError::DimensionOverflow(format!(
            "{} expects {} grid dimensions, got {}",
            stencil.name(),
            stencil.dims(),
            dims.len()
        )));
    }
    if dims.contains(&0) {
        return Err(SparseError::DimensionOverflow(
            "grid dimensions must be at least 1".into(),
        ));
    }
    let (nx, ny, nz) = (
        dims[0] as i64,
        dims[1] as i64,
        *dims.get(2).unwrap_or(&1) as i64,
    );
    let n = (nx as u64)
        .checked_mul(ny as u64)
        .and_then(|p| p.checked_mul(nz as u64))
        .filter(|&p| p <= u32::MAX as u64)
        .ok_or_else(|| {
            SparseError::DimensionOverflow(format!("grid {dims:?} exceeds 32-bit indexing"))
        })? as usize;

    let offsets = stencil.offsets();
    let diagonal = S::from_f64(offsets.len() as f64);
    let neighbor = -S::one();

    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(n * (offsets.len() + 1));
    let mut values = Vec::with_capacity(n * (offsets.len() + 1));
    row_ptr.push(0u64);

    // x-major linearization: node (x, y, z) -> (x * ny + y) * nz + z.
    let mut row_cols: Vec<u32> = Vec::with_capacity(offsets.len() + 1);
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                row_cols.clear();
                let center = ((x * ny + y) * nz + z) as u32;
                row_cols.push(center);
                for off in &offsets {
                    let (px, py, pz) = (x + off[0], y + off[1], z + off[2]);
                    if (0..nx).contains(&px) && (0..ny).contains(&py) && (0..nz).contains(&pz) {
                        row_cols.push(((px * ny + py) * nz + pz) as u32);
                    }
                }
                row_cols.sort_unstable();
                for &c in row_cols.iter() {
                    col_idx.push(c);
                    values.push(if c == center { diagonal } else { neighbor });
                }
                row_ptr.push(col_idx.len() as u64);
            }
        }
    }
    Ok(CsrMatrix::from_raw_parts_unchecked(
        n, n, row_ptr, col_idx, values,
    ))
}
