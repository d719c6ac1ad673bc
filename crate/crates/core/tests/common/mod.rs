//! Shared generators for the integration and acceptance suites.

use rand::rngs::StdRng;
use rand::Rng;

use rowbin::sparse::{CooTriplet, CsrMatrix};
use rowbin::Scalar;

/// Uniform-density random matrix. `int_values` keeps sums exact in both
/// precisions; otherwise values are continuous and comparisons rely on the
/// documented tolerances.
pub fn random_csr<S: Scalar>(
    rng: &mut StdRng,
    rows: usize,
    cols: usize,
    density: f64,
    int_values: bool,
) -> CsrMatrix<S> {
    let mut triplets = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if rng.random::<f64>() < density {
                let v = if int_values {
                    rng.random_range(-4..=4) as f64
                } else {
                    rng.random_range(-2.0..2.0)
                };
                triplets.push(CooTriplet {
                    row: r as u32,
                    col: c as u32,
                    value: S::from_f64(v),
                });
            }
        }
    }
    CsrMatrix::from_coo(rows, cols, triplets).unwrap().0
}

/// One corpus class per bin group: matrix shapes and densities tuned so
/// squaring lands rows in that group (heavier classes also cover the
/// lighter groups).
pub fn class_matrix<S: Scalar>(rng: &mut StdRng, class: usize) -> CsrMatrix<S> {
    let int_values = rng.random::<f64>() < 0.75;
    match class {
        // Mostly empty and singleton rows.
        1 => {
            let n = rng.random_range(8..=64);
            random_csr(rng, n, n, 1.0 / n as f64, int_values)
        }
        // Heap rows: u in 2..=32.
        2 => {
            let n = rng.random_range(16..=128);
            random_csr(rng, n, n, 4.0 / n as f64, int_values)
        }
        // ESC rows: u in 33..=512.
        3 => {
            let n = rng.random_range(64..=192);
            random_csr(rng, n, n, 12.0 / n as f64, int_values)
        }
        // Merge rows: u > 512.
        4 => {
            let n = rng.random_range(128..=256);
            random_csr(rng, n, n, 26.0 / n as f64, int_values)
        }
        // Mixed row lengths: all groups in one matrix.
        _ => {
            let n = rng.random_range(64..=256);
            let mut triplets = Vec::new();
            for r in 0..n {
                let nnz = match r % 5 {
                    0 => 0,
                    1 => 1,
                    2 => rng.random_range(2..6),
                    3 => rng.random_range(6..12),
                    _ => rng.random_range(12..32).min(n),
                };
                let mut cols: Vec<u32> = (0..n as u32).collect();
                for k in 0..nnz {
                    let pick = rng.random_range(k..n);
                    cols.swap(k, pick);
                }
                for &c in &cols[..nnz] {
                    triplets.push(CooTriplet {
                        row: r as u32,
                        col: c,
                        value: S::from_f64(rng.random_range(-3..=3) as f64),
                    });
                }
            }
            CsrMatrix::from_coo(n, n, triplets).unwrap().0
        }
    }
}

pub const BOUNDARY_TARGETS: [u64; 13] = [0, 1, 2, 32, 33, 64, 65, 128, 129, 256, 257, 512, 513];

/// A 256x256 pair (A, B) where the first rows of A have exactly the
/// boundary upper bounds: B holds one row of 1 entry, one of 2, and 254 of
/// 3, so any target decomposes into threes plus an optional 1 or 2.
pub fn boundary_pair<S: Scalar>(rng: &mut StdRng) -> (CsrMatrix<S>, CsrMatrix<S>) {
    let n = 256usize;
    let mut b_triplets = Vec::new();
    let mut push_row = |row: u32, nnz: usize, rng: &mut StdRng| {
        let mut cols: Vec<u32> = (0..n as u32).collect();
        for k in 0..nnz {
            let pick = rng.random_range(k..n);
            cols.swap(k, pick);
        }
        for &c in &cols[..nnz] {
            b_triplets.push(CooTriplet {
                row,
                col: c,
                value: S::from_f64(rng.random_range(-4..=4) as f64),
            });
        }
    };
    push_row(0, 1, rng);
    push_row(1, 2, rng);
    for r in 2..n as u32 {
        push_row(r, 3, rng);
    }
    let (b, _) = CsrMatrix::from_coo(n, n, b_triplets).unwrap();

    let mut a_triplets = Vec::new();
    for (row, &target) in BOUNDARY_TARGETS.iter().enumerate() {
        // target = 3 * threes + extra, extra in {0, 1, 2}.
        let (threes, extra) = match target % 3 {
            0 => (target / 3, None),
            1 => ((target - 1) / 3, Some(0u32)), // b row 0 has 1 entry
            _ => ((target - 2) / 3, Some(1u32)), // b row 1 has 2 entries
        };
        let mut cols: Vec<u32> = (2..2 + threes as u32).collect();
        cols.extend(extra);
        for c in cols {
            a_triplets.push(CooTriplet {
                row: row as u32,
                col: c,
                value: S::from_f64(rng.random_range(-4..=4) as f64),
            });
        }
    }
    // Fill the rest with light random rows.
    for row in BOUNDARY_TARGETS.len()..n {
        for c in 0..n {
            if rng.random::<f64>() < 0.01 {
                a_triplets.push(CooTriplet {
                    row: row as u32,
                    col: c as u32,
                    value: S::from_f64(rng.random_range(-4..=4) as f64),
                });
            }
        }
    }
    let (a, _) = CsrMatrix::from_coo(n, n, a_triplets).unwrap();
    (a, b)
}

/// Single-row system whose only row has upper bound `u` and roughly
/// `1 - dup` distinct result fraction: A is 1 x k of ones, B is k
/// identical rows over `u * (1 - dup)` columns.
pub fn duplicate_density_pair<S: Scalar>(
    rng: &mut StdRng,
    u: u64,
    dup_percent: u64,
) -> (CsrMatrix<S>, CsrMatrix<S>) {
    let distinct = (u * (100 - dup_percent) / 100).max(1) as usize;
    let k = u as usize / distinct;
    assert_eq!(k * distinct, u as usize, "u must split into equal rows");

    let mut b_triplets = Vec::new();
    for row in 0..k as u32 {
        for c in 0..distinct as u32 {
            b_triplets.push(CooTriplet {
                row,
                col: c,
                value: S::from_f64(rng.random_range(-4..=4) as f64),
            });
        }
    }
    let (b, _) = CsrMatrix::from_coo(k, distinct, b_triplets).unwrap();
    let a = CsrMatrix::new(
        1,
        k,
        vec![0, k as u64],
        (0..k as u32).collect(),
        vec![S::one(); k],
    )
    .unwrap();
    (a, b)
}
