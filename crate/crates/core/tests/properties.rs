//! Property tests of the module invariants.

use proptest::collection::vec;
use proptest::prelude::*;

use rowbin::merge_lab::{merge_bitonic, merge_oddeven, merge_path, merge_serial, KeyValueSeq};
use rowbin::oracle::{count_flops, spgemm_dense_check, spgemm_gustavson};
use rowbin::pipeline::{
    spgemm, stage1_upper_bound, stage2_binning, PipelineConfig, Strategy as Sizing,
};
use rowbin::sparse::{
    gen_poisson, read_matrix_market, validate, write_matrix_market, CooTriplet, CsrMatrix,
    Stencil,
};

fn arb_csr(max_n: usize, max_density: f64) -> impl Strategy<Value = CsrMatrix<f64>> {
    (2..max_n, 0.0..max_density, any::<u64>()).prop_map(move |(n, d, seed)| {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(seed);
        let mut triplets = Vec::new();
        for r in 0..n {
            for c in 0..n {
                if rng.random::<f64>() < d {
                    triplets.push(CooTriplet {
                        row: r as u32,
                        col: c as u32,
                        value: rng.random_range(-4..=4) as f64,
                    });
                }
            }
        }
        CsrMatrix::from_coo(n, n, triplets).unwrap().0
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matrix_market_round_trip(
        rows in 1usize..12,
        cols in 1usize..12,
        entries in vec((0u32..12, 0u32..12, prop::num::f64::NORMAL), 0..40),
    ) {
        let triplets: Vec<CooTriplet<f64>> = entries
            .into_iter()
            .filter(|&(r, c, _)| (r as usize) < rows && (c as usize) < cols)
            .map(|(row, col, value)| CooTriplet { row, col, value })
            .collect();
        let (m, _) = CsrMatrix::from_coo(rows, cols, triplets).unwrap();
        let file = tempfile::NamedTempFile::new().unwrap();
        write_matrix_market(&m, file.path()).unwrap();
        let (back, _) = read_matrix_market::<f64>(file.path(), false).unwrap();
        prop_assert_eq!(m, back);
    }

    #[test]
    fn oracles_agree(a in arb_csr(24, 0.4)) {
        let g = spgemm_gustavson(&a, &a).unwrap();
        let d = spgemm_dense_check(&a, &a).unwrap();
        prop_assert_eq!(&g, &d);
        prop_assert!(validate(&g).is_empty());
    }

    #[test]
    fn pipeline_matches_oracle(a in arb_csr(40, 0.35)) {
        let (c, report) = spgemm(&a, &a, Sizing::Hybrid).unwrap();
        let want = spgemm_gustavson(&a, &a).unwrap();
        prop_assert_eq!(&c, &want);
        prop_assert!(validate(&c).is_empty());
        prop_assert_eq!(report.nnz_upper * 2, report.flops);
    }

    #[test]
    fn upper_bound_is_safe(a in arb_csr(32, 0.4)) {
        let u = stage1_upper_bound(&a, &a).unwrap();
        prop_assert_eq!(2 * u.total(), count_flops(&a, &a).unwrap());
        let (c, _) = spgemm(&a, &a, Sizing::Hybrid).unwrap();
        for i in 0..c.num_rows() {
            prop_assert!(u.as_slice()[i] >= c.row_nnz(i) as u64);
        }
    }

    #[test]
    fn bins_partition_rows(a in arb_csr(48, 0.3)) {
        let u = stage1_upper_bound(&a, &a).unwrap();
        let (bins, tmp) = stage2_binning::<f64>(&u, &PipelineConfig::default());
        prop_assert_eq!(bins.total_rows(), a.num_rows());
        let mut seen = vec![false; a.num_rows()];
        for b in 0..bins.num_bins() {
            prop_assert_eq!(bins.counter(b), bins.bin(b).len());
            for &row in bins.bin(b) {
                prop_assert!(!seen[row as usize], "row in two bins");
                seen[row as usize] = true;
            }
        }
        prop_assert!(seen.into_iter().all(|s| s));
        drop(tmp);
    }

    #[test]
    fn merge_variants_agree_with_serial(
        a_keys in vec(any::<u32>(), 0..80),
        b_keys in vec(any::<u32>(), 0..80),
        lanes in 1usize..20,
    ) {
        let mut a_keys = a_keys;
        let mut b_keys = b_keys;
        a_keys.sort_unstable();
        b_keys.sort_unstable();
        let a = KeyValueSeq::from_keys(a_keys);
        let b = KeyValueSeq::from_keys(b_keys);
        let want = merge_serial(&a, &b).unwrap();
        prop_assert_eq!(&merge_path(&a, &b, lanes).unwrap(), &want);
    }

    #[test]
    fn network_merges_agree_on_pow2(
        exp in 0u32..7,
        seed in any::<u64>(),
    ) {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(seed);
        let n = 1usize << exp;
        let mut a_keys: Vec<u32> = (0..n).map(|_| rng.random_range(0..64)).collect();
        let mut b_keys: Vec<u32> = (0..n).map(|_| rng.random_range(0..64)).collect();
        a_keys.sort_unstable();
        b_keys.sort_unstable();
        let a = KeyValueSeq::from_keys(a_keys);
        let b = KeyValueSeq::from_keys(b_keys);
        let want = merge_serial(&a, &b).unwrap();
        prop_assert_eq!(merge_oddeven(&a, &b).unwrap().keys, want.keys.clone());
        prop_assert_eq!(merge_bitonic(&a, &b).unwrap().keys, want.keys);
    }

    #[test]
    fn poisson_matrices_validate(
        nx in 1usize..12,
        ny in 1usize..12,
    ) {
        for stencil in [Stencil::TwoD5pt, Stencil::TwoD9pt] {
            let m = gen_poisson::<f64>(stencil, &[nx, ny]).unwrap();
            prop_assert!(validate(&m).is_empty());
            prop_assert_eq!(m.num_rows(), nx * ny);
        }
    }
}
