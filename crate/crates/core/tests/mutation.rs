//! Fault-injection coverage: flipping any kernel's fusion logic must be
//! caught by oracle verification on the stencil suite. This is what makes
//! a `--verify` pass meaningful.

use rowbin::oracle::verify_against_oracle;
use rowbin::pipeline::{spgemm_with_config, FaultSite, PipelineConfig, Strategy};
use rowbin::sparse::{gen_poisson, CsrMatrix, Stencil};

/// Stencil suite chosen so every kernel sees rows: a 1x1 grid exercises
/// the singleton kernel, small 2d grids the heap kernel, 3d7pt the ESC
/// kernel, and 3d27pt (u up to 729) the merge kernel.
fn stencil_suite() -> Vec<(String, CsrMatrix<f64>)> {
    let mut out = Vec::new();
    for (stencil, dims) in [
        (Stencil::TwoD5pt, vec![1usize, 1]),
        (Stencil::TwoD5pt, vec![8, 8]),
        (Stencil::TwoD9pt, vec![8, 8]),
        (Stencil::ThreeD7pt, vec![5, 5, 5]),
        (Stencil::ThreeD27pt, vec![6, 6, 6]),
    ] {
        let label = format!("{}:{dims:?}", stencil.name());
        out.push((label, gen_poisson(stencil, &dims).unwrap()));
    }
    out
}

#[test]
fn suite_covers_every_bin_group() {
    let mut group_rows = [0u64; 5];
    for (_, a) in stencil_suite() {
        let (_, report) = spgemm_with_config(
            &a,
            &a,
            Strategy::Hybrid,
            &PipelineConfig::default(),
        )
        .unwrap();
        group_rows[0] += report.bin_rows[0];
        group_rows[1] += report.bin_rows[1];
        group_rows[2] += report.bin_rows[2..=32].iter().sum::<u64>();
        group_rows[3] += report.bin_rows[33..=36].iter().sum::<u64>();
        group_rows[4] += report.bin_rows[37];
    }
    // Group 1 (empty rows) cannot occur for stencils; all kernels that
    // compute entries must be exercised.
    assert!(group_rows[1] > 0, "no singleton rows in suite");
    assert!(group_rows[2] > 0, "no heap rows in suite");
    assert!(group_rows[3] > 0, "no esc rows in suite");
    assert!(group_rows[4] > 0, "no merge rows in suite");
}

#[test]
fn clean_pipeline_verifies_on_the_suite() {
    for (label, a) in stencil_suite() {
        let (c, _) = spgemm_with_config(&a, &a, Strategy::Hybrid, &PipelineConfig::default())
            .unwrap();
        assert!(
            verify_against_oracle(&a, &a, &c).is_ok(),
            "{label}: clean run failed verification"
        );
    }
}

#[test]
fn every_fault_site_is_caught_by_verification() {
    for fault in [
        FaultSite::TrivialDouble,
        FaultSite::HeapNoFuse,
        FaultSite::EscNoCompress,
        FaultSite::MergeNoAccumulate,
    ] {
        let cfg = PipelineConfig {
            fault: Some(fault),
            ..PipelineConfig::default()
        };
        let mut caught = false;
        for (label, a) in stencil_suite() {
            // Detection can be a verification mismatch, a pipeline error,
            // or a tripped internal sanity assertion (debug builds). The
            // hook swap keeps expected panics out of the test output.
            let prev_hook = std::panic::take_hook();
            std::panic::set_hook(Box::new(|_| {}));
            let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
                spgemm_with_config(&a, &a, Strategy::Hybrid, &cfg)
            }));
            std::panic::set_hook(prev_hook);
            let detected = match outcome {
                Ok(Ok((c, _))) => verify_against_oracle(&a, &a, &c).is_err(),
                Ok(Err(_)) | Err(_) => true,
            };
            if detected {
                caught = true;
                println!("fault {fault:?} caught on {label}");
                break;
            }
        }
        assert!(caught, "fault {fault:?} slipped through verification");
    }
}
