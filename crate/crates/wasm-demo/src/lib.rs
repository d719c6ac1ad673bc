//! Browser demo bindings: generate a stencil matrix, square it through the
//! pipeline, and expose the numbers a page can plot — sparsity densities,
//! bin occupancy, and the strategy memory comparison.
//!
//! Build with `wasm-pack build --target web crates/wasm-demo` and serve
//! `crates/wasm-demo/www/`. Every export also works as a plain Rust
//! function on native targets, which is how the tests drive it.

use wasm_bindgen::prelude::*;

use rowbin::galerkin::{build_prolongator, galerkin_product, GalerkinOrder};
use rowbin::pipeline::{spgemm, Strategy};
use rowbin::sparse::{gen_poisson, CsrMatrix, Stencil};

fn parse_spec(spec: &str) -> Result<CsrMatrix<f64>, String> {
    let (name, dims) = spec
        .split_once(':')
        .ok_or_else(|| format!("bad stencil spec \"{spec}\" (want e.g. 2d5pt:64x64)"))?;
    let stencil: Stencil = name.parse()?;
    let dims = dims
        .split('x')
        .map(|d| d.parse::<usize>().map_err(|_| format!("bad dimension \"{d}\"")))
        .collect::<Result<Vec<usize>, String>>()?;
    if dims.len() != stencil.dims() {
        return Err(format!(
            "{} expects {} dimensions, got {}",
            stencil.name(),
            stencil.dims(),
            dims.len()
        ));
    }
    if dims.iter().product::<usize>() > 1 << 20 {
        return Err("grid too large for the demo (max 2^20 rows)".into());
    }
    gen_poisson(stencil, &dims).map_err(|e| e.to_string())
}

fn parse_strategy(name: &str) -> Result<Strategy, String> {
    match name {
        "hybrid" => Ok(Strategy::Hybrid),
        "upper" | "upper_bound" => Ok(Strategy::UpperBound),
        "precise" => Ok(Strategy::Precise),
        other => Err(format!("unknown strategy \"{other}\"")),
    }
}

/// Squares a stencil matrix through the pipeline and returns the full
/// report as JSON (dimensions, flops, bin occupancy, bytes per strategy,
/// growth log).
#[wasm_bindgen]
pub fn run_square(stencil_spec: &str, strategy: &str) -> Result<String, String> {
    let a = parse_spec(stencil_spec)?;
    let strategy = parse_strategy(strategy)?;
    let (_, report) = spgemm(&a, &a, strategy).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

/// Density map of the stencil matrix (`which = "a"`) or its square
/// (`"c"`): a `cells x cells` row-major grid scaled to 0..=255.
#[wasm_bindgen]
pub fn density_grid(stencil_spec: &str, which: &str, cells: usize) -> Result<Vec<u8>, String> {
    if cells == 0 || cells > 1024 {
        return Err("cells must be in 1..=1024".into());
    }
    let a = parse_spec(stencil_spec)?;
    let m = match which {
        "a" => a,
        "c" => spgemm(&a, &a, Strategy::Hybrid).map_err(|e| e.to_string())?.0,
        other => return Err(format!("which must be \"a\" or \"c\", got \"{other}\"")),
    };

    let n_rows = m.num_rows().max(1);
    let n_cols = m.num_cols().max(1);
    let mut counts = vec![0u64; cells * cells];
    for i in 0..m.num_rows() {
        let (cols, _) = m.row(i);
        let gy = i * cells / n_rows;
        for &c in cols {
            let gx = c as usize * cells / n_cols;
            counts[gy * cells + gx] += 1;
        }
    }
    let max = counts.iter().copied().max().unwrap_or(0).max(1);
    Ok(counts
        .iter()
        .map(|&c| ((c * 255).div_ceil(max)).min(255) as u8)
        .collect())
}

/// Coarsens a stencil matrix through `levels` Galerkin triple products and
/// returns per-level sizes and agreement of both association orders.
#[wasm_bindgen]
pub fn run_galerkin(stencil_spec: &str, block: usize, levels: usize) -> Result<String, String> {
    let mut current = parse_spec(stencil_spec)?;
    let mut out = Vec::new();
    for level in 0..levels.min(8) {
        if current.num_rows() < block.max(2) {
            break;
        }
        let p = build_prolongator(&current, block).map_err(|e| e.to_string())?;
        let (c1, reports) =
            galerkin_product(&p, &current, GalerkinOrder::RaThenP).map_err(|e| e.to_string())?;
        let (c2, _) =
            galerkin_product(&p, &current, GalerkinOrder::ApThenR).map_err(|e| e.to_string())?;
        let orders_agree = c1.col_idx() == c2.col_idx() && c1.approx_eq(&c2, 1e-10);
        out.push(serde_json::json!({
            "level": level,
            "n_fine": current.num_rows(),
            "n_coarse": c1.num_rows(),
            "nnz_coarse": c1.nnz(),
            "flops": reports.iter().map(|r| r.flops).sum::<u64>(),
            "orders_agree": orders_agree,
        }));
        current = c2;
    }
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_square_returns_report_json() {
        let json = run_square("2d5pt:16x16", "hybrid").unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["num_rows"], 256);
        assert_eq!(v["strategy"], "hybrid");
        assert_eq!(v["nnz_upper"].as_u64().unwrap() * 2, v["flops"].as_u64().unwrap());
        assert_eq!(v["bin_rows"].as_array().unwrap().len(), 38);
    }

    #[test]
    fn run_square_rejects_bad_inputs() {
        assert!(run_square("2d5pt", "hybrid").is_err());
        assert!(run_square("2d5pt:16x16", "magic").is_err());
        assert!(run_square("2d5pt:4096x4096", "hybrid").is_err());
    }

    #[test]
    fn density_grid_shape_and_range() {
        let g = density_grid("2d5pt:32x32", "a", 16).unwrap();
        assert_eq!(g.len(), 256);
        assert_eq!(g.iter().copied().max(), Some(255));
        // The 5-point matrix is banded: far corners are empty.
        assert_eq!(g[15], 0);
        // Squaring never shrinks the occupied region (the square's pattern
        // contains the band of A wherever A has a diagonal entry).
        let c = density_grid("2d5pt:32x32", "c", 16).unwrap();
        for (ci, gi) in c.iter().zip(&g) {
            assert!((*ci > 0) || (*gi == 0));
        }
    }

    #[test]
    fn galerkin_levels_agree() {
        let json = run_galerkin("2d5pt:16x16", 4, 3).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let levels = v.as_array().unwrap();
        assert_eq!(levels.len(), 3);
        for level in levels {
            assert_eq!(level["orders_agree"], true);
        }
    }
}
