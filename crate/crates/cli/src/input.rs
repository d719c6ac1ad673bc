//! Matrix loading: Matrix Market files or generated stencil matrices.

use anyhow::{anyhow, bail, Context, Result};
use rowbin::sparse::{gen_poisson, read_matrix_market, CsrMatrix, Stencil};
use rowbin::Scalar;

use crate::MatrixSource;

/// Parses the `<name>:<dims>` stencil mini-grammar, e.g. `3d7pt:32x32x32`.
pub fn parse_stencil_spec(spec: &str) -> Result<(Stencil, Vec<usize>)> {
    let (name, dims) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("stencil spec must look like 2d5pt:64x64, got \"{spec}\""))?;
    let stencil: Stencil = name.parse().map_err(|e: String| anyhow!(e))?;
    let dims = dims
        .split('x')
        .map(|d| {
            d.parse::<usize>()
                .with_context(|| format!("bad grid dimension \"{d}\" in \"{spec}\""))
        })
        .collect::<Result<Vec<usize>>>()?;
    if dims.len() != stencil.dims() {
        bail!(
            "{} expects {} dimensions, got {} in \"{spec}\"",
            stencil.name(),
            stencil.dims(),
            dims.len()
        );
    }
    Ok((stencil, dims))
}

/// Loads the matrix a source describes and a display label for it.
pub fn load<S: Scalar>(source: &MatrixSource) -> Result<(CsrMatrix<S>, String)> {
    match (&source.input, &source.stencil) {
        (Some(path), None) => {
            let (m, stats) = read_matrix_market(path, source.expand_symmetric)
                .with_context(|| format!("reading {}", path.display()))?;
            if stats.duplicates_fused > 0 {
                eprintln!(
                    "note: fused {} duplicate entries in {}",
                    stats.duplicates_fused,
                    path.display()
                );
            }
            let label = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            Ok((m, label))
        }
        (None, Some(spec)) => {
            let (stencil, dims) = parse_stencil_spec(spec)?;
            let m = gen_poisson(stencil, &dims).context("generating stencil matrix")?;
            Ok((m, spec.clone()))
        }
        _ => bail!("exactly one of --input or --stencil is required"),
    }
}
