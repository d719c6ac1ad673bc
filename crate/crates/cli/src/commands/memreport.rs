//! `rowbin memreport`: total memory footprint of squaring each input
//! under the three pre-allocation strategies.
//!
//! Totals count the two input matrices and the resulting matrix (entry
//! bytes) plus the strategy's temporary matrix; the precise strategy's
//! pre-pass stores no entries, so only its final matrix counts.

use anyhow::Context;

use rowbin::pipeline::{spgemm, Strategy};
use rowbin::scalar::entry_bytes;
use rowbin::Scalar;

use super::internal;
use crate::output::Table;
use crate::{input, CliError, MatrixSource, MemreportArgs, PrecisionArg};

struct Row {
    label: String,
    n: usize,
    nnz_a: u64,
    nnz_upper: u64,
    nnz_c: u64,
    precise: u64,
    hybrid: u64,
    upper: u64,
}

pub fn run(args: &MemreportArgs) -> Result<(), CliError> {
    match args.precision {
        PrecisionArg::F64 => run_typed::<f64>(args),
        PrecisionArg::F32 => run_typed::<f32>(args),
    }
}

fn harmonic_mean(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = xs.clone().count();
    if n == 0 {
        return f64::NAN;
    }
    n as f64 / xs.map(|x| 1.0 / x).sum::<f64>()
}

fn run_typed<S: Scalar>(args: &MemreportArgs) -> Result<(), CliError> {
    let mut sources: Vec<MatrixSource> = Vec::new();
    for path in &args.input {
        sources.push(MatrixSource {
            input: Some(path.clone()),
            stencil: None,
            expand_symmetric: args.expand_symmetric,
        });
    }
    for spec in &args.stencil {
        sources.push(MatrixSource {
            input: None,
            stencil: Some(spec.clone()),
            expand_symmetric: false,
        });
    }
    if sources.is_empty() {
        return Err(CliError::Usage(anyhow::anyhow!(
            "memreport needs at least one --input or --stencil"
        )));
    }

    let mut rows = Vec::new();
    for source in &sources {
        let (a, label) = input::load::<S>(source)?;
        let (_, report) = spgemm(&a, &a, Strategy::Hybrid).map_err(internal)?;
        let e = entry_bytes::<S>();
        // Two input matrices (A twice for squaring) and the result.
        let base = 2 * report.nnz_a * e + report.nnz_result * e;
        rows.push(Row {
            label,
            n: a.num_rows(),
            nnz_a: report.nnz_a,
            nnz_upper: report.nnz_upper,
            nnz_c: report.nnz_result,
            precise: base,
            hybrid: base + report.temp_bytes.hybrid,
            upper: base + report.temp_bytes.upper_bound,
        });
    }

    let mut table = Table::new(&[
        "matrix",
        "n",
        "nnz(A)",
        "nnz(C^)",
        "nnz(C)",
        "precise_bytes",
        "hybrid_bytes",
        "upper_bytes",
        "hybrid/precise",
        "upper/precise",
    ]);
    for r in &rows {
        table.row(vec![
            r.label.clone(),
            r.n.to_string(),
            r.nnz_a.to_string(),
            r.nnz_upper.to_string(),
            r.nnz_c.to_string(),
            r.precise.to_string(),
            r.hybrid.to_string(),
            r.upper.to_string(),
            format!("{:.3}", r.hybrid as f64 / r.precise as f64),
            format!("{:.3}", r.upper as f64 / r.precise as f64),
        ]);
    }
    let hmean_hybrid =
        harmonic_mean(rows.iter().map(|r| r.hybrid as f64 / r.precise as f64));
    let hmean_upper = harmonic_mean(rows.iter().map(|r| r.upper as f64 / r.precise as f64));
    table.row(vec![
        "hmean".to_string(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        format!("{hmean_hybrid:.3}"),
        format!("{hmean_upper:.3}"),
    ]);

    println!("memreport ({})", S::NAME);
    table.print();
    if let Some(path) = &args.csv {
        table.write_csv(path).context("writing csv")?;
    }
    Ok(())
}
