//! `rowbin square`: C = A * A with per-stage timings, strategy byte
//! figures, and optional oracle verification.

use anyhow::Context;
use serde::Serialize;

use rowbin::oracle::verify_against_oracle;
use rowbin::pipeline::{spgemm, SpgemmReport, Strategy};
use rowbin::sparse::CsrMatrix;
use rowbin::Scalar;

use super::internal;
use crate::output::{human_bytes, human_count, write_json_lines, Table};
use crate::{input, CliError, PrecisionArg, SquareArgs, StrategyArg};

#[derive(Serialize)]
struct SquareRecord {
    command: &'static str,
    input: String,
    gflops: f64,
    report: SpgemmReport,
}

pub fn run(args: &SquareArgs) -> Result<(), CliError> {
    match args.precision {
        PrecisionArg::F64 => run_typed::<f64>(args),
        PrecisionArg::F32 => run_typed::<f32>(args),
    }
}

fn strategies(arg: StrategyArg) -> Vec<Strategy> {
    match arg {
        StrategyArg::Hybrid => vec![Strategy::Hybrid],
        StrategyArg::Upper => vec![Strategy::UpperBound],
        StrategyArg::Precise => vec![Strategy::Precise],
        StrategyArg::All => vec![Strategy::Hybrid, Strategy::UpperBound, Strategy::Precise],
    }
}

fn run_typed<S: Scalar>(args: &SquareArgs) -> Result<(), CliError> {
    let (a, label) = input::load::<S>(&args.source)?;
    let n = a.num_rows() as u64;

    let mut table = Table::new(&[
        "strategy",
        "n",
        "nnz(A)",
        "nnzr(A)",
        "nnz(C^)",
        "nnzr(C^)",
        "nnz(C)",
        "nnzr(C)",
        "GFlop/s",
        "temp(precise)",
        "temp(hybrid)",
        "temp(upper)",
        "reallocs",
    ]);
    let mut records = Vec::new();

    for strategy in strategies(args.strategy) {
        let (c, report) = spgemm(&a, &a, strategy).map_err(internal)?;
        if args.verify {
            verify_row_result(&a, &c, strategy)?;
        }
        let gflops = report.flops as f64 / report.stage_seconds.compute_and_arrange() / 1e9;
        table.row(vec![
            strategy.name().to_string(),
            n.to_string(),
            report.nnz_a.to_string(),
            (report.nnz_a / n.max(1)).to_string(),
            report.nnz_upper.to_string(),
            (report.nnz_upper / n.max(1)).to_string(),
            report.nnz_result.to_string(),
            (report.nnz_result / n.max(1)).to_string(),
            format!("{gflops:.3}"),
            human_bytes(report.temp_bytes.precise),
            human_bytes(report.temp_bytes.hybrid),
            human_bytes(report.temp_bytes.upper_bound),
            report.realloc_count.to_string(),
        ]);
        records.push(SquareRecord {
            command: "square",
            input: label.clone(),
            gflops,
            report,
        });
    }

    let r0 = &records[0].report;
    println!(
        "square {label} ({n} x {n}, {}): nnz(A) {} -> nnz(C^) {} -> nnz(C) {}",
        S::NAME,
        human_count(r0.nnz_a),
        human_count(r0.nnz_upper),
        human_count(r0.nnz_result),
    );
    table.print();
    let r = &records[0].report;
    println!(
        "  stage seconds: upper_bound {:.4}  binning {:.4}  compute {:.4}  arrange {:.4}",
        r.stage_seconds.upper_bound,
        r.stage_seconds.binning,
        r.stage_seconds.compute,
        r.stage_seconds.arrange,
    );
    if args.verify {
        println!("  verification: ok ({} strategies)", records.len());
    }

    if let Some(path) = &args.json {
        write_json_lines(path, &records).context("writing json")?;
    }
    if let Some(path) = &args.csv {
        table.write_csv(path).context("writing csv")?;
    }
    Ok(())
}

fn verify_row_result<S: Scalar>(
    a: &CsrMatrix<S>,
    c: &CsrMatrix<S>,
    strategy: Strategy,
) -> Result<(), CliError> {
    verify_against_oracle(a, a, c).map_err(|failure| {
        CliError::Verification(format!("strategy {}: {failure:?}", strategy.name()))
    })
}
