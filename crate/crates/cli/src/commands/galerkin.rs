//! `rowbin galerkin`: build a coarsening hierarchy and time the triple
//! product in one or both association orders.

use anyhow::Context;
use serde::Serialize;

use rowbin::galerkin::{build_prolongator, galerkin_product, GalerkinOrder};
use rowbin::sparse::CsrMatrix;
use rowbin::Scalar;

use super::internal;
use crate::output::{write_json_lines, Table};
use crate::{input, CliError, GalerkinArgs, OrderArg, PrecisionArg};

#[derive(Serialize)]
struct LevelRecord {
    command: &'static str,
    input: String,
    level: usize,
    order: &'static str,
    n_fine: usize,
    n_coarse: usize,
    nnz_coarse: u64,
    seconds: f64,
    flops: u64,
}

pub fn run(args: &GalerkinArgs) -> Result<(), CliError> {
    match args.precision {
        PrecisionArg::F64 => run_typed::<f64>(args),
        PrecisionArg::F32 => run_typed::<f32>(args),
    }
}

fn orders(arg: OrderArg) -> Vec<GalerkinOrder> {
    match arg {
        OrderArg::Both => vec![GalerkinOrder::RaThenP, GalerkinOrder::ApThenR],
        OrderArg::RaThenP => vec![GalerkinOrder::RaThenP],
        OrderArg::ApThenR => vec![GalerkinOrder::ApThenR],
    }
}

fn run_typed<S: Scalar>(args: &GalerkinArgs) -> Result<(), CliError> {
    let (a, label) = input::load::<S>(&args.source)?;
    let orders = orders(args.order);
    // Relative tolerance of the association-order equality check.
    let tol = if S::VALUE_BYTES == 8 { 1e-10 } else { 1e-4 };

    let mut table = Table::new(&[
        "level", "order", "n_fine", "n_coarse", "nnz(coarse)", "seconds", "flops",
    ]);
    let mut records = Vec::new();
    let mut current = a;

    for level in 0..args.levels {
        if current.num_rows() < args.block.max(2) {
            break;
        }
        let p = build_prolongator(&current, args.block).map_err(internal)?;
        let mut results: Vec<(GalerkinOrder, CsrMatrix<S>, f64, u64)> = Vec::new();
        for &order in &orders {
            let (coarse, reports) = galerkin_product(&p, &current, order).map_err(internal)?;
            let seconds: f64 = reports.iter().map(|r| r.stage_seconds.total()).sum();
            let flops: u64 = reports.iter().map(|r| r.flops).sum();
            table.row(vec![
                level.to_string(),
                order.name().to_string(),
                current.num_rows().to_string(),
                coarse.num_rows().to_string(),
                coarse.nnz().to_string(),
                format!("{seconds:.5}"),
                flops.to_string(),
            ]);
            records.push(LevelRecord {
                command: "galerkin",
                input: label.clone(),
                level,
                order: order.name(),
                n_fine: current.num_rows(),
                n_coarse: coarse.num_rows(),
                nnz_coarse: coarse.nnz() as u64,
                seconds,
                flops,
            });
            results.push((order, coarse, seconds, flops));
        }

        if results.len() == 2 {
            let (first, second) = (&results[0], &results[1]);
            if first.1.col_idx() != second.1.col_idx()
                || first.1.row_ptr() != second.1.row_ptr()
                || !first.1.approx_eq(&second.1, tol)
            {
                return Err(CliError::Verification(format!(
                    "level {level}: {} and {} disagree beyond {tol:e}",
                    first.0.name(),
                    second.0.name()
                )));
            }
        }
        current = results.pop().unwrap().1;
    }

    println!("galerkin {label} (block {}, {})", args.block, S::NAME);
    table.print();
    if orders.len() == 2 {
        println!("  order equality: ok (tolerance {tol:e})");
    }

    if let Some(path) = &args.json {
        write_json_lines(path, &records).context("writing json")?;
    }
    if let Some(path) = &args.csv {
        table.write_csv(path).context("writing csv")?;
    }
    Ok(())
}
