//! `rowbin mergebench`: correctness-gated throughput comparison of the
//! merge variants. The gate runs every algorithm against the serial merge
//! on every generated pair before anything is timed.

use anyhow::Context;

use rowbin::merge_lab::{bench_merges, BenchRow, MergeBenchConfig, PayloadKind};

use super::internal;
use crate::output::Table;
use crate::{CliError, MergebenchArgs, PayloadArg};

pub fn run(args: &MergebenchArgs) -> Result<(), CliError> {
    let kinds = match args.payload {
        PayloadArg::None => vec![PayloadKind::None],
        PayloadArg::U32 => vec![PayloadKind::U32],
        PayloadArg::U64 => vec![PayloadKind::U64],
        PayloadArg::All => vec![PayloadKind::None, PayloadKind::U32, PayloadKind::U64],
    };

    let mut rows: Vec<BenchRow> = Vec::new();
    for kind in kinds {
        let cfg = MergeBenchConfig {
            sizes: args.sizes.clone(),
            payload: kind,
            trials: args.trials,
            total_elements: args.total_elements,
            seed: args.seed,
        };
        rows.extend(bench_merges(&cfg).map_err(internal)?);
    }

    let mut table = Table::new(&["algorithm", "l", "payload", "elements_per_second"]);
    for row in &rows {
        table.row(vec![
            row.algorithm.to_string(),
            row.l.to_string(),
            row.payload.to_string(),
            format!("{:.0}", row.elements_per_second),
        ]);
    }

    match &args.csv {
        Some(path) => {
            table.write_csv(path).context("writing csv")?;
            println!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => {
            // CSV on stdout is the command's native output format.
            println!("algorithm,l,payload,elements_per_second");
            for row in &rows {
                println!(
                    "{},{},{},{:.0}",
                    row.algorithm, row.l, row.payload, row.elements_per_second
                );
            }
        }
    }
    Ok(())
}
