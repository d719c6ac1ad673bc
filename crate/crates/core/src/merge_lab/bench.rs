//! Comparative throughput harness for the merge variants.
//!
//! Every measurement merges many independent pairs of sorted sequences of
//! length `l`, holding the total element count constant across `l` so the
//! machine stays saturated. Correctness is gated before any timing: each
//! algorithm's output is checked against the serial merge on every pair.
//! Merge path is swept over lane counts and reports its best.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use super::{
    merge_bitonic, merge_oddeven, merge_path, merge_ranking, merge_serial, KeyValueSeq,
    MergeLabError, Payload, PayloadKind,
};
use crate::par;

/// One measured configuration.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub algorithm: &'static str,
    pub l: usize,
    pub payload: &'static str,
    pub elements_per_second: f64,
}

#[derive(Debug, Clone)]
pub struct MergeBenchConfig {
    /// Sub-sequence lengths; powers of two in `[2^4, 2^12]`.
    pub sizes: Vec<usize>,
    pub payload: PayloadKind,
    /// Timed repetitions per configuration; the best one is reported.
    pub trials: usize,
    /// Elements per repetition, split into `total / (2 l)` pairs.
    pub total_elements: usize,
    pub seed: u64,
}

impl Default for MergeBenchConfig {
    fn default() -> Self {
        MergeBenchConfig {
            sizes: (4..=12).map(|e| 1usize << e).collect(),
            payload: PayloadKind::U32,
            trials: 3,
            total_elements: 1 << 22,
            seed: 1,
        }
    }
}

pub(crate) fn random_sorted_seq(rng: &mut StdRng, len: usize, kind: PayloadKind) -> KeyValueSeq {
    let mut keys: Vec<u32> = (0..len).map(|_| rng.random()).collect();
    keys.sort_unstable();
    let payload = match kind {
        PayloadKind::None => Payload::None,
        PayloadKind::U32 => Payload::U32((0..len).map(|_| rng.random()).collect()),
        PayloadKind::U64 => Payload::U64((0..len).map(|_| rng.random()).collect()),
    };
    KeyValueSeq { keys, payload }
}

type MergeFn = dyn Fn(&KeyValueSeq, &KeyValueSeq) -> KeyValueSeq + Sync;

fn time_algorithm(pairs: &[(KeyValueSeq, KeyValueSeq)], trials: usize, f: &MergeFn) -> f64 {
    let mut best = f64::INFINITY;
    for _ in 0..trials.max(1) {
        let (_, secs) = par::timed(|| {
            let outputs = par::map_rows(pairs.len(), |i| f(&pairs[i].0, &pairs[i].1));
            // Keep the optimizer from discarding the merges.
            outputs.iter().map(|o| o.len()).sum::<usize>()
        });
        best = best.min(secs);
    }
    best
}

/// Runs the harness and returns one row per (algorithm, l).
///
/// Keys-only and keyed payloads all route through the same merge bodies;
/// `payload` picks the element width under test.
pub fn bench_merges(cfg: &MergeBenchConfig) -> Result<Vec<BenchRow>, MergeLabError> {
    for &l in &cfg.sizes {
        if !l.is_power_of_two() || !(16..=4096).contains(&l) {
            return Err(MergeLabError::BadBenchSize(l));
        }
    }
    let lane_sweep = [1usize, 2, 4, 8, 16];
    let mut rows = Vec::new();

    for &l in &cfg.sizes {
        let pair_count = (cfg.total_elements / (2 * l)).max(1);
        let mut rng = StdRng::seed_from_u64(cfg.seed ^ (l as u64) << 32);
        let pairs: Vec<(KeyValueSeq, KeyValueSeq)> = (0..pair_count)
            .map(|_| {
                (
                    random_sorted_seq(&mut rng, l, cfg.payload),
                    random_sorted_seq(&mut rng, l, cfg.payload),
                )
            })
            .collect();

        // Correctness gate: every algorithm must agree with the serial
        // merge on every pair before anything is timed.
        for (a, b) in &pairs {
            let want = merge_serial(a, b).unwrap();
            for lanes in lane_sweep {
                assert_eq!(merge_path(a, b, lanes).unwrap(), want, "merge_path l={l}");
            }
            assert_eq!(merge_ranking(a, b).unwrap(), want, "ranking l={l}");
            for (name, got) in [
                ("oddeven", merge_oddeven(a, b).unwrap()),
                ("bitonic", merge_bitonic(a, b).unwrap()),
            ] {
                assert_eq!(got.keys, want.keys, "{name} keys l={l}");
                assert_eq!(sorted_pairs(&got), sorted_pairs(&want), "{name} pairs l={l}");
            }
        }

        let elements = (pair_count * 2 * l) as f64;
        let payload = cfg.payload.name();

        let mut best_path = f64::INFINITY;
        for lanes in lane_sweep {
            let t = time_algorithm(&pairs, cfg.trials, &move |a, b| {
                merge_path(a, b, lanes).unwrap()
            });
            best_path = best_path.min(t);
        }
        rows.push(BenchRow {
            algorithm: "merge_path",
            l,
            payload,
            elements_per_second: elements / best_path,
        });

        let named: [(&'static str, Box<MergeFn>); 3] = [
            ("ranking", Box::new(|a, b| merge_ranking(a, b).unwrap())),
            ("oddeven", Box::new(|a, b| merge_oddeven(a, b).unwrap())),
            ("bitonic", Box::new(|a, b| merge_bitonic(a, b).unwrap())),
        ];
        for (name, f) in named {
            let t = time_algorithm(&pairs, cfg.trials, f.as_ref());
            rows.push(BenchRow {
                algorithm: name,
                l,
                payload,
                elements_per_second: elements / t,
            });
        }
        let t = time_algorithm(&pairs, cfg.trials, &|a, b| merge_serial(a, b).unwrap());
        rows.push(BenchRow {
            algorithm: "serial",
            l,
            payload,
            elements_per_second: elements / t,
        });
    }
    Ok(rows)
}

fn sorted_pairs(s: &KeyValueSeq) -> Vec<(u32, u64)> {
    let mut out: Vec<(u32, u64)> = match &s.payload {
        Payload::None => s.keys.iter().map(|&k| (k, 0)).collect(),
        Payload::U32(v) => s.keys.iter().zip(v).map(|(&k, &v)| (k, v as u64)).collect(),
        Payload::U64(v) => s.keys.iter().zip(v).map(|(&k, &v)| (k, v)).collect(),
    };
    out.sort_unstable();
    out
}
