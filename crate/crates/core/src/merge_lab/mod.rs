//! Merge-algorithm candidates for the insert stage, plus a comparative
//! benchmark harness.
//!
//! Four ways of merging two sorted key sequences (optionally carrying
//! 32-bit or 64-bit payloads): diagonal-partitioned *merge path*, binary
//! -search *ranking merge*, and the last stage of the *odd-even* and
//! *bitonic* sorting networks. All must agree with the serial two-pointer
//! merge; the networks additionally require equal power-of-two input
//! lengths, which is why they lost the evaluation.
//!
//! A fifth candidate from the GPU literature, the advanced bitonic merge,
//! is deliberately absent: its entire point is staging data from shared
//! scratchpad into thread-private memory, a memory-hierarchy distinction
//! with no CPU analogue.

mod bench;

pub use bench::{bench_merges, BenchRow, MergeBenchConfig};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MergeLabError {
    #[error("sorting-network merges need equal power-of-two lengths, got {a_len} and {b_len}")]
    SizeRestriction { a_len: usize, b_len: usize },
    #[error("cannot merge sequences with different payload kinds")]
    PayloadMismatch,
    #[error("benchmark sizes must be powers of two in [2^4, 2^12], got {0}")]
    BadBenchSize(usize),
}

/// Payload attached to the 32-bit keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    None,
    U32(Vec<u32>),
    U64(Vec<u64>),
}

/// Payload width selector for generators and benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayloadKind {
    None,
    U32,
    U64,
}

impl PayloadKind {
    pub fn name(self) -> &'static str {
        match self {
            PayloadKind::None => "key32",
            PayloadKind::U32 => "key32_val32",
            PayloadKind::U64 => "key32_val64",
        }
    }
}

/// A sorted sequence of 32-bit keys with an optional payload array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyValueSeq {
    pub keys: Vec<u32>,
    pub payload: Payload,
}

impl KeyValueSeq {
    pub fn from_keys(keys: Vec<u32>) -> Self {
        KeyValueSeq {
            keys,
            payload: Payload::None,
        }
    }

    pub fn with_u32(keys: Vec<u32>, values: Vec<u32>) -> Self {
        assert_eq!(keys.len(), values.len());
        KeyValueSeq {
            keys,
            payload: Payload::U32(values),
        }
    }

    pub fn with_u64(keys: Vec<u32>, values: Vec<u64>) -> Self {
        assert_eq!(keys.len(), values.len());
        KeyValueSeq {
            keys,
            payload: Payload::U64(values),
        }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn kind(&self) -> PayloadKind {
        match self.payload {
            Payload::None => PayloadKind::None,
            Payload::U32(_) => PayloadKind::U32,
            Payload::U64(_) => PayloadKind::U64,
        }
    }

    fn is_sorted(&self) -> bool {
        self.keys.windows(2).all(|w| w[0] <= w[1])
    }
}

// ---------------------------------------------------------------------------
// Generic implementations over (key, value) pairs
// ---------------------------------------------------------------------------

/// Two-pointer merge; the oracle every other variant is checked against.
/// Stable: on equal keys, `a` entries come first.
pub(crate) fn serial_merge_into<V: Copy>(
    ak: &[u32],
    av: &[V],
    bk: &[u32],
    bv: &[V],
    out_k: &mut Vec<u32>,
    out_v: &mut Vec<V>,
) {
    out_k.clear();
    out_v.clear();
    out_k.reserve(ak.len() + bk.len());
    out_v.reserve(av.len() + bv.len());
    let (mut i, mut j) = (0, 0);
    while i < ak.len() && j < bk.len() {
        if ak[i] <= bk[j] {
            out_k.push(ak[i]);
            out_v.push(av[i]);
            i += 1;
        } else {
            out_k.push(bk[j]);
            out_v.push(bv[j]);
            j += 1;
        }
    }
    out_k.extend_from_slice(&ak[i..]);
    out_v.extend_from_slice(&av[i..]);
    out_k.extend_from_slice(&bk[j..]);
    out_v.extend_from_slice(&bv[j..]);
}

/// Splits output diagonal `d` of the merge of `ak`/`bk` into the pair
/// `(i, d - i)`: `i` is how many `a` entries land in the first `d` outputs
/// of the stable merge.
fn diagonal_split(ak: &[u32], bk: &[u32], d: usize) -> (usize, usize) {
    let mut lo = d.saturating_sub(bk.len());
    let mut hi = d.min(ak.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if ak[mid] <= bk[d - 1 - mid] {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    (lo, d - lo)
}

/// Merge path: the output is cut into `lanes` equal segments by diagonal
/// binary searches; every lane then runs an independent serial merge of
/// its input ranges. Lane boundaries do not change the output.
pub(crate) fn merge_path_into<V: Copy>(
    ak: &[u32],
    av: &[V],
    bk: &[u32],
    bv: &[V],
    lanes: usize,
    out_k: &mut Vec<u32>,
    out_v: &mut Vec<V>,
) {
    let lanes = lanes.max(1);
    let total = ak.len() + bk.len();
    out_k.clear();
    out_v.clear();
    out_k.reserve(total);
    out_v.reserve(total);

    let (mut ai, mut bi) = (0usize, 0usize);
    for lane in 1..=lanes {
        let d = lane * total / lanes;
        let (aj, bj) = diagonal_split(ak, bk, d);
        debug_assert!(aj >= ai && bj >= bi);
        let (mut i, mut j) = (ai, bi);
        while i < aj && j < bj {
            if ak[i] <= bk[j] {
                out_k.push(ak[i]);
                out_v.push(av[i]);
                i += 1;
            } else {
                out_k.push(bk[j]);
                out_v.push(bv[j]);
                j += 1;
            }
        }
        out_k.extend_from_slice(&ak[i..aj]);
        out_v.extend_from_slice(&av[i..aj]);
        out_k.extend_from_slice(&bk[j..bj]);
        out_v.extend_from_slice(&bv[j..bj]);
        (ai, bi) = (aj, bj);
    }
}

/// Ranking merge: every element's output position is its own index plus
/// its binary-searched rank in the other sequence. Out of place by
/// construction.
fn ranking_merge_into<V: Copy + Default>(
    ak: &[u32],
    av: &[V],
    bk: &[u32],
    bv: &[V],
    out_k: &mut Vec<u32>,
    out_v: &mut Vec<V>,
) {
    let total = ak.len() + bk.len();
    out_k.clear();
    out_v.clear();
    out_k.resize(total, 0);
    // The ranks form a permutation, so every cell is overwritten below.
    out_v.resize(total, V::default());

    for (i, (&k, &v)) in ak.iter().zip(av).enumerate() {
        // a entries precede equal b entries: rank counts strictly smaller.
        let rank = bk.partition_point(|&x| x < k);
        out_k[i + rank] = k;
        out_v[i + rank] = v;
    }
    for (j, (&k, &v)) in bk.iter().zip(bv).enumerate() {
        let rank = ak.partition_point(|&x| x <= k);
        out_k[j + rank] = k;
        out_v[j + rank] = v;
    }
}

#[inline]
fn compare_exchange<V: Copy>(e: &mut [(u32, V)], i: usize, j: usize) {
    if e[i].0 > e[j].0 {
        e.swap(i, j);
    }
}

/// Batcher's odd-even merge network over `e[lo..lo+n]` with comparator
/// stride `r`; both halves must already be sorted.
fn odd_even_merge_network<V: Copy>(e: &mut [(u32, V)], lo: usize, n: usize, r: usize) {
    let step = r * 2;
    if step < n {
        odd_even_merge_network(e, lo, n, step);
        odd_even_merge_network(e, lo + r, n, step);
        let mut i = lo + r;
        while i + r < lo + n {
            compare_exchange(e, i, i + r);
            i += step;
        }
    } else {
        compare_exchange(e, lo, lo + r);
    }
}

/// Last stage of the bitonic sorter: `e` must be bitonic (sorted `a`
/// concatenated with reversed `b`).
fn bitonic_merge_network<V: Copy>(e: &mut [(u32, V)]) {
    let n = e.len();
    let mut j = n / 2;
    while j > 0 {
        for i in 0..n {
            let l = i ^ j;
            if l > i {
                compare_exchange(e, i, l);
            }
        }
        j /= 2;
    }
}

// ---------------------------------------------------------------------------
// Payload dispatch
// ---------------------------------------------------------------------------

fn dispatch<F32, FU, F64>(
    a: &KeyValueSeq,
    b: &KeyValueSeq,
    none: FU,
    u32s: F32,
    u64s: F64,
) -> Result<KeyValueSeq, MergeLabError>
where
    FU: FnOnce(&[u32], &[()], &[u32], &[()]) -> (Vec<u32>, Vec<()>),
    F32: FnOnce(&[u32], &[u32], &[u32], &[u32]) -> (Vec<u32>, Vec<u32>),
    F64: FnOnce(&[u32], &[u64], &[u32], &[u64]) -> (Vec<u32>, Vec<u64>),
{
    debug_assert!(a.is_sorted() && b.is_sorted(), "merge inputs must be sorted");
    match (&a.payload, &b.payload) {
        (Payload::None, Payload::None) => {
            let units_a = vec![(); a.len()];
            let units_b = vec![(); b.len()];
            let (keys, _) = none(&a.keys, &units_a, &b.keys, &units_b);
            Ok(KeyValueSeq::from_keys(keys))
        }
        (Payload::U32(av), Payload::U32(bv)) => {
            let (keys, vals) = u32s(&a.keys, av, &b.keys, bv);
            Ok(KeyValueSeq::with_u32(keys, vals))
        }
        (Payload::U64(av), Payload::U64(bv)) => {
            let (keys, vals) = u64s(&a.keys, av, &b.keys, bv);
            Ok(KeyValueSeq::with_u64(keys, vals))
        }
        _ => Err(MergeLabError::PayloadMismatch),
    }
}

macro_rules! run_into {
    ($f:ident, $lanes:expr) => {
        |ak, av, bk, bv| {
            let mut out_k = Vec::new();
            let mut out_v = Vec::new();
            $f(ak, av, bk, bv, $lanes, &mut out_k, &mut out_v);
            (out_k, out_v)
        }
    };
    ($f:ident) => {
        |ak, av, bk, bv| {
            let mut out_k = Vec::new();
            let mut out_v = Vec::new();
            $f(ak, av, bk, bv, &mut out_k, &mut out_v);
            (out_k, out_v)
        }
    };
}

/// Serial two-pointer merge of two sorted sequences.
pub fn merge_serial(a: &KeyValueSeq, b: &KeyValueSeq) -> Result<KeyValueSeq, MergeLabError> {
    dispatch(
        a,
        b,
        run_into!(serial_merge_into),
        run_into!(serial_merge_into),
        run_into!(serial_merge_into),
    )
}

/// Merge path over `lanes` equal-output partitions.
pub fn merge_path(
    a: &KeyValueSeq,
    b: &KeyValueSeq,
    lanes: usize,
) -> Result<KeyValueSeq, MergeLabError> {
    dispatch(
        a,
        b,
        run_into!(merge_path_into, lanes),
        run_into!(merge_path_into, lanes),
        run_into!(merge_path_into, lanes),
    )
}

/// Ranking merge (out of place).
pub fn merge_ranking(a: &KeyValueSeq, b: &KeyValueSeq) -> Result<KeyValueSeq, MergeLabError> {
    dispatch(
        a,
        b,
        run_into!(ranking_merge_into),
        run_into!(ranking_merge_into),
        run_into!(ranking_merge_into),
    )
}

fn network_merge<V: Copy>(
    ak: &[u32],
    av: &[V],
    bk: &[u32],
    bv: &[V],
    bitonic: bool,
) -> (Vec<u32>, Vec<V>) {
    let mut e: Vec<(u32, V)> = Vec::with_capacity(ak.len() + bk.len());
    e.extend(ak.iter().copied().zip(av.iter().copied()));
    if bitonic {
        e.extend(bk.iter().copied().zip(bv.iter().copied()).rev());
        bitonic_merge_network(&mut e);
    } else {
        e.extend(bk.iter().copied().zip(bv.iter().copied()));
        let n = e.len();
        odd_even_merge_network(&mut e, 0, n, 1);
    }
    e.into_iter().unzip()
}

fn check_network_sizes(a: &KeyValueSeq, b: &KeyValueSeq) -> Result<(), MergeLabError> {
    if a.len() != b.len() || !a.len().is_power_of_two() {
        return Err(MergeLabError::SizeRestriction {
            a_len: a.len(),
            b_len: b.len(),
        });
    }
    Ok(())
}

/// Basic odd-even merge. Restricted to equal power-of-two lengths: the
/// comparator network cannot deal with arbitrary sizes.
pub fn merge_oddeven(a: &KeyValueSeq, b: &KeyValueSeq) -> Result<KeyValueSeq, MergeLabError> {
    check_network_sizes(a, b)?;
    dispatch(
        a,
        b,
        |ak, av, bk, bv| network_merge(ak, av, bk, bv, false),
        |ak, av, bk, bv| network_merge(ak, av, bk, bv, false),
        |ak, av, bk, bv| network_merge(ak, av, bk, bv, false),
    )
}

/// Basic bitonic merge: reverse the second input, concatenate, and run one
/// bitonic merging stage. Same size restriction as [`merge_oddeven`].
pub fn merge_bitonic(a: &KeyValueSeq, b: &KeyValueSeq) -> Result<KeyValueSeq, MergeLabError> {
    check_network_sizes(a, b)?;
    dispatch(
        a,
        b,
        |ak, av, bk, bv| network_merge(ak, av, bk, bv, true),
        |ak, av, bk, bv| network_merge(ak, av, bk, bv, true),
        |ak, av, bk, bv| network_merge(ak, av, bk, bv, true),
    )
}
