//! Monte-Carlo experiments: average decoding overhead and decoding throughput
//! versus loss probability.
//!
//! Every trial draws its randomness from its own generator, seeded from the
//! master seed and the trial index, so results do not depend on how trials
//! are scheduled.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::codec::{hybrid_decode, iterative_only, ml_decode, DecodeOutcome, SymbolBlock};
use crate::construct::CodeMatrices;
use crate::gf2linalg::IncrementalBasis;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown decoder `{0}` (expected iterative, ml or hybrid)")]
pub struct UnknownDecoder(String);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decoder {
    Iterative,
    Ml,
    Hybrid,
}

impl Decoder {
    pub fn name(self) -> &'static str {
        match self {
            Decoder::Iterative => "iterative",
            Decoder::Ml => "ml",
            Decoder::Hybrid => "hybrid",
        }
    }

    /// Runs this decoder on `block`. Windowed codes have no parity-check
    /// matrix, so every decoder reduces to ML for them.
    pub fn decode(self, code: &CodeMatrices, block: &mut SymbolBlock) -> DecodeOutcome {
        let r = match (self, code.parity_check().is_some()) {
            (Decoder::Iterative, true) => iterative_only(code, block),
            (Decoder::Hybrid, true) => hybrid_decode(code, block),
            _ => ml_decode(code, block),
        };
        r.expect("block built for this code")
    }
}

impl fmt::Display for Decoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Decoder {
    type Err = UnknownDecoder;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "iterative" | "it" | "peeling" => Ok(Decoder::Iterative),
            "ml" => Ok(Decoder::Ml),
            "hybrid" => Ok(Decoder::Hybrid),
            other => Err(UnknownDecoder(other.to_string())),
        }
    }
}

/// Seed of trial `trial` under `master` (splitmix64 of the pair).
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    let mut z = master ^ trial.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Outcome of one simulated transmission.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub family: &'static str,
    pub k: usize,
    pub n: usize,
    pub bandwidth: usize,
    pub decoder: Decoder,
    pub trial: u64,
    pub seed: u64,
    /// Encoding symbols received before decoding succeeded (overhead runs),
    /// or received in total (throughput runs). `None` when all `n` were not enough.
    pub symbols_needed: Option<usize>,
    pub overhead: Option<f64>,
    pub row_ops: u64,
    /// Wall time of the decode, when measured.
    pub decode_ns: Option<u64>,
    pub loss_prob: Option<f64>,
    pub success: bool,
}

pub const CSV_HEADER: &str =
    "code_family,k,n,B,decoder,trial,seed,symbols_needed,overhead,row_ops,decode_ns,loss_prob,success";

impl TrialRecord {
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.family,
            self.k,
            self.n,
            self.bandwidth,
            self.decoder,
            self.trial,
            self.seed,
            opt(self.symbols_needed.map(|v| v.to_string())),
            opt(self.overhead.map(|v| format!("{v:.6}"))),
            self.row_ops,
            opt(self.decode_ns.map(|v| v.to_string())),
            opt(self.loss_prob.map(|v| format!("{v:.4}"))),
            self.success
        )
    }
}

/// Random order in which the `n` encoding symbols arrive.
fn arrival_order(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}

/// Smallest number of arrivals after which ML decoding succeeds.
///
/// Systematic codes: the sources are determined exactly when the parity-check
/// columns of the erased slots are independent. Inserting columns from the
/// last arrival backwards, the first dependent column marks the shortest
/// decodable prefix. Windowed codes: the prefix decodes once the generator
/// columns received so far reach rank `k`.
pub fn ml_symbols_needed(code: &CodeMatrices, order: &[usize]) -> Option<usize> {
    match code.parity_check() {
        Some(h) => {
            let mut basis = IncrementalBasis::new(h.num_rows());
            for (t, &esi) in order.iter().enumerate().rev() {
                let slot = code.esi_to_slot(esi).unwrap();
                if !basis.insert(h.col(slot)) {
                    return Some(t + 1);
                }
            }
            // every column independent: only possible when n - k >= n
            Some(0)
        }
        None => {
            let mut basis = IncrementalBasis::new(code.k());
            for (t, &esi) in order.iter().enumerate() {
                basis.insert(code.generator_column(esi));
                if basis.rank() == code.k() {
                    return Some(t + 1);
                }
            }
            None
        }
    }
}

/// Smallest number of arrivals after which peeling has recovered every source.
pub fn iterative_symbols_needed(code: &CodeMatrices, order: &[usize]) -> Option<usize> {
    let h = code.parity_check()?;
    let k = code.k();
    let rows = h.num_rows();
    let mut present = vec![false; code.slot_count()];
    let mut missing: Vec<u32> = (0..rows).map(|j| h.row(j).len() as u32).collect();
    let mut index_xor: Vec<u32> = (0..rows).map(|j| h.row(j).iter().fold(0, |a, &s| a ^ s)).collect();
    let mut sources_left = k;
    let mut stack = Vec::new();
    for (t, &esi) in order.iter().enumerate() {
        let slot = code.esi_to_slot(esi).unwrap();
        if present[slot] {
            continue;
        }
        stack.push(slot);
        while let Some(s) = stack.pop() {
            if present[s] {
                continue;
            }
            present[s] = true;
            if s < k {
                sources_left -= 1;
            }
            for &j in h.col(s) {
                let j = j as usize;
                missing[j] -= 1;
                index_xor[j] ^= s as u32;
                if missing[j] == 1 {
                    stack.push(index_xor[j] as usize);
                }
            }
        }
        if sources_left == 0 {
            return Some(t + 1);
        }
    }
    None
}

/// The arrival order used by overhead trial `trial`.
pub fn trial_arrivals(code: &CodeMatrices, trial: u64, master_seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(master_seed, trial));
    arrival_order(code.n(), &mut rng)
}

/// Decodes the first `received` arrivals with zero-byte symbols, for the cost counters.
fn decode_prefix(code: &CodeMatrices, order: &[usize], received: usize, decoder: Decoder) -> DecodeOutcome {
    let mut block = SymbolBlock::empty(code, 0);
    for &esi in &order[..received] {
        block.insert(code.esi_to_slot(esi).unwrap(), &[]).unwrap();
    }
    decoder.decode(code, &mut block)
}

/// Parameters of an overhead experiment.
#[derive(Clone, Debug)]
pub struct OverheadConfig {
    pub trials: u64,
    pub master_seed: u64,
    pub decoder: Decoder,
    /// Also run a real decode at the needed prefix to count row operations.
    pub count_row_ops: bool,
}

impl OverheadConfig {
    pub fn new(trials: u64, decoder: Decoder) -> Self {
        Self { trials, master_seed: 1, decoder, count_row_ops: true }
    }
}

fn base_record(code: &CodeMatrices, decoder: Decoder, trial: u64, seed: u64) -> TrialRecord {
    TrialRecord {
        family: code.family().name(),
        k: code.k(),
        n: code.n(),
        bandwidth: code.spec().bandwidth(),
        decoder,
        trial,
        seed,
        symbols_needed: None,
        overhead: None,
        row_ops: 0,
        decode_ns: None,
        loss_prob: None,
        success: false,
    }
}

/// One overhead trial: symbols arrive in random order until the decoder succeeds.
pub fn overhead_trial(code: &CodeMatrices, decoder: Decoder, trial: u64, master_seed: u64, count_row_ops: bool) -> TrialRecord {
    let seed = trial_seed(master_seed, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = arrival_order(code.n(), &mut rng);
    let needed = match decoder {
        Decoder::Iterative if code.parity_check().is_some() => iterative_symbols_needed(code, &order),
        _ => ml_symbols_needed(code, &order),
    };
    let mut rec = base_record(code, decoder, trial, seed);
    rec.symbols_needed = needed;
    rec.success = needed.is_some();
    rec.overhead = needed.map(|t| (t as f64 - code.k() as f64) / code.k() as f64);
    if count_row_ops {
        rec.row_ops = decode_prefix(code, &order, needed.unwrap_or(code.n()), decoder).row_ops;
    }
    rec
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OverheadSummary {
    pub trials: u64,
    pub decodable: u64,
    pub mean: f64,
    pub std: f64,
    pub p50: f64,
    pub p90: f64,
    pub p99: f64,
    pub max: f64,
    pub mean_row_ops: f64,
}

impl OverheadSummary {
    pub fn of(records: &[TrialRecord]) -> Self {
        let mut v: Vec<f64> = records.iter().filter_map(|r| r.overhead).collect();
        v.sort_by(f64::total_cmp);
        let trials = records.len() as u64;
        if v.is_empty() {
            return Self { trials, ..Default::default() };
        }
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (v.len().max(2) - 1) as f64;
        let pct = |p: f64| v[((p * (v.len() - 1) as f64).round() as usize).min(v.len() - 1)];
        Self {
            trials,
            decodable: v.len() as u64,
            mean,
            std: var.sqrt(),
            p50: pct(0.5),
            p90: pct(0.9),
            p99: pct(0.99),
            max: *v.last().unwrap(),
            mean_row_ops: records.iter().map(|r| r.row_ops as f64).sum::<f64>() / records.len() as f64,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "#summary,trials={},decodable={},mean_overhead={:.6},std={:.6},p50={:.6},p90={:.6},p99={:.6},max={:.6},mean_row_ops={:.1}",
            self.trials, self.decodable, self.mean, self.std, self.p50, self.p90, self.p99, self.max, self.mean_row_ops
        )
    }
}

#[derive(Clone, Debug)]
pub struct OverheadReport {
    pub records: Vec<TrialRecord>,
    pub summary: OverheadSummary,
}

pub fn overhead_experiment(code: &CodeMatrices, cfg: &OverheadConfig) -> OverheadReport {
    let records: Vec<TrialRecord> =
        (0..cfg.trials).map(|t| overhead_trial(code, cfg.decoder, t, cfg.master_seed, cfg.count_row_ops)).collect();
    let summary = OverheadSummary::of(&records);
    OverheadReport { records, summary }
}

/// Parameters of a throughput experiment.
#[derive(Clone, Debug)]
pub struct ThroughputConfig {
    pub loss_probs: Vec<f64>,
    pub trials_per_point: u64,
    pub symbol_size: usize,
    pub master_seed: u64,
    pub decoder: Decoder,
}

impl ThroughputConfig {
    pub fn new(loss_probs: Vec<f64>, trials_per_point: u64, symbol_size: usize, decoder: Decoder) -> Self {
        Self { loss_probs, trials_per_point, symbol_size, master_seed: 1, decoder }
    }
}

/// Aggregate of one loss probability.
#[derive(Clone, Debug, PartialEq)]
pub struct ThroughputPoint {
    pub loss_prob: f64,
    pub trials: u64,
    pub successes: u64,
    pub mean_decode_ns: f64,
    pub mean_row_ops: f64,
    /// Decoded source bits per second of decoding time, over successful trials.
    pub mbps: f64,
}

impl ThroughputPoint {
    pub fn csv_row(&self) -> String {
        format!(
            "#summary,loss_prob={:.4},trials={},successes={},mean_decode_ns={:.0},mean_row_ops={:.1},mbps={:.3}",
            self.loss_prob, self.trials, self.successes, self.mean_decode_ns, self.mean_row_ops, self.mbps
        )
    }
}

#[derive(Clone, Debug)]
pub struct ThroughputReport {
    pub records: Vec<TrialRecord>,
    pub points: Vec<ThroughputPoint>,
}

/// One throughput trial: every encoding symbol is lost independently with
/// probability `loss_prob`, then the received set is decoded once with real payloads.
pub fn throughput_trial(
    code: &CodeMatrices,
    decoder: Decoder,
    loss_prob: f64,
    symbol_size: usize,
    trial: u64,
    master_seed: u64,
) -> TrialRecord {
    let seed = trial_seed(master_seed, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sources = vec![vec![0u8; symbol_size]; code.k()];
    for s in &mut sources {
        rng.fill_bytes(s);
    }
    let mut full = SymbolBlock::from_sources(code, &sources).expect("k sources");
    crate::codec::encode(code, &mut full).expect("all sources present");
    let kept: Vec<bool> = (0..code.n()).map(|_| !rng.random_bool(loss_prob)).collect();
    let mut block = full.subset(|s| code.slot_to_esi(s).is_some_and(|e| kept[e]));
    let received = kept.iter().filter(|&&k| k).count();

    let t0 = Instant::now();
    let out = decoder.decode(code, &mut block);
    let ns = t0.elapsed().as_nanos() as u64;
    let success = out.success && block.sources().as_deref() == Some(&sources[..]);

    let mut rec = base_record(code, decoder, trial, seed);
    rec.symbols_needed = Some(received);
    rec.overhead = Some((received as f64 - code.k() as f64) / code.k() as f64);
    rec.row_ops = out.row_ops;
    rec.decode_ns = Some(ns);
    rec.loss_prob = Some(loss_prob);
    rec.success = success;
    rec
}

pub fn throughput_experiment(code: &CodeMatrices, cfg: &ThroughputConfig) -> ThroughputReport {
    let mut records = Vec::new();
    let mut points = Vec::new();
    for (pi, &p) in cfg.loss_probs.iter().enumerate() {
        let base = pi as u64 * cfg.trials_per_point;
        let recs: Vec<TrialRecord> = (0..cfg.trials_per_point)
            .map(|t| throughput_trial(code, cfg.decoder, p, cfg.symbol_size, base + t, cfg.master_seed))
            .collect();
        let ok: Vec<&TrialRecord> = recs.iter().filter(|r| r.success).collect();
        let mean_ns = recs.iter().map(|r| r.decode_ns.unwrap() as f64).sum::<f64>() / recs.len().max(1) as f64;
        let ok_ns = ok.iter().map(|r| r.decode_ns.unwrap() as f64).sum::<f64>();
        let bits = (ok.len() * code.k() * cfg.symbol_size * 8) as f64;
        points.push(ThroughputPoint {
            loss_prob: p,
            trials: recs.len() as u64,
            successes: ok.len() as u64,
            mean_decode_ns: mean_ns,
            mean_row_ops: recs.iter().map(|r| r.row_ops as f64).sum::<f64>() / recs.len().max(1) as f64,
            mbps: if ok_ns > 0.0 { bits / ok_ns * 1e3 } else { 0.0 },
        });
        records.extend(recs);
    }
    ThroughputReport { records, points }
}

/// Header, one row per trial, then the summary lines.
pub fn write_csv<W: Write>(mut w: W, records: &[TrialRecord], summaries: &[String]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", r.csv_row())?;
    }
    for s in summaries {
        writeln!(w, "{s}")?;
    }
    Ok(())
}
