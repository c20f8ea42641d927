//! Encoding and decoding of symbol blocks: peeling on `H`, ML on the reduced
//! generator system, and the hybrid of the two.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::construct::{CodeMatrices, Family};
use crate::gf2linalg::{banded_solve, dense_solve, xor_bytes, BandProfile, BitMatrix, SolveError, SymbolRows};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("symbol has {got} bytes, block uses {expected}")]
    SymbolSize { expected: usize, got: usize },
    #[error("slot {slot} out of range ({slots} slots)")]
    SlotOutOfRange { slot: usize, slots: usize },
    #[error("encoding needs all {k} source symbols, {missing} missing")]
    SourcesMissing { k: usize, missing: usize },
    #[error("block has {got} slots, code needs {expected}")]
    BlockShape { expected: usize, got: usize },
}

/// How a slot came to hold its symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recovery {
    Received,
    Iterative,
    Ml,
    Unknown,
}

/// Symbols of one code block, indexed by slot (see [`crate::construct`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolBlock {
    k: usize,
    symbol_size: usize,
    data: Vec<u8>,
    recovered_by: Vec<Recovery>,
}

impl SymbolBlock {
    /// All slots missing.
    pub fn empty(code: &CodeMatrices, symbol_size: usize) -> Self {
        let slots = code.slot_count();
        Self { k: code.k(), symbol_size, data: vec![0; slots * symbol_size], recovered_by: vec![Recovery::Unknown; slots] }
    }

    /// Block holding the `k` source symbols.
    pub fn from_sources<S: AsRef<[u8]>>(code: &CodeMatrices, sources: &[S]) -> Result<Self, CodecError> {
        if sources.len() != code.k() {
            return Err(CodecError::BlockShape { expected: code.k(), got: sources.len() });
        }
        let size = sources.first().map_or(0, |s| s.as_ref().len());
        let mut b = Self::empty(code, size);
        for (i, s) in sources.iter().enumerate() {
            b.insert(i, s.as_ref())?;
        }
        Ok(b)
    }

    pub fn symbol_size(&self) -> usize {
        self.symbol_size
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn slot_count(&self) -> usize {
        self.recovered_by.len()
    }

    pub fn is_present(&self, slot: usize) -> bool {
        self.recovered_by[slot] != Recovery::Unknown
    }

    pub fn recovered_by(&self, slot: usize) -> Recovery {
        self.recovered_by[slot]
    }

    pub fn slot(&self, slot: usize) -> Option<&[u8]> {
        self.is_present(slot).then(|| self.bytes(slot))
    }

    fn bytes(&self, slot: usize) -> &[u8] {
        &self.data[slot * self.symbol_size..(slot + 1) * self.symbol_size]
    }

    fn bytes_mut(&mut self, slot: usize) -> &mut [u8] {
        &mut self.data[slot * self.symbol_size..(slot + 1) * self.symbol_size]
    }

    /// Stores a received symbol.
    pub fn insert(&mut self, slot: usize, symbol: &[u8]) -> Result<(), CodecError> {
        if slot >= self.slot_count() {
            return Err(CodecError::SlotOutOfRange { slot, slots: self.slot_count() });
        }
        if symbol.len() != self.symbol_size {
            return Err(CodecError::SymbolSize { expected: self.symbol_size, got: symbol.len() });
        }
        self.bytes_mut(slot).copy_from_slice(symbol);
        self.recovered_by[slot] = Recovery::Received;
        Ok(())
    }

    pub fn erase(&mut self, slot: usize) {
        self.recovered_by[slot] = Recovery::Unknown;
        self.bytes_mut(slot).fill(0);
    }

    /// Copy of this block keeping only the slots for which `keep` is true.
    pub fn subset(&self, keep: impl Fn(usize) -> bool) -> Self {
        let mut b = self.clone();
        for s in 0..b.slot_count() {
            if !keep(s) || !self.is_present(s) {
                b.erase(s);
            } else {
                b.recovered_by[s] = Recovery::Received;
            }
        }
        b
    }

    pub fn missing_sources(&self) -> Vec<usize> {
        (0..self.k).filter(|&i| !self.is_present(i)).collect()
    }

    pub fn present_count(&self) -> usize {
        self.recovered_by.iter().filter(|r| **r != Recovery::Unknown).count()
    }

    /// The source symbols, if all are present.
    pub fn sources(&self) -> Option<Vec<Vec<u8>>> {
        (0..self.k).map(|i| self.slot(i).map(<[u8]>::to_vec)).collect()
    }

    fn set_recovered(&mut self, slot: usize, how: Recovery) {
        self.recovered_by[slot] = how;
    }
}

/// Result of a decoding attempt.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DecodeOutcome {
    pub success: bool,
    pub recovered_count: usize,
    pub iterative_recovered: usize,
    pub ml_recovered: usize,
    /// Missing sources the ML system could not determine (0 on success).
    pub unsolvable: usize,
    pub row_ops: u64,
    pub wall_time: Duration,
}

fn check_block(code: &CodeMatrices, block: &SymbolBlock) -> Result<(), CodecError> {
    if block.slot_count() != code.slot_count() || block.k != code.k() {
        return Err(CodecError::BlockShape { expected: code.slot_count(), got: block.slot_count() });
    }
    Ok(())
}

/// Fills every generated slot from the sources.
///
/// Codes with a parity-check matrix are encoded row by row through `H`: row
/// `j` of the lower-triangular `U` part ends at repair `j`, so each repair is
/// the XOR of the other participants of its equation. Windowed codes use
/// their generator columns.
pub fn encode(code: &CodeMatrices, block: &mut SymbolBlock) -> Result<(), CodecError> {
    check_block(code, block)?;
    let k = code.k();
    let missing = block.missing_sources().len();
    if missing > 0 {
        return Err(CodecError::SourcesMissing { k, missing });
    }
    let size = block.symbol_size;
    let mut acc = vec![0u8; size];
    match code.parity_check() {
        Some(h) => {
            for j in 0..h.num_rows() {
                acc.fill(0);
                let target = k + j;
                for &s in h.row(j) {
                    if s as usize != target {
                        xor_bytes(&mut acc, block.bytes(s as usize));
                    }
                }
                block.bytes_mut(target).copy_from_slice(&acc);
                block.set_recovered(target, Recovery::Received);
            }
        }
        None => encode_by_generator(code, block)?,
    }
    Ok(())
}

/// Fills every generated slot as the XOR of the sources in its generator column.
pub fn encode_by_generator(code: &CodeMatrices, block: &mut SymbolBlock) -> Result<(), CodecError> {
    check_block(code, block)?;
    let k = code.k();
    let missing = block.missing_sources().len();
    if missing > 0 {
        return Err(CodecError::SourcesMissing { k, missing });
    }
    let mut acc = vec![0u8; block.symbol_size];
    for g in 0..code.generated_count() {
        acc.fill(0);
        for &s in code.generator_column(g) {
            xor_bytes(&mut acc, block.bytes(s as usize));
        }
        block.bytes_mut(k + g).copy_from_slice(&acc);
        block.set_recovered(k + g, Recovery::Received);
    }
    Ok(())
}

/// Fixpoint of the peeling decoder.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PeelReport {
    /// Slots resolved, sources and generated symbols alike.
    pub recovered: usize,
    pub recovered_sources: usize,
    /// Missing slots of any kind left at the fixpoint.
    pub still_missing: usize,
    pub row_ops: u64,
}

/// Peeling on `H`: an equation with a single missing participant resolves it.
/// Stops as soon as every source is known. Codes without a parity-check
/// matrix are returned untouched.
pub fn iterative_decode(code: &CodeMatrices, block: &mut SymbolBlock) -> Result<PeelReport, CodecError> {
    check_block(code, block)?;
    let mut report = PeelReport { still_missing: block.slot_count() - block.present_count(), ..Default::default() };
    let Some(h) = code.parity_check() else {
        return Ok(report);
    };
    let mut sources_left = block.missing_sources().len();
    if sources_left == 0 {
        return Ok(report);
    }
    let rows = h.num_rows();
    // per equation: number of missing participants and XOR of their slot indices
    let mut missing = vec![0u32; rows];
    let mut index_xor = vec![0u32; rows];
    for s in 0..block.slot_count() {
        if !block.is_present(s) {
            for &j in h.col(s) {
                missing[j as usize] += 1;
                index_xor[j as usize] ^= s as u32;
            }
        }
    }
    let mut queue: VecDeque<usize> = (0..rows).filter(|&j| missing[j] == 1).collect();
    let mut acc = vec![0u8; block.symbol_size];
    while let Some(j) = queue.pop_front() {
        if missing[j] != 1 {
            continue;
        }
        let s = index_xor[j] as usize;
        acc.fill(0);
        for &t in h.row(j) {
            if t as usize != s {
                xor_bytes(&mut acc, block.bytes(t as usize));
                report.row_ops += 1;
            }
        }
        block.bytes_mut(s).copy_from_slice(&acc);
        block.set_recovered(s, Recovery::Iterative);
        report.recovered += 1;
        report.still_missing -= 1;
        if s < block.k {
            report.recovered_sources += 1;
            sources_left -= 1;
            if sources_left == 0 {
                break;
            }
        }
        for &e in h.col(s) {
            let e = e as usize;
            missing[e] -= 1;
            index_xor[e] ^= s as u32;
            if missing[e] == 1 {
                queue.push_back(e);
            }
        }
    }
    Ok(report)
}

/// The linear system left for ML decoding.
#[derive(Clone, Debug)]
pub struct ReducedSystem {
    /// Missing sources, in source order; column `c` of `matrix` is `missing[c]`.
    pub missing: Vec<usize>,
    /// One row per present generated symbol that involves a missing source.
    pub matrix: BitMatrix,
    pub rhs: SymbolRows,
    /// Known-source XORs spent building `rhs`.
    pub rhs_row_ops: u64,
}

/// Builds the reduced generator system of `block`: received sources are
/// removed, only present generated symbols are kept, and the known sources
/// are XORed into their right-hand sides.
pub fn reduced_system(code: &CodeMatrices, block: &SymbolBlock) -> ReducedSystem {
    let k = code.k();
    let missing = block.missing_sources();
    let mut column_of = vec![u32::MAX; k];
    for (c, &i) in missing.iter().enumerate() {
        column_of[i] = c as u32;
    }
    let mut supports: Vec<Vec<usize>> = Vec::new();
    let mut equations: Vec<usize> = Vec::new();
    for g in 0..code.generated_count() {
        if !block.is_present(k + g) {
            continue;
        }
        let support: Vec<usize> = code
            .generator_column(g)
            .iter()
            .filter_map(|&s| (column_of[s as usize] != u32::MAX).then_some(column_of[s as usize] as usize))
            .collect();
        if !support.is_empty() {
            supports.push(support);
            equations.push(g);
        }
    }
    let mut rhs = SymbolRows::zeros(equations.len(), block.symbol_size);
    let mut rhs_row_ops = 0;
    for (r, &g) in equations.iter().enumerate() {
        let row = rhs.row_mut(r);
        row.copy_from_slice(block.bytes(k + g));
        for &s in code.generator_column(g) {
            if column_of[s as usize] == u32::MAX {
                xor_bytes(row, block.bytes(s as usize));
                rhs_row_ops += 1;
            }
        }
    }
    let matrix = BitMatrix::from_row_supports(&supports, missing.len());
    ReducedSystem { missing, matrix, rhs, rhs_row_ops }
}

/// Gaussian elimination on the reduced generator system.
///
/// Unknowns are the missing sources in source order; equations are the
/// present generated symbols that involve at least one of them, with the
/// present sources XORed into the right-hand side (one row operation each).
/// Band codes are solved with [`banded_solve`] on the recomputed profile,
/// other families with [`dense_solve`]. On failure the block is left as it was.
pub fn ml_decode(code: &CodeMatrices, block: &mut SymbolBlock) -> Result<DecodeOutcome, CodecError> {
    check_block(code, block)?;
    let t0 = Instant::now();
    let mut out = DecodeOutcome::default();
    if block.missing_sources().is_empty() {
        out.success = true;
        out.wall_time = t0.elapsed();
        return Ok(out);
    }
    let mut sys = reduced_system(code, block);
    out.row_ops += sys.rhs_row_ops;
    let (m, rhs) = (&mut sys.matrix, &mut sys.rhs);
    let solved = if code.family() == Family::Band {
        let profile = BandProfile::of(m);
        banded_solve(m, &profile, rhs)
    } else {
        dense_solve(m, rhs)
    };
    match solved {
        Ok(s) => {
            out.row_ops += s.stats.row_ops;
            for (c, &i) in sys.missing.iter().enumerate() {
                block.bytes_mut(i).copy_from_slice(s.solution.row(c));
                block.set_recovered(i, Recovery::Ml);
            }
            out.success = true;
            out.ml_recovered = sys.missing.len();
            out.recovered_count = sys.missing.len();
        }
        Err(SolveError::RankDeficient { unsolvable }) => {
            out.row_ops += m.row_ops();
            out.unsolvable = unsolvable.len();
        }
        Err(SolveError::Inconsistent) => {
            out.row_ops += m.row_ops();
            out.unsolvable = sys.missing.len();
        }
        Err(SolveError::Linalg(e)) => unreachable!("reduced system is well formed: {e}"),
    }
    out.wall_time = t0.elapsed();
    Ok(out)
}

/// Peeling first, ML on whatever is left.
pub fn hybrid_decode(code: &CodeMatrices, block: &mut SymbolBlock) -> Result<DecodeOutcome, CodecError> {
    let t0 = Instant::now();
    let peel = iterative_decode(code, block)?;
    let mut out = if block.missing_sources().is_empty() {
        DecodeOutcome { success: true, ..Default::default() }
    } else {
        ml_decode(code, block)?
    };
    out.iterative_recovered = peel.recovered_sources;
    out.recovered_count += peel.recovered_sources;
    out.row_ops += peel.row_ops;
    out.wall_time = t0.elapsed();
    Ok(out)
}

/// Peeling only, reported as a [`DecodeOutcome`].
pub fn iterative_only(code: &CodeMatrices, block: &mut SymbolBlock) -> Result<DecodeOutcome, CodecError> {
    let t0 = Instant::now();
    let peel = iterative_decode(code, block)?;
    Ok(DecodeOutcome {
        success: block.missing_sources().is_empty(),
        recovered_count: peel.recovered_sources,
        iterative_recovered: peel.recovered_sources,
        ml_recovered: 0,
        unsolvable: block.missing_sources().len(),
        row_ops: peel.row_ops,
        wall_time: t0.elapsed(),
    })
}

/// Re-encodes the block's sources and compares every present generated slot.
/// Returns the first slot that disagrees.
pub fn check_consistency(code: &CodeMatrices, block: &SymbolBlock) -> Result<(), usize> {
    let Some(sources) = block.sources() else { return Ok(()) };
    let mut full = SymbolBlock::from_sources(code, &sources).map_err(|_| 0usize)?;
    encode_by_generator(code, &mut full).map_err(|_| 0usize)?;
    for s in code.k()..code.slot_count() {
        if block.is_present(s) && block.bytes(s) != full.bytes(s) {
            return Err(s);
        }
    }
    Ok(())
}
