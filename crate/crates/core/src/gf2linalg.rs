//! Bit-packed GF(2) matrices with attached symbol rows, and the two solvers used
//! by the ML decoder.
//!
//! Cost is counted in row operations: one XOR of a matrix row into another,
//! together with the XOR of the symbols attached to those rows.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("row index {index} out of range for {rows} rows")]
    RowOutOfRange { index: usize, rows: usize },
    #[error("a row cannot be added to itself (row {0})")]
    SelfXor(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("band profile does not describe the matrix (row {0})")]
    InvalidProfile(usize),
    #[error("malformed matrix dump at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Why a system could not be solved.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    /// Some unknowns have no pivot; the listed columns cannot be determined.
    #[error("rank deficient: {} unsolvable column(s)", unsolvable.len())]
    RankDeficient { unsolvable: Vec<usize> },
    /// A row reduced to zero while its right-hand side did not.
    #[error("inconsistent system")]
    Inconsistent,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Dense row-major binary matrix, rows padded to 64-bit words.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
    ops: u64,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        Self { rows, cols, stride, data: vec![0; rows * stride], ops: 0 }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from the column indices set in each row.
    pub fn from_row_supports<R: AsRef<[usize]>>(rows: &[R], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, support) in rows.iter().enumerate() {
            for &c in support.as_ref() {
                m.flip(r, c);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of row operations performed on this matrix so far.
    pub fn row_ops(&self) -> u64 {
        self.ops
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.stride + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        assert!(r < self.rows && c < self.cols, "({r},{c}) outside {}x{}", self.rows, self.cols);
        let w = &mut self.data[r * self.stride + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols, "({r},{c}) outside {}x{}", self.rows, self.cols);
        self.data[r * self.stride + c / 64] ^= 1 << (c % 64);
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    /// Column indices set in row `r`.
    pub fn row_support(&self, r: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, &w) in self.row_words(r).iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(i * 64 + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }

    pub fn row_is_zero(&self, r: usize) -> bool {
        self.row_words(r).iter().all(|&w| w == 0)
    }

    /// First set column of row `r` at or after `from`.
    fn first_from(&self, r: usize, from: usize) -> Option<usize> {
        if from >= self.cols {
            return None;
        }
        let words = self.row_words(r);
        let mut wi = from / 64;
        let mut w = words[wi] & (!0u64 << (from % 64));
        loop {
            if w != 0 {
                return Some(wi * 64 + w.trailing_zeros() as usize);
            }
            wi += 1;
            if wi == words.len() {
                return None;
            }
            w = words[wi];
        }
    }

    fn last_set(&self, r: usize) -> Option<usize> {
        let words = self.row_words(r);
        words.iter().rposition(|&w| w != 0).map(|i| i * 64 + 63 - words[i].leading_zeros() as usize)
    }

    fn check_rows(&self, dst: usize, src: usize) -> Result<(), LinalgError> {
        for index in [dst, src] {
            if index >= self.rows {
                return Err(LinalgError::RowOutOfRange { index, rows: self.rows });
            }
        }
        if dst == src {
            return Err(LinalgError::SelfXor(dst));
        }
        Ok(())
    }

    /// `row[dst] ^= row[src]` (and the attached symbols, when given); counts one row operation.
    pub fn row_xor(&mut self, dst: usize, src: usize, symbols: Option<&mut SymbolRows>) -> Result<(), LinalgError> {
        self.check_rows(dst, src)?;
        self.xor_words(dst, src, 0, self.stride);
        if let Some(s) = symbols {
            s.xor_rows(dst, src);
        }
        self.ops += 1;
        Ok(())
    }

    /// XOR over the word range `[w0, w1)` only, uncounted.
    fn xor_words(&mut self, dst: usize, src: usize, w0: usize, w1: usize) {
        let s = self.stride;
        let (d, sr) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&mut lo[dst * s..dst * s + s], &hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&mut hi[..s], &lo[src * s..src * s + s])
        };
        for (a, b) in d[w0..w1].iter_mut().zip(&sr[w0..w1]) {
            *a ^= *b;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        let (lo, hi) = self.data.split_at_mut(a.max(b) * s);
        lo[a.min(b) * s..a.min(b) * s + s].swap_with_slice(&mut hi[..s]);
    }

    /// One line per row of `0`/`1` characters.
    pub fn dump(&self) -> String {
        let mut s = String::with_capacity(self.rows * (self.cols + 1));
        for r in 0..self.rows {
            for c in 0..self.cols {
                s.push(if self.get(r, c) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    pub fn parse_dump(text: &str) -> Result<Self, LinalgError> {
        let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        let cols = lines.first().map_or(0, |l| l.len());
        let mut m = Self::zeros(lines.len(), cols);
        for (r, line) in lines.iter().enumerate() {
            if line.len() != cols {
                return Err(LinalgError::Parse { line: r + 1, reason: format!("expected {cols} columns") });
            }
            for (c, ch) in line.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => m.set(r, c, true),
                    other => {
                        return Err(LinalgError::Parse { line: r + 1, reason: format!("unexpected `{other}`") });
                    }
                }
            }
        }
        Ok(m)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} ({} row ops)", self.rows, self.cols, self.ops)?;
        if self.rows <= 64 && self.cols <= 128 {
            f.write_str(&self.dump())?;
        }
        Ok(())
    }
}

/// Per-row extent of the nonzero entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BandProfile {
    extents: Vec<Option<(usize, usize)>>,
}

impl BandProfile {
    pub fn of(m: &BitMatrix) -> Self {
        let extents = (0..m.rows()).map(|r| m.first_from(r, 0).map(|f| (f, m.last_set(r).unwrap()))).collect();
        Self { extents }
    }

    pub fn from_extents(extents: Vec<Option<(usize, usize)>>) -> Self {
        Self { extents }
    }

    /// `(first, last)` nonzero column of row `r`, `None` for a zero row.
    pub fn extent(&self, r: usize) -> Option<(usize, usize)> {
        self.extents[r]
    }

    pub fn rows(&self) -> usize {
        self.extents.len()
    }

    /// Largest `last - first + 1` over all rows.
    pub fn bandwidth(&self) -> usize {
        self.extents.iter().flatten().map(|&(f, l)| l - f + 1).max().unwrap_or(0)
    }

    fn validate(&self, m: &BitMatrix) -> Result<(), LinalgError> {
        if self.extents.len() != m.rows() {
            return Err(LinalgError::Dimension(format!("profile has {} rows, matrix {}", self.extents.len(), m.rows())));
        }
        for (r, e) in self.extents.iter().enumerate() {
            let actual = m.first_from(r, 0).map(|f| (f, m.last_set(r).unwrap()));
            let ok = match (e, actual) {
                (None, None) => true,
                (Some((f, l)), Some((af, al))) => f <= l && *f <= af && al <= *l && *l < m.cols(),
                _ => false,
            };
            if !ok {
                return Err(LinalgError::InvalidProfile(r));
            }
        }
        Ok(())
    }
}

/// Equal-length byte buffers attached to matrix rows (right-hand sides, solutions).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolRows {
    size: usize,
    data: Vec<u8>,
}

impl SymbolRows {
    pub fn zeros(rows: usize, symbol_size: usize) -> Self {
        Self { size: symbol_size, data: vec![0; rows * symbol_size] }
    }

    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R], symbol_size: usize) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * symbol_size);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != symbol_size {
                return Err(LinalgError::Dimension(format!("symbol {i} has {} bytes, expected {symbol_size}", r.len())));
            }
            data.extend_from_slice(r);
        }
        Ok(Self { size: symbol_size, data })
    }

    pub fn symbol_size(&self) -> usize {
        self.size
    }

    /// Row count; zero-sized symbols have no backing bytes, so callers keep their own count.
    fn rows_hint(&self) -> Option<usize> {
        (self.size > 0).then(|| self.data.len() / self.size)
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.size..(r + 1) * self.size]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [u8] {
        &mut self.data[r * self.size..(r + 1) * self.size]
    }

    pub fn xor_rows(&mut self, dst: usize, src: usize) {
        if self.size == 0 {
            return;
        }
        let s = self.size;
        let (d, sr) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&mut lo[dst * s..dst * s + s], &hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&mut hi[..s], &lo[src * s..src * s + s])
        };
        xor_bytes(d, sr);
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b || self.size == 0 {
            return;
        }
        let s = self.size;
        let (lo, hi) = self.data.split_at_mut(a.max(b) * s);
        lo[a.min(b) * s..a.min(b) * s + s].swap_with_slice(&mut hi[..s]);
    }

    fn row_is_zero(&self, r: usize) -> bool {
        self.row(r).iter().all(|&b| b == 0)
    }
}

/// `dst ^= src`, byte-wise.
pub fn xor_bytes(dst: &mut [u8], src: &[u8]) {
    debug_assert_eq!(dst.len(), src.len());
    for (a, b) in dst.iter_mut().zip(src) {
        *a ^= *b;
    }
}

/// Successful solve: one symbol per unknown, in column order.
#[derive(Clone, Debug)]
pub struct Solved {
    pub solution: SymbolRows,
    pub stats: SolveStats,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveStats {
    pub row_ops: u64,
    /// Widest row extent observed during elimination (the input bandwidth plus fill-in).
    pub grown_bandwidth: usize,
    /// `row_ops / (rows * grown_bandwidth)`.
    pub alpha: f64,
}

fn check_rhs(m: &BitMatrix, rhs: &SymbolRows) -> Result<(), LinalgError> {
    if let Some(r) = rhs.rows_hint() {
        if r != m.rows() {
            return Err(LinalgError::Dimension(format!("{} rhs rows for {} matrix rows", r, m.rows())));
        }
    }
    Ok(())
}

/// Gauss-Jordan elimination, column by column, pivot = first remaining row holding the column.
///
/// The matrix and right-hand side are consumed as scratch; the matrix keeps the row-op count.
pub fn dense_solve(m: &mut BitMatrix, rhs: &mut SymbolRows) -> Result<Solved, SolveError> {
    check_rhs(m, rhs)?;
    let start_ops = m.row_ops();
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivot_of = vec![usize::MAX; cols];
    let mut unsolvable = Vec::new();
    let mut next = 0;
    for c in 0..cols {
        let Some(p) = (next..rows).find(|&r| m.get(r, c)) else {
            unsolvable.push(c);
            continue;
        };
        m.swap_rows(p, next);
        rhs.swap_rows(p, next);
        for q in 0..rows {
            if q != next && m.get(q, c) {
                m.row_xor(q, next, Some(rhs))?;
            }
        }
        pivot_of[c] = next;
        next += 1;
    }
    if (next..rows).any(|r| !rhs.row_is_zero(r)) {
        return Err(SolveError::Inconsistent);
    }
    if !unsolvable.is_empty() {
        return Err(SolveError::RankDeficient { unsolvable });
    }
    let mut solution = SymbolRows::zeros(cols, rhs.symbol_size());
    for (c, &p) in pivot_of.iter().enumerate() {
        solution.row_mut(c).copy_from_slice(rhs.row(p));
    }
    let row_ops = m.row_ops() - start_ops;
    Ok(Solved { solution, stats: SolveStats { row_ops, grown_bandwidth: cols, alpha: ratio(row_ops, rows, cols) } })
}

fn ratio(ops: u64, rows: usize, bw: usize) -> f64 {
    if rows == 0 || bw == 0 {
        0.0
    } else {
        ops as f64 / (rows as f64 * bw as f64)
    }
}

/// Elimination that only touches rows whose leading column is the current pivot column.
///
/// Rows are bucketed by their leading nonzero column. For column `c` the pivot is
/// the bucket member with the narrowest remaining extent (ties: lowest row index);
/// every other member is reduced by it and moves to the bucket of its new leading
/// column. On a band matrix each step therefore touches only rows inside the band,
/// and each XOR only spans the pivot's word range. Back substitution then clears
/// the entries right of each pivot, last pivot first.
pub fn banded_solve(m: &mut BitMatrix, profile: &BandProfile, rhs: &mut SymbolRows) -> Result<Solved, SolveError> {
    check_rhs(m, rhs)?;
    profile.validate(m)?;
    let start_ops = m.row_ops();
    let (rows, cols) = (m.rows(), m.cols());

    let mut last = vec![0usize; rows];
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); cols];
    let mut zero_rows = Vec::new();
    let mut grown = profile.bandwidth();
    for r in 0..rows {
        match profile.extent(r) {
            Some((_, l)) => {
                // the profile may be loose; bucket by the true leading column
                let f = m.first_from(r, 0).expect("validated nonzero row");
                last[r] = l;
                buckets[f].push(r);
            }
            None => zero_rows.push(r),
        }
    }

    let mut pivot_of = vec![usize::MAX; cols];
    let mut unsolvable = Vec::new();
    for c in 0..cols {
        let cand = std::mem::take(&mut buckets[c]);
        let Some(&p) = cand.iter().min_by_key(|&&r| (last[r] - c, r)) else {
            unsolvable.push(c);
            continue;
        };
        let (w0, w1) = (c / 64, last[p] / 64 + 1);
        for &q in &cand {
            if q == p {
                continue;
            }
            m.xor_words(q, p, w0, w1);
            rhs.xor_rows(q, p);
            m.ops += 1;
            last[q] = last[q].max(last[p]);
            match m.first_from(q, c + 1) {
                Some(f) => {
                    grown = grown.max(last[q] - f + 1);
                    buckets[f].push(q);
                }
                None => zero_rows.push(q),
            }
        }
        pivot_of[c] = p;
    }

    if zero_rows.iter().any(|&r| !rhs.row_is_zero(r)) {
        return Err(SolveError::Inconsistent);
    }
    if !unsolvable.is_empty() {
        return Err(SolveError::RankDeficient { unsolvable });
    }

    for c in (0..cols).rev() {
        let p = pivot_of[c];
        while let Some(j) = m.first_from(p, c + 1) {
            let q = pivot_of[j];
            // pivot row j is already reduced to the single entry j
            m.xor_words(p, q, j / 64, j / 64 + 1);
            rhs.xor_rows(p, q);
            m.ops += 1;
        }
    }

    let mut solution = SymbolRows::zeros(cols, rhs.symbol_size());
    for (c, &p) in pivot_of.iter().enumerate() {
        solution.row_mut(c).copy_from_slice(rhs.row(p));
    }
    let row_ops = m.row_ops() - start_ops;
    Ok(Solved { solution, stats: SolveStats { row_ops, grown_bandwidth: grown, alpha: ratio(row_ops, rows, grown) } })
}

/// GF(2) rank, computed on a scratch copy (the caller's counter is untouched).
pub fn rank(m: &BitMatrix) -> usize {
    let mut s = m.clone();
    let (rows, cols) = (s.rows(), s.cols());
    let mut next = 0;
    for c in 0..cols {
        let Some(p) = (next..rows).find(|&r| s.get(r, c)) else {
            continue;
        };
        s.swap_rows(p, next);
        for q in next + 1..rows {
            if s.get(q, c) {
                s.xor_words(q, next, c / 64, s.stride);
            }
        }
        next += 1;
        if next == rows {
            break;
        }
    }
    next
}

/// Basis of a growing set of GF(2) vectors, for rank-by-insertion.
///
/// Each stored vector is keyed by its lowest set bit and remembers its last
/// nonzero word, so reducing a vector that lives in a narrow band only
/// touches the words of that band.
#[derive(Clone, Debug)]
pub struct IncrementalBasis {
    dim: usize,
    pivots: Vec<Option<(usize, Vec<u64>)>>,
    rank: usize,
    scratch: Vec<u64>,
}

impl IncrementalBasis {
    pub fn new(dim: usize) -> Self {
        let words = dim.div_ceil(64);
        Self { dim, pivots: vec![None; dim], rank: 0, scratch: vec![0; words] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Adds the vector with the given set positions; returns `false` when it
    /// is already in the span (the basis is then unchanged).
    pub fn insert(&mut self, support: &[u32]) -> bool {
        let v = &mut self.scratch;
        v.fill(0);
        let mut hi = 0;
        for &b in support {
            v[b as usize / 64] ^= 1 << (b % 64);
            hi = hi.max(b as usize / 64);
        }
        let mut w = 0;
        loop {
            while w <= hi && v[w] == 0 {
                w += 1;
            }
            if w > hi {
                return false;
            }
            let bit = w * 64 + v[w].trailing_zeros() as usize;
            match &self.pivots[bit] {
                Some((last, vec)) => {
                    for i in w..=*last {
                        v[i] ^= vec[i];
                    }
                    hi = hi.max(*last);
                }
                None => {
                    while v[hi] == 0 {
                        hi -= 1;
                    }
                    self.pivots[bit] = Some((hi, v.clone()));
                    self.rank += 1;
                    return true;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rows_of(bits: &[&str]) -> BitMatrix {
        BitMatrix::parse_dump(&bits.join("\n")).unwrap()
    }

    #[test]
    fn row_xor_contract() {
        let mut m = rows_of(&["1010", "0110"]);
        assert_eq!(m.row_xor(0, 0, None), Err(LinalgError::SelfXor(0)));
        assert_eq!(m.row_xor(0, 2, None), Err(LinalgError::RowOutOfRange { index: 2, rows: 2 }));
        for _ in 0..5 {
            m.row_xor(1, 0, None).unwrap();
        }
        assert_eq!(m.row_ops(), 5);
        m.row_xor(1, 0, None).unwrap();
        // row 1 has been XORed six times, back to its original value
        assert_eq!(m.row_ops(), 6);
        m.row_xor(0, 1, None).unwrap();
        assert_eq!(m.dump(), "1100\n0110\n");
        assert_eq!(m.row_ops(), 7);
    }

    #[test]
    fn row_xor_moves_symbols() {
        let mut m = rows_of(&["10", "01"]);
        let mut s = SymbolRows::from_rows(&[[1u8, 2], [4, 8]], 2).unwrap();
        m.row_xor(0, 1, Some(&mut s)).unwrap();
        assert_eq!(s.row(0), &[5, 10]);
        assert_eq!(s.row(1), &[4, 8]);
    }

    #[test]
    fn identity_solves_without_work() {
        let n = 70;
        let rhs: Vec<Vec<u8>> = (0..n).map(|i| vec![i as u8, 3]).collect();
        let mut a = BitMatrix::identity(n);
        let mut r = SymbolRows::from_rows(&rhs, 2).unwrap();
        let s = dense_solve(&mut a, &mut r).unwrap();
        assert_eq!(s.stats.row_ops, 0);
        let mut b = BitMatrix::identity(n);
        let p = BandProfile::of(&b);
        let mut r2 = SymbolRows::from_rows(&rhs, 2).unwrap();
        let s2 = banded_solve(&mut b, &p, &mut r2).unwrap();
        assert_eq!(s2.stats.row_ops, 0);
        for i in 0..n {
            assert_eq!(s.solution.row(i), rhs[i].as_slice());
            assert_eq!(s2.solution.row(i), rhs[i].as_slice());
        }
    }

    #[test]
    fn singular_three_by_three() {
        // rows sum to zero; brute force over the 8 combinations finds a nontrivial kernel of the row space
        let m = rows_of(&["110", "011", "101"]);
        let dependent = (1..8u32).filter(|mask| {
            (0..3).map(|c| (0..3).filter(|r| mask >> r & 1 == 1 && m.get(*r, c)).count() % 2).all(|x| x == 0)
        });
        assert_eq!(dependent.count(), 1);
        assert_eq!(rank(&m), 2);
        let mut a = m.clone();
        let mut r = SymbolRows::zeros(3, 1);
        assert_eq!(dense_solve(&mut a, &mut r).unwrap_err(), SolveError::RankDeficient { unsolvable: vec![2] });
        let mut b = m.clone();
        let mut r = SymbolRows::zeros(3, 1);
        let prof = BandProfile::of(&b);
        assert_eq!(banded_solve(&mut b, &prof, &mut r).unwrap_err(), SolveError::RankDeficient { unsolvable: vec![2] });
    }

    #[test]
    fn inconsistent_reported_distinctly() {
        let m = rows_of(&["11", "11", "01"]);
        let mut r = SymbolRows::from_rows(&[[1u8], [0], [0]], 1).unwrap();
        assert_eq!(dense_solve(&mut m.clone(), &mut r.clone()).unwrap_err(), SolveError::Inconsistent);
        let prof = BandProfile::of(&m);
        assert_eq!(banded_solve(&mut m.clone(), &prof, &mut r).unwrap_err(), SolveError::Inconsistent);
    }

    #[test]
    fn bidiagonal_is_forward_substitution() {
        for n in [1usize, 2, 5, 64, 65, 300] {
            let supports: Vec<Vec<usize>> = (0..n).map(|r| if r == 0 { vec![0] } else { vec![r - 1, r] }).collect();
            let mut m = BitMatrix::from_row_supports(&supports, n);
            let prof = BandProfile::of(&m);
            let mut r = SymbolRows::zeros(n, 4);
            let s = banded_solve(&mut m, &prof, &mut r).unwrap();
            assert!(s.stats.row_ops <= n as u64 - 1);
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&BitMatrix::identity(9)), 9);
        assert_eq!(rank(&rows_of(&["1111", "1111", "1111", "1111"])), 1);
        assert_eq!(rank(&BitMatrix::zeros(3, 5)), 0);
        // unit lower triangular Toeplitz from u = 1 + x + x^3
        for s in [1usize, 4, 50, 130] {
            let supports: Vec<Vec<usize>> =
                (0..s).map(|r| [0usize, 1, 3].iter().filter(|&&e| e <= r).map(|&e| r - e).collect()).collect();
            let m = BitMatrix::from_row_supports(&supports, s);
            let before = m.row_ops();
            assert_eq!(rank(&m), s);
            assert_eq!(m.row_ops(), before);
        }
    }

    #[test]
    fn dump_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut m = BitMatrix::zeros(7, 70);
        for r in 0..7 {
            for c in 0..70 {
                m.set(r, c, rng.random_bool(0.5));
            }
        }
        assert_eq!(BitMatrix::parse_dump(&m.dump()).unwrap(), m);
        assert!(BitMatrix::parse_dump("101\n10\n").is_err());
        assert!(BitMatrix::parse_dump("1x1\n").is_err());
    }

    #[test]
    fn profile_is_checked() {
        let m = rows_of(&["0110", "0011"]);
        let bad = BandProfile::from_extents(vec![Some((2, 2)), Some((2, 3))]);
        let mut r = SymbolRows::zeros(2, 1);
        assert_eq!(
            banded_solve(&mut m.clone(), &bad, &mut r).unwrap_err(),
            SolveError::Linalg(LinalgError::InvalidProfile(0))
        );
        let p = BandProfile::of(&m);
        assert_eq!(p.bandwidth(), 2);
        assert_eq!(p.extent(1), Some((2, 3)));
    }

    /// Independent reference: exhaustive search over all 2^cols assignments (bitwise, per symbol bit).
    fn brute_solve(m: &BitMatrix, rhs: &[u8]) -> Option<Vec<u8>> {
        let cols = m.cols();
        let mut found: Option<Vec<u8>> = None;
        // solve each of the 8 bit-planes separately
        let mut sol = vec![0u8; cols];
        for bit in 0..8 {
            let mut hit = None;
            for x in 0u32..(1 << cols) {
                let ok = (0..m.rows()).all(|r| {
                    let lhs = (0..cols).filter(|&c| m.get(r, c) && x >> c & 1 == 1).count() % 2;
                    lhs as u8 == (rhs[r] >> bit) & 1
                });
                if ok {
                    if hit.is_some() {
                        return None;
                    }
                    hit = Some(x);
                }
            }
            let x = hit?;
            for (c, s) in sol.iter_mut().enumerate() {
                *s |= ((x >> c & 1) as u8) << bit;
            }
            found = Some(sol.clone());
        }
        found
    }

    #[test]
    fn small_systems_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let cols = rng.random_range(1..=6);
            let rows = rng.random_range(cols..=cols + 3);
            let mut m = BitMatrix::zeros(rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    m.set(r, c, rng.random_bool(0.5));
                }
            }
            // consistent rhs from a random solution
            let x: Vec<u8> = (0..cols).map(|_| rng.random()).collect();
            let rhs: Vec<u8> = (0..rows)
                .map(|r| (0..cols).filter(|&c| m.get(r, c)).fold(0u8, |acc, c| acc ^ x[c]))
                .collect();
            let expect = brute_solve(&m, &rhs);
            let rows_sym: Vec<[u8; 1]> = rhs.iter().map(|&b| [b]).collect();
            let mut a = m.clone();
            let got = dense_solve(&mut a, &mut SymbolRows::from_rows(&rows_sym, 1).unwrap());
            match expect {
                Some(sol) => {
                    let got = got.unwrap();
                    assert_eq!((0..cols).map(|c| got.solution.row(c)[0]).collect::<Vec<_>>(), sol);
                }
                None => assert!(matches!(got, Err(SolveError::RankDeficient { .. }))),
            }
        }
    }

    #[test]
    fn incremental_rank_matches_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let dim = rng.random_range(1..150);
            let count = rng.random_range(1..200);
            let mut basis = IncrementalBasis::new(dim);
            let mut rows: Vec<Vec<usize>> = Vec::new();
            for _ in 0..count {
                let w = rng.random_range(0..6);
                let support: Vec<u32> = (0..w).map(|_| rng.random_range(0..dim as u32)).collect();
                let mut set: Vec<usize> = Vec::new();
                for &b in &support {
                    if let Some(p) = set.iter().position(|&x| x == b as usize) {
                        set.remove(p);
                    } else {
                        set.push(b as usize);
                    }
                }
                let before = rank(&BitMatrix::from_row_supports(&rows, dim));
                rows.push(set);
                let after = rank(&BitMatrix::from_row_supports(&rows, dim));
                assert_eq!(basis.insert(&support), after > before);
                assert_eq!(basis.rank(), after);
            }
        }
    }
}
