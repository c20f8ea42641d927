//! Code construction: LDPC-Band codes built from polynomials, plus the
//! LDPC-Staircase and Windowed Erasure baselines.
//!
//! Every code exposes the same slot layout. Slots `0..k` are the source
//! symbols. Slots `k..` are the generated symbols: the `n - k` repair symbols
//! of a systematic code, or all `n` encoding symbols of the non-systematic
//! Windowed code (whose sources are never transmitted).

mod band;
mod baseline;
mod specfile;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::gf2linalg::BandProfile;
use crate::gf2poly::Gf2Poly;

pub use band::{build_band, reweight_rows, BandDesign, ReweightReport, RowWeightTarget};
pub use baseline::{build_staircase, build_windowed, windowed_shape};
pub use specfile::SpecFileError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("infeasible geometry: {0}")]
    InfeasibleGeometry(String),
    #[error("empty candidate pool after degree filtering ({0})")]
    EmptyCandidatePool(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Band,
    Staircase,
    Windowed,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Band => "band",
            Family::Staircase => "staircase",
            Family::Windowed => "windowed",
        }
    }

    /// Wire tag used in packet headers.
    pub fn tag(self) -> u8 {
        match self {
            Family::Band => 0,
            Family::Staircase => 1,
            Family::Windowed => 2,
        }
    }

    pub fn from_tag(t: u8) -> Option<Self> {
        match t {
            0 => Some(Family::Band),
            1 => Some(Family::Staircase),
            2 => Some(Family::Windowed),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = ConstructError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "band" | "ldpc-band" => Ok(Family::Band),
            "staircase" | "ldpc-staircase" => Ok(Family::Staircase),
            "windowed" | "window" => Ok(Family::Windowed),
            other => Err(ConstructError::InvalidParameters(format!("unknown code family `{other}`"))),
        }
    }
}

/// Code rate `k/n` as a reduced fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rate {
    num: u32,
    den: u32,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Rate {
    pub fn new(num: u32, den: u32) -> Result<Self, ConstructError> {
        if num == 0 || den == 0 || num >= den {
            return Err(ConstructError::InvalidParameters(format!("rate {num}/{den} must lie in (0, 1)")));
        }
        let g = gcd(num as u64, den as u64) as u32;
        let r = Self { num: num / g, den: den / g };
        if r.den > 8 * r.num {
            return Err(ConstructError::InvalidParameters(format!("rate {r} is below 1/8")));
        }
        Ok(r)
    }

    pub fn half() -> Self {
        Self { num: 1, den: 2 }
    }

    pub fn num(self) -> u32 {
        self.num
    }

    pub fn den(self) -> u32 {
        self.den
    }

    /// Code length for `k` sources; `k * den / num` must be integral.
    pub fn length_for(self, k: usize) -> Result<usize, ConstructError> {
        let scaled = k as u64 * self.den as u64;
        if !scaled.is_multiple_of(self.num as u64) {
            return Err(ConstructError::InvalidParameters(format!("k={k} is not compatible with rate {self}")));
        }
        Ok((scaled / self.num as u64) as usize)
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Rate {
    type Err = ConstructError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConstructError::InvalidParameters(format!("rate `{s}` is not of the form a/b"));
        let (a, b) = s.trim().split_once('/').ok_or_else(bad)?;
        Rate::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
    }
}

/// How band rows pick their polynomial from the candidate pools.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Schedule {
    /// Interior rows cycle through the candidates, edge rows through the edge candidates.
    RoundRobin,
    /// Uniform seeded choice per row.
    Random,
    /// One pool index per row (interior rows index the candidates, edge rows the edge candidates).
    Explicit(Vec<u32>),
}

impl Schedule {
    pub fn name(&self) -> &'static str {
        match self {
            Schedule::RoundRobin => "round-robin",
            Schedule::Random => "random",
            Schedule::Explicit(_) => "explicit",
        }
    }
}

/// Log base used for the Windowed per-symbol weight `ceil(2 log k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogBase {
    Natural,
    Two,
}

/// One row of the banded part `M`: the polynomial of source `i`, placed at a repair column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BandRow {
    pub edge: bool,
    /// Index into the candidate pool (or the edge pool when `edge`).
    pub pool_index: u32,
    /// First repair column covered by the polynomial.
    pub start: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BandParams {
    pub bandwidth: usize,
    pub u: Gf2Poly,
    pub candidates: Vec<Gf2Poly>,
    pub edge_candidates: Vec<Gf2Poly>,
    pub schedule: Schedule,
    pub seed: u64,
    /// One period of the integer row shifts; their mean is `n/k - 1`.
    pub offsets: Vec<u32>,
    /// One entry per source symbol (`k` rows).
    pub rows: Vec<BandRow>,
}

impl BandParams {
    pub fn row_poly(&self, i: usize) -> &Gf2Poly {
        let r = &self.rows[i];
        if r.edge {
            &self.edge_candidates[r.pool_index as usize]
        } else {
            &self.candidates[r.pool_index as usize]
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyParams {
    Band(BandParams),
    Staircase { n1: usize, seed: u64 },
    Windowed { seed: u64, log_base: LogBase },
}

/// Complete description of one code instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeSpec {
    pub k: usize,
    pub n: usize,
    pub params: FamilyParams,
}

impl CodeSpec {
    pub fn family(&self) -> Family {
        match self.params {
            FamilyParams::Band(_) => Family::Band,
            FamilyParams::Staircase { .. } => Family::Staircase,
            FamilyParams::Windowed { .. } => Family::Windowed,
        }
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// Band width `B` (window width for Windowed codes, 0 for Staircase).
    pub fn bandwidth(&self) -> usize {
        match &self.params {
            FamilyParams::Band(b) => b.bandwidth,
            FamilyParams::Staircase { .. } => 0,
            FamilyParams::Windowed { log_base, .. } => windowed_shape(self.k, *log_base).0,
        }
    }

    pub fn band(&self) -> Option<&BandParams> {
        match &self.params {
            FamilyParams::Band(b) => Some(b),
            _ => None,
        }
    }

    /// Rebuilds the matrices described by this spec.
    pub fn build(&self) -> Result<CodeMatrices, ConstructError> {
        match &self.params {
            FamilyParams::Band(b) => Ok(band::matrices_from_spec(self, b)),
            FamilyParams::Staircase { n1, seed } => baseline::staircase_matrices(self.k, self.n, *n1, *seed, self.clone()),
            FamilyParams::Windowed { seed, log_base } => {
                baseline::windowed_matrices(self.k, self.n, *seed, *log_base, self.clone())
            }
        }
    }
}

/// Parity-check matrix over slots, kept both by row and by column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityCheck {
    rows: Vec<Vec<u32>>,
    cols: Vec<Vec<u32>>,
}

impl ParityCheck {
    pub(crate) fn from_rows(rows: Vec<Vec<u32>>, slots: usize) -> Self {
        let mut cols = vec![Vec::new(); slots];
        for (j, r) in rows.iter().enumerate() {
            for &s in r {
                cols[s as usize].push(j as u32);
            }
        }
        Self { rows, cols }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Slots taking part in parity equation `j`, sorted.
    pub fn row(&self, j: usize) -> &[u32] {
        &self.rows[j]
    }

    /// Equations in which slot `s` takes part.
    pub fn col(&self, s: usize) -> &[u32] {
        &self.cols[s]
    }

    pub fn row_weights(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    pub fn col_weights(&self) -> Vec<usize> {
        self.cols.iter().map(Vec::len).collect()
    }
}

/// The matrices of a constructed code.
#[derive(Clone, Debug)]
pub struct CodeMatrices {
    spec: CodeSpec,
    systematic: bool,
    gen: Vec<Vec<u32>>,
    h: Option<ParityCheck>,
    band_profile: Option<BandProfile>,
}

impl CodeMatrices {
    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn family(&self) -> Family {
        self.spec.family()
    }

    pub fn k(&self) -> usize {
        self.spec.k
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn is_systematic(&self) -> bool {
        self.systematic
    }

    /// Number of generated (non-source) slots.
    pub fn generated_count(&self) -> usize {
        self.gen.len()
    }

    /// Total number of slots in a symbol block for this code.
    pub fn slot_count(&self) -> usize {
        self.spec.k + self.gen.len()
    }

    /// Sources XORed into generated symbol `g` (a column of `M` for systematic codes).
    pub fn generator_column(&self, g: usize) -> &[u32] {
        &self.gen[g]
    }

    pub fn parity_check(&self) -> Option<&ParityCheck> {
        self.h.as_ref()
    }

    /// Extent of each row of `M` over the repair columns (Band codes only).
    pub fn band_profile(&self) -> Option<&BandProfile> {
        self.band_profile.as_ref()
    }

    /// Slot carrying encoding symbol `esi`.
    pub fn esi_to_slot(&self, esi: usize) -> Option<usize> {
        if esi >= self.spec.n {
            None
        } else if self.systematic {
            Some(esi)
        } else {
            Some(self.spec.k + esi)
        }
    }

    /// Checks `G H^T = 0`: every parity equation, with each generated slot
    /// expanded into its sources, must cancel. Returns the first failing row.
    pub fn check_orthogonality(&self) -> Result<(), usize> {
        let Some(h) = &self.h else { return Ok(()) };
        let k = self.spec.k;
        let mut acc = vec![0u64; k.div_ceil(64)];
        for j in 0..h.num_rows() {
            let mut flip = |s: usize| acc[s / 64] ^= 1 << (s % 64);
            for &s in h.row(j) {
                let s = s as usize;
                if s < k {
                    flip(s);
                } else {
                    for &src in &self.gen[s - k] {
                        flip(src as usize);
                    }
                }
            }
            if acc.iter().any(|&w| w != 0) {
                return Err(j);
            }
        }
        Ok(())
    }

    pub fn slot_to_esi(&self, slot: usize) -> Option<usize> {
        if self.systematic {
            (slot < self.spec.n).then_some(slot)
        } else {
            (slot >= self.spec.k && slot < self.spec.k + self.spec.n).then(|| slot - self.spec.k)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_parsing() {
        let r: Rate = "2/4".parse().unwrap();
        assert_eq!(r, Rate::half());
        assert_eq!(r.length_for(1000).unwrap(), 2000);
        assert_eq!("1/3".parse::<Rate>().unwrap().length_for(99).unwrap(), 297);
        assert!("2/5".parse::<Rate>().unwrap().length_for(3).is_err());
        assert!("1/9".parse::<Rate>().is_err());
        assert!("3/2".parse::<Rate>().is_err());
        assert!("half".parse::<Rate>().is_err());
    }

    #[test]
    fn family_tags() {
        for f in [Family::Band, Family::Staircase, Family::Windowed] {
            assert_eq!(Family::from_tag(f.tag()), Some(f));
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert_eq!(Family::from_tag(9), None);
    }
}
