//! Baseline codes: LDPC-Staircase and Windowed Erasure.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CodeMatrices, CodeSpec, ConstructError, FamilyParams, LogBase, ParityCheck, Rate};

/// Window width `ceil(2 sqrt k)` and per-symbol weight `ceil(2 log k)`,
/// raised to the next odd value and capped at the window.
///
/// With an even constant weight every symbol has even parity over the
/// sources, so the sum of all sources could never be recovered.
pub fn windowed_shape(k: usize, log_base: LogBase) -> (usize, usize) {
    let kf = k.max(1) as f64;
    let window = ((2.0 * kf.sqrt()).ceil() as usize).min(k);
    let log = match log_base {
        LogBase::Natural => kf.ln(),
        LogBase::Two => kf.log2(),
    };
    let weight = ((2.0 * log).ceil() as usize) | 1;
    let weight = weight.clamp(1, window.max(1));
    (window, weight)
}

/// LDPC-Staircase code with `n1` ones per source column of `H`.
pub fn build_staircase(k: usize, rate: Rate, n1: usize, seed: u64) -> Result<(CodeSpec, CodeMatrices), ConstructError> {
    let n = rate.length_for(k)?;
    let spec = CodeSpec { k, n, params: FamilyParams::Staircase { n1, seed } };
    let code = spec.build()?;
    Ok((spec, code))
}

/// Windowed Erasure code (non-systematic).
pub fn build_windowed(k: usize, rate: Rate, seed: u64, log_base: LogBase) -> Result<(CodeSpec, CodeMatrices), ConstructError> {
    let n = rate.length_for(k)?;
    let spec = CodeSpec { k, n, params: FamilyParams::Windowed { seed, log_base } };
    let code = spec.build()?;
    Ok((spec, code))
}

/// Source rows of `H` for each source column: `n1` distinct rows, drawn from
/// a pool in which every row appears equally often.
fn staircase_columns(k: usize, repairs: usize, n1: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u32>> {
    let per_row = (k * n1).div_ceil(repairs);
    let mut pool: Vec<u32> = (0..repairs as u32).flat_map(|r| std::iter::repeat_n(r, per_row)).collect();
    let mut cols = Vec::with_capacity(k);
    for _ in 0..k {
        let mut col: Vec<u32> = Vec::with_capacity(n1);
        for _ in 0..n1 {
            let mut row = None;
            for _ in 0..8 {
                if pool.is_empty() {
                    break;
                }
                let at = rng.random_range(0..pool.len());
                if !col.contains(&pool[at]) {
                    row = Some(pool.swap_remove(at));
                    break;
                }
            }
            let row = row.unwrap_or_else(|| loop {
                let r = rng.random_range(0..repairs as u32);
                if !col.contains(&r) {
                    break r;
                }
            });
            col.push(row);
        }
        col.sort_unstable();
        cols.push(col);
    }
    cols
}

pub(crate) fn staircase_matrices(
    k: usize,
    n: usize,
    n1: usize,
    seed: u64,
    spec: CodeSpec,
) -> Result<CodeMatrices, ConstructError> {
    if k == 0 || n <= k {
        return Err(ConstructError::InvalidParameters(format!("need 0 < k < n (k={k}, n={n})")));
    }
    let repairs = n - k;
    if n1 < 3 || n1 > repairs {
        return Err(ConstructError::InvalidParameters(format!("n1={n1} must be in 3..={repairs}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cols = staircase_columns(k, repairs, n1, &mut rng);
    let mut h_rows: Vec<Vec<u32>> = vec![Vec::new(); repairs];
    for (i, col) in cols.iter().enumerate() {
        for &r in col {
            h_rows[r as usize].push(i as u32);
        }
    }
    // repair j is the running XOR of the source parts of rows 0..=j
    let mut acc = vec![false; k];
    let mut gen = Vec::with_capacity(repairs);
    for row in &h_rows {
        for &s in row {
            acc[s as usize] ^= true;
        }
        gen.push((0..k as u32).filter(|&s| acc[s as usize]).collect());
    }
    for (j, row) in h_rows.iter_mut().enumerate() {
        if j > 0 {
            row.push((k + j - 1) as u32);
        }
        row.push((k + j) as u32);
    }
    Ok(CodeMatrices { spec, systematic: true, gen, h: Some(ParityCheck::from_rows(h_rows, n)), band_profile: None })
}

pub(crate) fn windowed_matrices(
    k: usize,
    n: usize,
    seed: u64,
    log_base: LogBase,
    spec: CodeSpec,
) -> Result<CodeMatrices, ConstructError> {
    if k < 16 || n <= k {
        return Err(ConstructError::InvalidParameters(format!("need 16 <= k < n (k={k}, n={n})")));
    }
    let (window, weight) = windowed_shape(k, log_base);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gen = (0..n)
        .map(|j| {
            let start = j * k / n;
            let mut col: Vec<u32> =
                sample(&mut rng, window, weight).into_iter().map(|o| ((start + o) % k) as u32).collect();
            col.sort_unstable();
            col
        })
        .collect();
    Ok(CodeMatrices { spec, systematic: false, gen, h: None, band_profile: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windowed_shape_at_1024() {
        assert_eq!(windowed_shape(1024, LogBase::Natural), (64, 15));
        assert_eq!(windowed_shape(1024, LogBase::Two), (64, 21));
    }

    #[test]
    fn staircase_structure() {
        let (_, code) = build_staircase(500, Rate::half(), 3, 9).unwrap();
        let h = code.parity_check().unwrap();
        let cw = h.col_weights();
        assert!(cw[..500].iter().all(|&w| w == 3));
        assert_eq!(cw[500..999].iter().copied().max(), Some(2));
        assert_eq!(cw[999], 1);
        let rw = h.row_weights();
        let a_weights: Vec<usize> = (0..500).map(|j| rw[j] - if j == 0 { 1 } else { 2 }).collect();
        // balanced pool: 3 ones per source spread over 500 rows
        assert!(a_weights.iter().all(|&w| w <= 4), "{:?}", a_weights.iter().max());
        assert_eq!(code.check_orthogonality(), Ok(()));
    }

    #[test]
    fn windowed_columns_stay_in_window() {
        let (_, code) = build_windowed(256, Rate::half(), 4, LogBase::Natural).unwrap();
        let (w, d) = windowed_shape(256, LogBase::Natural);
        assert_eq!(code.generated_count(), 512);
        for j in 0..512 {
            let col = code.generator_column(j);
            assert_eq!(col.len(), d);
            let start = j * 256 / 512;
            assert!(col.iter().all(|&s| (s as usize + 256 - start) % 256 < w));
        }
        assert!(!code.is_systematic());
        assert_eq!(code.esi_to_slot(0), Some(256));
    }
}
