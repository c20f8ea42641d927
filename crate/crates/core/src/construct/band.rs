//! LDPC-Band layout.
//!
//! Row `i` of `M` (source `i`) carries a polynomial `m_i` placed at repair
//! column `start_i`. Column `i` of `A` is then `x^start_i * u(x) * m_i(x)`
//! truncated to the `n - k` parity rows, and `U` is the lower triangular
//! Toeplitz matrix of `u`. Since `U` is multiplication by `u` modulo
//! `x^(n-k)`, `A = U M^T` holds for every row, truncated or not.
//!
//! Interior rows start at `F_i - B/2`, where `F_i = floor(i (n-k) / k)` is the
//! running sum of the integer row offsets. Rows whose natural window
//! `[F_i - B/2, F_i + B/2)` leaves the repair range are edge rows: they use
//! polynomials of degree at most `B/2`, aligned with the end of their
//! window at the top and with its start at the bottom. Edge rows thus keep
//! distinct end (top) or start (bottom) columns, which keeps them linearly
//! independent; stacking them at a common start column makes the top block
//! rank deficient.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BandParams, BandRow, CodeMatrices, CodeSpec, ConstructError, FamilyParams, ParityCheck, Rate, Schedule};
use crate::gf2linalg::BandProfile;
use crate::gf2poly::{poly_mul, sample_candidates, Gf2Poly};

/// One period of the integer offsets whose mean is `repairs / k`.
pub(crate) fn offset_period(k: usize, repairs: usize) -> Vec<u32> {
    let g = super::gcd(k as u64, repairs as u64) as usize;
    let (p, q) = (repairs / g, k / g);
    (0..q).map(|i| ((i + 1) * p / q - i * p / q) as u32).collect()
}

/// Keeps the usable candidates: constant term and degree at most `max_degree`.
fn filter_pool(pool: &[Gf2Poly], max_degree: usize) -> Vec<Gf2Poly> {
    pool.iter()
        .filter(|m| m.has_constant_term() && m.degree().is_some_and(|d| d as usize <= max_degree))
        .cloned()
        .collect()
}

/// Places the `k` rows and assigns their polynomials.
#[allow(clippy::too_many_arguments)]
pub(crate) fn assemble(
    k: usize,
    n: usize,
    bandwidth: usize,
    u: Gf2Poly,
    candidates: &[Gf2Poly],
    edge_candidates: &[Gf2Poly],
    schedule: Schedule,
    seed: u64,
) -> Result<BandParams, ConstructError> {
    if bandwidth < 2 || !bandwidth.is_multiple_of(2) {
        return Err(ConstructError::InvalidParameters(format!("band width {bandwidth} must be even and >= 2")));
    }
    if !u.has_constant_term() {
        return Err(ConstructError::InvalidParameters("u(x) must have a constant term".into()));
    }
    if k == 0 || n <= k {
        return Err(ConstructError::InvalidParameters(format!("need 0 < k < n (k={k}, n={n})")));
    }
    let repairs = n - k;
    if bandwidth > repairs {
        return Err(ConstructError::InfeasibleGeometry(format!(
            "band width {bandwidth} exceeds the {repairs} repair columns"
        )));
    }
    let half = bandwidth / 2;
    let candidates = filter_pool(candidates, bandwidth - 1);
    let edge_candidates = filter_pool(edge_candidates, half);
    if candidates.is_empty() {
        return Err(ConstructError::EmptyCandidatePool("candidates"));
    }

    // (interior, natural window start) per row
    let natural: Vec<(bool, i64)> = (0..k)
        .map(|i| {
            let c = (i * repairs / k) as i64 - half as i64;
            let interior = c >= 0 && c + bandwidth as i64 - 1 < repairs as i64;
            (interior, c)
        })
        .collect();
    if natural.iter().any(|(interior, _)| !interior) && edge_candidates.is_empty() {
        return Err(ConstructError::EmptyCandidatePool("edge candidates"));
    }
    if let Schedule::Explicit(ix) = &schedule {
        if ix.len() != k {
            return Err(ConstructError::InvalidParameters(format!("explicit schedule has {} entries for k={k}", ix.len())));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut next_interior, mut next_edge) = (0usize, 0usize);
    let mut rows = Vec::with_capacity(k);
    for (i, &(interior, c)) in natural.iter().enumerate() {
        let pool_len = if interior { candidates.len() } else { edge_candidates.len() };
        let pool_index = match &schedule {
            Schedule::RoundRobin => {
                let counter = if interior { &mut next_interior } else { &mut next_edge };
                let ix = *counter % pool_len;
                *counter += 1;
                ix
            }
            Schedule::Random => rng.random_range(0..pool_len),
            Schedule::Explicit(ix) => {
                let ix = ix[i] as usize;
                if ix >= pool_len {
                    return Err(ConstructError::InvalidParameters(format!(
                        "explicit schedule row {i} points at entry {ix} of a pool of {pool_len}"
                    )));
                }
                ix
            }
        };
        let start = if c >= 0 {
            c as usize
        } else {
            // top edge row: end where the natural window ends
            let deg = edge_candidates[pool_index].degree().unwrap() as i64;
            (c + bandwidth as i64 - 1 - deg).max(0) as usize
        };
        rows.push(BandRow { edge: !interior, pool_index: pool_index as u32, start });
    }

    Ok(BandParams {
        bandwidth,
        u,
        candidates,
        edge_candidates,
        schedule,
        seed,
        offsets: offset_period(k, repairs),
        rows,
    })
}

/// Column `i` of `A` as parity-row indices.
fn a_column(b: &BandParams, products: &[Gf2Poly], edge_products: &[Gf2Poly], i: usize, repairs: usize) -> Vec<u32> {
    let row = &b.rows[i];
    let prod = if row.edge { &edge_products[row.pool_index as usize] } else { &products[row.pool_index as usize] };
    prod.exponents()
        .iter()
        .map(|&e| row.start + e as usize)
        .take_while(|&r| r < repairs)
        .map(|r| r as u32)
        .collect()
}

fn products_of(b: &BandParams) -> (Vec<Gf2Poly>, Vec<Gf2Poly>) {
    (
        b.candidates.iter().map(|m| poly_mul(&b.u, m)).collect(),
        b.edge_candidates.iter().map(|m| poly_mul(&b.u, m)).collect(),
    )
}

pub(crate) fn matrices_from_spec(spec: &CodeSpec, b: &BandParams) -> CodeMatrices {
    let (k, repairs) = (spec.k, spec.n - spec.k);
    let (products, edge_products) = products_of(b);
    let mut gen: Vec<Vec<u32>> = vec![Vec::new(); repairs];
    let mut h_rows: Vec<Vec<u32>> = vec![Vec::new(); repairs];
    let mut extents = Vec::with_capacity(k);
    for i in 0..k {
        let start = b.rows[i].start;
        let m = b.row_poly(i);
        for &e in m.exponents() {
            gen[start + e as usize].push(i as u32);
        }
        for r in a_column(b, &products, &edge_products, i, repairs) {
            h_rows[r as usize].push(i as u32);
        }
        extents.push(Some((start, start + m.degree().unwrap() as usize)));
    }
    for (j, row) in h_rows.iter_mut().enumerate() {
        for &e in b.u.exponents() {
            if e as usize <= j {
                row.push((k + j - e as usize) as u32);
            }
        }
        row.sort_unstable();
    }
    CodeMatrices {
        spec: spec.clone(),
        systematic: true,
        gen,
        h: Some(ParityCheck::from_rows(h_rows, spec.n)),
        band_profile: Some(BandProfile::from_extents(extents)),
    }
}

/// Builds an LDPC-Band code from explicit polynomial pools.
#[allow(clippy::too_many_arguments)]
pub fn build_band(
    k: usize,
    rate: Rate,
    bandwidth: usize,
    u: Gf2Poly,
    candidates: &[Gf2Poly],
    edge_candidates: &[Gf2Poly],
    schedule: Schedule,
    seed: u64,
) -> Result<(CodeSpec, CodeMatrices), ConstructError> {
    let n = rate.length_for(k)?;
    let params = assemble(k, n, bandwidth, u, candidates, edge_candidates, schedule, seed)?;
    let spec = CodeSpec { k, n, params: FamilyParams::Band(params) };
    let code = spec.build()?;
    if k <= 4000 {
        if let Err(row) = code.check_orthogonality() {
            return Err(ConstructError::InfeasibleGeometry(format!("G H^T != 0 at parity row {row}")));
        }
    }
    Ok((spec, code))
}

/// Parameter set for building a Band code from scratch: picks `u`, runs the
/// candidate searches and samples the pools.
#[derive(Clone, Debug)]
pub struct BandDesign {
    pub k: usize,
    pub rate: Rate,
    pub bandwidth: usize,
    pub u: Gf2Poly,
    /// Allowed product weights `W(u m)` of interior candidates.
    pub product_weights: Vec<usize>,
    /// Interior candidates have degree in `[B - 1 - degree_slack, B - 1]`,
    /// edge candidates in `[B/2 - degree_slack/2, B/2]`. A range without any
    /// candidate is widened until one is found.
    pub degree_slack: u32,
    pub candidate_count: usize,
    pub edge_product_weights: Vec<usize>,
    pub edge_count: usize,
    pub schedule: Schedule,
    pub seed: u64,
}

impl BandDesign {
    pub fn new(k: usize, rate: Rate, bandwidth: usize) -> Self {
        Self {
            k,
            rate,
            bandwidth,
            u: Gf2Poly::from_exponents([0, 1, 3]),
            product_weights: vec![4, 6],
            degree_slack: 0,
            candidate_count: 32,
            edge_product_weights: vec![4, 6],
            edge_count: 16,
            schedule: Schedule::RoundRobin,
            seed: 1,
        }
    }

    pub fn with_u(mut self, u: Gf2Poly) -> Self {
        self.u = u;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }

    /// Interior and edge pools for this design.
    pub fn pools(&self) -> (Vec<Gf2Poly>, Vec<Gf2Poly>) {
        let max_deg = self.bandwidth as u32 - 1;
        let half = self.bandwidth as u32 / 2;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x6361_6e64);
        let mut draw = |top: u32, mut slack: u32, weights: &[usize], count: usize| loop {
            let pool = sample_pool(&self.u, top.saturating_sub(slack), top, weights, count, &mut rng);
            if !pool.is_empty() || slack >= top {
                break pool;
            }
            slack = slack * 2 + 1;
        };
        let interior = draw(max_deg, self.degree_slack, &self.product_weights, self.candidate_count);
        let edges = draw(half, self.degree_slack / 2, &self.edge_product_weights, self.edge_count);
        (interior, edges)
    }

    pub fn build(&self) -> Result<(CodeSpec, CodeMatrices), ConstructError> {
        let (interior, edges) = self.pools();
        build_band(self.k, self.rate, self.bandwidth, self.u.clone(), &interior, &edges, self.schedule.clone(), self.seed)
    }
}

/// Draws up to `count` distinct candidates, spread evenly over the requested product weights.
fn sample_pool(u: &Gf2Poly, min_deg: u32, max_deg: u32, weights: &[usize], count: usize, rng: &mut ChaCha8Rng) -> Vec<Gf2Poly> {
    let mut out = Vec::new();
    for (wi, &w) in weights.iter().enumerate() {
        let want = count / weights.len() + usize::from(wi < count % weights.len());
        out.extend(sample_candidates(u, min_deg, max_deg, w, want, rng));
    }
    out.sort();
    out.dedup();
    out
}

/// Desired distribution of parity-check row weights: weight -> number of rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowWeightTarget(pub BTreeMap<usize, usize>);

impl RowWeightTarget {
    /// Every row at the same weight (rounded distribution for a given total).
    pub fn regular(rows: usize, total_edges: usize) -> Self {
        let lo = total_edges / rows;
        let hi_rows = total_edges % rows;
        let mut m = BTreeMap::new();
        m.insert(lo, rows - hi_rows);
        if hi_rows > 0 {
            m.insert(lo + 1, hi_rows);
        }
        Self(m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReweightReport {
    pub initial_deviation: usize,
    pub residual_deviation: usize,
    pub accepted_moves: usize,
}

fn deviation(hist: &BTreeMap<usize, usize>, target: &BTreeMap<usize, usize>) -> usize {
    let mut d = 0usize;
    for (w, &c) in hist {
        d += c.abs_diff(*target.get(w).unwrap_or(&0));
    }
    for (w, &t) in target {
        if !hist.contains_key(w) {
            d += t;
        }
    }
    d / 2
}

/// Moves the parity-check row-weight histogram toward `target` without
/// changing any column weight of `A`.
///
/// Two moves are tried greedily: exchanging the polynomials of two interior
/// rows, and replacing a row's polynomial by another candidate with the same
/// product weight. A move is kept when the histogram distance decreases and
/// both affected columns of `A` keep their weights. The result uses an
/// explicit schedule.
pub fn reweight_rows(spec: &CodeSpec, target: &RowWeightTarget, max_moves: usize, seed: u64) -> (CodeSpec, ReweightReport) {
    let Some(b) = spec.band() else {
        return (spec.clone(), ReweightReport { initial_deviation: 0, residual_deviation: 0, accepted_moves: 0 });
    };
    let (k, repairs) = (spec.k, spec.n - spec.k);
    let mut b = b.clone();
    let (products, edge_products) = products_of(&b);

    let mut row_weight = vec![0usize; repairs];
    for (j, w) in row_weight.iter_mut().enumerate() {
        *w = b.u.exponents().iter().filter(|&&e| e as usize <= j).count();
    }
    let mut cols: Vec<Vec<u32>> = (0..k).map(|i| a_column(&b, &products, &edge_products, i, repairs)).collect();
    for c in &cols {
        for &r in c {
            row_weight[r as usize] += 1;
        }
    }
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for &w in &row_weight {
        *hist.entry(w).or_default() += 1;
    }
    let initial = deviation(&hist, &target.0);
    let mut current = initial;

    let interior: Vec<usize> = (0..k).filter(|&i| !b.rows[i].edge).collect();
    let mut by_weight: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for (ix, p) in products.iter().enumerate() {
        by_weight.entry(p.weight()).or_default().push(ix as u32);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepted = 0;
    let bump = |hist: &mut BTreeMap<usize, usize>, row_weight: &mut [usize], r: usize, up: bool| {
        let w = row_weight[r];
        let e = hist.get_mut(&w).unwrap();
        *e -= 1;
        if *e == 0 {
            hist.remove(&w);
        }
        row_weight[r] = if up { w + 1 } else { w - 1 };
        *hist.entry(row_weight[r]).or_default() += 1;
    };

    for _ in 0..max_moves {
        if current == 0 || interior.len() < 2 {
            break;
        }
        let i = interior[rng.random_range(0..interior.len())];
        let old_i = b.rows[i].pool_index;
        let (j, new_i, new_j) = if rng.random_bool(0.5) {
            let j = interior[rng.random_range(0..interior.len())];
            (Some(j), b.rows[j].pool_index, Some(old_i))
        } else {
            let same = &by_weight[&products[old_i as usize].weight()];
            (None, same[rng.random_range(0..same.len())], None)
        };
        if new_i == old_i {
            continue;
        }
        // tentative assignment
        let mut changes: Vec<(usize, u32, Vec<u32>)> = vec![(i, old_i, Vec::new())];
        b.rows[i].pool_index = new_i;
        if let (Some(j), Some(nj)) = (j, new_j) {
            changes.push((j, b.rows[j].pool_index, Vec::new()));
            b.rows[j].pool_index = nj;
        }
        let mut ok = true;
        for ch in changes.iter_mut() {
            let col = a_column(&b, &products, &edge_products, ch.0, repairs);
            if col.len() != cols[ch.0].len() {
                ok = false;
            }
            ch.2 = col;
        }
        if !ok {
            for ch in &changes {
                b.rows[ch.0].pool_index = ch.1;
            }
            continue;
        }
        for ch in &changes {
            for &r in &cols[ch.0] {
                bump(&mut hist, &mut row_weight, r as usize, false);
            }
            for &r in &ch.2 {
                bump(&mut hist, &mut row_weight, r as usize, true);
            }
        }
        let d = deviation(&hist, &target.0);
        if d < current {
            current = d;
            accepted += 1;
            for ch in changes {
                cols[ch.0] = ch.2;
            }
        } else {
            for ch in changes.iter().rev() {
                for &r in &ch.2 {
                    bump(&mut hist, &mut row_weight, r as usize, false);
                }
                for &r in &cols[ch.0] {
                    bump(&mut hist, &mut row_weight, r as usize, true);
                }
                b.rows[ch.0].pool_index = ch.1;
            }
        }
    }

    b.schedule = Schedule::Explicit(b.rows.iter().map(|r| r.pool_index).collect());
    let out = CodeSpec { k: spec.k, n: spec.n, params: FamilyParams::Band(b) };
    (out, ReweightReport { initial_deviation: initial, residual_deviation: current, accepted_moves: accepted })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Gf2Poly {
        s.parse().unwrap()
    }

    #[test]
    fn trivial_four_by_four() {
        let (spec, code) =
            build_band(4, Rate::half(), 2, Gf2Poly::one(), &[p("0,1")], &[p("0")], Schedule::RoundRobin, 0).unwrap();
        assert_eq!(spec.n, 8);
        let b = spec.band().unwrap();
        // row 0 is a top edge row, the rest are interior rows shifted by one column each
        let dense: Vec<String> = (0..4)
            .map(|i| {
                let m = b.row_poly(i);
                (0..4).map(|c| if c >= b.rows[i].start && m.coeff((c - b.rows[i].start) as u32) { '1' } else { '.' }).collect()
            })
            .collect();
        assert_eq!(dense, ["1...", "11..", ".11.", "..11"]);
        // with u = 1, A = M^T
        let h = code.parity_check().unwrap();
        for j in 0..4 {
            let a_row: Vec<u32> = h.row(j).iter().copied().filter(|&s| s < 4).collect();
            assert_eq!(a_row, code.generator_column(j));
            assert_eq!(h.row(j).iter().filter(|&&s| s >= 4).count(), 1);
        }
        assert_eq!(b.offsets, vec![1]);
    }

    #[test]
    fn offsets_average_to_rate_shift() {
        assert_eq!(offset_period(1000, 1000), vec![1]);
        assert_eq!(offset_period(1000, 2000), vec![2]);
        let o = offset_period(10, 15);
        assert_eq!(o.len(), 2);
        assert_eq!(o.iter().sum::<u32>(), 3);
        let o = offset_period(12, 20);
        assert_eq!(o.iter().sum::<u32>() as usize * 12, 20 * o.len());
    }

    #[test]
    fn geometry_errors() {
        let u = Gf2Poly::one();
        assert!(matches!(
            build_band(4, Rate::half(), 3, u.clone(), &[p("0,1")], &[p("0")], Schedule::RoundRobin, 0),
            Err(ConstructError::InvalidParameters(_))
        ));
        assert!(matches!(
            build_band(4, Rate::half(), 6, u.clone(), &[p("0,1")], &[p("0")], Schedule::RoundRobin, 0),
            Err(ConstructError::InfeasibleGeometry(_))
        ));
        assert_eq!(
            build_band(8, Rate::half(), 2, u.clone(), &[p("0,5")], &[p("0")], Schedule::RoundRobin, 0).unwrap_err(),
            ConstructError::EmptyCandidatePool("candidates")
        );
        assert_eq!(
            build_band(8, Rate::half(), 4, u, &[p("0,3")], &[p("0,3")], Schedule::RoundRobin, 0).unwrap_err(),
            ConstructError::EmptyCandidatePool("edge candidates")
        );
    }

    #[test]
    fn explicit_schedule_validated() {
        let r = build_band(4, Rate::half(), 2, Gf2Poly::one(), &[p("0,1")], &[p("0")], Schedule::Explicit(vec![0, 0, 1, 0]), 0);
        assert!(matches!(r, Err(ConstructError::InvalidParameters(_))));
    }

    #[test]
    fn swapping_identical_polynomials_changes_nothing() {
        let (spec, _) =
            build_band(16, Rate::half(), 4, p("0,1"), &[p("0,1,2,3"), p("0,1,2,3")], &[p("0,1")], Schedule::RoundRobin, 0)
                .unwrap();
        let target = RowWeightTarget::regular(16, 1);
        let (out, _) = reweight_rows(&spec, &target, 200, 3);
        let before = spec.build().unwrap();
        let after = out.build().unwrap();
        assert_eq!(before.parity_check(), after.parity_check());
    }
}
