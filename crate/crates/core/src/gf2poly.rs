//! Polynomials over GF(2) and the offline search for candidate band polynomials.
//!
//! A polynomial is stored as its strictly increasing list of exponents. The
//! canonical text form is that list, comma separated (`0,1,3` is `1 + x + x^3`).
//! The zero polynomial serializes as an empty string.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("invalid exponent `{0}`")]
    BadExponent(String),
    #[error("exponents must be strictly increasing (found {prev} then {next})")]
    NotIncreasing { prev: u32, next: u32 },
    #[error("division by the zero polynomial")]
    DivideByZero,
}

/// Binary polynomial, kept as the sorted set of exponents with coefficient 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Poly {
    exps: Vec<u32>,
}

impl Gf2Poly {
    pub fn zero() -> Self {
        Self { exps: Vec::new() }
    }

    pub fn one() -> Self {
        Self { exps: vec![0] }
    }

    pub fn monomial(e: u32) -> Self {
        Self { exps: vec![e] }
    }

    /// Builds a polynomial from exponents in any order; repeated exponents cancel.
    pub fn from_exponents<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        let mut exps: Vec<u32> = iter.into_iter().collect();
        exps.sort_unstable();
        let mut out: Vec<u32> = Vec::with_capacity(exps.len());
        for e in exps {
            if out.last() == Some(&e) {
                out.pop();
            } else {
                out.push(e);
            }
        }
        Self { exps: out }
    }

    /// Builds a polynomial from already strictly increasing exponents.
    pub fn from_sorted(exps: Vec<u32>) -> Result<Self, PolyError> {
        for w in exps.windows(2) {
            if w[0] >= w[1] {
                return Err(PolyError::NotIncreasing { prev: w[0], next: w[1] });
            }
        }
        Ok(Self { exps })
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn is_zero(&self) -> bool {
        self.exps.is_empty()
    }

    /// Hamming weight: number of monomials.
    pub fn weight(&self) -> usize {
        self.exps.len()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.exps.last().copied()
    }

    pub fn has_constant_term(&self) -> bool {
        self.exps.first() == Some(&0)
    }

    pub fn coeff(&self, e: u32) -> bool {
        self.exps.binary_search(&e).is_ok()
    }

    /// Bit-packed little-endian coefficient words (bit `e` of the result is the coefficient of `x^e`).
    pub fn to_words(&self) -> Vec<u64> {
        let Some(d) = self.degree() else {
            return Vec::new();
        };
        let mut w = vec![0u64; d as usize / 64 + 1];
        for &e in &self.exps {
            w[e as usize / 64] |= 1u64 << (e % 64);
        }
        w
    }

    pub fn from_words(words: &[u64]) -> Self {
        let mut exps = Vec::new();
        for (i, &w) in words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros();
                exps.push(i as u32 * 64 + b);
                w &= w - 1;
            }
        }
        Self { exps }
    }

    /// Multiplies by `x^s`.
    pub fn shifted(&self, s: u32) -> Self {
        Self { exps: self.exps.iter().map(|e| e + s).collect() }
    }

    /// Quotient and remainder of polynomial long division.
    pub fn div_rem(&self, divisor: &Gf2Poly) -> Result<(Gf2Poly, Gf2Poly), PolyError> {
        let dd = divisor.degree().ok_or(PolyError::DivideByZero)?;
        let Some(nd) = self.degree() else {
            return Ok((Gf2Poly::zero(), Gf2Poly::zero()));
        };
        if nd < dd {
            return Ok((Gf2Poly::zero(), self.clone()));
        }
        let mut rem = self.to_words();
        let div = divisor.to_words();
        let mut quot = vec![0u64; (nd - dd) as usize / 64 + 1];
        let mut top = nd as i64;
        while top >= dd as i64 {
            let t = top as usize;
            if rem[t / 64] >> (t % 64) & 1 == 1 {
                let s = t - dd as usize;
                quot[s / 64] |= 1u64 << (s % 64);
                xor_shifted(&mut rem, &div, s);
            }
            top -= 1;
        }
        Ok((Gf2Poly::from_words(&quot), Gf2Poly::from_words(&rem)))
    }
}

/// `acc ^= src << shift`, where `acc` is long enough to hold the result.
fn xor_shifted(acc: &mut [u64], src: &[u64], shift: usize) {
    let (ws, bs) = (shift / 64, shift % 64);
    for (i, &w) in src.iter().enumerate() {
        if w == 0 {
            continue;
        }
        acc[i + ws] ^= w << bs;
        if bs != 0 {
            let hi = w >> (64 - bs);
            if hi != 0 {
                acc[i + ws + 1] ^= hi;
            }
        }
    }
}

/// Sum in GF(2): symmetric difference of the exponent sets.
pub fn poly_add(a: &Gf2Poly, b: &Gf2Poly) -> Gf2Poly {
    let (x, y) = (&a.exps, &b.exps);
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            std::cmp::Ordering::Less => {
                out.push(x[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(y[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&x[i..]);
    out.extend_from_slice(&y[j..]);
    Gf2Poly { exps: out }
}

/// Product in GF(2)[x] (carry-less convolution of the coefficient sequences).
pub fn poly_mul(a: &Gf2Poly, b: &Gf2Poly) -> Gf2Poly {
    let (Some(da), Some(db)) = (a.degree(), b.degree()) else {
        return Gf2Poly::zero();
    };
    // shift the denser operand, iterate over the sparser one
    let (sparse, dense) = if a.weight() <= b.weight() { (a, b) } else { (b, a) };
    let dense_words = dense.to_words();
    let mut acc = vec![0u64; (da + db) as usize / 64 + 2];
    for &e in &sparse.exps {
        xor_shifted(&mut acc, &dense_words, e as usize);
    }
    Gf2Poly::from_words(&acc)
}

impl fmt::Display for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.exps.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl FromStr for Gf2Poly {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Gf2Poly::zero());
        }
        let exps = s
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| PolyError::BadExponent(t.trim().to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Gf2Poly::from_sorted(exps)
    }
}

/// Parameters of the exhaustive candidate search.
///
/// A candidate `m` has a constant term, `min_degree <= deg(m) <= max_degree`
/// and `weight(u * m) <= max_product_weight`.
#[derive(Clone, Debug)]
pub struct CandidateSearch {
    pub max_degree: u32,
    pub min_degree: u32,
    pub max_product_weight: usize,
    pub max_count: usize,
}

impl CandidateSearch {
    pub fn new(max_degree: u32, max_product_weight: usize, max_count: usize) -> Self {
        Self { max_degree, min_degree: 0, max_product_weight, max_count }
    }

    /// Restricts candidates to degrees in `[max_degree - delta, max_degree]`.
    pub fn near_full_band(mut self, delta: u32) -> Self {
        self.min_degree = self.max_degree.saturating_sub(delta);
        self
    }

    /// Runs the search. Results are ordered by (product weight, degree, exponents).
    ///
    /// The enumeration walks the products `a = u * m` rather than `m` itself:
    /// products are enumerated by increasing weight, then increasing degree,
    /// and each one is kept when `u` divides it. Divisibility is tested with
    /// the residues `x^e mod u`, the last free exponent of each product being
    /// resolved by a residue lookup instead of a loop.
    pub fn run(&self, u: &Gf2Poly) -> Vec<Gf2Poly> {
        assert!(u.has_constant_term(), "u(x) must have a constant term");
        let du = u.degree().unwrap();
        let lo = du + self.min_degree;
        let hi = du + self.max_degree;

        let residues = Residues::new(u, hi);
        let mut out = Vec::new();
        if self.max_count == 0 {
            return out;
        }

        for weight in 1..=self.max_product_weight {
            for top in lo..=hi {
                let mut found = self.products_of(&residues, weight, top);
                if found.is_empty() {
                    continue;
                }
                let mut ms: Vec<Gf2Poly> = found
                    .drain(..)
                    .map(|a| {
                        let (q, r) = a.div_rem(u).expect("u is nonzero");
                        debug_assert!(r.is_zero());
                        q
                    })
                    .collect();
                ms.sort();
                for m in ms {
                    out.push(m);
                    if out.len() == self.max_count {
                        return out;
                    }
                }
            }
        }
        out
    }

    /// All products of the given weight with constant term and degree `top`, divisible by `u`.
    fn products_of(&self, res: &Residues, weight: usize, top: u32) -> Vec<Gf2Poly> {
        let mut out = Vec::new();
        match weight {
            0 => {}
            1 => {
                if top == 0 && res.is_zero_combo(&[0]) {
                    out.push(Gf2Poly::one());
                }
            }
            2 => {
                if top > 0 && res.is_zero_combo(&[0, top]) {
                    out.push(Gf2Poly::from_exponents([0, top]));
                }
            }
            _ => {
                if top < weight as u32 - 1 {
                    return out;
                }
                let mut base = res.get(0).to_vec();
                xor_into(&mut base, res.get(top));
                let mut chosen = Vec::with_capacity(weight - 2);
                res.enumerate_middle(&base, 1, top, weight - 2, &mut chosen, &mut |mid| {
                    let mut e = Vec::with_capacity(weight);
                    e.push(0);
                    e.extend_from_slice(mid);
                    e.push(top);
                    out.push(Gf2Poly { exps: e });
                });
            }
        }
        out
    }
}

/// One polynomial per line in canonical form.
pub fn format_poly_list(polys: &[Gf2Poly]) -> String {
    polys.iter().map(|p| format!("{p}\n")).collect()
}

/// Parses a polynomial list. Blank lines and `#` comments are skipped.
pub fn parse_poly_list(text: &str) -> Result<Vec<Gf2Poly>, PolyError> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::parse)
        .collect()
}

/// Exhaustive search for candidates `m` with `deg(m) <= max_degree`.
pub fn find_candidates(u: &Gf2Poly, max_degree: u32, max_product_weight: usize, max_count: usize) -> Vec<Gf2Poly> {
    CandidateSearch::new(max_degree, max_product_weight, max_count).run(u)
}

/// Random candidates whose product `u * m` has exactly `product_weight` terms
/// and `min_degree <= deg(m) <= max_degree`.
///
/// Each draw picks the product's degree and all but one middle exponent at
/// random; the last exponent is whatever makes the product divisible by `u`,
/// if such an exponent exists. Useful when the exhaustive search would return
/// far more candidates than needed. May return fewer than `count`.
pub fn sample_candidates<R: Rng + ?Sized>(
    u: &Gf2Poly,
    min_degree: u32,
    max_degree: u32,
    product_weight: usize,
    count: usize,
    rng: &mut R,
) -> Vec<Gf2Poly> {
    assert!(u.has_constant_term(), "u(x) must have a constant term");
    if product_weight < 3 || min_degree > max_degree {
        let mut search = CandidateSearch::new(max_degree, product_weight, usize::MAX);
        search.min_degree = min_degree;
        let mut all: Vec<Gf2Poly> =
            search.run(u).into_iter().filter(|m| poly_mul(u, m).weight() == product_weight).collect();
        all.shuffle(rng);
        all.truncate(count);
        all.sort();
        return all;
    }
    let du = u.degree().unwrap();
    let (lo, hi) = (du + min_degree, du + max_degree);
    let res = Residues::new(u, hi);
    let mut found = std::collections::BTreeSet::new();
    let mut attempts = 0usize;
    while found.len() < count && attempts < count.saturating_mul(400).max(1000) {
        attempts += 1;
        let top = rng.random_range(lo..=hi);
        if (top as usize) < product_weight - 1 {
            continue;
        }
        let mut exps: Vec<u32> =
            rand::seq::index::sample(rng, top as usize - 1, product_weight - 3).into_iter().map(|e| e as u32 + 1).collect();
        let mut target = res.get(0).to_vec();
        xor_into(&mut target, res.get(top));
        for &e in &exps {
            xor_into(&mut target, res.get(e));
        }
        let Some(list) = res.index.get(&target) else { continue };
        let options: Vec<u32> = list.iter().copied().filter(|&e| e < top && !exps.contains(&e)).collect();
        let Some(&last) = options.choose(rng) else { continue };
        exps.extend([0, top, last]);
        exps.sort_unstable();
        let (m, r) = Gf2Poly { exps }.div_rem(u).expect("u is nonzero");
        debug_assert!(r.is_zero());
        found.insert(m);
    }
    found.into_iter().collect()
}

fn xor_into(acc: &mut [u64], src: &[u64]) {
    for (a, s) in acc.iter_mut().zip(src) {
        *a ^= *s;
    }
}

/// Table of `x^e mod u` for `e` in `0..=max_exp`, plus a reverse index.
struct Residues {
    words: usize,
    table: Vec<u64>,
    index: HashMap<Vec<u64>, Vec<u32>>,
}

impl Residues {
    fn new(u: &Gf2Poly, max_exp: u32) -> Self {
        let du = u.degree().unwrap() as usize;
        let words = du.div_ceil(64);
        let mut table = vec![0u64; words * (max_exp as usize + 1)];
        let mut index: HashMap<Vec<u64>, Vec<u32>> = HashMap::new();
        if words > 0 {
            // r <- x * r mod u, starting at r = 1
            let low: Vec<u64> = {
                let mut w = u.to_words();
                w.truncate(words);
                // drop the leading x^du
                if !du.is_multiple_of(64) {
                    w[du / 64] &= !(1u64 << (du % 64));
                }
                w
            };
            let mut r = vec![0u64; words];
            r[0] = 1;
            for e in 0..=max_exp as usize {
                table[e * words..(e + 1) * words].copy_from_slice(&r);
                // multiply by x
                let carry_out = (r[(du - 1) / 64] >> ((du - 1) % 64)) & 1;
                for i in (0..words).rev() {
                    let from_below = if i > 0 { r[i - 1] >> 63 } else { 0 };
                    r[i] = (r[i] << 1) | from_below;
                }
                if !du.is_multiple_of(64) {
                    r[words - 1] &= (1u64 << (du % 64)) - 1;
                }
                if carry_out == 1 {
                    xor_into(&mut r, &low);
                }
            }
        }
        for e in 1..=max_exp {
            let key = table[e as usize * words..(e as usize + 1) * words].to_vec();
            index.entry(key).or_default().push(e);
        }
        Self { words, table, index }
    }

    fn get(&self, e: u32) -> &[u64] {
        &self.table[e as usize * self.words..(e as usize + 1) * self.words]
    }

    fn is_zero_combo(&self, exps: &[u32]) -> bool {
        let mut acc = vec![0u64; self.words];
        for &e in exps {
            xor_into(&mut acc, self.get(e));
        }
        acc.iter().all(|&w| w == 0)
    }

    /// Chooses `remaining` increasing exponents from `[from, top)` whose residues XOR to `target`.
    fn enumerate_middle(
        &self,
        target: &[u64],
        from: u32,
        top: u32,
        remaining: usize,
        chosen: &mut Vec<u32>,
        emit: &mut dyn FnMut(&[u32]),
    ) {
        if remaining == 1 {
            if let Some(list) = self.index.get(target) {
                let start = list.partition_point(|&e| e < from);
                for &e in &list[start..] {
                    if e >= top {
                        break;
                    }
                    chosen.push(e);
                    emit(chosen);
                    chosen.pop();
                }
            }
            return;
        }
        let last_first = top.saturating_sub(remaining as u32);
        let mut t = target.to_vec();
        for e in from..=last_first {
            if e >= top {
                break;
            }
            t.copy_from_slice(target);
            xor_into(&mut t, self.get(e));
            chosen.push(e);
            self.enumerate_middle(&t, e + 1, top, remaining - 1, chosen, emit);
            chosen.pop();
        }
    }
}
