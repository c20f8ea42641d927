//! Acceptance criteria, run sequentially so timings are not disturbed.
//! Prints one `criterion N: PASS|FAIL` line per criterion and exits
//! nonzero when any fails.

use std::collections::BTreeSet;
use std::time::Instant;
use std::panic;
use std::process::ExitCode;

use ldpc_band::codec::{check_consistency, encode, hybrid_decode, ml_decode, reduced_system, SymbolBlock};
use ldpc_band::construct::{
    build_band, build_staircase, build_windowed, BandDesign, CodeMatrices, ConstructError, LogBase, Rate, Schedule,
};
use ldpc_band::gf2linalg::{banded_solve, dense_solve, BandProfile, BitMatrix, IncrementalBasis, SolveError, SymbolRows};
use ldpc_band::gf2poly::Gf2Poly;
use ldpc_band::sim::{
    ml_symbols_needed, overhead_experiment, throughput_experiment, trial_arrivals, Decoder, OverheadConfig,
    ThroughputConfig,
};
use rand::seq::index::sample;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: &str, pass: bool, detail: &str) -> bool {
    println!("criterion {id}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn band(k: usize, rate: Rate, b: usize) -> CodeMatrices {
    BandDesign::new(k, rate, b).build().expect("band code").1
}

fn overhead(code: &CodeMatrices, decoder: Decoder, trials: u64) -> f64 {
    let mut cfg = OverheadConfig::new(trials, decoder);
    cfg.count_row_ops = false;
    let s = overhead_experiment(code, &cfg).summary;
    assert_eq!(s.decodable, trials, "every trial decodes with all n symbols");
    s.mean * 100.0
}

/// Product of two polynomials by explicit convolution over exponent sets.
fn convolve(a: &[u32], b: &[u32]) -> BTreeSet<u32> {
    let mut out = BTreeSet::new();
    for &x in a {
        for &y in b {
            if !out.insert(x + y) {
                out.remove(&(x + y));
            }
        }
    }
    out
}

/// Every parity row of H, with generated slots expanded into their source
/// combinations, must sum to zero.
fn parity_rows_vanish(code: &CodeMatrices) -> bool {
    let k = code.k();
    let h = code.parity_check().unwrap();
    let words = k.div_ceil(64);
    let mut acc = vec![0u64; words];
    for j in 0..h.num_rows() {
        acc.fill(0);
        for &c in h.row(j) {
            let c = c as usize;
            let support: &[u32] = if c < k { &[] } else { code.generator_column(c - k) };
            if c < k {
                acc[c / 64] ^= 1 << (c % 64);
            }
            for &s in support {
                acc[s as usize / 64] ^= 1 << (s % 64);
            }
        }
        if acc.iter().any(|&w| w != 0) {
            return false;
        }
    }
    true
}

fn criterion_1_algebraic_soundness() -> bool {
    let mut ok = true;
    let mut built = 0;
    let mut untruncated = 0;
    for k in [100, 1000, 2000, 4000] {
        for b in [100, 200] {
            for rate in [Rate::half(), Rate::new(1, 3).unwrap()] {
                let repairs = rate.length_for(k).unwrap() - k;
                let (spec, code) = match BandDesign::new(k, rate, b).build() {
                    Ok(c) => c,
                    Err(ConstructError::InfeasibleGeometry(_)) if b > repairs => continue,
                    Err(e) => {
                        println!("  k={k} B={b} rate={rate}: {e}");
                        ok = false;
                        continue;
                    }
                };
                built += 1;
                if !parity_rows_vanish(&code) {
                    println!("  k={k} B={b} rate={rate}: G H^T != 0");
                    ok = false;
                }
                let params = spec.band().unwrap();
                let h = code.parity_check().unwrap();
                for i in 0..k {
                    let product = convolve(params.u.exponents(), params.row_poly(i).exponents());
                    let start = params.rows[i].start as u32;
                    let expect: Vec<u32> =
                        product.iter().map(|&e| e + start).filter(|&r| (r as usize) < repairs).collect();
                    if product.last().is_some_and(|&top| ((top + start) as usize) < repairs) {
                        untruncated += 1;
                    }
                    if h.col(i) != expect.as_slice() {
                        println!("  k={k} B={b} rate={rate}: column {i} of A is not u*m_{i}");
                        ok = false;
                        break;
                    }
                }
            }
        }
    }
    verdict("1", ok && built >= 14, &format!("({built} codes, {untruncated} untruncated A columns checked against u*m_i)"))
}

fn random_system(rng: &mut ChaCha8Rng) -> (BitMatrix, SymbolRows) {
    let rows = rng.random_range(1..=64);
    let cols = rng.random_range(1..=64);
    let density = [0.05, 0.1, 0.25, 0.5][rng.random_range(0..4)];
    let banded = rng.random_bool(0.5);
    let width = rng.random_range(1..=cols);
    let mut supports = Vec::with_capacity(rows);
    for r in 0..rows {
        let lo = if banded { (r * cols / rows).min(cols - width) } else { 0 };
        let hi = if banded { lo + width } else { cols };
        supports.push((lo..hi).filter(|_| rng.random_bool(density)).collect::<Vec<usize>>());
    }
    let m = BitMatrix::from_row_supports(&supports, cols);
    let size = 3;
    let mut rhs = SymbolRows::zeros(rows, size);
    if rng.random_bool(0.5) {
        let mut x = vec![[0u8; 3]; cols];
        for v in &mut x {
            rng.fill_bytes(v);
        }
        for (r, s) in supports.iter().enumerate() {
            for &c in s {
                for (d, v) in rhs.row_mut(r).iter_mut().zip(x[c]) {
                    *d ^= v;
                }
            }
        }
    } else {
        for r in 0..rows {
            rng.fill_bytes(rhs.row_mut(r));
        }
    }
    (m, rhs)
}

/// Runs both solvers; `None` when they agree, otherwise a description.
fn compare_solvers(m: &BitMatrix, rhs: &SymbolRows) -> Option<String> {
    let (mut m1, mut r1) = (m.clone(), rhs.clone());
    let (mut m2, mut r2) = (m.clone(), rhs.clone());
    let profile = BandProfile::of(m);
    let a = banded_solve(&mut m1, &profile, &mut r1);
    let b = dense_solve(&mut m2, &mut r2);
    match (&a, &b) {
        (Ok(x), Ok(y)) if x.solution == y.solution => None,
        (Err(SolveError::RankDeficient { unsolvable: u }), Err(SolveError::RankDeficient { unsolvable: v })) if u == v => {
            None
        }
        (Err(SolveError::Inconsistent), Err(SolveError::Inconsistent)) => None,
        _ => Some(format!("banded {:?} vs dense {:?}", a.as_ref().err(), b.as_ref().err())),
    }
}

fn criterion_2_solver_oracle_equivalence() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut discrepancies = 0;
    let mut outcomes = [0usize; 3];
    for _ in 0..10_000 {
        let (m, rhs) = random_system(&mut rng);
        if let Some(d) = compare_solvers(&m, &rhs) {
            println!("  {d}");
            discrepancies += 1;
        }
        let mut scratch = (m.clone(), rhs.clone());
        outcomes[match dense_solve(&mut scratch.0, &mut scratch.1) {
            Ok(_) => 0,
            Err(SolveError::RankDeficient { .. }) => 1,
            _ => 2,
        }] += 1;
    }

    let code = band(2000, Rate::half(), 200);
    let mut reduced = 0;
    let mut reduced_failures = 0;
    for t in 0..120 {
        let order = trial_arrivals(&code, t, 22);
        let needed = ml_symbols_needed(&code, &order).unwrap();
        // around the threshold, so both decodable and undecodable systems appear
        let take = (needed as i64 + rng.random_range(-20..=10)).clamp(0, code.n() as i64) as usize;
        let mut sources = vec![vec![0u8; 4]; code.k()];
        for s in &mut sources {
            rng.fill_bytes(s);
        }
        let mut full = SymbolBlock::from_sources(&code, &sources).unwrap();
        encode(&code, &mut full).unwrap();
        let keep: BTreeSet<usize> = order[..take].iter().map(|&e| code.esi_to_slot(e).unwrap()).collect();
        let block = full.subset(|s| keep.contains(&s));
        let sys = reduced_system(&code, &block);
        if sys.missing.is_empty() {
            continue;
        }
        reduced += 1;
        if take < needed {
            reduced_failures += 1;
        }
        if let Some(d) = compare_solvers(&sys.matrix, &sys.rhs) {
            println!("  reduced system {t}: {d}");
            discrepancies += 1;
        }
    }
    verdict(
        "2",
        discrepancies == 0 && reduced >= 100,
        &format!(
            "(10000 random systems: {} solved / {} rank deficient / {} inconsistent; {reduced} reduced ML systems at k=2000 B=200, {reduced_failures} below threshold; {discrepancies} discrepancies)",
            outcomes[0], outcomes[1], outcomes[2]
        ),
    )
}

fn criterion_3_ml_overhead_k1000() -> bool {
    let b200 = overhead(&band(1000, Rate::half(), 200), Decoder::Ml, 1000);
    let b100 = overhead(&band(1000, Rate::half(), 100), Decoder::Ml, 1000);
    verdict(
        "3",
        b200 <= 2.0 && b100 <= 4.5 && b200 < b100,
        &format!("(k=1000, 1000 trials: B=200 {b200:.3}% <= 2.0, B=100 {b100:.3}% <= 4.5, B=200 < B=100)"),
    )
}

fn criterion_4_ml_overhead_k2000() -> bool {
    let b = overhead(&band(2000, Rate::half(), 200), Decoder::Ml, 1000);
    let (_, st) = build_staircase(2000, Rate::half(), 5, 1).unwrap();
    let s = overhead(&st, Decoder::Ml, 1000);
    verdict(
        "4",
        b <= 2.0 && (s - 1.15).abs() <= 0.5,
        &format!("(k=2000, 1000 trials: band B=200 {b:.3}% <= 2.0, staircase N1=5 {s:.3}% in 1.15 +/- 0.5)"),
    )
}

fn criterion_5_iterative_overhead() -> bool {
    let mut ok = true;
    let mut detail = String::from("(1000 trials:");
    for (k, st_ref) in [(1000, 14.24), (2000, 13.95)] {
        let b = overhead(&band(k, Rate::half(), 200), Decoder::Iterative, 1000);
        let (_, st) = build_staircase(k, Rate::half(), 5, 1).unwrap();
        let s = overhead(&st, Decoder::Iterative, 1000);
        ok &= (12.0..=22.0).contains(&b) && (s - st_ref).abs() <= 2.0;
        detail += &format!(" k={k} band {b:.2}% in [12,22], staircase {s:.2}% in {st_ref} +/- 2;");
    }
    detail.pop();
    detail.push(')');
    verdict("5", ok, &detail)
}

/// Mean ML row operations at the decodable prefix, and dense elimination
/// row operations on the same reduced systems.
fn row_ops_at(k: usize, trials: u64) -> (f64, f64, f64) {
    let code = band(k, Rate::half(), 200);
    let (mut ml, mut banded, mut dense) = (0u64, 0u64, 0u64);
    for t in 0..trials {
        let order = trial_arrivals(&code, t, 6);
        let needed = ml_symbols_needed(&code, &order).unwrap();
        let mut block = SymbolBlock::empty(&code, 0);
        for &e in &order[..needed] {
            block.insert(code.esi_to_slot(e).unwrap(), &[]).unwrap();
        }
        let sys = reduced_system(&code, &block);
        let (mut m, mut r) = (sys.matrix.clone(), sys.rhs.clone());
        dense += dense_solve(&mut m, &mut r).expect("decodable prefix").stats.row_ops;
        let (mut m, mut r) = (sys.matrix.clone(), sys.rhs.clone());
        banded += banded_solve(&mut m, &BandProfile::of(&sys.matrix), &mut r).unwrap().stats.row_ops;
        let out = ml_decode(&code, &mut block).unwrap();
        assert!(out.success);
        ml += out.row_ops;
    }
    let n = trials as f64;
    (ml as f64 / n, banded as f64 / n, dense as f64 / n)
}

fn criterion_6_complexity_scaling() -> bool {
    let (ml2, bs2, d2) = row_ops_at(2000, 100);
    let (ml4, bs4, d4) = row_ops_at(4000, 100);
    let (r_ml, r_dense) = (ml4 / ml2, d4 / d2);
    verdict(
        "6",
        r_ml <= 2.5 && r_dense >= 3.5,
        &format!(
            "(B=200, 100 trials: ML row ops {ml2:.0} -> {ml4:.0}, ratio {r_ml:.2} <= 2.5 [banded elimination alone {:.2}]; dense elimination {d2:.0} -> {d4:.0}, ratio {r_dense:.2} >= 3.5)",
            bs4 / bs2
        ),
    )
}

fn mean_decode_ns(code: &CodeMatrices, decoder: Decoder, loss: f64, trials: u64) -> f64 {
    let mut cfg = ThroughputConfig::new(vec![loss], trials, 1024, decoder);
    cfg.master_seed = 7;
    let r = throughput_experiment(code, &cfg);
    assert_eq!(r.points[0].successes, trials, "{} {decoder} at p={loss}", code.family());
    r.points[0].mean_decode_ns
}

fn criterion_7_speed_orderings() -> bool {
    let band = band(2000, Rate::half(), 200);
    let (_, st) = build_staircase(2000, Rate::half(), 5, 1).unwrap();
    let (_, win) = build_windowed(2000, Rate::half(), 1, LogBase::Natural).unwrap();
    // warm-up pass, then the measured one
    mean_decode_ns(&band, Decoder::Ml, 0.45, 2);
    let b = mean_decode_ns(&band, Decoder::Ml, 0.45, 15);
    let s = mean_decode_ns(&st, Decoder::Ml, 0.45, 15);
    let w = mean_decode_ns(&win, Decoder::Ml, 0.45, 15);
    // peeling needs ~20% overhead, so it is timed where it succeeds
    let bi = mean_decode_ns(&band, Decoder::Iterative, 0.3, 30);
    let si = mean_decode_ns(&st, Decoder::Iterative, 0.3, 30);
    verdict(
        "7",
        w / b > 1.3 && s / b > 2.0 && bi / si <= 2.0,
        &format!(
            "(k=2000, 1024-byte symbols, ML at p=0.45: band {:.2} ms, windowed {:.2} ms ({:.2}x > 1.3), staircase {:.2} ms ({:.2}x > 2); iterative at p=0.3: band {:.3} ms vs staircase {:.3} ms ({:.2}x <= 2))",
            b / 1e6,
            w / 1e6,
            w / b,
            s / 1e6,
            s / b,
            bi / 1e6,
            si / 1e6,
            bi / si
        ),
    )
}

/// Decodes `block` with both decoders and checks their agreement and the
/// correctness of every recovered symbol. Returns whether ML succeeded.
fn hybrid_matches_ml(code: &CodeMatrices, block: &SymbolBlock, truth: &SymbolBlock) -> Result<bool, String> {
    let mut h = block.clone();
    let mut m = block.clone();
    let ho = hybrid_decode(code, &mut h).unwrap();
    let mo = ml_decode(code, &mut m).unwrap();
    if ho.success != mo.success {
        return Err(format!("hybrid {} vs ml {}", ho.success, mo.success));
    }
    for (name, b, ok) in [("hybrid", &h, ho.success), ("ml", &m, mo.success)] {
        for s in 0..code.k() {
            if let Some(v) = b.slot(s) {
                if v != truth.slot(s).unwrap() {
                    return Err(format!("{name} recovered source {s} wrongly"));
                }
            }
        }
        if ok && check_consistency(code, b).is_err() {
            return Err(format!("{name} output disagrees with a received repair"));
        }
    }
    Ok(mo.success)
}

fn truth_block(code: &CodeMatrices, rng: &mut ChaCha8Rng) -> SymbolBlock {
    let mut sources = vec![vec![0u8; 2]; code.k()];
    for s in &mut sources {
        rng.fill_bytes(s);
    }
    let mut full = SymbolBlock::from_sources(code, &sources).unwrap();
    encode(code, &mut full).unwrap();
    full
}

fn criterion_8_hybrid_optimality() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let u: Gf2Poly = "0,1,3".parse().unwrap();
    let small = [
        ("band k=8 B=4", build_band(8, Rate::half(), 4, u.clone(), &["0,2,3".parse().unwrap(), "0,1,3".parse().unwrap()], &["0,1,2".parse().unwrap()], Schedule::RoundRobin, 1).unwrap().1),
        ("band k=10 B=6", build_band(10, Rate::half(), 6, u.clone(), &["0,3,5".parse().unwrap(), "0,1,2,5".parse().unwrap()], &["0,2,3".parse().unwrap()], Schedule::RoundRobin, 1).unwrap().1),
        ("staircase k=8", build_staircase(8, Rate::half(), 3, 4).unwrap().1),
        ("staircase k=10", build_staircase(10, Rate::half(), 3, 5).unwrap().1),
    ];
    let mut failures = Vec::new();
    let mut exhaustive = 0u64;
    let mut decodable = 0u64;
    for (name, code) in &small {
        let truth = truth_block(code, &mut rng);
        let n = code.n();
        for mask in 0u32..(1 << n) {
            let block = truth.subset(|s| mask >> code.slot_to_esi(s).unwrap() & 1 == 1);
            exhaustive += 1;
            match hybrid_matches_ml(code, &block, &truth) {
                Ok(ok) => decodable += u64::from(ok),
                Err(e) => {
                    failures.push(format!("{name} pattern {mask:#x}: {e}"));
                    break;
                }
            }
        }
    }

    let code = band(1000, Rate::half(), 200);
    let truth = truth_block(&code, &mut rng);
    let mut random_ok = 0;
    for t in 0..10_000 {
        let received = rng.random_range(1000..=1060);
        let keep: BTreeSet<usize> = sample(&mut rng, code.n(), received).into_iter().collect();
        let block = truth.subset(|s| keep.contains(&code.slot_to_esi(s).unwrap()));
        match hybrid_matches_ml(&code, &block, &truth) {
            Ok(ok) => random_ok += u32::from(ok),
            Err(e) => {
                failures.push(format!("k=1000 pattern {t}: {e}"));
                break;
            }
        }
    }
    for f in &failures {
        println!("  {f}");
    }
    verdict(
        "8",
        failures.is_empty(),
        &format!("({exhaustive} exhaustive patterns at k<=10, {decodable} decodable; 10000 random patterns at k=1000, {random_ok} decodable)"),
    )
}

fn criterion_9_windowed_full_rank() -> bool {
    let k = 1024;
    let (_, code) = build_windowed(k, Rate::half(), 1, LogBase::Natural).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut windowed, mut random) = (0, 0);
    let trials = 500;
    for _ in 0..trials {
        let mut basis = IncrementalBasis::new(k);
        for esi in sample(&mut rng, code.n(), k) {
            basis.insert(code.generator_column(code.esi_to_slot(esi).unwrap() - k));
        }
        windowed += usize::from(basis.rank() == k);
        let mut basis = IncrementalBasis::new(k);
        for _ in 0..k {
            let col: Vec<u32> = (0..k as u32).filter(|_| rng.random_bool(0.5)).collect();
            basis.insert(&col);
        }
        random += usize::from(basis.rank() == k);
    }
    let (pw, pr) = (100.0 * windowed as f64 / trials as f64, 100.0 * random as f64 / trials as f64);
    let near_random = (pw - pr).abs() <= 10.0;
    let at_95 = pw >= 95.0;
    let a = verdict("9a", at_95, &format!("(Windowed k=1024 square submatrices full rank {pw:.1}% >= 95%; a k x k system cannot exceed the ~28.9% of uniform random matrices)"));
    let b = verdict("9b", near_random, &format!("(Windowed {pw:.1}% vs pure random {pr:.1}%, within 10 points)"));
    a && b
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> bool); 9] = [
        ("1", criterion_1_algebraic_soundness),
        ("2", criterion_2_solver_oracle_equivalence),
        ("3", criterion_3_ml_overhead_k1000),
        ("4", criterion_4_ml_overhead_k2000),
        ("5", criterion_5_iterative_overhead),
        ("6", criterion_6_complexity_scaling),
        ("7", criterion_7_speed_orderings),
        ("8", criterion_8_hybrid_optimality),
        ("9", criterion_9_windowed_full_rank),
    ];
    let mut failed = Vec::new();
    for (id, run) in criteria {
        let t0 = Instant::now();
        let pass = panic::catch_unwind(run).unwrap_or_else(|_| verdict(id, false, "(panicked)"));
        println!("  [{:.1}s]", t0.elapsed().as_secs_f64());
        if !pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
