//! Banded versus dense Gaussian elimination on the same GF(2) system.
//!
//! Run with `cargo run --release --example banded_elimination`.

use ldpc_band::gf2linalg::{banded_solve, dense_solve, BandProfile, BitMatrix, SymbolRows};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    println!("{:>6} {:>6} {:>12} {:>12}", "n", "width", "banded ops", "dense ops");
    for n in [500, 1000, 2000, 4000] {
        let width = 64;
        // rows start on the diagonal and stay within the band; extra rows make it overdetermined
        let rows = n + n / 50;
        let supports: Vec<Vec<usize>> = (0..rows)
            .map(|r| {
                let lo = (r * n / rows).min(n - width);
                let mut s: Vec<usize> = (lo + 1..lo + width).filter(|_| rng.random_bool(0.1)).collect();
                s.insert(0, lo);
                s
            })
            .collect();
        let m = BitMatrix::from_row_supports(&supports, n);
        let x: Vec<u8> = (0..n).map(|_| rng.random()).collect();
        let mut rhs = SymbolRows::zeros(rows, 1);
        for (r, s) in supports.iter().enumerate() {
            rhs.row_mut(r)[0] = s.iter().fold(0, |a, &c| a ^ x[c]);
        }

        let profile = BandProfile::of(&m);
        let (mut a, mut ra) = (m.clone(), rhs.clone());
        let banded = banded_solve(&mut a, &profile, &mut ra).unwrap();
        let (mut b, mut rb) = (m.clone(), rhs.clone());
        let dense = dense_solve(&mut b, &mut rb).unwrap();
        assert_eq!(banded.solution, dense.solution);
        assert!((0..n).all(|c| banded.solution.row(c)[0] == x[c]));
        println!("{n:>6} {:>6} {:>12} {:>12}", profile.bandwidth(), banded.stats.row_ops, dense.stats.row_ops);
    }
}
