//! Candidate polynomials for the band: `m(x)` such that `u(x) * m(x)` is sparse.
//!
//! Run with `cargo run --release --example polynomial_search`.

use ldpc_band::gf2poly::{poly_mul, sample_candidates, CandidateSearch, Gf2Poly};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let u: Gf2Poly = "0,1,3".parse().unwrap();
    println!("u(x) = {u}");

    // exhaustive, ordered by product weight then degree
    let first = CandidateSearch::new(39, 4, 8).run(&u);
    println!("\nlightest products, degree <= 39:");
    for m in &first {
        println!("  m = {m:<28} u*m = {}", poly_mul(&u, m));
    }

    // near-full-band degrees only
    let full_band = CandidateSearch::new(199, 4, 5).near_full_band(0).run(&u);
    println!("\ndegree exactly 199, product weight <= 4:");
    for m in &full_band {
        println!("  weight(m) = {:>3}  u*m = {}", m.weight(), poly_mul(&u, m));
    }

    // random draws cover the whole degree range instead of its lexicographic start
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let drawn = sample_candidates(&u, 199, 199, 6, 5, &mut rng);
    println!("\nsampled, degree 199, product weight 6:");
    for m in &drawn {
        println!("  weight(m) = {:>3}  u*m = {}", m.weight(), poly_mul(&u, m));
    }
}
