//! Encoding a block of symbols, losing some of them, and decoding.
//!
//! Run with `cargo run --release --example encode_decode`.

use ldpc_band::codec::{encode, hybrid_decode, SymbolBlock};
use ldpc_band::construct::{BandDesign, Rate};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let (_, code) = BandDesign::new(1000, Rate::half(), 200).build().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    let mut sources = vec![vec![0u8; 256]; code.k()];
    for s in &mut sources {
        rng.fill_bytes(s);
    }
    let mut sent = SymbolBlock::from_sources(&code, &sources).unwrap();
    encode(&code, &mut sent).unwrap();

    for loss in [0.10, 0.30, 0.45, 0.49] {
        let lost: Vec<bool> = (0..code.slot_count()).map(|_| rng.random_bool(loss)).collect();
        let mut received = sent.subset(|s| !lost[s]);
        let got = received.present_count();
        let out = hybrid_decode(&code, &mut received).unwrap();
        let exact = received.sources().as_deref() == Some(&sources[..]);
        println!(
            "loss {loss:.2}: received {got:>4}/{}  success {:<5} exact {:<5} peeled {:>4} eliminated {:>4} row ops {:>7} in {:?}",
            code.n(),
            out.success,
            exact,
            out.iterative_recovered,
            out.ml_recovered,
            out.row_ops,
            out.wall_time
        );
    }
}
