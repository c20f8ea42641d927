//! An erasure pattern that stalls peeling but is solved by elimination.
//!
//! Run with `cargo run --release --example stopping_set`.

use ldpc_band::codec::{encode, hybrid_decode, iterative_decode, SymbolBlock};
use ldpc_band::construct::{BandDesign, Rate};
use ldpc_band::sim::{iterative_symbols_needed, ml_symbols_needed, trial_arrivals};

fn main() {
    let (_, code) = BandDesign::new(1000, Rate::half(), 200).build().unwrap();
    let sources: Vec<Vec<u8>> = (0..code.k()).map(|i| (i as u32).to_le_bytes().to_vec()).collect();
    let mut sent = SymbolBlock::from_sources(&code, &sources).unwrap();
    encode(&code, &mut sent).unwrap();

    let order = trial_arrivals(&code, 0, 1);
    let ml = ml_symbols_needed(&code, &order).unwrap();
    let it = iterative_symbols_needed(&code, &order).unwrap();
    println!("this arrival order: ML decodes after {ml} symbols, peeling after {it}");

    // stop in between: peeling stalls on a stopping set, elimination finishes
    let take = (ml + it) / 2;
    let slots: Vec<usize> = order[..take].iter().map(|&e| code.esi_to_slot(e).unwrap()).collect();
    let mut peeled = sent.subset(|s| slots.contains(&s));
    let mut hybrid = peeled.clone();

    let p = iterative_decode(&code, &mut peeled).unwrap();
    println!("with {take} symbols peeling recovers {} sources and stalls with {} missing", p.recovered_sources, peeled.missing_sources().len());

    let out = hybrid_decode(&code, &mut hybrid).unwrap();
    println!(
        "hybrid: success {} ({} peeled, {} by elimination, {} row ops)",
        out.success, out.iterative_recovered, out.ml_recovered, out.row_ops
    );
    assert_eq!(hybrid.sources().unwrap(), sources);
}
