//! Rebalancing the row weights of H by swapping polynomial assignments.
//!
//! Run with `cargo run --release --example row_reweighting`.

use ldpc_band::construct::{reweight_rows, BandDesign, Rate, RowWeightTarget};
use ldpc_band::sim::{overhead_experiment, Decoder, OverheadConfig};

fn histogram(w: &[usize]) -> String {
    let mut h = std::collections::BTreeMap::new();
    for &x in w {
        *h.entry(x).or_insert(0) += 1;
    }
    h.iter().map(|(w, c)| format!("{w}:{c}")).collect::<Vec<_>>().join(" ")
}

fn main() {
    let (spec, code) = BandDesign::new(1000, Rate::half(), 200).build().unwrap();
    let h = code.parity_check().unwrap();
    let weights = h.row_weights();
    println!("row weights before: {}", histogram(&weights));

    let target = RowWeightTarget::regular(h.num_rows(), weights.iter().sum());
    let (balanced, report) = reweight_rows(&spec, &target, 200_000, 7);
    let code2 = balanced.build().unwrap();
    assert_eq!(code2.check_orthogonality(), Ok(()));
    println!("row weights after:  {}", histogram(&code2.parity_check().unwrap().row_weights()));
    println!("{report:?}");

    for (name, c) in [("original", &code), ("reweighted", &code2)] {
        let mut cfg = OverheadConfig::new(200, Decoder::Ml);
        cfg.count_row_ops = false;
        let ml = overhead_experiment(c, &cfg).summary.mean;
        cfg.decoder = Decoder::Iterative;
        let it = overhead_experiment(c, &cfg).summary.mean;
        println!("{name:<10} ML {:.2}%  iterative {:.2}%", ml * 100.0, it * 100.0);
    }
}
