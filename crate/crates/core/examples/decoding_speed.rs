//! Decoding time against the loss probability, forced ML and hybrid.
//!
//! Run with `cargo run --release --example decoding_speed`.

use ldpc_band::construct::{build_staircase, build_windowed, BandDesign, CodeMatrices, LogBase, Rate};
use ldpc_band::sim::{throughput_experiment, Decoder, ThroughputConfig};

fn main() {
    let k = 2000;
    let codes: [(&str, CodeMatrices); 3] = [
        ("band", BandDesign::new(k, Rate::half(), 200).build().unwrap().1),
        ("staircase", build_staircase(k, Rate::half(), 5, 1).unwrap().1),
        ("windowed", build_windowed(k, Rate::half(), 1, LogBase::Natural).unwrap().1),
    ];
    let grid = vec![0.1, 0.2, 0.3, 0.4, 0.45];
    println!("k={k}, 1024-byte symbols, Mbit/s of decoded source data");
    print!("{:<10} {:<7}", "code", "decoder");
    for p in &grid {
        print!(" {:>9}", format!("p={p}"));
    }
    println!();
    for (name, code) in &codes {
        for decoder in [Decoder::Ml, Decoder::Hybrid] {
            if code.parity_check().is_none() && decoder != Decoder::Ml {
                continue;
            }
            let report = throughput_experiment(code, &ThroughputConfig::new(grid.clone(), 5, 1024, decoder));
            print!("{name:<10} {:<7}", decoder.name());
            for pt in &report.points {
                print!(" {:>9.0}", pt.mbps);
            }
            println!();
        }
    }
}
