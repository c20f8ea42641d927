//! Reception overhead of each family and decoder, written as CSV.
//!
//! Run with `cargo run --release --example overhead_experiment [trials] [out.csv]`.

use std::fs::File;
use std::io::BufWriter;

use ldpc_band::construct::{build_staircase, build_windowed, BandDesign, LogBase, Rate};
use ldpc_band::sim::{overhead_experiment, write_csv, Decoder, OverheadConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let trials: u64 = args.next().map(|t| t.parse().expect("trial count")).unwrap_or(200);
    let out = args.next();

    let codes = [
        ("band B=200", BandDesign::new(1000, Rate::half(), 200).build().unwrap().1),
        ("band B=100", BandDesign::new(1000, Rate::half(), 100).build().unwrap().1),
        ("staircase N1=5", build_staircase(1000, Rate::half(), 5, 1).unwrap().1),
        ("windowed", build_windowed(1000, Rate::half(), 1, LogBase::Natural).unwrap().1),
    ];
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    println!("k=1000, rate 1/2, {trials} trials");
    for (name, code) in &codes {
        for decoder in [Decoder::Ml, Decoder::Iterative] {
            if code.parity_check().is_none() && decoder != Decoder::Ml {
                continue;
            }
            let report = overhead_experiment(code, &OverheadConfig::new(trials, decoder));
            let s = &report.summary;
            println!(
                "  {name:<15} {:<9} mean {:>6.2}%  p90 {:>6.2}%  max {:>6.2}%  row ops {:>8.0}",
                decoder.name(),
                s.mean * 100.0,
                s.p90 * 100.0,
                s.max * 100.0,
                s.mean_row_ops
            );
            summaries.push(s.csv_row());
            records.extend(report.records);
        }
    }
    if let Some(path) = out {
        write_csv(BufWriter::new(File::create(&path).unwrap()), &records, &summaries).unwrap();
        println!("wrote {} rows to {path}", records.len());
    }
}
