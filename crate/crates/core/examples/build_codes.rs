//! Constructing the three code families and saving a code as a spec file.
//!
//! Run with `cargo run --release --example build_codes`.

use ldpc_band::construct::{build_staircase, build_windowed, BandDesign, CodeSpec, LogBase, Rate};

fn main() {
    let (spec, band) = BandDesign::new(1000, Rate::half(), 200).build().unwrap();
    let params = spec.band().unwrap();
    let edges = params.rows.iter().filter(|r| r.edge).count();
    println!("LDPC-Band k={} n={} B={} u={}", band.k(), band.n(), params.bandwidth, params.u);
    println!("  {} interior candidates, {} edge candidates, {edges} edge rows", params.candidates.len(), params.edge_candidates.len());

    let h = band.parity_check().unwrap();
    let rw = h.row_weights();
    println!(
        "  H: {} rows, row weight {}..={}, mean {:.2}",
        h.num_rows(),
        rw.iter().min().unwrap(),
        rw.iter().max().unwrap(),
        rw.iter().sum::<usize>() as f64 / rw.len() as f64
    );
    let profile = band.band_profile().unwrap();
    println!("  G band profile width {}", profile.bandwidth());
    assert_eq!(band.check_orthogonality(), Ok(()));

    let text = spec.to_text();
    let again = CodeSpec::from_text(&text).unwrap();
    assert_eq!(again, spec);
    let fp: String = spec.fingerprint().iter().map(|b| format!("{b:02x}")).collect();
    println!("  spec file: {} lines, fingerprint {fp}", text.lines().count());
    println!("{}", text.lines().take(8).collect::<Vec<_>>().join("\n"));

    let (_, st) = build_staircase(1000, Rate::half(), 5, 1).unwrap();
    let cw = st.parity_check().unwrap().col_weights();
    println!("\nLDPC-Staircase k=1000 N1=5: source column weight {}, repair column weight {}", cw[0], cw[1500]);

    let (_, win) = build_windowed(1024, Rate::half(), 1, LogBase::Natural).unwrap();
    println!(
        "Windowed k=1024: {} encoding symbols of weight {}, systematic: {}",
        win.generated_count(),
        win.generator_column(0).len(),
        win.is_systematic()
    );
}
