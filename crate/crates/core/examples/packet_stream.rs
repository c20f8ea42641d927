//! Carrying a file over a lossy, reordering channel with the packet format.
//!
//! Run with `cargo run --release --example packet_stream`.

use ldpc_band::cli::packet::{PacketStream, SymbolPacket};
use ldpc_band::cli::{decode_stream, encode_stream};
use ldpc_band::construct::{BandDesign, Rate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let (spec, code) = BandDesign::new(500, Rate::half(), 100).build().unwrap();
    let file: Vec<u8> = (0..300_000u32).map(|i| (i.wrapping_mul(2_654_435_761) >> 24) as u8).collect();
    let stream = encode_stream(&spec, &code, &file, 1024).unwrap();
    let packets: Vec<SymbolPacket> = PacketStream::new(&stream).collect();
    println!("{} bytes -> {} packets ({} bytes on the wire)", file.len(), packets.len(), stream.len());

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // 35% loss, a few duplicates, shuffled, one damaged header
    let mut rx: Vec<SymbolPacket> = packets.iter().filter(|_| !rng.random_bool(0.35)).cloned().collect();
    for _ in 0..10 {
        let d = rx[rng.random_range(0..rx.len())].clone();
        rx.push(d);
    }
    rx.shuffle(&mut rng);
    let mut wire: Vec<u8> = rx.iter().flat_map(SymbolPacket::to_bytes).collect();
    wire[0] = 0;

    let out = decode_stream(&spec, &code, &wire);
    println!("{}", serde_json::to_string(&out.report).unwrap());
    assert!(out.report.success);
    assert_eq!(out.data, file);
    println!("file recovered byte for byte");
}
