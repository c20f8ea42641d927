//! `bandfec` command-line front end.

pub mod packet;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::codec::{encode, SymbolBlock};
use crate::construct::{
    build_band, build_staircase, build_windowed, BandDesign, CodeMatrices, CodeSpec, ConstructError, Family, LogBase,
    Rate, SpecFileError,
};
use crate::gf2linalg::BitMatrix;
use crate::gf2poly::{format_poly_list, parse_poly_list, CandidateSearch, Gf2Poly, PolyError};
use crate::sim::{
    overhead_experiment, throughput_experiment, write_csv, Decoder, OverheadConfig, ThroughputConfig, UnknownDecoder,
};
use packet::{PacketStream, SymbolPacket};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error("spec file: {0}")]
    SpecFile(#[from] SpecFileError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("no candidate polynomial found")]
    NoCandidates,
    #[error("decoding failed: {0} source symbols unrecovered")]
    DecodeFailed(usize),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::DecodeFailed(_) => 1,
            CliError::Construct(_) | CliError::SpecFile(_) | CliError::Poly(_) | CliError::NoCandidates => 2,
            CliError::Usage(_) | CliError::Io { .. } => 64,
        }
    }
}

impl From<UnknownDecoder> for CliError {
    fn from(e: UnknownDecoder) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Writes to `path`, or to `out` when no path is given.
fn emit(path: Option<&Path>, bytes: &[u8], out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, bytes),
        None => out.write_all(bytes).map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

#[derive(Debug, Parser)]
#[command(name = "bandfec", version, about = "LDPC-Band packet erasure codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct a code and write its spec file.
    Build(BuildArgs),
    /// Search candidate polynomials m with a sparse product u*m.
    Findpoly(FindpolyArgs),
    /// Encode a file into a symbol packet stream.
    Encode(EncodeArgs),
    /// Decode a packet stream back into the original file.
    Decode(DecodeArgs),
    /// Print a matrix of a code as rows of 0/1 characters.
    DumpMatrix(DumpArgs),
    /// Monte-Carlo experiments, CSV output.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LogBaseArg {
    Natural,
    Two,
}

impl From<LogBaseArg> for LogBase {
    fn from(b: LogBaseArg) -> Self {
        match b {
            LogBaseArg::Natural => LogBase::Natural,
            LogBaseArg::Two => LogBase::Two,
        }
    }
}

/// Flags that describe a code to construct.
#[derive(Debug, Args)]
pub struct CodeArgs {
    #[arg(long, default_value = "band")]
    pub family: Family,
    #[arg(long, default_value_t = 1000)]
    pub k: usize,
    #[arg(long, default_value = "1/2")]
    pub rate: Rate,
    /// Band width (band family only, default 200).
    #[arg(long = "B", value_name = "B")]
    pub bandwidth: Option<usize>,
    /// Exponents of u(x) (band family only, default 0,1,3).
    #[arg(long)]
    pub u: Option<Gf2Poly>,
    /// Polynomial list file used as the interior candidate pool (band family only).
    #[arg(long)]
    pub candidates: Option<PathBuf>,
    /// Ones per source column of H (staircase family only, default 5).
    #[arg(long)]
    pub n1: Option<usize>,
    /// Logarithm used for the per-symbol weight (windowed family only).
    #[arg(long, value_enum)]
    pub log_base: Option<LogBaseArg>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl CodeArgs {
    fn check_combination(&self) -> Result<(), CliError> {
        let f = self.family;
        let misplaced = [
            ("--B", self.bandwidth.is_some(), Family::Band),
            ("--u", self.u.is_some(), Family::Band),
            ("--candidates", self.candidates.is_some(), Family::Band),
            ("--n1", self.n1.is_some(), Family::Staircase),
            ("--log-base", self.log_base.is_some(), Family::Windowed),
        ];
        let bad: Vec<String> = misplaced
            .iter()
            .filter(|(_, given, owner)| *given && *owner != f)
            .map(|(flag, _, owner)| format!("{flag} applies to --family {owner} only; drop it or switch family"))
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(usage(bad.join("\n")))
        }
    }

    /// Builds the described code.
    pub fn build(&self) -> Result<(CodeSpec, CodeMatrices), CliError> {
        self.check_combination()?;
        let built = match self.family {
            Family::Band => {
                let b = self.bandwidth.unwrap_or(200);
                let mut design = BandDesign::new(self.k, self.rate, b).with_seed(self.seed);
                if let Some(u) = &self.u {
                    design = design.with_u(u.clone());
                }
                match &self.candidates {
                    Some(path) => {
                        let pool = parse_poly_list(&read_text(path)?)?;
                        let (_, edges) = design.pools();
                        build_band(self.k, self.rate, b, design.u.clone(), &pool, &edges, design.schedule.clone(), self.seed)?
                    }
                    None => design.build()?,
                }
            }
            Family::Staircase => build_staircase(self.k, self.rate, self.n1.unwrap_or(5), self.seed)?,
            Family::Windowed => {
                build_windowed(self.k, self.rate, self.seed, self.log_base.unwrap_or(LogBaseArg::Natural).into())?
            }
        };
        Ok(built)
    }
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Spec file to write (stdout when omitted).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FindpolyArgs {
    #[arg(long, default_value = "0,1,3")]
    pub u: Gf2Poly,
    /// Band width; candidates have degree at most B-1 unless --max-degree is given.
    #[arg(long = "B", value_name = "B")]
    pub bandwidth: usize,
    #[arg(long)]
    pub max_degree: Option<u32>,
    /// Keep only degrees within this distance of the maximum.
    #[arg(long)]
    pub slack: Option<u32>,
    /// Largest allowed weight of u*m.
    #[arg(long)]
    pub max_weight: usize,
    #[arg(long, default_value_t = 64)]
    pub count: usize,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 1024)]
    pub symbol_size: usize,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
    /// Write the recovered part of the file even when decoding fails (missing symbols are zero).
    #[arg(long)]
    pub partial: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MatrixKind {
    /// Generator, k x n (columns are encoding symbols).
    G,
    /// Parity check, (n-k) x n.
    H,
    /// Source part of H.
    A,
    /// Repair part of H.
    U,
    /// Repair part of G, k x (n-k).
    M,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, value_enum, default_value = "h")]
    pub matrix: MatrixKind,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Symbols needed to decode, over random arrival orders.
    Overhead(BenchArgs),
    /// Decoding time over i.i.d. loss probabilities.
    Speed(BenchArgs),
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Use this spec file instead of the construction flags.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, default_value = "ml")]
    pub decoder: Decoder,
    /// Symbol size in bytes (speed only, default 1024).
    #[arg(long)]
    pub symbol_size: Option<usize>,
    /// Comma-separated loss probabilities (speed only).
    #[arg(long)]
    pub loss_grid: Option<String>,
    /// Skip the real decode that counts row operations (overhead only).
    #[arg(long)]
    pub no_row_ops: bool,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

/// Executes a parsed command line, writing reports to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Build(a) => cmd_build(&a, out),
        Command::Findpoly(a) => cmd_findpoly(&a, out),
        Command::Encode(a) => cmd_encode(&a, out),
        Command::Decode(a) => cmd_decode(&a, out),
        Command::DumpMatrix(a) => cmd_dump(&a, out),
        Command::Bench(BenchCommand::Overhead(a)) => cmd_bench_overhead(&a, out),
        Command::Bench(BenchCommand::Speed(a)) => cmd_bench_speed(&a, out),
    }
}

fn cmd_build(a: &BuildArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (spec, _) = a.code.build()?;
    emit(a.out.as_deref(), spec.to_text().as_bytes(), out)
}

fn cmd_findpoly(a: &FindpolyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if !a.u.has_constant_term() {
        return Err(usage("--u must have a constant term (exponent 0)"));
    }
    let max_degree = match a.max_degree {
        Some(d) => d,
        None => (a.bandwidth as u32).checked_sub(1).ok_or_else(|| usage("--B must be at least 1"))?,
    };
    let mut search = CandidateSearch::new(max_degree, a.max_weight, a.count);
    if let Some(s) = a.slack {
        search = search.near_full_band(s);
    }
    let found = search.run(&a.u);
    if found.is_empty() {
        return Err(CliError::NoCandidates);
    }
    emit(a.out.as_deref(), format_poly_list(&found).as_bytes(), out)
}

/// Reads and builds a spec file.
pub fn load_spec(path: &Path) -> Result<(CodeSpec, CodeMatrices), CliError> {
    let spec = CodeSpec::from_text(&read_text(path)?)?;
    let code = spec.build()?;
    Ok((spec, code))
}

/// Splits `data` into `k` source symbols of `symbol_size` bytes, zero padded.
/// Returns the symbols and the padding length.
pub fn split_sources(data: &[u8], k: usize, symbol_size: usize) -> Result<(Vec<Vec<u8>>, usize), CliError> {
    if symbol_size == 0 {
        return Err(usage("--symbol-size must be positive"));
    }
    let capacity = k * symbol_size;
    if data.len() > capacity {
        return Err(usage(format!(
            "input is {} bytes but one block holds k*symbol_size = {k}*{symbol_size} = {capacity}; \
             use --symbol-size {} or larger",
            data.len(),
            data.len().div_ceil(k)
        )));
    }
    let padding = capacity - data.len();
    let mut sources: Vec<Vec<u8>> = data.chunks(symbol_size).map(<[u8]>::to_vec).collect();
    if let Some(last) = sources.last_mut() {
        last.resize(symbol_size, 0);
    }
    sources.resize(k, vec![0; symbol_size]);
    Ok((sources, padding))
}

/// Encodes `data` into the packet stream: `n` symbol packets in ESI order, then the trailer.
pub fn encode_stream(spec: &CodeSpec, code: &CodeMatrices, data: &[u8], symbol_size: usize) -> Result<Vec<u8>, CliError> {
    let (sources, padding) = split_sources(data, code.k(), symbol_size)?;
    let mut block = SymbolBlock::from_sources(code, &sources).expect("k sources of equal size");
    encode(code, &mut block).expect("all sources present");
    let hash = spec.fingerprint();
    let (k, n) = (code.k() as u32, code.n() as u32);
    let mut stream = Vec::with_capacity((code.n() + 1) * (packet::HEADER_LEN + symbol_size));
    for esi in 0..code.n() {
        let slot = code.esi_to_slot(esi).expect("esi < n");
        let payload = block.slot(slot).expect("encoded").to_vec();
        SymbolPacket { family: code.family(), k, n, esi: esi as u32, spec_hash: hash, payload }.write_to(&mut stream);
    }
    SymbolPacket::trailer(code.family(), k, n, hash, padding as u64).write_to(&mut stream);
    Ok(stream)
}

fn cmd_encode(a: &EncodeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (spec, code) = load_spec(&a.spec)?;
    let data = read(&a.input)?;
    let stream = encode_stream(&spec, &code, &data, a.symbol_size)?;
    write_file(&a.output, &stream)?;
    writeln!(out, "{} packets of {} bytes, padding {}", code.n(), a.symbol_size, code.k() * a.symbol_size - data.len())
        .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
}

/// One JSON line describing a decode; field names follow `DecodeOutcome`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DecodeReport {
    pub success: bool,
    pub recovered_count: usize,
    pub iterative_recovered: usize,
    pub ml_recovered: usize,
    pub unsolvable: usize,
    pub row_ops: u64,
    pub wall_time_ns: u64,
    pub packets: usize,
    pub duplicates: usize,
    pub rejected: usize,
    pub foreign: usize,
}

/// Result of decoding a packet stream.
#[derive(Clone, Debug)]
pub struct StreamDecode {
    pub report: DecodeReport,
    /// File bytes; missing symbols are zero when decoding failed.
    pub data: Vec<u8>,
    /// Source symbols still unknown.
    pub missing: usize,
}

/// Decodes a packet stream produced by [`encode_stream`] (in any order, with
/// duplicates, gaps and damaged packets).
pub fn decode_stream(spec: &CodeSpec, code: &CodeMatrices, stream: &[u8]) -> StreamDecode {
    let hash = spec.fingerprint();
    let (k, n) = (code.k(), code.n());
    let mut report = DecodeReport::default();
    let mut block: Option<SymbolBlock> = None;
    let mut padding = None;
    let mut sources_present = 0;
    let mut packets = PacketStream::new(stream);
    for p in packets.by_ref() {
        if p.spec_hash != hash || p.family != code.family() || p.k as usize != k || p.n as usize != n {
            report.foreign += 1;
            continue;
        }
        if let Some(pad) = p.padding() {
            padding = Some(pad as usize);
            continue;
        }
        let b = block.get_or_insert_with(|| SymbolBlock::empty(code, p.payload.len()));
        let slot = code.esi_to_slot(p.esi as usize).expect("parser checked esi < n");
        if p.payload.len() != b.symbol_size() {
            report.foreign += 1;
            continue;
        }
        if b.is_present(slot) {
            report.duplicates += 1;
            continue;
        }
        b.insert(slot, &p.payload).expect("size checked");
        report.packets += 1;
        if slot < k {
            sources_present += 1;
            if sources_present == k && padding.is_some() {
                break;
            }
        }
    }
    report.rejected = packets.rejected();

    let Some(mut block) = block else {
        return StreamDecode { report, data: Vec::new(), missing: k };
    };
    let symbol_size = block.symbol_size();
    let out = Decoder::Hybrid.decode(code, &mut block);
    report.success = out.success;
    report.recovered_count = out.recovered_count;
    report.iterative_recovered = out.iterative_recovered;
    report.ml_recovered = out.ml_recovered;
    report.unsolvable = out.unsolvable;
    report.row_ops = out.row_ops;
    report.wall_time_ns = out.wall_time.as_nanos() as u64;

    let mut data = Vec::with_capacity(k * symbol_size);
    for s in 0..k {
        match block.slot(s) {
            Some(bytes) => data.extend_from_slice(bytes),
            None => data.resize(data.len() + symbol_size, 0),
        }
    }
    data.truncate(data.len() - padding.unwrap_or(0).min(data.len()));
    StreamDecode { report, data, missing: block.missing_sources().len() }
}

fn cmd_decode(a: &DecodeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (spec, code) = load_spec(&a.spec)?;
    let stream = read(&a.input)?;
    let StreamDecode { report, data, missing } = decode_stream(&spec, &code, &stream);
    let line = serde_json::to_string(&report).expect("plain struct");
    writeln!(out, "{line}").map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
    if report.success || a.partial {
        write_file(&a.output, &data)?;
    }
    if report.success {
        Ok(())
    } else {
        Err(CliError::DecodeFailed(missing))
    }
}

/// The requested matrix as a dense bit matrix.
pub fn code_matrix(code: &CodeMatrices, kind: MatrixKind) -> Result<BitMatrix, CliError> {
    let (k, n) = (code.k(), code.n());
    let h = code.parity_check();
    let need_h = || h.ok_or_else(|| usage("windowed codes have no parity-check matrix; use --matrix g"));
    let m = match kind {
        MatrixKind::G => {
            let mut m = BitMatrix::zeros(k, n);
            for esi in 0..n {
                let slot = code.esi_to_slot(esi).unwrap();
                if slot < k {
                    m.set(slot, esi, true);
                } else {
                    for &s in code.generator_column(slot - k) {
                        m.set(s as usize, esi, true);
                    }
                }
            }
            m
        }
        MatrixKind::M => {
            if !code.is_systematic() {
                return Err(usage("windowed codes are not systematic; use --matrix g"));
            }
            let mut m = BitMatrix::zeros(k, n - k);
            for g in 0..n - k {
                for &s in code.generator_column(g) {
                    m.set(s as usize, g, true);
                }
            }
            m
        }
        MatrixKind::H | MatrixKind::A | MatrixKind::U => {
            let h = need_h()?;
            let (lo, hi) = match kind {
                MatrixKind::H => (0, n),
                MatrixKind::A => (0, k),
                _ => (k, n),
            };
            let mut m = BitMatrix::zeros(h.num_rows(), hi - lo);
            for r in 0..h.num_rows() {
                for &c in h.row(r) {
                    let c = c as usize;
                    if (lo..hi).contains(&c) {
                        m.set(r, c - lo, true);
                    }
                }
            }
            m
        }
    };
    Ok(m)
}

fn cmd_dump(a: &DumpArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (_, code) = load_spec(&a.spec)?;
    let m = code_matrix(&code, a.matrix)?;
    emit(a.out.as_deref(), m.dump().as_bytes(), out)
}

impl BenchArgs {
    fn code(&self) -> Result<CodeMatrices, CliError> {
        match &self.spec {
            Some(p) => Ok(load_spec(p)?.1),
            None => Ok(self.code.build()?.1),
        }
    }

    fn check_decoder(&self, code: &CodeMatrices) -> Result<(), CliError> {
        if code.parity_check().is_none() && self.decoder != Decoder::Ml {
            return Err(usage(format!(
                "--decoder {} needs a parity-check matrix, which windowed codes lack; use --decoder ml",
                self.decoder
            )));
        }
        Ok(())
    }
}

fn cmd_bench_overhead(a: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut bad = Vec::new();
    if a.symbol_size.is_some() {
        bad.push("--symbol-size applies to `bench speed` only; overhead trials carry no payload");
    }
    if a.loss_grid.is_some() {
        bad.push("--loss-grid applies to `bench speed` only; overhead trials receive symbols until decoding succeeds");
    }
    if !bad.is_empty() {
        return Err(usage(bad.join("\n")));
    }
    let code = a.code()?;
    a.check_decoder(&code)?;
    let mut cfg = OverheadConfig::new(a.trials.unwrap_or(1000), a.decoder);
    cfg.master_seed = a.code.seed;
    cfg.count_row_ops = !a.no_row_ops;
    let report = overhead_experiment(&code, &cfg);
    let mut buf = Vec::new();
    write_csv(&mut buf, &report.records, &[report.summary.csv_row()]).expect("in-memory write");
    emit(a.out.as_deref(), &buf, out)
}

/// Parses a comma-separated list of loss probabilities in [0, 1).
pub fn parse_loss_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let grid = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|p| (0.0..1.0).contains(p))
                .ok_or_else(|| usage(format!("--loss-grid entry `{}` is not a probability in [0, 1)", t.trim())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(grid)
}

fn cmd_bench_speed(a: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.no_row_ops {
        return Err(usage("--no-row-ops applies to `bench overhead` only"));
    }
    let grid = parse_loss_grid(a.loss_grid.as_deref().unwrap_or("0.05,0.1,0.2,0.3,0.4,0.45"))?;
    let code = a.code()?;
    a.check_decoder(&code)?;
    let mut cfg = ThroughputConfig::new(grid, a.trials.unwrap_or(20), a.symbol_size.unwrap_or(1024), a.decoder);
    cfg.master_seed = a.code.seed;
    let report = throughput_experiment(&code, &cfg);
    let summaries: Vec<String> = report.points.iter().map(|p| p.csv_row()).collect();
    let mut buf = Vec::new();
    write_csv(&mut buf, &report.records, &summaries).expect("in-memory write");
    emit(a.out.as_deref(), &buf, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_code(family: &str) -> (CodeSpec, CodeMatrices) {
        let mut argv = vec!["bandfec", "build", "--family", family, "--k", "64", "--seed", "3"];
        if family == "band" {
            argv.extend(["--B", "16"]);
        }
        let cli = Cli::try_parse_from(argv).unwrap();
        match cli.command {
            Command::Build(a) => a.code.build().unwrap(),
            _ => unreachable!(),
        }
    }

    #[test]
    fn flag_combinations_are_checked() {
        let cli = Cli::try_parse_from(["bandfec", "build", "--family", "staircase", "--B", "100", "--log-base", "two"]).unwrap();
        let Command::Build(a) = cli.command else { unreachable!() };
        let err = a.code.build().unwrap_err();
        assert_eq!(err.exit_code(), 64);
        let msg = err.to_string();
        assert!(msg.contains("--B applies to --family band"), "{msg}");
        assert!(msg.contains("--log-base applies to --family windowed"), "{msg}");
    }

    #[test]
    fn split_reports_required_symbol_size() {
        let err = split_sources(&[0; 100], 4, 16).unwrap_err();
        assert!(err.to_string().contains("--symbol-size 25"), "{err}");
        let (s, pad) = split_sources(&[7; 50], 4, 16).unwrap();
        assert_eq!(pad, 14);
        assert_eq!(s[3][..2], [7, 7]);
        assert!(s[3][2..].iter().all(|&b| b == 0));
    }

    #[test]
    fn stream_roundtrip_every_family() {
        for fam in ["band", "staircase", "windowed"] {
            let (spec, code) = small_code(fam);
            let data: Vec<u8> = (0..1000u32).map(|i| (i * 7 % 251) as u8).collect();
            let stream = encode_stream(&spec, &code, &data, 20).unwrap();
            let d = decode_stream(&spec, &code, &stream);
            assert!(d.report.success, "{fam}");
            assert_eq!(d.data, data, "{fam}");
        }
    }

    #[test]
    fn systematic_complete_set_needs_no_decoding() {
        let (spec, code) = small_code("band");
        let data = vec![5u8; 64 * 8];
        let stream = encode_stream(&spec, &code, &data, 8).unwrap();
        let d = decode_stream(&spec, &code, &stream);
        assert_eq!((d.report.ml_recovered, d.report.iterative_recovered), (0, 0));
        assert_eq!(d.data, data);
    }

    #[test]
    fn foreign_packets_are_ignored() {
        let (spec, code) = small_code("band");
        let (spec2, code2) = small_code("staircase");
        let data = vec![1u8; 300];
        let mut stream = encode_stream(&spec2, &code2, &data, 8).unwrap();
        stream.extend(encode_stream(&spec, &code, &data, 8).unwrap());
        let d = decode_stream(&spec, &code, &stream);
        assert!(d.report.success);
        assert_eq!(d.report.foreign, 129);
        assert_eq!(d.data, data);
    }

    #[test]
    fn matrix_shapes() {
        let (_, code) = small_code("band");
        let g = code_matrix(&code, MatrixKind::G).unwrap();
        let h = code_matrix(&code, MatrixKind::H).unwrap();
        assert_eq!((g.rows(), g.cols()), (64, 128));
        assert_eq!((h.rows(), h.cols()), (64, 128));
        // G H^T = 0 through the dense matrices
        for r in 0..g.rows() {
            for j in 0..h.rows() {
                let dot = (0..128).filter(|&c| g.get(r, c) && h.get(j, c)).count();
                assert_eq!(dot % 2, 0);
            }
        }
        let (_, w) = small_code("windowed");
        assert_eq!(code_matrix(&w, MatrixKind::H).unwrap_err().exit_code(), 64);
    }
}
