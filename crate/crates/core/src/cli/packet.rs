//! Symbol packet wire format.
//!
//! ```text
//! magic "BFEC" | version u8 | family u8 | k u32 | n u32 | symbol_size u32 | esi u32 | spec_hash [u8; 8] | payload
//! ```
//!
//! Integers are big-endian. The trailer packet uses `esi = 0xFFFFFFFF` and an
//! 8-byte payload holding the padding length of the last source symbol.

use thiserror::Error;

use crate::construct::Family;

pub const MAGIC: [u8; 4] = *b"BFEC";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 30;
pub const TRAILER_ESI: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PacketError {
    #[error("truncated packet: need {need} bytes, have {have}")]
    Truncated { need: usize, have: usize },
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported packet version {0}")]
    Version(u8),
    #[error("unknown family tag {0}")]
    Family(u8),
    #[error("invalid shape k={k} n={n}")]
    Shape { k: u32, n: u32 },
    #[error("esi {esi} out of range for n={n}")]
    Esi { esi: u32, n: u32 },
    #[error("trailer payload must be 8 bytes, found {0}")]
    Trailer(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolPacket {
    pub family: Family,
    pub k: u32,
    pub n: u32,
    pub esi: u32,
    pub spec_hash: [u8; 8],
    pub payload: Vec<u8>,
}

impl SymbolPacket {
    pub fn trailer(family: Family, k: u32, n: u32, spec_hash: [u8; 8], padding: u64) -> Self {
        Self { family, k, n, esi: TRAILER_ESI, spec_hash, payload: padding.to_be_bytes().to_vec() }
    }

    pub fn is_trailer(&self) -> bool {
        self.esi == TRAILER_ESI
    }

    /// Padding length carried by a trailer.
    pub fn padding(&self) -> Option<u64> {
        if !self.is_trailer() {
            return None;
        }
        Some(u64::from_be_bytes(self.payload.as_slice().try_into().ok()?))
    }

    pub fn encoded_len(&self) -> usize {
        HEADER_LEN + self.payload.len()
    }

    pub fn write_to(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(self.family.tag());
        out.extend_from_slice(&self.k.to_be_bytes());
        out.extend_from_slice(&self.n.to_be_bytes());
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.esi.to_be_bytes());
        out.extend_from_slice(&self.spec_hash);
        out.extend_from_slice(&self.payload);
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        self.write_to(&mut out);
        out
    }

    /// Parses one packet from the start of `buf`, returning it and its length.
    pub fn parse(buf: &[u8]) -> Result<(Self, usize), PacketError> {
        if buf.len() < HEADER_LEN {
            if !MAGIC.starts_with(&buf[..buf.len().min(4)]) {
                return Err(PacketError::BadMagic);
            }
            return Err(PacketError::Truncated { need: HEADER_LEN, have: buf.len() });
        }
        if buf[..4] != MAGIC {
            return Err(PacketError::BadMagic);
        }
        if buf[4] != VERSION {
            return Err(PacketError::Version(buf[4]));
        }
        let family = Family::from_tag(buf[5]).ok_or(PacketError::Family(buf[5]))?;
        let be = |at: usize| u32::from_be_bytes(buf[at..at + 4].try_into().unwrap());
        let (k, n, symbol_size, esi) = (be(6), be(10), be(14), be(18));
        if k == 0 || n <= k {
            return Err(PacketError::Shape { k, n });
        }
        if esi == TRAILER_ESI {
            if symbol_size != 8 {
                return Err(PacketError::Trailer(symbol_size));
            }
        } else if esi >= n {
            return Err(PacketError::Esi { esi, n });
        }
        let total = HEADER_LEN + symbol_size as usize;
        if buf.len() < total {
            return Err(PacketError::Truncated { need: total, have: buf.len() });
        }
        let spec_hash = buf[22..30].try_into().unwrap();
        let payload = buf[HEADER_LEN..total].to_vec();
        Ok((Self { family, k, n, esi, spec_hash, payload }, total))
    }
}

/// Iterates over the packets of a byte stream, skipping damaged regions by
/// scanning forward to the next magic.
pub struct PacketStream<'a> {
    buf: &'a [u8],
    pos: usize,
    rejected: usize,
}

impl<'a> PacketStream<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0, rejected: 0 }
    }

    /// Damaged regions skipped so far.
    pub fn rejected(&self) -> usize {
        self.rejected
    }

    fn resync(&mut self) {
        let from = self.pos + 1;
        self.pos = self.buf[from.min(self.buf.len())..]
            .windows(MAGIC.len())
            .position(|w| w == MAGIC)
            .map_or(self.buf.len(), |p| from + p);
    }
}

impl Iterator for PacketStream<'_> {
    type Item = SymbolPacket;

    fn next(&mut self) -> Option<SymbolPacket> {
        while self.pos < self.buf.len() {
            match SymbolPacket::parse(&self.buf[self.pos..]) {
                Ok((p, len)) => {
                    self.pos += len;
                    return Some(p);
                }
                Err(_) => {
                    self.rejected += 1;
                    self.resync();
                }
            }
        }
        None
    }
}
