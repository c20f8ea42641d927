//! Line-based text form of a [`CodeSpec`].
//!
//! ```text
//! ldpc-band-spec 1
//! family band
//! k 8
//! n 16
//! bandwidth 4
//! u 0,1
//! seed 0
//! schedule round-robin
//! offsets 1
//! candidate 0,1,3
//! edge 0,2
//! ```
//!
//! `assignment` lists the pool index of every row for explicit schedules.
//! Staircase specs carry `n1`, Windowed specs carry `log natural|2`.
//! Blank lines and `#` comments are ignored when parsing.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{band, CodeSpec, ConstructError, FamilyParams, LogBase, Schedule};
use crate::gf2poly::Gf2Poly;

const MAGIC: &str = "ldpc-band-spec 1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecFileError {
    #[error("missing header line `{MAGIC}`")]
    Header,
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing key `{0}`")]
    Missing(&'static str),
    #[error(transparent)]
    Construct(#[from] ConstructError),
}

impl CodeSpec {
    /// Canonical text form; `from_text(to_text())` reproduces the spec exactly.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{MAGIC}");
        let _ = writeln!(s, "family {}", self.family().name());
        let _ = writeln!(s, "k {}", self.k);
        let _ = writeln!(s, "n {}", self.n);
        match &self.params {
            FamilyParams::Band(b) => {
                let _ = writeln!(s, "bandwidth {}", b.bandwidth);
                let _ = writeln!(s, "u {}", b.u);
                let _ = writeln!(s, "seed {}", b.seed);
                let _ = writeln!(s, "schedule {}", b.schedule.name());
                let offsets: Vec<String> = b.offsets.iter().map(u32::to_string).collect();
                let _ = writeln!(s, "offsets {}", offsets.join(","));
                for c in &b.candidates {
                    let _ = writeln!(s, "candidate {c}");
                }
                for c in &b.edge_candidates {
                    let _ = writeln!(s, "edge {c}");
                }
                if let Schedule::Explicit(ix) = &b.schedule {
                    let ix: Vec<String> = ix.iter().map(u32::to_string).collect();
                    let _ = writeln!(s, "assignment {}", ix.join(","));
                }
            }
            FamilyParams::Staircase { n1, seed } => {
                let _ = writeln!(s, "n1 {n1}");
                let _ = writeln!(s, "seed {seed}");
            }
            FamilyParams::Windowed { seed, log_base } => {
                let _ = writeln!(s, "seed {seed}");
                let log = match log_base {
                    LogBase::Natural => "natural",
                    LogBase::Two => "2",
                };
                let _ = writeln!(s, "log {log}");
            }
        }
        s
    }

    /// First 8 bytes of SHA-256 over the canonical text.
    pub fn fingerprint(&self) -> [u8; 8] {
        let d = Sha256::digest(self.to_text().as_bytes());
        d[..8].try_into().unwrap()
    }

    pub fn from_text(text: &str) -> Result<Self, SpecFileError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
            .filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, l)) if l == MAGIC => {}
            _ => return Err(SpecFileError::Header),
        }

        let mut family = None;
        let (mut k, mut n, mut bandwidth, mut seed, mut n1) = (None, None, None, None, None);
        let (mut u, mut schedule, mut offsets, mut log, mut assignment) = (None, None, None, None, None);
        let (mut candidates, mut edges) = (Vec::new(), Vec::new());

        for (line, l) in lines {
            let err = |msg: String| SpecFileError::Syntax { line, msg };
            let (key, value) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
            let value = value.trim();
            let num = || value.parse::<u64>().map_err(|_| err(format!("`{value}` is not a number")));
            let poly = || value.parse::<Gf2Poly>().map_err(|e| err(e.to_string()));
            let list = || -> Result<Vec<u32>, SpecFileError> {
                value
                    .split(',')
                    .map(|t| t.trim().parse::<u32>().map_err(|_| err(format!("bad list entry `{t}`"))))
                    .collect()
            };
            match key {
                "family" => family = Some(value.parse().map_err(|e: ConstructError| err(e.to_string()))?),
                "k" => k = Some(num()? as usize),
                "n" => n = Some(num()? as usize),
                "bandwidth" => bandwidth = Some(num()? as usize),
                "seed" => seed = Some(num()?),
                "n1" => n1 = Some(num()? as usize),
                "u" => u = Some(poly()?),
                "candidate" => candidates.push(poly()?),
                "edge" => edges.push(poly()?),
                "schedule" => schedule = Some(value.to_string()),
                "offsets" => offsets = Some(list()?),
                "assignment" => assignment = Some(list()?),
                "log" => {
                    log = Some(match value {
                        "natural" | "e" | "ln" => LogBase::Natural,
                        "2" => LogBase::Two,
                        _ => return Err(err(format!("unknown log base `{value}`"))),
                    })
                }
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }

        let family: super::Family = family.ok_or(SpecFileError::Missing("family"))?;
        let k = k.ok_or(SpecFileError::Missing("k"))?;
        let n = n.ok_or(SpecFileError::Missing("n"))?;
        let seed = seed.ok_or(SpecFileError::Missing("seed"))?;
        let params = match family {
            super::Family::Band => {
                let schedule = match schedule.as_deref() {
                    Some("round-robin") => Schedule::RoundRobin,
                    Some("random") => Schedule::Random,
                    Some("explicit") => Schedule::Explicit(assignment.ok_or(SpecFileError::Missing("assignment"))?),
                    Some(other) => {
                        return Err(SpecFileError::Syntax { line: 0, msg: format!("unknown schedule `{other}`") })
                    }
                    None => return Err(SpecFileError::Missing("schedule")),
                };
                let b = band::assemble(
                    k,
                    n,
                    bandwidth.ok_or(SpecFileError::Missing("bandwidth"))?,
                    u.ok_or(SpecFileError::Missing("u"))?,
                    &candidates,
                    &edges,
                    schedule,
                    seed,
                )?;
                if let Some(o) = offsets {
                    if o != b.offsets {
                        return Err(SpecFileError::Syntax {
                            line: 0,
                            msg: "offsets do not match k and n".into(),
                        });
                    }
                }
                FamilyParams::Band(b)
            }
            super::Family::Staircase => FamilyParams::Staircase { n1: n1.ok_or(SpecFileError::Missing("n1"))?, seed },
            super::Family::Windowed => FamilyParams::Windowed { seed, log_base: log.unwrap_or(LogBase::Natural) },
        };
        Ok(CodeSpec { k, n, params })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_band, build_staircase, build_windowed, reweight_rows, BandDesign, Rate, RowWeightTarget};

    fn roundtrip(spec: &CodeSpec) {
        let t = spec.to_text();
        let back = CodeSpec::from_text(&t).unwrap();
        assert_eq!(&back, spec);
        assert_eq!(back.to_text(), t);
    }

    #[test]
    fn all_families_roundtrip() {
        let (s, _) = BandDesign::new(200, Rate::half(), 20).build().unwrap();
        roundtrip(&s);
        let (r, _) = reweight_rows(&s, &RowWeightTarget::regular(200, 1100), 500, 1);
        roundtrip(&r);
        roundtrip(&build_staircase(100, Rate::new(1, 3).unwrap(), 3, 5).unwrap().0);
        roundtrip(&build_windowed(100, Rate::half(), 5, LogBase::Two).unwrap().0);
        let (s, _) = build_band(
            12,
            Rate::new(3, 5).unwrap(),
            4,
            "0,1".parse().unwrap(),
            &["0,2,3".parse().unwrap()],
            &["0,1".parse().unwrap()],
            Schedule::Random,
            77,
        )
        .unwrap();
        roundtrip(&s);
    }

    #[test]
    fn comments_and_errors() {
        let (s, _) = build_staircase(10, Rate::half(), 3, 1).unwrap();
        let t = format!("# hello\n\n{}", s.to_text().replace("n1 3", "n1 3   # three"));
        assert_eq!(CodeSpec::from_text(&t).unwrap(), s);
        assert_eq!(CodeSpec::from_text("family band"), Err(SpecFileError::Header));
        assert!(matches!(
            CodeSpec::from_text(&format!("{MAGIC}\nfamily band\nbogus 1\n")),
            Err(SpecFileError::Syntax { line: 3, .. })
        ));
        assert_eq!(CodeSpec::from_text(&format!("{MAGIC}\nfamily staircase\nk 4\nn 8\nseed 1\n")), Err(SpecFileError::Missing("n1")));
    }

    #[test]
    fn fingerprint_tracks_content() {
        let (a, _) = build_staircase(10, Rate::half(), 3, 1).unwrap();
        let (b, _) = build_staircase(10, Rate::half(), 3, 2).unwrap();
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint(), a.clone().fingerprint());
    }
}
