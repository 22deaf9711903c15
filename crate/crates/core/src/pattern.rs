//! Sign patterns (elements of {-1,+1}^k) and deduplicated pattern sets,
//! including the canonical pattern-set file format.
//!
//! A pattern is stored as a bit vector in a `u64`: bit i corresponds to
//! position i+1, a clear bit means +1 and a set bit means -1. The canonical
//! serialization order is lexicographic on the '+'/'-' strings, with
//! '+' < '-'.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MAX_PATTERN_LEN: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignPattern {
    k: u32,
    bits: u64,
}

impl SignPattern {
    pub fn from_bits(k: u32, bits: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::EmptyWindow);
        }
        if k > MAX_PATTERN_LEN {
            return Err(Error::PatternTooLong(k));
        }
        let mask = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        Ok(SignPattern {
            k,
            bits: bits & mask,
        })
    }

    pub fn all_plus(k: u32) -> Result<Self> {
        Self::from_bits(k, 0)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut bits = 0u64;
        let mut k = 0u32;
        for ch in s.chars() {
            match ch {
                '+' => {}
                '-' => {
                    if k >= MAX_PATTERN_LEN {
                        return Err(Error::PatternTooLong(k + 1));
                    }
                    bits |= 1 << k;
                }
                _ => return Err(Error::BadPatternChar),
            }
            k += 1;
        }
        Self::from_bits(k, bits)
    }

    // patterns always have at least one position, so there is no is_empty
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> u32 {
        self.k
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Sign at 1-based position i.
    pub fn sign(&self, i: u32) -> i8 {
        debug_assert!(i >= 1 && i <= self.k);
        if self.bits >> (i - 1) & 1 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn with_sign(mut self, i: u32, sign: i8) -> Self {
        debug_assert!(i >= 1 && i <= self.k);
        if sign < 0 {
            self.bits |= 1 << (i - 1);
        } else {
            self.bits &= !(1 << (i - 1));
        }
        self
    }

    /// Global sign flip.
    pub fn negated(&self) -> Self {
        let mask = if self.k == 64 {
            u64::MAX
        } else {
            (1u64 << self.k) - 1
        };
        SignPattern {
            k: self.k,
            bits: self.bits ^ mask,
        }
    }

    /// Drops the last position.
    pub fn drop_last(&self) -> Result<Self> {
        Self::from_bits(self.k - 1, self.bits)
    }

    /// Drops the first position (the window shifts by one).
    pub fn drop_first(&self) -> Result<Self> {
        Self::from_bits(self.k - 1, self.bits >> 1)
    }

    /// Key realizing the canonical (lexicographic) file order.
    pub fn order_key(bits: u64, k: u32) -> u64 {
        bits.reverse_bits() >> (64 - k)
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.k {
            f.write_str(if self.bits >> i & 1 == 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// A deduplicated set of sign patterns of one length, with the degree bound
/// it was computed for. Patterns are kept sorted in canonical file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSet {
    d: u32,
    k: u32,
    /// Bit-encodings sorted ascending by `SignPattern::order_key`.
    patterns: Vec<u64>,
}

impl PatternSet {
    pub fn from_bits(d: u32, k: u32, mut bits: Vec<u64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::EmptyWindow);
        }
        if k > MAX_PATTERN_LEN {
            return Err(Error::PatternTooLong(k));
        }
        bits.sort_unstable_by_key(|&b| SignPattern::order_key(b, k));
        bits.dedup();
        Ok(PatternSet {
            d,
            k,
            patterns: bits,
        })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn count(&self) -> u64 {
        self.patterns.len() as u64
    }

    pub fn bits(&self) -> &[u64] {
        &self.patterns
    }

    pub fn contains(&self, p: &SignPattern) -> bool {
        debug_assert_eq!(p.len(), self.k);
        self.patterns
            .binary_search_by_key(&SignPattern::order_key(p.bits(), self.k), |&b| {
                SignPattern::order_key(b, self.k)
            })
            .is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = SignPattern> + '_ {
        let k = self.k;
        self.patterns
            .iter()
            .map(move |&b| SignPattern::from_bits(k, b).unwrap())
    }

    pub fn to_writer<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(
            w,
            "SGNPAT1 d={} k={} count={}",
            self.d,
            self.k,
            self.patterns.len()
        )?;
        for p in self.iter() {
            writeln!(w, "{p}")?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.to_writer(&mut out).expect("writing to a Vec");
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.to_writer(&mut f)?;
        Ok(())
    }

    pub fn from_reader<R: BufRead>(r: R) -> Result<Self> {
        let bad = |reason: &str| Error::MalformedFile {
            kind: "pattern-set",
            reason: reason.to_string(),
        };
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| bad("empty file"))??;
        let mut d = None;
        let mut k = None;
        let mut count = None;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("SGNPAT1") {
            return Err(bad("missing SGNPAT1 header"));
        }
        for part in parts {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| bad("header fields must be key=value"))?;
            let value: u64 = value
                .parse()
                .map_err(|_| bad("header field is not an integer"))?;
            match key {
                "d" => d = Some(value as u32),
                "k" => k = Some(value as u32),
                "count" => count = Some(value),
                _ => return Err(bad("unknown header field")),
            }
        }
        let (d, k, count) = match (d, k, count) {
            (Some(d), Some(k), Some(c)) => (d, k, c),
            _ => return Err(bad("header must carry d, k, and count")),
        };
        let mut bits = Vec::new();
        let mut prev_key: Option<u64> = None;
        for line in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let p = SignPattern::parse(&line)?;
            if p.len() != k {
                return Err(Error::PatternLengthMismatch {
                    expected: k,
                    got: p.len(),
                });
            }
            let key = SignPattern::order_key(p.bits(), k);
            if let Some(prev) = prev_key {
                if key <= prev {
                    return Err(bad("pattern lines must be strictly ascending"));
                }
            }
            prev_key = Some(key);
            bits.push(p.bits());
        }
        if bits.len() as u64 != count {
            return Err(bad("count in header does not match the number of lines"));
        }
        Ok(PatternSet { d, k, patterns: bits })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::from_reader(f)
    }

    /// SHA-256 of the canonical serialization, hex-encoded.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.to_bytes());
        hex_string(&h.finalize())
    }
}

pub fn hex_string(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    hex_string(&h.finalize())
}
