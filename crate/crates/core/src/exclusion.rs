//! Constructive search for a twist rho under which a prescribed sign
//! pattern of length q cannot appear: every (pattern, unit, offset) triple
//! pins down the unique rho it would need, those are collected in a bitset,
//! and any clear bit is a certified survivor. A deliberately independent
//! verifier re-derives the exclusion condition by direct loops.

use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pattern::{PatternSet, SignPattern};
use crate::rho::{gcd, units_mod, Rho};

/// Memory ceiling: 2^30 bits = 128 MiB.
pub const MAX_PHI: u32 = 30;

/// Occupancy bitset over all 2^phi(q) twist functions.
pub struct BadSet {
    q: u32,
    phi: u32,
    words: Vec<u64>,
}

impl BadSet {
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn phi(&self) -> u32 {
        self.phi
    }

    pub fn contains(&self, rho: &Rho) -> bool {
        let code = rho.encode();
        self.words[(code >> 6) as usize] >> (code & 63) & 1 == 1
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Decodes the lowest-index clear bit, if any.
    pub fn first_clear(&self) -> Option<u64> {
        let total = 1u64 << self.phi;
        for (w, &word) in self.words.iter().enumerate() {
            if word != u64::MAX {
                let bit = word.trailing_ones() as u64;
                let code = (w as u64) * 64 + bit;
                if code < total {
                    return Some(code);
                }
            }
        }
        None
    }
}

/// The unique rho forced by requiring the twisted signs at all invertible
/// offsets to reproduce eps against the base pattern: rho(t (n+i)) =
/// eps_i * p_i for every i in [1, q] with n+i invertible. Because n+i walks
/// every residue exactly once, each unit is assigned exactly once.
pub fn determined_rho(p: &SignPattern, t: u32, n: u32, eps: &SignPattern, q: u32) -> Result<Rho> {
    if p.len() != q || eps.len() != q {
        return Err(Error::PatternLengthMismatch {
            expected: q,
            got: p.len().max(eps.len()),
        });
    }
    if gcd(t % q, q) != 1 {
        return Err(Error::NotAUnit(t % q, q));
    }
    let mut assign = vec![0i8; q as usize];
    for i in 1..=q {
        let c = (n + i) % q;
        if gcd(c, q) == 1 {
            let unit = ((t as u64 * c as u64) % q as u64) as usize;
            assign[unit] = eps.sign(i) * p.sign(i);
        }
    }
    Rho::from_assignments(q, |u| assign[u as usize])
}

pub struct BadSetOutcome {
    pub bad: BadSet,
    pub bad_count: u64,
    /// Total (pattern, t, n) triples folded in; exceeds bad_count whenever
    /// two triples force the same rho.
    pub triples: u64,
}

/// Marks the determined rho of every (pattern, unit, offset) triple.
pub fn build_bad_set(d: u32, q: u32, eps: &SignPattern, patterns: &PatternSet) -> Result<BadSetOutcome> {
    if patterns.k() != q {
        return Err(Error::PatternLengthMismatch {
            expected: q,
            got: patterns.k(),
        });
    }
    if patterns.d() != d {
        return Err(Error::BadArgument(format!(
            "pattern set was enumerated for d = {}, expected {d}",
            patterns.d()
        )));
    }
    if eps.len() != q {
        return Err(Error::PatternLengthMismatch {
            expected: q,
            got: eps.len(),
        });
    }
    let units = units_mod(q);
    let phi = units.len() as u32;
    if phi > MAX_PHI {
        return Err(Error::PhiTooLarge {
            phi,
            limit: MAX_PHI,
        });
    }
    let words = ((1u64 << phi) as usize).div_ceil(64);
    let atomic: Vec<AtomicU64> = (0..words).map(|_| AtomicU64::new(0)).collect();

    // shard over (t, n) pairs; bitwise OR makes the result order-independent
    let mut pairs = Vec::with_capacity(units.len() * q as usize);
    for &t in &units {
        for n in 0..q {
            pairs.push((t, n));
        }
    }
    pairs.par_iter().try_for_each(|&(t, n)| -> Result<()> {
        for p in patterns.iter() {
            let rho = determined_rho(&p, t, n, eps, q)?;
            let code = rho.encode();
            atomic[(code >> 6) as usize].fetch_or(1u64 << (code & 63), Ordering::Relaxed);
        }
        Ok(())
    })?;

    let words: Vec<u64> = atomic.into_iter().map(|w| w.into_inner()).collect();
    let bad = BadSet { q, phi, words };
    let bad_count = bad.count();
    Ok(BadSetOutcome {
        bad,
        bad_count,
        triples: patterns.count() * units.len() as u64 * q as u64,
    })
}

pub fn find_good_rho(bad: &BadSet) -> Option<Rho> {
    bad.first_clear().map(|code| Rho::decode(bad.q, code).unwrap())
}

/// Independent oracle: eps is excluded by rho iff every (pattern, t, n)
/// triple mismatches at some invertible offset. Direct triple loop, no
/// bitset, no shared code with `determined_rho`.
pub fn verify_exclusion(
    _d: u32,
    q: u32,
    eps: &SignPattern,
    rho: &Rho,
    patterns: &PatternSet,
) -> Result<bool> {
    if patterns.k() != q || eps.len() != q {
        return Err(Error::PatternLengthMismatch {
            expected: q,
            got: patterns.k().min(eps.len()),
        });
    }
    let units = units_mod(q);
    let all_pass = patterns.bits().par_iter().all(|&bits| {
        let p = SignPattern::from_bits(q, bits).unwrap();
        for &t in &units {
            for n in 0..q {
                let mut mismatched = false;
                for i in 1..=q {
                    let c = (n + i) % q;
                    if gcd(c, q) != 1 {
                        continue;
                    }
                    let unit = ((t as u64 * c as u64) % q as u64) as u32;
                    if eps.sign(i) != p.sign(i) * rho.eval(unit).unwrap() {
                        mismatched = true;
                        break;
                    }
                }
                if !mismatched {
                    return false;
                }
            }
        }
        true
    });
    Ok(all_pass)
}

/// Certificate of one successful search; `verified` reports the independent
/// re-check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExclusionCertificate {
    pub d: u32,
    pub q: u32,
    pub epsilon: SignPattern,
    pub rho: Rho,
    pub bad_count: u64,
    pub verified: bool,
    pub pattern_set_digest: String,
}

impl ExclusionCertificate {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        writeln!(out, "d={}", self.d).unwrap();
        writeln!(out, "q={}", self.q).unwrap();
        writeln!(out, "epsilon={}", self.epsilon).unwrap();
        writeln!(out, "rho={}", self.rho.to_sign_string()).unwrap();
        writeln!(out, "bad_count={}", self.bad_count).unwrap();
        writeln!(out, "verified={}", self.verified).unwrap();
        writeln!(out, "pattern_set_digest={}", self.pattern_set_digest).unwrap();
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |reason: &str| Error::MalformedFile {
            kind: "certificate",
            reason: reason.to_string(),
        };
        let mut fields = std::collections::BTreeMap::new();
        let expected = [
            "d",
            "q",
            "epsilon",
            "rho",
            "bad_count",
            "verified",
            "pattern_set_digest",
        ];
        for (line, key) in text.lines().zip(expected) {
            let (k, v) = line.split_once('=').ok_or_else(|| bad("missing key=value"))?;
            if k != key {
                return Err(bad(&format!("expected key {key}, got {k}")));
            }
            fields.insert(k.to_string(), v.to_string());
        }
        if fields.len() != expected.len() {
            return Err(bad("missing fields"));
        }
        let d: u32 = fields["d"].parse().map_err(|_| bad("bad d"))?;
        let q: u32 = fields["q"].parse().map_err(|_| bad("bad q"))?;
        let epsilon = SignPattern::parse(&fields["epsilon"])?;
        if epsilon.len() != q {
            return Err(bad("epsilon length differs from q"));
        }
        let rho = Rho::parse(q, &fields["rho"])?;
        let bad_count: u64 = fields["bad_count"].parse().map_err(|_| bad("bad bad_count"))?;
        let verified: bool = fields["verified"].parse().map_err(|_| bad("bad verified"))?;
        Ok(ExclusionCertificate {
            d,
            q,
            epsilon,
            rho,
            bad_count,
            verified,
            pattern_set_digest: fields["pattern_set_digest"].clone(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }
}

/// Full pipeline: build the bad set, take the first surviving rho, verify
/// it independently.
pub fn search_certificate(
    d: u32,
    q: u32,
    eps: &SignPattern,
    patterns: &PatternSet,
) -> Result<(Option<ExclusionCertificate>, u64)> {
    let outcome = build_bad_set(d, q, eps, patterns)?;
    match find_good_rho(&outcome.bad) {
        None => Ok((None, outcome.bad_count)),
        Some(rho) => {
            let verified = verify_exclusion(d, q, eps, &rho, patterns)?;
            Ok((
                Some(ExclusionCertificate {
                    d,
                    q,
                    epsilon: *eps,
                    rho,
                    bad_count: outcome.bad_count,
                    verified,
                    pattern_set_digest: patterns.digest(),
                }),
                outcome.bad_count,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_default;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn determined_rho_trivial_cases() {
        let p = SignPattern::parse("+++").unwrap();
        let rho = determined_rho(&p, 1, 0, &p, 3).unwrap();
        assert_eq!(rho.to_sign_string(), "++");
        let rho = determined_rho(&p, 1, 0, &p.negated(), 3).unwrap();
        assert_eq!(rho.to_sign_string(), "--");
    }

    #[test]
    fn determined_rho_worked_example() {
        // q=5, t=2, n=1: offsets n+i for i=1..5 are 2,3,4,0,1; the unit ones
        // determine rho at 2*2=4, 2*3=1, 2*4=3, 2*1=2
        let p = SignPattern::parse("+++++").unwrap();
        let eps = SignPattern::parse("-++++").unwrap();
        let rho = determined_rho(&p, 2, 1, &eps, 5).unwrap();
        assert_eq!(rho.eval(4).unwrap(), -1);
        assert_eq!(rho.eval(1).unwrap(), 1);
        assert_eq!(rho.eval(3).unwrap(), 1);
        assert_eq!(rho.eval(2).unwrap(), 1);
    }

    #[test]
    fn determined_rho_matches_brute_force() {
        // independent oracle: scan all rho and keep those matching on every
        // invertible offset
        let q = 5u32;
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let p = SignPattern::from_bits(q, rng.gen_range(0..32)).unwrap();
            let eps = SignPattern::from_bits(q, rng.gen_range(0..32)).unwrap();
            let t = [1u32, 2, 3, 4][rng.gen_range(0..4)];
            let n = rng.gen_range(0..q);
            let fast = determined_rho(&p, t, n, &eps, q).unwrap();
            let mut matches = Vec::new();
            for code in 0..(1u64 << 4) {
                let rho = Rho::decode(q, code).unwrap();
                let ok = (1..=q).all(|i| {
                    let c = (n + i) % q;
                    if gcd(c, q) != 1 {
                        return true;
                    }
                    let unit = (t * c) % q;
                    eps.sign(i) == p.sign(i) * rho.eval(unit).unwrap()
                });
                if ok {
                    matches.push(code);
                }
            }
            assert_eq!(matches, vec![fast.encode()]);
        }
    }

    #[test]
    fn empty_pattern_set_excludes_everything() {
        let patterns = PatternSet::from_bits(1, 5, Vec::new()).unwrap();
        let eps = SignPattern::parse("+-+-+").unwrap();
        let out = build_bad_set(1, 5, &eps, &patterns).unwrap();
        assert_eq!(out.bad_count, 0);
        let rho = find_good_rho(&out.bad).unwrap();
        assert_eq!(rho.encode(), 0);
        assert!(verify_exclusion(1, 5, &eps, &rho, &patterns).unwrap());
    }

    #[test]
    fn tiny_q_saturates() {
        // q = 3 sits far below the threshold: all four rho are excluded
        let patterns = enumerate_default(1, 3).unwrap();
        assert_eq!(patterns.count(), 8);
        for eps in ["+++", "+-+"] {
            let eps = SignPattern::parse(eps).unwrap();
            let out = build_bad_set(1, 3, &eps, &patterns).unwrap();
            assert_eq!(out.bad_count, 4);
            assert!(find_good_rho(&out.bad).is_none());
        }
    }

    #[test]
    fn membership_agrees_with_verifier() {
        // the two independent code paths must agree rho by rho
        let q = 11u32;
        let patterns = {
            // a small slice of the length-11 line patterns keeps this cheap
            let full = enumerate_default(1, 11).unwrap();
            let some: Vec<u64> = full.bits().iter().copied().take(40).collect();
            PatternSet::from_bits(1, 11, some).unwrap()
        };
        let eps = SignPattern::parse("+-++-+-++--").unwrap();
        let out = build_bad_set(1, q, &eps, &patterns).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10_000 {
            let code = rng.gen_range(0..(1u64 << 10));
            let rho = Rho::decode(q, code).unwrap();
            let excluded = verify_exclusion(1, q, &eps, &rho, &patterns).unwrap();
            assert_eq!(excluded, !out.bad.contains(&rho), "code {code}");
        }
    }

    #[test]
    fn determined_rho_is_not_excluded_by_verifier() {
        let patterns = enumerate_default(1, 5).unwrap();
        let eps = SignPattern::parse("++-+-").unwrap();
        let p = SignPattern::from_bits(5, patterns.bits()[3]).unwrap();
        let rho = determined_rho(&p, 2, 3, &eps, 5).unwrap();
        assert!(!verify_exclusion(1, 5, &eps, &rho, &patterns).unwrap());
    }

    #[test]
    fn certificate_round_trip() {
        let cert = ExclusionCertificate {
            d: 1,
            q: 5,
            epsilon: SignPattern::parse("+-+-+").unwrap(),
            rho: Rho::parse(5, "+--+").unwrap(),
            bad_count: 17,
            verified: true,
            pattern_set_digest: "abc123".into(),
        };
        let bytes = cert.to_bytes();
        let back = ExclusionCertificate::parse(std::str::from_utf8(&bytes).unwrap()).unwrap();
        assert_eq!(cert, back);
    }

    #[test]
    fn certificate_rejects_mangled_input() {
        assert!(ExclusionCertificate::parse("d=1\nq=5\n").is_err());
        let cert = ExclusionCertificate {
            d: 1,
            q: 5,
            epsilon: SignPattern::parse("+-+-+").unwrap(),
            rho: Rho::parse(5, "+--+").unwrap(),
            bad_count: 17,
            verified: true,
            pattern_set_digest: "abc123".into(),
        };
        let mut text = String::from_utf8(cert.to_bytes()).unwrap();
        text = text.replace("epsilon=+-+-+", "epsilon=+-+-");
        assert!(ExclusionCertificate::parse(&text).is_err());
    }
}
