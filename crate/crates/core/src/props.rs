//! Checks of the two counting propositions against exactly enumerated
//! pattern sets: completeness at length 2r+2, and the 2 m^r / (2r-1)!!
//! lower bound on m-term pattern counts.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::bounds::pattern_count_lower_bound;
use crate::enumerate::{enumerate_patterns, EnumOptions};
use crate::error::{Error, Result};
use crate::pattern::{PatternSet, SignPattern};

/// Outcome of the completeness check at k = 2r + 2.
#[derive(Debug)]
pub struct CompletenessReport {
    pub r: u32,
    pub k: u32,
    pub count: u64,
    pub expected: u64,
    pub pass: bool,
    /// A missing pattern, when the check fails.
    pub witness: Option<SignPattern>,
}

/// All 2^{2r+2} patterns must appear in a set of length 2r+2.
pub fn check_all_patterns_appear(patterns: &PatternSet, r: u32) -> Result<CompletenessReport> {
    let k = 2 * r + 2;
    if patterns.k() != k {
        return Err(Error::PatternLengthMismatch {
            expected: k,
            got: patterns.k(),
        });
    }
    let expected = 1u64 << k;
    let count = patterns.count();
    let witness = if count == expected {
        None
    } else {
        (0..expected)
            .map(|bits| SignPattern::from_bits(k, bits).unwrap())
            .find(|p| !patterns.contains(p))
    };
    Ok(CompletenessReport {
        r,
        k,
        count,
        expected,
        pass: count == expected,
        witness,
    })
}

#[derive(Debug)]
pub struct CountBoundEntry {
    pub m: u32,
    pub count: u64,
    pub bound: BigRational,
    pub pass: bool,
}

#[derive(Debug)]
pub struct CountBoundReport {
    pub d: u32,
    pub r: u32,
    pub entries: Vec<CountBoundEntry>,
    pub pass: bool,
}

/// For each m in the range, the enumerated count must reach the
/// 2 m^r / (2r-1)!! lower bound.
pub fn check_count_lower_bound(
    d: u32,
    r: u32,
    m_range: std::ops::RangeInclusive<u32>,
    opts: &EnumOptions,
) -> Result<CountBoundReport> {
    let mut entries = Vec::new();
    for m in m_range {
        if m == 0 {
            continue;
        }
        let outcome = enumerate_patterns(d, m, opts)?;
        let count = outcome.set.count();
        let bound = pattern_count_lower_bound(m as u64, r)?;
        let pass = BigRational::from_integer(BigInt::from(count)) >= bound;
        entries.push(CountBoundEntry {
            m,
            count,
            bound,
            pass,
        });
    }
    let pass = entries.iter().all(|e| e.pass);
    Ok(CountBoundReport {
        d,
        r,
        entries,
        pass,
    })
}
