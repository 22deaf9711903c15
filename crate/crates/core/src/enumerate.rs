//! Exact enumeration of the floor-sign patterns of degree-d polynomials.
//!
//! Every realizable pattern is attained near a polynomial that takes integer
//! values on at least d+1 of the window points. We therefore walk all
//! (d+1)-point support sets S, all value cosets modulo the even-valued
//! lattice, and for each interpolated vertex g emit the patterns of the
//! cells meeting at g: outside the integer set the floor of g decides the
//! sign, on the integer set a subset T with at most d sign changes decides
//! which side of each integer wall the cell lies on. A degree-d perturbation
//! can realize exactly the T's with at most d sign changes, so the union is
//! the exact image.

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{coset_count, lattice_hnf_diag};
use crate::pattern::{PatternSet, SignPattern, MAX_PATTERN_LEN};
use crate::poly::Polynomial;

#[derive(Debug, Clone)]
pub struct EnumOptions {
    /// Ceiling on the predicted number of emitted pattern candidates.
    pub budget: u128,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            budget: 1_000_000_000,
        }
    }
}

#[derive(Debug)]
pub struct EnumOutcome {
    pub set: PatternSet,
    /// Interpolated vertex candidates processed.
    pub vertices: u64,
    /// Pattern emissions before deduplication.
    pub emitted: u64,
}

/// A polynomial taking prescribed integer values on a (d+1)-point support.
#[derive(Debug, Clone)]
pub struct VertexCandidate {
    s: Vec<i64>,
    values: Vec<i64>,
    g: Polynomial<BigRational>,
    s_full: Vec<i64>,
    k: u32,
}

impl VertexCandidate {
    pub fn new(s: Vec<i64>, values: Vec<i64>, k: u32, d: u32) -> Result<Self> {
        if s.len() != d as usize + 1 || values.len() != s.len() {
            return Err(Error::BadSupportSize {
                expected: d as usize + 1,
                got: s.len(),
            });
        }
        let points: Vec<(i64, BigRational)> = s
            .iter()
            .zip(&values)
            .map(|(&x, &v)| (x, BigRational::from_integer(BigInt::from(v))))
            .collect();
        let g = Polynomial::interpolate(&points)?;
        let s_full = (1..=k as i64)
            .filter(|&n| g.evaluate(n).is_integer())
            .collect();
        Ok(VertexCandidate {
            s,
            values,
            g,
            s_full,
            k,
        })
    }

    pub fn support(&self) -> &[i64] {
        &self.s
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn polynomial(&self) -> &Polynomial<BigRational> {
        &self.g
    }

    pub fn integer_points(&self) -> &[i64] {
        &self.s_full
    }
}

/// Advances `combo` to the lexicographically next size-|combo| subset of
/// 0..n; returns false when exhausted.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let c = combo.len();
    let mut i = c;
    while i > 0 {
        i -= 1;
        if combo[i] < n - c + i {
            combo[i] += 1;
            for j in i + 1..c {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Walks every indicator sequence over `m` positions with at most `d` value
/// changes, calling `f` with the bitmask of positions holding value 1.
fn for_each_change_limited_mask(positions: &[u32], d: u32, mut f: impl FnMut(u64)) {
    let m = positions.len();
    if m == 0 {
        f(0);
        return;
    }
    let gaps = m - 1;
    let max_changes = (d as usize).min(gaps);
    for first in 0..2u8 {
        for changes in 0..=max_changes {
            // combo holds gap indices; gap i sits before position i+1
            let mut combo: Vec<usize> = (0..changes).collect();
            loop {
                let mut mask = 0u64;
                let mut cur = first;
                let mut next = 0usize;
                for (i, &pos) in positions.iter().enumerate() {
                    if next < changes && i == combo[next] + 1 {
                        cur ^= 1;
                        next += 1;
                    }
                    if cur == 1 {
                        mask |= 1 << pos;
                    }
                }
                f(mask);
                if !next_combination(&mut combo, gaps) {
                    break;
                }
            }
        }
    }
}

/// The set of sign patterns of the cells having `cand` as a corner, by the
/// symbolic rule: off the integer set the floor of g decides, on it the
/// membership in T decides, with T limited to d sign changes.
pub fn vertex_patterns(cand: &VertexCandidate, d: u32) -> Vec<SignPattern> {
    let k = cand.k;
    let mut base = 0u64;
    let mut positions = Vec::new();
    for n in 1..=k as i64 {
        let v = cand.g.evaluate(n);
        let bit = if v.is_integer() {
            positions.push((n - 1) as u32);
            // T-empty state: exponent g(n) - 1
            (v.to_integer() - 1i32).mod_floor(&BigInt::from(2)) == BigInt::from(1)
        } else {
            v.floor().to_integer().mod_floor(&BigInt::from(2)) == BigInt::from(1)
        };
        if bit {
            base |= 1 << (n - 1);
        }
    }
    let mut out = Vec::new();
    for_each_change_limited_mask(&positions, d, |mask| {
        out.push(base ^ mask);
    });
    out.sort_unstable_by_key(|&b| SignPattern::order_key(b, k));
    out.dedup();
    out.into_iter()
        .map(|b| SignPattern::from_bits(k, b).unwrap())
        .collect()
}

/// Upper bound on the work of a full enumeration, in emitted candidates.
pub fn predicted_work(d: u32, k: u32) -> u128 {
    if k <= d {
        return 1u128 << k.min(127);
    }
    let mut total = BigInt::zero();
    let factor = BigInt::from(2).pow(d + 1);
    for_each_subset(k, d + 1, |s| {
        total += coset_count(s, d) * &factor;
    });
    total.to_u128().unwrap_or(u128::MAX)
}

fn for_each_subset(k: u32, size: u32, mut f: impl FnMut(&[i64])) {
    let size = size as usize;
    let mut s: Vec<i64> = (1..=size as i64).collect();
    if size > k as usize {
        return;
    }
    loop {
        f(&s);
        let mut i = size;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if s[i] < (k as i64) - (size as i64 - 1 - i as i64) {
                s[i] += 1;
                for j in i + 1..size {
                    s[j] = s[j - 1] + 1;
                }
                break;
            }
        }
    }
}

enum Sink {
    BitVec(Vec<AtomicU64>),
    Hash(std::sync::Mutex<std::collections::HashSet<u64>>),
}

impl Sink {
    fn new(k: u32) -> Sink {
        if k <= 30 {
            let words = (1usize << k).div_ceil(64);
            Sink::BitVec((0..words).map(|_| AtomicU64::new(0)).collect())
        } else {
            Sink::Hash(std::sync::Mutex::new(std::collections::HashSet::new()))
        }
    }

    fn insert_all(&self, local: &[u64]) {
        match self {
            Sink::BitVec(words) => {
                for &bits in local {
                    words[(bits >> 6) as usize].fetch_or(1u64 << (bits & 63), Ordering::Relaxed);
                }
            }
            Sink::Hash(set) => {
                set.lock().unwrap().extend(local.iter().copied());
            }
        }
    }

    fn into_bits(self) -> Vec<u64> {
        match self {
            Sink::BitVec(words) => {
                let mut out = Vec::new();
                for (w, word) in words.into_iter().enumerate() {
                    let mut v = word.into_inner();
                    while v != 0 {
                        let b = v.trailing_zeros();
                        out.push((w as u64) * 64 + b as u64);
                        v &= v - 1;
                    }
                }
                out
            }
            Sink::Hash(set) => set.into_inner().unwrap().into_iter().collect(),
        }
    }
}

/// Exactly the set of length-k sign patterns realizable by degree <= d
/// polynomials, or an error if the predicted work exceeds the budget.
pub fn enumerate_patterns(d: u32, k: u32, opts: &EnumOptions) -> Result<EnumOutcome> {
    if k == 0 {
        return Err(Error::EmptyWindow);
    }
    if k > MAX_PATTERN_LEN {
        return Err(Error::PatternTooLong(k));
    }
    let predicted = predicted_work(d, k);
    if predicted > opts.budget {
        return Err(Error::BudgetExceeded {
            predicted,
            budget: opts.budget,
        });
    }
    if k <= d {
        // values at up to d+1 points are free, every pattern occurs
        let bits: Vec<u64> = (0..(1u128 << k)).map(|b| b as u64).collect();
        let n = bits.len() as u64;
        return Ok(EnumOutcome {
            set: PatternSet::from_bits(d, k, bits)?,
            vertices: 0,
            emitted: n,
        });
    }

    let mut subsets = Vec::new();
    for_each_subset(k, d + 1, |s| subsets.push(s.to_vec()));

    let sink = Sink::new(k);
    let vertices = AtomicU64::new(0);
    let emitted = AtomicU64::new(0);

    subsets
        .par_iter()
        .try_for_each(|s| process_subset(s, d, k, &sink, &vertices, &emitted, false))?;

    let set = PatternSet::from_bits(d, k, sink.into_bits())?;
    Ok(EnumOutcome {
        set,
        vertices: vertices.load(Ordering::Relaxed),
        emitted: emitted.load(Ordering::Relaxed),
    })
}

/// Per-support-set walk. The interpolation through the value vector is
/// expressed with integer numerators over a common denominator L, so the
/// inner loop is pure integer arithmetic; a BigRational fallback covers
/// parameter ranges whose intermediate bounds do not fit in i128.
fn process_subset(
    s: &[i64],
    d: u32,
    k: u32,
    sink: &Sink,
    vertices: &AtomicU64,
    emitted: &AtomicU64,
    force_slow: bool,
) -> Result<()> {
    let n = d as usize + 1;
    let diag = lattice_hnf_diag(s, d)?;

    // Lagrange denominators D_i = prod_{j != i} (s_i - s_j) and L = lcm |D_i|
    let denoms: Vec<BigInt> = (0..n)
        .map(|i| {
            let mut acc = BigInt::from(1);
            for j in 0..n {
                if j != i {
                    acc *= BigInt::from(s[i] - s[j]);
                }
            }
            acc
        })
        .collect();
    let mut l = BigInt::from(1);
    for dv in &denoms {
        l = l.lcm(&dv.abs());
    }
    // W[i][n-1] = prod_{j != i} (n - s_j) * (L / D_i)
    let weights: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let scale = &l / &denoms[i];
            (1..=k as i64)
                .map(|m| {
                    let mut acc = scale.clone();
                    for j in 0..n {
                        if j != i {
                            acc *= BigInt::from(m - s[j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();

    // overflow bound for the fast path: |G| <= sum_i diag_i * max |W_i|
    let mut bound = BigInt::zero();
    for (i, row) in weights.iter().enumerate() {
        let maxw = row.iter().map(|w| w.abs()).max().unwrap();
        bound += BigInt::from(diag[i]) * maxw;
    }
    let fast = !force_slow
        && bound < BigInt::from(i128::MAX / 8)
        && l < BigInt::from(i128::MAX / 8);

    let mut local_bits: Vec<u64> = Vec::with_capacity(4096);
    let mut local_emitted = 0u64;
    let mut local_vertices = 0u64;

    if fast {
        let l: i128 = l.to_i128().unwrap();
        let w: Vec<Vec<i128>> = weights
            .iter()
            .map(|row| row.iter().map(|x| x.to_i128().unwrap()).collect())
            .collect();
        // odometer over the HNF box with incremental value updates
        let mut g = vec![0i128; k as usize];
        let mut v = vec![0i128; n];
        let mut positions: Vec<u32> = Vec::with_capacity(k as usize);
        loop {
            local_vertices += 1;
            let mut base = 0u64;
            positions.clear();
            for (idx, &gv) in g.iter().enumerate() {
                let q = gv.div_euclid(l);
                let r = gv.rem_euclid(l);
                let bit = if r == 0 {
                    positions.push(idx as u32);
                    (q - 1).rem_euclid(2) == 1
                } else {
                    q.rem_euclid(2) == 1
                };
                if bit {
                    base |= 1 << idx;
                }
            }
            for_each_change_limited_mask(&positions, d, |mask| {
                local_bits.push(base ^ mask);
                local_emitted += 1;
            });
            if local_bits.len() >= 3072 {
                sink.insert_all(&local_bits);
                local_bits.clear();
            }
            // advance the odometer
            let mut i = 0;
            loop {
                if i == n {
                    sink.insert_all(&local_bits);
                    vertices.fetch_add(local_vertices, Ordering::Relaxed);
                    emitted.fetch_add(local_emitted, Ordering::Relaxed);
                    return Ok(());
                }
                v[i] += 1;
                if v[i] < diag[i] {
                    for (m, gm) in g.iter_mut().enumerate() {
                        *gm += w[i][m];
                    }
                    break;
                }
                v[i] = 0;
                for (m, gm) in g.iter_mut().enumerate() {
                    *gm -= (diag[i] - 1) * w[i][m];
                }
                i += 1;
            }
        }
    } else {
        // exact fallback: same walk in rational arithmetic
        let two = BigInt::from(2);
        let mut v = vec![0i64; n];
        let mut positions: Vec<u32> = Vec::with_capacity(k as usize);
        loop {
            local_vertices += 1;
            let mut base = 0u64;
            positions.clear();
            for m in 1..=k as i64 {
                let mut num = BigInt::zero();
                for i in 0..n {
                    num += BigInt::from(v[i]) * &weights[i][(m - 1) as usize];
                }
                let val = BigRational::new(num, l.clone());
                let idx = (m - 1) as usize;
                let bit = if val.is_integer() {
                    positions.push(idx as u32);
                    (val.to_integer() - 1i32).mod_floor(&two) == BigInt::from(1)
                } else {
                    val.floor().to_integer().mod_floor(&two) == BigInt::from(1)
                };
                if bit {
                    base |= 1 << idx;
                }
            }
            for_each_change_limited_mask(&positions, d, |mask| {
                local_bits.push(base ^ mask);
                local_emitted += 1;
            });
            if local_bits.len() >= 3072 {
                sink.insert_all(&local_bits);
                local_bits.clear();
            }
            let mut i = 0;
            loop {
                if i == n {
                    sink.insert_all(&local_bits);
                    vertices.fetch_add(local_vertices, Ordering::Relaxed);
                    emitted.fetch_add(local_emitted, Ordering::Relaxed);
                    return Ok(());
                }
                v[i] += 1;
                if (v[i] as i128) < diag[i] {
                    break;
                }
                v[i] = 0;
                i += 1;
            }
        }
    }
}

/// Convenience wrapper with default options, for the common small cases.
pub fn enumerate_default(d: u32, k: u32) -> Result<PatternSet> {
    enumerate_patterns(d, k, &EnumOptions::default()).map(|o| o.set)
}
