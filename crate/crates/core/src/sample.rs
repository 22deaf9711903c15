//! Randomized oracle for the pattern enumerator: draw torus points with
//! dyadic coordinates (53 fractional bits, so floors are exact integer
//! arithmetic), read the sign pattern directly, and union in a deterministic
//! grid sweep. The result is always a subset of the true image; at small
//! (d, k) it saturates and equals it.

use rayon::prelude::*;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pattern::{PatternSet, SignPattern, MAX_PATTERN_LEN};
use crate::poly::binomial_i128;

pub const FRAC_BITS: u32 = 53;

const BATCH: u64 = 100_000;

/// Reads the pattern of the point with mantissa coordinates `u`
/// (coordinate j is u[j] / 2^53, in [0,2)).
fn pattern_of_mantissas(u: &[i128], binom: &[Vec<i128>], k: u32) -> u64 {
    let mut bits = 0u64;
    for n in 0..k as usize {
        let mut acc: i128 = 0;
        for (j, &uj) in u.iter().enumerate() {
            acc += uj * binom[n][j];
        }
        let floor = acc >> FRAC_BITS;
        if floor & 1 == 1 {
            bits |= 1 << n;
        }
    }
    bits
}

/// Grid resolution per coordinate, sized so the sweep stays around 10^6
/// points. Deterministic and independent of the trial budget.
fn grid_resolution(d: u32) -> u64 {
    match d {
        0 => 4096,
        1 => 1024,
        2 => 64,
        3 => 32,
        4 => 16,
        _ => 4,
    }
}

/// Patterns seen over `trials` random dyadic points plus the grid sweep.
pub fn sample_patterns(d: u32, k: u32, trials: u64, seed: u64) -> Result<PatternSet> {
    if k == 0 {
        return Err(Error::EmptyWindow);
    }
    if k > MAX_PATTERN_LEN {
        return Err(Error::PatternTooLong(k));
    }
    let n = d as usize + 1;
    let binom: Vec<Vec<i128>> = (1..=k as i64)
        .map(|m| (0..n).map(|j| binomial_i128(m, j as u32)).collect())
        .collect();
    let two: i128 = 1 << (FRAC_BITS + 1);

    let batches = trials.div_ceil(BATCH);
    let mut sets: Vec<std::collections::HashSet<u64>> = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch);
            let count = BATCH.min(trials - batch * BATCH);
            let mut local = std::collections::HashSet::new();
            let mut u = vec![0i128; n];
            for _ in 0..count {
                for uj in u.iter_mut() {
                    *uj = rng.gen_range(0..two as u64) as i128;
                }
                local.insert(pattern_of_mantissas(&u, &binom, k));
            }
            local
        })
        .collect();

    // structured sweep: all grid points of a fixed dyadic lattice, including 0
    let g = grid_resolution(d);
    let step = (two as u64) / g;
    let mut grid_set = std::collections::HashSet::new();
    let mut idx = vec![0u64; n];
    let mut u = vec![0i128; n];
    loop {
        for (j, &i) in idx.iter().enumerate() {
            u[j] = (i * step) as i128;
        }
        grid_set.insert(pattern_of_mantissas(&u, &binom, k));
        let mut j = 0;
        loop {
            if j == n {
                sets.push(grid_set);
                let mut all = std::collections::HashSet::new();
                for s in sets {
                    all.extend(s);
                }
                return PatternSet::from_bits(d, k, all.into_iter().collect());
            }
            idx[j] += 1;
            if idx[j] < g {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// The pattern of a single named dyadic point, exposed for spot checks.
pub fn pattern_of_point(d: u32, k: u32, mantissas: &[u64]) -> Result<SignPattern> {
    if mantissas.len() != d as usize + 1 {
        return Err(Error::BadSupportSize {
            expected: d as usize + 1,
            got: mantissas.len(),
        });
    }
    let n = d as usize + 1;
    let binom: Vec<Vec<i128>> = (1..=k as i64)
        .map(|m| (0..n).map(|j| binomial_i128(m, j as u32)).collect())
        .collect();
    let u: Vec<i128> = mantissas.iter().map(|&x| x as i128).collect();
    SignPattern::from_bits(k, pattern_of_mantissas(&u, &binom, k))
}
