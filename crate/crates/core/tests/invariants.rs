//! Cross-module invariants: the algebra tying the coset index to the exact
//! counting bound, emission limits at a vertex, and independence of the
//! results from the parallel shard layout.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use polysign::bounds::{mainbound_exact, vertex_cell_bound};
use polysign::enumerate::{enumerate_default, vertex_patterns, VertexCandidate};
use polysign::exclusion::{build_bad_set, find_good_rho};
use polysign::lattice::coset_representatives;
use polysign::pattern::SignPattern;

fn subsets(k: u32, size: u32) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let size = size as usize;
    let mut s: Vec<i64> = (1..=size as i64).collect();
    if size > k as usize {
        return out;
    }
    loop {
        out.push(s.clone());
        let mut i = size;
        let advanced = loop {
            if i == 0 {
                break false;
            }
            i -= 1;
            if s[i] < (k as i64) - (size as i64 - 1 - i as i64) {
                s[i] += 1;
                for j in i + 1..size {
                    s[j] = s[j - 1] + 1;
                }
                break true;
            }
        };
        if !advanced {
            return out;
        }
    }
}

#[test]
fn coset_index_sum_matches_exact_bound() {
    // sum over supports of the representative count, times 2^{d+1}/(d+2),
    // is exactly the counting bound
    for d in 0..=3u32 {
        for k in d + 1..=10 {
            let mut rep_sum = BigInt::zero();
            for s in subsets(k, d + 1) {
                rep_sum += BigInt::from(coset_representatives(&s, d).unwrap().len());
            }
            let lhs = mainbound_exact(d, k).unwrap()
                * BigRational::from_integer(BigInt::from(d as i64 + 2));
            let rhs = BigRational::from_integer(rep_sum * BigInt::from(2).pow(d + 1));
            assert_eq!(lhs, rhs, "d={d} k={k}");
        }
    }
}

#[test]
fn vertex_emissions_respect_cell_bound() {
    // every emitted T-subset family stays within 2 sum_{i<=d} C(m-1, i)
    for (s, values, k, d) in [
        (vec![1i64, 2], vec![0i64, 1], 6u32, 1u32), // integer line, m = 6
        (vec![1, 3], vec![0, 1], 8, 1),             // half-integer slope
        (vec![1, 2, 3], vec![0, 0, 1], 8, 2),
        (vec![2, 4, 6, 8], vec![1, 0, 0, 1], 9, 3),
    ] {
        let cand = VertexCandidate::new(s, values, k, d).unwrap();
        let m = cand.integer_points().len() as u32;
        let bound = vertex_cell_bound(m, d).unwrap();
        let emitted = vertex_patterns(&cand, d).len();
        assert!(
            BigInt::from(emitted) <= bound,
            "emitted {emitted} exceeds bound {bound} at m={m} d={d}"
        );
    }
}

#[test]
fn vertex_walk_union_equals_enumeration() {
    // the public per-vertex operation, unioned over every support set and
    // coset representative, must reproduce the optimized enumerator
    for (d, k) in [(1u32, 5u32), (1, 6), (2, 5)] {
        let mut union = std::collections::HashSet::new();
        for s in subsets(k, d + 1) {
            for values in coset_representatives(&s, d).unwrap() {
                let cand = VertexCandidate::new(s.clone(), values, k, d).unwrap();
                for p in vertex_patterns(&cand, d) {
                    union.insert(p.bits());
                }
            }
        }
        let direct = enumerate_default(d, k).unwrap();
        let rebuilt =
            polysign::PatternSet::from_bits(d, k, union.into_iter().collect()).unwrap();
        assert_eq!(rebuilt.bits(), direct.bits(), "d={d} k={k}");
    }
}

#[test]
fn enumeration_is_independent_of_thread_count() {
    let serial_pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let serial = serial_pool.install(|| enumerate_default(2, 9).unwrap());
    let parallel = enumerate_default(2, 9).unwrap();
    assert_eq!(serial, parallel);
}

#[test]
fn bad_set_is_independent_of_thread_count() {
    let patterns = enumerate_default(1, 7).unwrap();
    let eps = SignPattern::parse("+-++--+").unwrap();
    let serial_pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let serial = serial_pool.install(|| build_bad_set(1, 7, &eps, &patterns).unwrap());
    let parallel = build_bad_set(1, 7, &eps, &patterns).unwrap();
    assert_eq!(serial.bad_count, parallel.bad_count);
    assert_eq!(
        find_good_rho(&serial.bad).map(|r| r.encode()),
        find_good_rho(&parallel.bad).map(|r| r.encode())
    );
    for code in 0..(1u64 << 6) {
        let rho = polysign::Rho::decode(7, code).unwrap();
        assert_eq!(serial.bad.contains(&rho), parallel.bad.contains(&rho));
    }
}
