//! The value lattice attached to a support set S: prescribed integer values
//! on S, modulo the values of polynomials that are even integers on all of Z.
//! That sublattice is spanned by the columns (2 C(s, j))_{s in S}, and coset
//! representatives are enumerated from the column Hermite normal form.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::binomial_i128;

/// prod_{x > y in S} (x - y), exact.
pub fn vandermonde(s: &[i64]) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..s.len() {
        for j in 0..i {
            acc *= BigInt::from(s[i] - s[j]);
        }
    }
    acc
}

/// prod_{n=1}^{d} n!
pub fn factorial_product(d: u32) -> BigInt {
    let mut acc = BigInt::one();
    let mut fact = BigInt::one();
    for n in 1..=d as u64 {
        fact *= BigInt::from(n);
        acc *= &fact;
    }
    acc
}

fn check_support(s: &[i64], d: u32) -> Result<()> {
    if s.len() != d as usize + 1 {
        return Err(Error::BadSupportSize {
            expected: d as usize + 1,
            got: s.len(),
        });
    }
    for w in s.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::BadSupportSet);
        }
    }
    Ok(())
}

/// Lower-triangular column basis of the lattice spanned by the columns
/// (2 C(s, j))_j, obtained by integer column reduction. The diagonal gives
/// the box of coset representatives.
pub fn lattice_hnf_diag(s: &[i64], d: u32) -> Result<Vec<i128>> {
    check_support(s, d)?;
    let n = d as usize + 1;
    // cols[j][r] = 2 * C(s_r, j)
    let mut cols: Vec<Vec<i128>> = (0..n)
        .map(|j| s.iter().map(|&x| 2 * binomial_i128(x, j as u32)).collect())
        .collect();
    let mut piv = 0usize;
    for r in 0..n {
        loop {
            let mut nz: Vec<usize> = (piv..n).filter(|&j| cols[j][r] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            nz.sort_by_key(|&j| cols[j][r].unsigned_abs());
            let j0 = nz[0];
            for &j in &nz[1..] {
                let q = cols[j][r].div_euclid(cols[j0][r]);
                for rr in 0..n {
                    let t = q * cols[j0][rr];
                    cols[j][rr] -= t;
                }
            }
        }
        if let Some(j0) = (piv..n).find(|&j| cols[j][r] != 0) {
            cols.swap(piv, j0);
            if cols[piv][r] < 0 {
                for rr in 0..n {
                    cols[piv][rr] = -cols[piv][rr];
                }
            }
            piv += 1;
        }
    }
    if piv != n {
        // the basis columns are linearly independent, so this cannot happen
        return Err(Error::BadArgument(
            "value lattice is rank deficient".into(),
        ));
    }
    Ok((0..n).map(|i| cols[i][i]).collect())
}

/// The exact number of coset representatives: 2^{d+1} vandermonde(S) / prod n!.
pub fn coset_count(s: &[i64], d: u32) -> BigInt {
    let num = BigInt::from(2).pow(d + 1) * vandermonde(s);
    num / factorial_product(d)
}

/// A complete, duplicate-free list of coset representatives of Z^{d+1}
/// modulo the lattice, as integer value vectors on S. The list length is
/// checked against the closed-form index.
pub fn coset_representatives(s: &[i64], d: u32) -> Result<Vec<Vec<i64>>> {
    let diag = lattice_hnf_diag(s, d)?;
    let expected = coset_count(s, d);
    let mut total = BigInt::one();
    for &h in &diag {
        total *= BigInt::from(h);
    }
    debug_assert_eq!(total, expected, "HNF diagonal disagrees with the index");
    if total != expected {
        return Err(Error::BadArgument(format!(
            "coset index mismatch for S={s:?}: {total} vs {expected}"
        )));
    }
    let mut reps = Vec::new();
    let n = diag.len();
    let mut v = vec![0i64; n];
    loop {
        reps.push(v.clone());
        let mut i = 0;
        loop {
            if i == n {
                return Ok(reps);
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
