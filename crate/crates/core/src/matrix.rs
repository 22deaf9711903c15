//! Exact integer matrices expressing polynomial composition in binomial
//! coordinates: u' = M u gives the coordinates of f(x+1), f(x+m), or f(a x).

use num_bigint::BigInt;
use num_rational::BigRational;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{binomial_i128, BinomialCoords, Polynomial};

/// Dense (d+1) x (d+1) integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix {
            n,
            entries: vec![BigInt::zero(); n * n],
        };
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = IntMatrix {
            n,
            entries: vec![BigInt::zero(); n * n],
        };
        for i in 0..n {
            for k in 0..n {
                let a = self.entry(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = a * other.entry(k, j);
                    out.entries[i * n + j] += t;
                }
            }
        }
        out
    }

    /// Applies the matrix to a rational coordinate vector.
    pub fn apply(&self, u: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(u.len(), self.n);
        (0..self.n)
            .map(|i| {
                let mut acc = BigRational::zero();
                for j in 0..self.n {
                    acc += BigRational::from_integer(self.entry(i, j).clone()) * &u[j];
                }
                acc
            })
            .collect()
    }
}


/// Builds the matrix of a composition x -> sigma(x) from the binomial
/// coordinates of the composed basis polynomials: column j holds the
/// coordinates of C(sigma(x), j). Entries are checked to be integers;
/// a fractional entry means the basis arithmetic is broken.
fn composition_from<F>(d: usize, compose: F) -> Result<IntMatrix>
where
    F: Fn(&Polynomial<BigRational>) -> Polynomial<BigRational>,
{
    let n = d + 1;
    let mut m = IntMatrix {
        n,
        entries: vec![BigInt::zero(); n * n],
    };
    for j in 0..n {
        let mut u = vec![BigRational::zero(); n];
        u[j] = BigRational::one();
        let basis = BinomialCoords::from_vec(u).to_poly();
        let composed = compose(&basis);
        let coords = BinomialCoords::from_poly(&composed);
        for (i, c) in coords.coords().iter().enumerate() {
            if !c.is_integer() {
                return Err(Error::NonIntegralEntry {
                    row: i,
                    col: j,
                    value: c.to_string(),
                });
            }
            m.set(i, j, c.to_integer());
        }
    }
    Ok(m)
}

/// Matrix of f(x) -> f(x + 1) in binomial coordinates.
pub fn shift_matrix(d: usize) -> Result<IntMatrix> {
    composition_from(d, |f| f.compose_shift(1))
}

/// Matrix of f(x) -> f(a x) in binomial coordinates, a >= 1.
pub fn scale_matrix(a: u64, d: usize) -> Result<IntMatrix> {
    if a == 0 {
        return Err(Error::BadArgument("scale factor must be >= 1".into()));
    }
    composition_from(d, |f| f.compose_scale(a as i64))
}

/// Matrix of f(x) -> f(x + m) built directly from C(x + m, j) =
/// sum_i C(m, j - i) C(x, i). Fast path for iterated shifts.
pub fn shift_pow_matrix(m: i64, d: usize) -> IntMatrix {
    let n = d + 1;
    let mut out = IntMatrix {
        n,
        entries: vec![BigInt::zero(); n * n],
    };
    for i in 0..n {
        for j in 0..n {
            if j >= i {
                out.set(i, j, big_binomial(m, (j - i) as u32));
            }
        }
    }
    out
}

/// C(m, j) as a BigInt for any integer m (m may exceed the i128 comfort zone
/// only through j, which stays tiny here).
pub fn big_binomial(m: i64, j: u32) -> BigInt {
    if j <= 20 && m.unsigned_abs() < (1 << 40) {
        return BigInt::from(binomial_i128(m, j));
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..j as i64 {
        num *= BigInt::from(m - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn as_i64(m: &IntMatrix) -> Vec<Vec<i64>> {
        (0..m.size())
            .map(|i| (0..m.size()).map(|j| m.entry(i, j).to_i64().unwrap()).collect())
            .collect()
    }

    #[test]
    fn shift_d1_adds_coordinates() {
        // C(x+1,1) = C(x,1) + C(x,0): u' = (u0 + u1, u1)
        let m = shift_matrix(1).unwrap();
        assert_eq!(as_i64(&m), vec![vec![1, 1], vec![0, 1]]);
    }

    #[test]
    fn scale_identity_and_double() {
        assert_eq!(scale_matrix(1, 3).unwrap(), IntMatrix::identity(4));
        // C(2x,1) = 2 C(x,1): u' = (u0, 2 u1)
        let m = scale_matrix(2, 1).unwrap();
        assert_eq!(as_i64(&m), vec![vec![1, 0], vec![0, 2]]);
    }

    #[test]
    fn scale_matrices_compose() {
        for d in 0..=4usize {
            for a in 1..=6u64 {
                for b in 1..=6u64 {
                    let ab = scale_matrix(a * b, d).unwrap();
                    let prod = scale_matrix(a, d).unwrap().mul(&scale_matrix(b, d).unwrap());
                    assert_eq!(ab, prod, "a={a} b={b} d={d}");
                }
            }
        }
    }

    #[test]
    fn shift_pow_matches_iterated_shift() {
        for d in 0..=4usize {
            let s = shift_matrix(d).unwrap();
            let mut acc = IntMatrix::identity(d + 1);
            for m in 0..=12i64 {
                assert_eq!(shift_pow_matrix(m, d), acc, "m={m} d={d}");
                acc = s.mul(&acc);
            }
        }
    }

    #[test]
    fn shift_and_scale_intertwine() {
        // f(a(x+1)) = f(ax + a): shift . scale_a == scale_a . shift^a
        for d in 0..=3usize {
            for a in 1..=5i64 {
                let lhs = shift_matrix(d).unwrap().mul(&scale_matrix(a as u64, d).unwrap());
                let rhs = scale_matrix(a as u64, d).unwrap().mul(&shift_pow_matrix(a, d));
                assert_eq!(lhs, rhs);
            }
        }
    }
}
