//! Polynomials of bounded degree over an exact or floating scalar type.
//!
//! Everything here is generic over the coefficient scalar; the rest of the
//! crate instantiates it with `BigRational` so that floors and integrality
//! tests are exact. The degree bound is part of every value: a polynomial
//! carries exactly `d + 1` coefficients, trailing zeros permitted.

use num_traits::{FromPrimitive, Num, Signed};

use crate::error::{Error, Result};

/// Scalar types the polynomial core works over: `f32`/`f64` for quick
/// numeric experiments, `BigRational` wherever results must be exact.
pub trait Scalar: Num + Signed + Clone + PartialOrd + FromPrimitive {}
impl<T> Scalar for T where T: Num + Signed + Clone + PartialOrd + FromPrimitive {}

/// A polynomial in one variable, stored in the power basis.
/// `coeffs[j]` is the coefficient of `x^j`; the length is the degree bound
/// plus one and never changes under the operations below.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn from_coeffs(coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty(), "a polynomial needs a degree bound >= 0");
        Polynomial { coeffs }
    }

    pub fn zero(degree_bound: usize) -> Self {
        Polynomial {
            coeffs: vec![S::zero(); degree_bound + 1],
        }
    }

    pub fn constant(value: S, degree_bound: usize) -> Self {
        let mut coeffs = vec![S::zero(); degree_bound + 1];
        coeffs[0] = value;
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// f(n) at an integer argument.
    pub fn evaluate(&self, n: i64) -> S {
        self.eval_at(&S::from_i64(n).expect("integer fits in scalar"))
    }

    /// Horner evaluation at an arbitrary scalar point.
    pub fn eval_at(&self, x: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    /// The unique polynomial of degree <= points.len() - 1 through the given
    /// (abscissa, value) pairs, by Lagrange interpolation.
    pub fn interpolate(points: &[(i64, S)]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::BadPointCount {
                expected: 1,
                got: 0,
            });
        }
        for (i, (xi, _)) in points.iter().enumerate() {
            for (xj, _) in points.iter().skip(i + 1) {
                if xi == xj {
                    return Err(Error::DuplicateAbscissa(*xi));
                }
            }
        }
        let n = points.len();
        let mut acc: Polynomial<S> = Polynomial::zero(n - 1);
        for (i, (xi, yi)) in points.iter().enumerate() {
            // numerator prod_{j != i} (x - x_j), denominator prod (x_i - x_j)
            let mut basis = vec![S::zero(); n];
            basis[0] = S::one();
            let mut deg = 0usize;
            let mut denom = S::one();
            for (j, (xj, _)) in points.iter().enumerate() {
                if j == i {
                    continue;
                }
                let root = S::from_i64(*xj).unwrap();
                for t in (0..=deg).rev() {
                    let shifted = basis[t].clone();
                    basis[t + 1] = basis[t + 1].clone() + shifted.clone();
                    basis[t] = basis[t].clone() * root.clone().neg();
                }
                // the loop above computed basis * (x - root) in place:
                // basis[t+1] += basis[t]; basis[t] *= -root
                deg += 1;
                denom = denom * (S::from_i64(*xi).unwrap() - root);
            }
            let scale = yi.clone() / denom;
            for t in 0..n {
                acc.coeffs[t] = acc.coeffs[t].clone() + basis[t].clone() * scale.clone();
            }
        }
        Ok(acc)
    }

    /// f(a x): scales the x^j coefficient by a^j.
    pub fn compose_scale(&self, a: i64) -> Self {
        let mut coeffs = self.coeffs.clone();
        let mut pow = S::one();
        let a = S::from_i64(a).unwrap();
        for c in coeffs.iter_mut() {
            *c = c.clone() * pow.clone();
            pow = pow * a.clone();
        }
        Polynomial { coeffs }
    }

    /// f(x + h) by binomial expansion of each power.
    pub fn compose_shift(&self, h: i64) -> Self {
        let n = self.coeffs.len();
        let h = S::from_i64(h).unwrap();
        let mut out = vec![S::zero(); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            // c * (x + h)^j
            let mut term = S::one(); // C(j, i) h^{j-i} built from i = j downward
            out[j] = out[j].clone() + c.clone();
            let mut binom = S::one();
            for i in (0..j).rev() {
                // C(j, i) = C(j, i+1) * (i+1) / (j-i)
                binom = binom * S::from_usize(i + 1).unwrap() / S::from_usize(j - i).unwrap();
                term = term * h.clone();
                out[i] = out[i].clone() + c.clone() * binom.clone() * term.clone();
            }
        }
        Polynomial { coeffs: out }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.coeffs.len() != other.coeffs.len() {
            return Err(Error::DegreeMismatch(
                self.degree_bound(),
                other.degree_bound(),
            ));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Ok(Polynomial { coeffs })
    }
}

/// Coordinates with respect to the binomial-coefficient basis C(x, j).
/// Integer-valued polynomials are exactly the integer combinations of this
/// basis, and the even-valued lattice is exactly twice it, so these are the
/// natural torus coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct BinomialCoords<S> {
    u: Vec<S>,
}

impl<S: Scalar> BinomialCoords<S> {
    pub fn from_vec(u: Vec<S>) -> Self {
        assert!(!u.is_empty());
        BinomialCoords { u }
    }

    pub fn coords(&self) -> &[S] {
        &self.u
    }

    pub fn degree_bound(&self) -> usize {
        self.u.len() - 1
    }

    /// Forward differences at 0: u_j = Δ^j f(0).
    pub fn from_poly(f: &Polynomial<S>) -> Self {
        let d = f.degree_bound();
        let mut row: Vec<S> = (0..=d as i64).map(|m| f.evaluate(m)).collect();
        let mut u = Vec::with_capacity(d + 1);
        for _ in 0..=d {
            u.push(row[0].clone());
            for t in 0..row.len() - 1 {
                row[t] = row[t + 1].clone() - row[t].clone();
            }
            row.pop();
        }
        BinomialCoords { u }
    }

    /// Expands sum_j u_j C(x, j) back into the power basis.
    pub fn to_poly(&self) -> Polynomial<S> {
        let d = self.degree_bound();
        let mut acc: Polynomial<S> = Polynomial::zero(d);
        // C(x, 0) = 1; C(x, j+1) = C(x, j) (x - j) / (j + 1)
        let mut basis = Polynomial::constant(S::one(), d);
        for (j, uj) in self.u.iter().enumerate() {
            for t in 0..=d {
                acc.coeffs[t] = acc.coeffs[t].clone() + uj.clone() * basis.coeffs[t].clone();
            }
            if j < d {
                let minus_j = S::from_usize(j).unwrap().neg();
                let inv = S::from_usize(j + 1).unwrap();
                let mut next = vec![S::zero(); d + 1];
                for t in 0..=d {
                    let c = basis.coeffs[t].clone();
                    if t < d {
                        next[t + 1] = next[t + 1].clone() + c.clone();
                    }
                    next[t] = next[t].clone() + c * minus_j.clone();
                }
                for c in next.iter_mut() {
                    *c = c.clone() / inv.clone();
                }
                basis = Polynomial { coeffs: next };
            }
        }
        acc
    }

    /// sum_j u_j C(n, j) at an integer argument, without leaving the basis.
    pub fn evaluate(&self, n: i64) -> S {
        let mut acc = S::zero();
        for (j, uj) in self.u.iter().enumerate() {
            let b = binomial_i128(n, j as u32);
            acc = acc + uj.clone() * S::from_i128(b).expect("binomial fits in scalar");
        }
        acc
    }
}

/// Generalized binomial coefficient C(n, j) for any integer n, exact.
pub fn binomial_i128(n: i64, j: u32) -> i128 {
    if n >= 0 && (n as u32) < j {
        return 0;
    }
    if n < 0 {
        // C(n, j) = (-1)^j C(j - n - 1, j)
        let m = j as i64 - n - 1;
        let v = binomial_i128(m, j);
        return if j % 2 == 0 { v } else { -v };
    }
    let mut acc: i128 = 1;
    for i in 1..=j as i128 {
        acc = acc * (n as i128 - i + 1) / i;
    }
    acc
}
