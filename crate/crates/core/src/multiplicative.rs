//! Completely multiplicative ±1 functions: the Liouville function, or an
//! explicit table of values on primes extended multiplicatively.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub enum MultiplicativeFn {
    /// lambda(n) = (-1)^{Omega(n)}, Omega counting prime factors with
    /// multiplicity.
    Liouville,
    /// Values on the primes in the table, extended completely
    /// multiplicatively; evaluation fails on primes outside the table.
    Table { primes: BTreeMap<u64, i8> },
}

impl MultiplicativeFn {
    pub fn liouville() -> Self {
        MultiplicativeFn::Liouville
    }

    pub fn from_prime_values(values: impl IntoIterator<Item = (u64, i64)>) -> Result<Self> {
        let mut primes = BTreeMap::new();
        for (p, v) in values {
            if v != 1 && v != -1 {
                return Err(Error::BadPrimeValue { prime: p, value: v });
            }
            primes.insert(p, v as i8);
        }
        Ok(MultiplicativeFn::Table { primes })
    }

    /// lambda(n) for n >= 1.
    pub fn eval(&self, n: u64) -> Result<i8> {
        if n == 0 {
            return Err(Error::LambdaZero);
        }
        let mut sign: i8 = 1;
        for (p, e) in factorize(n) {
            let at_p = match self {
                MultiplicativeFn::Liouville => -1,
                MultiplicativeFn::Table { primes } => {
                    *primes.get(&p).ok_or(Error::PrimeOutOfRange(p))?
                }
            };
            if at_p == -1 && e % 2 == 1 {
                sign = -sign;
            }
        }
        Ok(sign)
    }
}

/// Trial-division factorization; fine for the desk-scale arguments used here.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(q: u64) -> u64 {
    let mut phi = q;
    for (p, _) in factorize(q) {
        phi = phi / p * (p - 1);
    }
    phi
}
