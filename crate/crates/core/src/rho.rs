//! ±1 functions on the unit group of Z/q, the twisting data of the
//! second model family. The bit encoding is fixed for certificate
//! portability: units ascending, bit value 1 means -1.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rho {
    q: u32,
    units: Vec<u32>,
    /// signs[i] is rho at units[i]
    signs: Vec<i8>,
    /// residue -> index into units, usize::MAX for non-units
    index: Vec<usize>,
}

pub fn units_mod(q: u32) -> Vec<u32> {
    (1..q).filter(|&t| gcd(t, q) == 1).collect()
}

pub fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rho {
    fn with_signs(q: u32, signs: Vec<i8>) -> Result<Self> {
        if q < 2 {
            return Err(Error::BadTwistModulus(q));
        }
        let units = units_mod(q);
        if signs.len() != units.len() {
            return Err(Error::PatternLengthMismatch {
                expected: units.len() as u32,
                got: signs.len() as u32,
            });
        }
        let mut index = vec![usize::MAX; q as usize];
        for (i, &u) in units.iter().enumerate() {
            index[u as usize] = i;
        }
        Ok(Rho {
            q,
            units,
            signs,
            index,
        })
    }

    pub fn all_plus(q: u32) -> Result<Self> {
        let n = units_mod(q).len();
        Self::with_signs(q, vec![1; n])
    }

    /// Decodes phi(q) bits, ascending-unit order, set bit = -1.
    pub fn decode(q: u32, code: u64) -> Result<Self> {
        let n = units_mod(q).len();
        let signs = (0..n)
            .map(|i| if code >> i & 1 == 0 { 1 } else { -1 })
            .collect();
        Self::with_signs(q, signs)
    }

    pub fn encode(&self) -> u64 {
        let mut code = 0u64;
        for (i, &s) in self.signs.iter().enumerate() {
            if s < 0 {
                code |= 1 << i;
            }
        }
        code
    }

    pub fn parse(q: u32, s: &str) -> Result<Self> {
        let mut signs = Vec::new();
        for ch in s.chars() {
            match ch {
                '+' => signs.push(1),
                '-' => signs.push(-1),
                _ => return Err(Error::BadPatternChar),
            }
        }
        Self::with_signs(q, signs)
    }

    pub fn from_assignments(q: u32, mut assign: impl FnMut(u32) -> i8) -> Result<Self> {
        let units = units_mod(q);
        let signs = units.iter().map(|&u| assign(u)).collect();
        Self::with_signs(q, signs)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn phi(&self) -> u32 {
        self.units.len() as u32
    }

    pub fn units(&self) -> &[u32] {
        &self.units
    }

    /// rho at a unit residue.
    pub fn eval(&self, residue: u32) -> Result<i8> {
        let r = residue % self.q;
        let idx = self.index[r as usize];
        if idx == usize::MAX {
            return Err(Error::NotAUnit(r, self.q));
        }
        Ok(self.signs[idx])
    }

    pub fn to_sign_string(&self) -> String {
        self.signs
            .iter()
            .map(|&s| if s > 0 { '+' } else { '-' })
            .collect()
    }
}
