//! Executable torus models for multiplicative ±1 functions.
//!
//! A model point carries binomial-basis torus coordinates (dyadic rationals
//! with 53 fractional bits, stored as integer mantissas mod 2^54), an
//! optional unit residue for the twisted family, and a profinite component
//! rendered as a residue with a tracked modulus. The dynamics T (shift),
//! I_a (division), F (floor sign, optionally twisted), and M (profinite
//! projection) act on this data exactly: every map is integer arithmetic,
//! so floors never sit on a rounding boundary and the model identities can
//! be checked verbatim.

use rayon::prelude::*;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::matrix::{scale_matrix, shift_pow_matrix, IntMatrix};
use crate::multiplicative::{factorize, MultiplicativeFn};
use crate::pattern::sha256_hex;
use crate::rho::{units_mod, Rho};

pub const FRAC_BITS: u32 = 53;
/// Torus coordinates live in [0, 2): mantissas are taken mod 2^54.
pub const COORD_MOD: u128 = 1 << (FRAC_BITS + 1);

#[derive(Debug, Clone)]
pub struct TwistConfig {
    pub q: u32,
    pub rho: Rho,
}

#[derive(Debug, Clone)]
pub struct ModelConfig {
    pub d: u32,
    pub lambda: MultiplicativeFn,
    pub twist: Option<TwistConfig>,
    /// Modulus of the profinite component of fresh samples. Must be
    /// divisible by every a that I_a will see, and by q^zhat_depth.
    pub zhat_modulus: u128,
    /// Per-prime cap on the number of division steps rho-bar may take.
    pub zhat_depth: u32,
}

pub fn lcm_range_squared(a_max: u64) -> Result<u128> {
    let mut l: u128 = 1;
    for a in 1..=a_max.max(1) as u128 {
        l = l / gcd_u128(l, a) * a;
    }
    l.checked_mul(l)
        .ok_or_else(|| Error::ConfigOverflow(format!("lcm(1..{a_max})^2 exceeds u128")))
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn add_mod(a: u128, b: u128, m: u128) -> u128 {
    // for a, b < m: a + b < 2m, so one conditional subtraction suffices
    let (s, overflow) = a.overflowing_add(b);
    if overflow || s >= m {
        s.wrapping_sub(m)
    } else {
        s
    }
}

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if let Some(p) = a.checked_mul(b) {
        return p % m;
    }
    // double-and-add fallback for oversized moduli
    let mut acc: u128 = 0;
    let mut a = a % m;
    let mut b = b;
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod(acc, a, m);
        }
        a = add_mod(a, a, m);
        b >>= 1;
    }
    acc
}

impl ModelConfig {
    pub fn untwisted(d: u32, lambda: MultiplicativeFn, a_max: u64) -> Result<Self> {
        Ok(ModelConfig {
            d,
            lambda,
            twist: None,
            zhat_modulus: lcm_range_squared(a_max)?,
            zhat_depth: 2,
        })
    }

    pub fn twisted(
        d: u32,
        lambda: MultiplicativeFn,
        q: u32,
        rho: Rho,
        a_max: u64,
        depth: u32,
    ) -> Result<Self> {
        if q < 2 {
            return Err(Error::BadTwistModulus(q));
        }
        if rho.q() != q {
            return Err(Error::BadArgument(format!(
                "rho is defined mod {} but the twist modulus is {q}",
                rho.q()
            )));
        }
        let base = lcm_range_squared(a_max)?;
        let qpow = (0..depth).try_fold(1u128, |acc, _| acc.checked_mul(q as u128));
        let modulus = qpow
            .and_then(|qp| base.checked_mul(qp))
            .ok_or_else(|| Error::ConfigOverflow("zhat modulus exceeds u128".into()))?;
        Ok(ModelConfig {
            d,
            lambda,
            twist: Some(TwistConfig { q, rho }),
            zhat_modulus: modulus,
            zhat_depth: depth,
        })
    }

    /// Stable digest of the full configuration, for report provenance.
    pub fn digest(&self) -> String {
        let lambda = match &self.lambda {
            MultiplicativeFn::Liouville => "liouville".to_string(),
            MultiplicativeFn::Table { primes } => {
                let body: Vec<String> = primes.iter().map(|(p, v)| format!("{p}:{v}")).collect();
                format!("table[{}]", body.join(","))
            }
        };
        let twist = match &self.twist {
            None => "none".to_string(),
            Some(t) => format!("q={} rho={}", t.q, t.rho.to_sign_string()),
        };
        let text = format!(
            "d={} lambda={} twist={} Q={} depth={}",
            self.d, lambda, twist, self.zhat_modulus, self.zhat_depth
        );
        sha256_hex(text.as_bytes())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelPoint {
    /// Binomial-coordinate mantissas, each in [0, 2^54).
    pub u: Vec<u64>,
    /// Unit residue mod q, present exactly when the model is twisted.
    pub t: Option<u32>,
    /// Profinite component: (residue, modulus), residue < modulus.
    pub n: (u128, u128),
}

/// Matrix entries reduced mod 2^54, which is all that acting on mantissas
/// needs; row-major (d+1) x (d+1).
type ReducedMatrix = Vec<u64>;

fn reduce_matrix(m: &IntMatrix) -> ReducedMatrix {
    let n = m.size();
    let modulus = BigInt::from(COORD_MOD);
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(m.entry(i, j).mod_floor(&modulus).to_u64().unwrap());
        }
    }
    out
}

fn apply_reduced(mat: &[u64], u: &[u64]) -> Vec<u64> {
    let n = u.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc: u128 = 0;
        for j in 0..n {
            acc += mat[i * n + j] as u128 * u[j] as u128;
        }
        out.push((acc % COORD_MOD) as u64);
    }
    out
}

/// Per-divisor data for I_a: the scale matrix, the additive offset on u_0,
/// and the unit action of the q-coprime part.
struct IsoData {
    a: u64,
    scale: ReducedMatrix,
    offset: u64,
    a_coprime_mod_q: u32,
}

pub struct Model {
    config: ModelConfig,
    units: Vec<u32>,
    shift1: ReducedMatrix,
}

impl Model {
    pub fn new(config: ModelConfig) -> Result<Model> {
        let units = match &config.twist {
            Some(t) => units_mod(t.q),
            None => Vec::new(),
        };
        let shift1 = reduce_matrix(&shift_pow_matrix(1, config.d as usize));
        Ok(Model {
            config,
            units,
            shift1,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    fn dim(&self) -> usize {
        self.config.d as usize + 1
    }

    /// Haar sample: independent uniform dyadic coordinates, a uniform unit
    /// (twisted case), and a uniform residue at the configured modulus.
    /// Deterministic in (seed, index).
    pub fn haar_sample(&self, seed: u64, index: u64) -> ModelPoint {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let u = (0..self.dim())
            .map(|_| rng.gen_range(0..COORD_MOD as u64))
            .collect();
        let t = if self.units.is_empty() {
            None
        } else {
            Some(self.units[rng.gen_range(0..self.units.len())])
        };
        let q = self.config.zhat_modulus;
        let r = rng.gen_range(0..q);
        ModelPoint { u, t, n: (r, q) }
    }

    /// rho-bar on a represented profinite element: strip primes dividing q
    /// while information and the depth budget last, read rho at the first
    /// unit, map exhausted-to-zero projections to +1.
    pub fn rho_bar(&self, n: (u128, u128)) -> Result<i8> {
        let twist = self
            .config
            .twist
            .as_ref()
            .ok_or_else(|| Error::BadArgument("rho_bar needs a twisted model".into()))?;
        let q = twist.q as u128;
        let depth = self.config.zhat_depth;
        let qpow = (0..depth).try_fold(1u128, |acc, _| acc.checked_mul(q));
        let required = qpow.ok_or_else(|| Error::ConfigOverflow("q^depth exceeds u128".into()))?;
        if n.1 % required != 0 {
            return Err(Error::InsufficientModulus {
                modulus: n.1,
                required,
            });
        }
        let primes: Vec<u64> = factorize(twist.q as u64).into_iter().map(|(p, _)| p).collect();
        let mut strips = vec![0u32; primes.len()];
        let mut x = n.0 % n.1;
        let mut mm = n.1;
        loop {
            if mm % q == 0 {
                let r = (x % q) as u32;
                if crate::rho::gcd(r, twist.q) == 1 {
                    return twist.rho.eval(r);
                }
            }
            let mut progressed = false;
            for (pi, &p) in primes.iter().enumerate() {
                let p = p as u128;
                if mm % p != 0 || x % p != 0 {
                    continue;
                }
                // valuation of p in the current modulus
                let mut v = 0u32;
                let mut mv = mm;
                while mv % p == 0 {
                    v += 1;
                    mv /= p;
                }
                let mut pv = 1u128;
                for _ in 0..v {
                    pv *= p;
                }
                if x % pv == 0 {
                    // the whole retained p-component is zero
                    return Ok(1);
                }
                if strips[pi] >= depth {
                    return Err(Error::DepthExhausted {
                        prime: p as u64,
                        depth,
                        needed: strips[pi] + 1,
                    });
                }
                x /= p;
                mm /= p;
                strips[pi] += 1;
                progressed = true;
                break;
            }
            if !progressed {
                // some prime divides x but the modulus holds no information
                // about it, or q no longer divides the modulus
                return Err(Error::InsufficientModulus {
                    modulus: mm,
                    required: q,
                });
            }
        }
    }

    /// F at a point: the floor parity of u_0, times rho-bar(t n) when
    /// twisted.
    pub fn eval_f(&self, x: &ModelPoint) -> Result<i8> {
        let torus: i8 = if (x.u[0] >> FRAC_BITS) & 1 == 0 { 1 } else { -1 };
        match (&self.config.twist, x.t) {
            (None, _) => Ok(torus),
            (Some(_), Some(t)) => {
                let (r, m) = x.n;
                let tr = mul_mod(t as u128, r, m);
                Ok(torus * self.rho_bar((tr, m))?)
            }
            (Some(_), None) => Err(Error::BadArgument(
                "twisted model point is missing its unit component".into(),
            )),
        }
    }

    pub fn eval_m(x: &ModelPoint) -> (u128, u128) {
        x.n
    }

    pub fn step_t(&self, x: &ModelPoint) -> ModelPoint {
        let u = apply_reduced(&self.shift1, &x.u);
        let (r, m) = x.n;
        ModelPoint {
            u,
            t: x.t,
            n: ((r + 1) % m, m),
        }
    }

    /// T^m in one application of the m-step composition matrix.
    pub fn apply_t_pow(&self, x: &ModelPoint, m: u64) -> ModelPoint {
        let mat = reduce_matrix(&shift_pow_matrix(m as i64, self.config.d as usize));
        self.apply_t_pow_with(&mat, x, m)
    }

    fn apply_t_pow_with(&self, mat: &[u64], x: &ModelPoint, m: u64) -> ModelPoint {
        let u = apply_reduced(mat, &x.u);
        let (r, md) = x.n;
        ModelPoint {
            u,
            t: x.t,
            n: ((r + m as u128) % md, md),
        }
    }

    fn iso_data(&self, a: u64) -> Result<IsoData> {
        let scale = reduce_matrix(&scale_matrix(a, self.config.d as usize)?);
        let lam = self.config.lambda.eval(a)?;
        // the offset must satisfy (-1)^offset = lambda(a) for F(I_a x) =
        // lambda(a) F(x) to hold, and it is additive in a for I_b . I_a =
        // I_{ab}; both pin it to (1 - lambda(a)) / 2
        let offset = ((1 - lam as i64) / 2) as u64;
        let a_coprime_mod_q = match &self.config.twist {
            None => 1,
            Some(t) => {
                let mut ap = a;
                for p in factorize(t.q as u64).into_iter().map(|(p, _)| p) {
                    while ap % p == 0 {
                        ap /= p;
                    }
                }
                (ap % t.q as u64) as u32
            }
        };
        Ok(IsoData {
            a,
            scale,
            offset,
            a_coprime_mod_q,
        })
    }

    fn apply_i_with(&self, iso: &IsoData, x: &ModelPoint) -> Result<ModelPoint> {
        let a = iso.a as u128;
        let (r, m) = x.n;
        if r % a != 0 || m % a != 0 {
            return Err(Error::NotDivisible {
                divisor: a,
                residue: r,
                modulus: m,
            });
        }
        let mut u = apply_reduced(&iso.scale, &x.u);
        u[0] = ((u[0] as u128 + ((iso.offset as u128) << FRAC_BITS)) % COORD_MOD) as u64;
        let t = match (&self.config.twist, x.t) {
            (None, _) => None,
            (Some(tw), Some(t)) => {
                // the coprime part acts by multiplication on the unit
                Some(((iso.a_coprime_mod_q as u64 * t as u64) % tw.q as u64) as u32)
            }
            (Some(_), None) => {
                return Err(Error::BadArgument(
                    "twisted model point is missing its unit component".into(),
                ))
            }
        };
        Ok(ModelPoint {
            u,
            t,
            n: (r / a, m / a),
        })
    }

    /// I_a: only defined when a divides the represented residue and modulus.
    pub fn apply_i(&self, a: u64, x: &ModelPoint) -> Result<ModelPoint> {
        if a == 0 {
            return Err(Error::BadArgument("a must be >= 1".into()));
        }
        self.apply_i_with(&self.iso_data(a)?, x)
    }

    /// Replaces the residue by the largest multiple of `a` below it, which
    /// is the uniform law conditioned on divisibility.
    pub fn condition_divisible(x: &ModelPoint, a: u64) -> ModelPoint {
        let (r, m) = x.n;
        ModelPoint {
            u: x.u.clone(),
            t: x.t,
            n: (r - r % a as u128, m),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AxiomViolation {
    pub sample: u64,
    pub identity: u8,
    pub a: u64,
    pub b: u64,
    pub detail: String,
}

#[derive(Debug)]
pub struct AxiomCheckReport {
    pub samples: u64,
    pub a_max: u64,
    pub checks: u64,
    pub violation_count: u64,
    /// At most 32 witnesses, in deterministic order.
    pub violations: Vec<AxiomViolation>,
}

#[derive(Debug, Clone)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n: u64,
    pub sum: i64,
    pub seed: u64,
}

fn mc_estimate(sum: i64, n: u64, seed: u64) -> McEstimate {
    let est = sum as f64 / n as f64;
    let var = (1.0 - est * est).max(0.0);
    McEstimate {
        estimate: est,
        std_error: (var / n as f64).sqrt(),
        n,
        sum,
        seed,
    }
}

/// Congruence constraint h = residue (mod modulus).
#[derive(Debug, Clone, Copy)]
pub struct Congruence {
    pub residue: u64,
    pub modulus: u64,
}

impl Model {
    /// Verifies identities (1)-(5) on conditioned samples, exactly.
    pub fn axiom_check(&self, samples: u64, a_max: u64, seed: u64) -> Result<AxiomCheckReport> {
        // isometry data for every a and every product ab
        let max_div = a_max * a_max;
        let mut isos: Vec<Option<IsoData>> = Vec::with_capacity(max_div as usize + 1);
        isos.push(None);
        for a in 1..=max_div {
            isos.push(Some(self.iso_data(a)?));
        }
        let iso = |a: u64| isos[a as usize].as_ref().unwrap();
        let shift_mats: Vec<ReducedMatrix> = (0..=a_max)
            .map(|m| reduce_matrix(&shift_pow_matrix(m as i64, self.config.d as usize)))
            .collect();

        let results: Vec<(u64, u64, Vec<AxiomViolation>)> = (0..samples)
            .into_par_iter()
            .map(|idx| -> Result<(u64, u64, Vec<AxiomViolation>)> {
                let x = self.haar_sample(seed, idx);
                let mut checks = 0u64;
                let mut bad = Vec::new();
                let mut report = |identity: u8, a: u64, b: u64, detail: String| {
                    if bad.len() < 32 {
                        bad.push(AxiomViolation {
                            sample: idx,
                            identity,
                            a,
                            b,
                            detail,
                        });
                    }
                };

                // (2) M(T x) = M(x) + 1
                let tx = self.step_t(&x);
                checks += 1;
                if tx.n.0 != (x.n.0 + 1) % x.n.1 || tx.n.1 != x.n.1 {
                    report(2, 0, 0, format!("M(Tx) = {:?}", tx.n));
                }

                for a in 1..=a_max {
                    let xa = Model::condition_divisible(&x, a);
                    let ya = self.apply_i_with(iso(a), &xa)?;

                    // (1) a M(I_a x) = M(x)
                    checks += 1;
                    if ya.n.0 * a as u128 != xa.n.0 || ya.n.1 * a as u128 != xa.n.1 {
                        report(1, a, 0, format!("aM(I_a x) = {:?}", ya.n));
                    }

                    // (3) T(I_a x) = I_a(T^a x)
                    checks += 1;
                    let lhs = self.step_t(&ya);
                    let rhs =
                        self.apply_i_with(iso(a), &self.apply_t_pow_with(&shift_mats[a as usize], &xa, a))?;
                    if lhs != rhs {
                        report(3, a, 0, format!("lhs {:?} rhs {:?}", lhs, rhs));
                    }

                    // (5) F(I_a x) = lambda(a) F(x)
                    checks += 1;
                    let lam = self.config.lambda.eval(a)?;
                    let lhs_f = self.eval_f(&ya)?;
                    let rhs_f = lam * self.eval_f(&xa)?;
                    if lhs_f != rhs_f {
                        report(5, a, 0, format!("F(I_a x) = {lhs_f}, lambda F(x) = {rhs_f}"));
                    }

                    // (4) I_b(I_a x) = I_{ab}(x)
                    for b in 1..=a_max {
                        let xab = Model::condition_divisible(&x, a * b);
                        checks += 1;
                        let step = self.apply_i_with(iso(a), &xab)?;
                        let lhs = self.apply_i_with(iso(b), &step)?;
                        let rhs = self.apply_i_with(iso(a * b), &xab)?;
                        if lhs != rhs {
                            report(4, a, b, format!("lhs {:?} rhs {:?}", lhs, rhs));
                        }
                    }
                }
                Ok((checks, bad.len() as u64, bad))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut checks = 0u64;
        let mut violation_count = 0u64;
        let mut violations = Vec::new();
        for (c, v, mut bad) in results {
            checks += c;
            violation_count += v;
            violations.append(&mut bad);
        }
        violations.sort_by_key(|v| (v.sample, v.identity, v.a, v.b));
        violations.truncate(32);
        Ok(AxiomCheckReport {
            samples,
            a_max,
            checks,
            violation_count,
            violations,
        })
    }

    /// Monte Carlo estimate of E prod_i F(T^{c_i} x).
    pub fn correlation_mc(&self, shifts: &[u64], n: u64, seed: u64) -> Result<McEstimate> {
        if n == 0 {
            return Err(Error::BadArgument("need at least one sample".into()));
        }
        let mats: Vec<ReducedMatrix> = shifts
            .iter()
            .map(|&c| reduce_matrix(&shift_pow_matrix(c as i64, self.config.d as usize)))
            .collect();
        let sum = (0..n)
            .into_par_iter()
            .map(|idx| -> Result<i64> {
                let x = self.haar_sample(seed, idx);
                let mut prod: i8 = 1;
                for (mat, &c) in mats.iter().zip(shifts) {
                    let y = self.apply_t_pow_with(mat, &x, c);
                    prod *= self.eval_f(&y)?;
                }
                Ok(prod as i64)
            })
            .try_reduce(|| 0i64, |a, b| Ok(a + b))?;
        Ok(mc_estimate(sum, n, seed))
    }

    fn admissible(h_bound: u64, c: Option<Congruence>) -> Result<(u64, u64, u64)> {
        // returns (first, step, count) describing the admissible h values
        match c {
            None => Ok((1, 1, h_bound)),
            Some(Congruence { residue, modulus }) => {
                if modulus == 0 {
                    return Err(Error::BadArgument("congruence modulus must be >= 1".into()));
                }
                let r = residue % modulus;
                let first = if r == 0 { modulus } else { r };
                if first > h_bound {
                    return Err(Error::UnsatisfiableCongruence {
                        residue,
                        modulus,
                        bound: h_bound,
                    });
                }
                Ok((first, modulus, (h_bound - first) / modulus + 1))
            }
        }
    }

    /// Monte Carlo Gowers-style box average of the given order: expectation
    /// over h in [1,H]^order (optionally congruence-filtered) and x of the
    /// product of F over all 2^order corner shifts.
    pub fn gowers_mc(
        &self,
        order: u32,
        h_bound: u64,
        n: u64,
        seed: u64,
        h_congruences: &[Option<Congruence>],
        x_congruence: Option<Congruence>,
    ) -> Result<McEstimate> {
        if order == 0 || h_bound == 0 || n == 0 {
            return Err(Error::BadArgument(
                "order, H, and the sample count must be >= 1".into(),
            ));
        }
        if h_congruences.len() > order as usize {
            return Err(Error::BadArgument(format!(
                "got {} h-congruences for order {order}",
                h_congruences.len()
            )));
        }
        let mut coords = Vec::with_capacity(order as usize);
        for i in 0..order as usize {
            let c = h_congruences.get(i).copied().flatten();
            coords.push(Self::admissible(h_bound, c)?);
        }
        if let Some(c) = x_congruence {
            if c.modulus == 0 || self.config.zhat_modulus % c.modulus as u128 != 0 {
                return Err(Error::BadArgument(format!(
                    "M(x) congruence modulus {} must divide the profinite modulus",
                    c.modulus
                )));
            }
        }
        let max_exp = (order as u64) * h_bound;
        if max_exp > 200_000 {
            return Err(Error::ConfigOverflow(
                "order * H is too large for the shift-matrix table".into(),
            ));
        }
        let mats: Vec<ReducedMatrix> = (0..=max_exp)
            .map(|m| reduce_matrix(&shift_pow_matrix(m as i64, self.config.d as usize)))
            .collect();

        let sum = (0..n)
            .into_par_iter()
            .map(|idx| -> Result<i64> {
                let mut x = self.haar_sample(seed, idx);
                // the h draws ride on the same stream, after the point draws
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
                rng.set_stream(idx);
                let hs: Vec<u64> = coords
                    .iter()
                    .map(|&(first, step, count)| first + step * rng.gen_range(0..count))
                    .collect();
                if let Some(c) = x_congruence {
                    let m = c.modulus as u128;
                    let (r, q) = x.n;
                    x.n = (r - r % m + (c.residue as u128 % m), q);
                }
                let mut prod: i64 = 1;
                for corner in 0..(1u32 << order) {
                    let mut e = 0u64;
                    for (i, h) in hs.iter().enumerate() {
                        if corner >> i & 1 == 1 {
                            e += h;
                        }
                    }
                    let y = self.apply_t_pow_with(&mats[e as usize], &x, e);
                    prod *= self.eval_f(&y)? as i64;
                }
                Ok(prod)
            })
            .try_reduce(|| 0i64, |a, b| Ok(a + b))?;
        Ok(mc_estimate(sum, n, seed))
    }
}

#[derive(Debug)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub dof: u32,
    pub bins: u32,
    pub n: u64,
    pub crit95: f64,
    pub crit99: f64,
    /// Unit-component statistic for twisted models.
    pub t_statistic: Option<f64>,
    pub t_dof: u32,
    /// Set for even scale factors, whose torus factor is reported but not
    /// asserted against uniformity.
    pub diagnostic: bool,
    pub seed: u64,
}

/// Wilson-Hilferty approximation to the chi-square quantile.
pub fn chi_square_critical(dof: u32, z: f64) -> f64 {
    let k = dof as f64;
    let t = 2.0 / (9.0 * k);
    k * (1.0 - t + z * t.sqrt()).powi(3)
}

impl Model {
    /// Samples conditioned on a | M(x), pushes forward along I_a, and
    /// histograms the leading torus coordinate (and the unit component when
    /// present) against uniformity.
    pub fn pushforward_test(
        &self,
        a: u64,
        bins: u32,
        n: u64,
        seed: u64,
    ) -> Result<ChiSquareReport> {
        if bins < 2 || n == 0 {
            return Err(Error::BadArgument("need bins >= 2 and n >= 1".into()));
        }
        if self.config.zhat_modulus % a as u128 != 0 {
            return Err(Error::NotDivisible {
                divisor: a as u128,
                residue: 0,
                modulus: self.config.zhat_modulus,
            });
        }
        let iso = self.iso_data(a)?;
        let t_bins = self.units.len().max(1);
        let chunk = 4096u64;
        let chunks = n.div_ceil(chunk);
        let (u_counts, t_counts) = (0..chunks)
            .into_par_iter()
            .map(|c| -> Result<(Vec<u64>, Vec<u64>)> {
                let mut uc = vec![0u64; bins as usize];
                let mut tc = vec![0u64; t_bins];
                for idx in c * chunk..((c + 1) * chunk).min(n) {
                    let x = Model::condition_divisible(&self.haar_sample(seed, idx), a);
                    let y = self.apply_i_with(&iso, &x)?;
                    let bin = ((y.u[0] as u128 * bins as u128) >> (FRAC_BITS + 1)) as usize;
                    uc[bin] += 1;
                    if let Some(t) = y.t {
                        let pos = self.units.iter().position(|&u| u == t).unwrap();
                        tc[pos] += 1;
                    }
                }
                Ok((uc, tc))
            })
            .try_reduce(
                || (vec![0u64; bins as usize], vec![0u64; t_bins]),
                |(mut ua, ta), (ub, tb)| {
                    for (x, y) in ua.iter_mut().zip(&ub) {
                        *x += y;
                    }
                    let ta: Vec<u64> = ta.iter().zip(&tb).map(|(x, y)| x + y).collect();
                    Ok((ua, ta))
                },
            )?;
        let stat = |counts: &[u64]| {
            let expect = n as f64 / counts.len() as f64;
            counts
                .iter()
                .map(|&c| {
                    let dr = c as f64 - expect;
                    dr * dr / expect
                })
                .sum::<f64>()
        };
        let statistic = stat(&u_counts);
        let t_statistic = if self.units.is_empty() {
            None
        } else {
            Some(stat(&t_counts))
        };
        Ok(ChiSquareReport {
            statistic,
            dof: bins - 1,
            bins,
            n,
            crit95: chi_square_critical(bins - 1, 1.6448536269514722),
            crit99: chi_square_critical(bins - 1, 2.3263478740408408),
            t_statistic,
            t_dof: self.units.len().saturating_sub(1) as u32,
            diagnostic: a % 2 == 0,
            seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn untwisted(d: u32) -> Model {
        Model::new(ModelConfig::untwisted(d, MultiplicativeFn::liouville(), 30).unwrap()).unwrap()
    }

    fn mantissa(num: u64, den: u64) -> u64 {
        // num/den in [0,2) as a mantissa over 2^53
        (num << FRAC_BITS) / den
    }

    #[test]
    fn haar_sampling_is_deterministic() {
        let m = untwisted(2);
        let a = m.haar_sample(9, 41);
        let b = m.haar_sample(9, 41);
        assert_eq!(a, b);
        assert_ne!(m.haar_sample(9, 42), a);
    }

    #[test]
    fn haar_mean_of_leading_coordinate() {
        let m = untwisted(1);
        let n = 200_000u64;
        let mut total: u128 = 0;
        for i in 0..n {
            total += m.haar_sample(3, i).u[0] as u128;
        }
        let mean = total as f64 / n as f64 / (1u64 << FRAC_BITS) as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn eval_f_floor_parities() {
        let m = untwisted(0);
        let x = ModelPoint {
            u: vec![mantissa(1, 2)],
            t: None,
            n: (0, m.config.zhat_modulus),
        };
        assert_eq!(m.eval_f(&x).unwrap(), 1);
        let x = ModelPoint {
            u: vec![mantissa(3, 2)],
            t: None,
            n: (0, m.config.zhat_modulus),
        };
        assert_eq!(m.eval_f(&x).unwrap(), -1);
    }

    #[test]
    fn step_t_shears_and_increments() {
        let m = untwisted(1);
        let x = ModelPoint {
            u: vec![mantissa(1, 2), mantissa(1, 2)],
            t: None,
            n: (5, 60),
        };
        let y = m.step_t(&x);
        assert_eq!(y.u, vec![mantissa(1, 1), mantissa(1, 2)]);
        assert_eq!(y.n, (6, 60));
        // wraparound
        let x = ModelPoint {
            u: vec![0, 0],
            t: None,
            n: (59, 60),
        };
        assert_eq!(m.step_t(&x).n, (0, 60));
    }

    #[test]
    fn iterated_step_matches_power_matrix() {
        let m = untwisted(2);
        for steps in [1u64, 2, 7, 19] {
            let x = m.haar_sample(4, steps);
            let mut iter = x.clone();
            for _ in 0..steps {
                iter = m.step_t(&iter);
            }
            assert_eq!(iter, m.apply_t_pow(&x, steps));
        }
    }

    #[test]
    fn apply_i_identity_and_offsets() {
        let m = untwisted(1);
        let x = m.haar_sample(8, 0);
        let x = Model::condition_divisible(&x, 12);
        assert_eq!(m.apply_i(1, &x).unwrap(), x);
        // lambda(2) = -1 flips F: offset 1; lambda(4) = +1 preserves it: offset 0
        let y2 = m.apply_i(2, &x).unwrap();
        let y4 = m.apply_i(4, &x).unwrap();
        let scale2 = reduce_matrix(&scale_matrix(2, 1).unwrap());
        let scale4 = reduce_matrix(&scale_matrix(4, 1).unwrap());
        assert_eq!(y4.u, apply_reduced(&scale4, &x.u));
        let mut expect2 = apply_reduced(&scale2, &x.u);
        expect2[0] = ((expect2[0] as u128 + (1u128 << FRAC_BITS)) % COORD_MOD) as u64;
        assert_eq!(y2.u, expect2);
    }

    #[test]
    fn apply_i_requires_divisibility() {
        let m = untwisted(1);
        let x = ModelPoint {
            u: vec![0, 0],
            t: None,
            n: (5, m.config.zhat_modulus),
        };
        assert!(matches!(
            m.apply_i(2, &x),
            Err(Error::NotDivisible { .. })
        ));
    }

    fn twisted_model(depth: u32) -> Model {
        let rho = Rho::parse(29, "+-++--+-++--+-++--+-++--+-++").unwrap();
        Model::new(
            ModelConfig::twisted(1, MultiplicativeFn::liouville(), 29, rho, 30, depth).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn rho_bar_unit_strip_and_zero() {
        let m = twisted_model(2);
        let q = 29u128;
        let rho = &m.config().twist.as_ref().unwrap().rho;
        // already a unit
        assert_eq!(m.rho_bar((5, q * q)).unwrap(), rho.eval(5).unwrap());
        // strip one factor of 29
        assert_eq!(m.rho_bar((58, q * q)).unwrap(), rho.eval(2).unwrap());
        // zero projection at the cap
        assert_eq!(m.rho_bar((0, q * q)).unwrap(), 1);
    }

    #[test]
    fn rho_bar_depth_and_modulus_errors() {
        let m = twisted_model(2);
        let q = 29u128;
        // strips within the depth budget resolve
        assert_eq!(m.rho_bar((q * 3, q * q)).unwrap(), rho_eval(&m, 3));
        assert_eq!(m.rho_bar((q * q * 28, q * q * q)).unwrap(), rho_eval(&m, 28));
        // modulus below q^depth violates the precondition
        assert!(matches!(
            m.rho_bar((3, q)),
            Err(Error::InsufficientModulus { .. })
        ));
        // valuation exceeding the depth budget with nonzero tail
        assert!(matches!(
            m.rho_bar((q * q * q * 5, q * q * q * q)),
            Err(Error::DepthExhausted { .. })
        ));
    }

    fn rho_eval(m: &Model, r: u32) -> i8 {
        m.config().twist.as_ref().unwrap().rho.eval(r).unwrap()
    }

    #[test]
    fn trivial_twist_matches_untwisted_estimates() {
        // rho identically +1 makes rho-bar identically +1, so the twisted
        // correlation must equal the untwisted one sample by sample
        let plain = untwisted(1);
        let twisted = Model::new(
            ModelConfig::twisted(
                1,
                MultiplicativeFn::liouville(),
                29,
                Rho::all_plus(29).unwrap(),
                30,
                8,
            )
            .unwrap(),
        )
        .unwrap();
        for shifts in [vec![1u64], vec![2, 5], vec![1, 2, 3]] {
            let a = plain.correlation_mc(&shifts, 20_000, 17).unwrap();
            let b = twisted.correlation_mc(&shifts, 20_000, 17).unwrap();
            assert_eq!(a.sum, b.sum, "shifts {shifts:?}");
        }
    }

    #[test]
    fn haar_units_are_equidistributed() {
        let m = twisted_model(2);
        let n = 100_000u64;
        let mut counts = std::collections::HashMap::new();
        for i in 0..n {
            *counts.entry(m.haar_sample(6, i).t.unwrap()).or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 28);
        let p = 1.0 / 28.0;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        for (&t, &c) in &counts {
            let dev = (c as f64 - n as f64 * p).abs();
            assert!(dev <= 3.0 * sigma, "unit {t}: count {c} deviates {dev:.1}");
        }
    }

    #[test]
    fn gowers_above_degree_order_reports_a_finite_estimate() {
        // order d+1 on the degree-d model is a diagnostic, not a vanishing
        // statement; it only needs to produce a well-formed estimate
        let m = untwisted(2);
        let r = m.gowers_mc(3, 8, 2000, 13, &[], None).unwrap();
        assert!(r.estimate.is_finite() && r.estimate.abs() <= 1.0);
        assert_eq!(r.n, 2000);
    }

    #[test]
    fn gowers_is_exactly_one_when_shifts_act_trivially() {
        // degree 0: T fixes the torus coordinate, so every corner sees the
        // same sign and the product is identically +1
        let m = untwisted(0);
        let r = m.gowers_mc(1, 64, 5000, 2, &[], None).unwrap();
        assert_eq!(r.estimate, 1.0);
        assert_eq!(r.std_error, 0.0);
    }

    #[test]
    fn trivial_twist_is_transparent() {
        let rho = Rho::all_plus(29).unwrap();
        let m = Model::new(
            ModelConfig::twisted(1, MultiplicativeFn::liouville(), 29, rho, 10, 4).unwrap(),
        )
        .unwrap();
        let x = m.haar_sample(1, 2);
        let torus: i8 = if (x.u[0] >> FRAC_BITS) & 1 == 0 { 1 } else { -1 };
        assert_eq!(m.eval_f(&x).unwrap(), torus);
    }

    #[test]
    fn single_shift_correlation_vanishes() {
        let m = untwisted(1);
        let r = m.correlation_mc(&[1], 200_000, 12).unwrap();
        assert!(r.estimate.abs() <= 4.0 * r.std_error, "{r:?}");
    }

    #[test]
    fn correlation_se_formula() {
        let m = untwisted(1);
        let r = m.correlation_mc(&[1], 10_000, 3).unwrap();
        assert_eq!(r.n, 10_000);
        assert!((r.std_error - ((1.0 - r.estimate * r.estimate) / 1e4).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn pushforward_identity_is_uniform() {
        let m = untwisted(1);
        let r = m.pushforward_test(1, 16, 100_000, 5).unwrap();
        assert!(r.statistic < r.crit99, "chi2 {} >= {}", r.statistic, r.crit99);
        assert!(!r.diagnostic);
        // odd pushforward stays uniform on the torus coordinate
        let r3 = m.pushforward_test(3, 16, 100_000, 5).unwrap();
        assert!(r3.statistic < r3.crit99, "chi2 {} >= {}", r3.statistic, r3.crit99);
        // even pushforwards are reported as diagnostic
        assert!(m.pushforward_test(2, 16, 1000, 5).unwrap().diagnostic);
    }

    #[test]
    fn unsatisfiable_congruence_errors() {
        let m = untwisted(1);
        let bad = m.gowers_mc(
            1,
            4,
            10,
            1,
            &[Some(Congruence {
                residue: 5,
                modulus: 8,
            })],
            None,
        );
        assert!(matches!(bad, Err(Error::UnsatisfiableCongruence { .. })));
    }
}
