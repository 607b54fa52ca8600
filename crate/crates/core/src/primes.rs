//! Gaussian primes by norm: sieve, classification, annulus counts.
//!
//! Every associate and conjugate is counted separately, so norm 2 carries
//! four primes, a split rational prime `p ≡ 1 (mod 4)` eight, and an inert
//! `p ≡ 3 (mod 4)` four (at norm `p²`).

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::GaussianInt;

/// Largest sieve limit accepted by default (one bit per integer).
pub const DEFAULT_MAX_LIMIT: u64 = 1_000_000_000;

/// Rational primality bitset plus Gaussian prime counts per norm.
#[derive(Clone, Debug)]
pub struct SieveTable {
    limit: u64,
    composite: Vec<u64>,
    counts_by_norm: BTreeMap<u64, u32>,
    /// sorted norms and running totals, for O(log) annulus counts
    norms: Vec<u64>,
    cumulative: Vec<u64>,
}

impl SieveTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn counts_by_norm(&self) -> &BTreeMap<u64, u32> {
        &self.counts_by_norm
    }

    /// Rational primality for `n <= limit`.
    pub fn is_rational_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.limit && self.composite[(n / 64) as usize] & (1 << (n % 64)) == 0
    }

    /// Number of Gaussian primes with `norm <= n`.
    pub fn count_upto(&self, n: u64) -> u64 {
        match self.norms.partition_point(|&v| v <= n) {
            0 => 0,
            k => self.cumulative[k - 1],
        }
    }

    /// Norms in `(lo, hi]` with their prime counts.
    pub fn norms_in(&self, lo: u64, hi: u64) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.counts_by_norm.range(lo + 1..=hi).map(|(&n, &c)| (n, c))
    }

    /// All Gaussian primes with `lo < norm <= hi`, ordered by norm.
    pub fn primes_in(&self, lo: u64, hi: u64) -> Vec<GaussianInt> {
        let norms: Vec<u64> = self.norms_in(lo, hi).map(|(n, _)| n).collect();
        norms.par_iter().flat_map_iter(|&n| primes_of_norm(n)).collect()
    }
}

/// Build the table for all norms up to `x` with the default memory cap.
pub fn build_sieve(x: u64) -> Result<SieveTable> {
    build_sieve_capped(x, DEFAULT_MAX_LIMIT)
}

pub fn build_sieve_capped(x: u64, max_limit: u64) -> Result<SieveTable> {
    if x < 2 {
        return Err(Error::OutOfRange(format!("sieve limit {x} < 2")));
    }
    if x > max_limit {
        return Err(Error::LimitTooLarge { limit: x, max: max_limit });
    }
    let words = (x / 64 + 1) as usize;
    let mut composite = vec![0u64; words];
    composite[0] |= 0b11;
    let mut p = 2u64;
    while p * p <= x {
        if composite[(p / 64) as usize] & (1 << (p % 64)) == 0 {
            let mut m = p * p;
            while m <= x {
                composite[(m / 64) as usize] |= 1 << (m % 64);
                m += p;
            }
        }
        p += 1;
    }
    let is_prime = |n: u64| composite[(n / 64) as usize] & (1 << (n % 64)) == 0;

    let mut counts_by_norm = BTreeMap::new();
    counts_by_norm.insert(2, 4);
    for n in 3..=x {
        if !is_prime(n) {
            continue;
        }
        if n % 4 == 1 {
            counts_by_norm.insert(n, 8);
        } else if let Some(sq) = n.checked_mul(n).filter(|&s| s <= x) {
            counts_by_norm.insert(sq, 4);
        }
    }
    let norms: Vec<u64> = counts_by_norm.keys().copied().collect();
    let cumulative = counts_by_norm
        .values()
        .scan(0u64, |acc, &c| {
            *acc += c as u64;
            Some(*acc)
        })
        .collect();
    Ok(SieveTable { limit: x, composite, counts_by_norm, norms, cumulative })
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_rational_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Classification of a Gaussian integer; zero and units are rejected.
pub fn is_gaussian_prime(g: GaussianInt) -> Result<bool> {
    if g.is_zero() || g.is_unit() {
        return Err(Error::ZeroOrUnit);
    }
    let n = g.norm()?;
    if n == 2 || (n % 4 == 1 && is_rational_prime(n)) {
        return Ok(true);
    }
    // unit multiple of a rational prime q ≡ 3 (mod 4)
    let q = if g.re == 0 { g.im.unsigned_abs() } else if g.im == 0 { g.re.unsigned_abs() } else { return Ok(false) };
    Ok(q % 4 == 3 && is_rational_prime(q))
}

/// `a > b > 0` with `a² + b² = p` for a prime `p ≡ 1 (mod 4)` (Cornacchia).
pub fn two_squares(p: u64) -> Option<(u64, u64)> {
    if p % 4 != 1 {
        return None;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    // sqrt(-1) mod p from any quadratic non-residue
    let t = (2..p).map(|c| pow(c, (p - 1) / 4)).find(|&t| mul(t, t) == p - 1)?;
    let (mut a, mut b) = (p, t.max(p - t));
    let limit = crate::gaussian::isqrt(p);
    while b > limit {
        let r = a % b;
        a = b;
        b = r;
    }
    let rest = p - b * b;
    let c = crate::gaussian::isqrt(rest);
    (c * c == rest).then(|| (b.max(c), b.min(c)))
}

/// Every Gaussian prime of norm `n` (empty if `n` is not a prime norm).
pub fn primes_of_norm(n: u64) -> Vec<GaussianInt> {
    if n == 2 {
        return GaussianInt::new(1, 1).associates().to_vec();
    }
    if n % 4 == 1 && is_rational_prime(n) {
        let (a, b) = two_squares(n).expect("p ≡ 1 mod 4 is a sum of two squares");
        let mut v = GaussianInt::new(a as i64, b as i64).associates().to_vec();
        v.extend(GaussianInt::new(b as i64, a as i64).associates());
        return v;
    }
    let q = crate::gaussian::isqrt(n);
    if q * q == n && q % 4 == 3 && is_rational_prime(q) {
        return GaussianInt::new(q as i64, 0).associates().to_vec();
    }
    Vec::new()
}

/// `S(x)`: Gaussian primes with `x/2 < norm <= x`.
pub fn count_annulus(table: &SieveTable, x: u64) -> Result<u64> {
    if x > table.limit {
        return Err(Error::OutOfRange(format!("x = {x} beyond sieve limit {}", table.limit)));
    }
    // norm > x/2  <=>  norm >= floor(x/2) + 1
    Ok(table.count_upto(x) - table.count_upto(x / 2))
}

/// `S(x) log x / (2x)`, which tends to 1.
pub fn pnt_ratio(table: &SieveTable, x: u64) -> Result<f64> {
    if x < 2 {
        return Err(Error::OutOfRange(format!("x = {x} < 2 has log x <= 0")));
    }
    let s = count_annulus(table, x)? as f64;
    let xf = x as f64;
    Ok(s * xf.ln() / (2.0 * xf))
}
