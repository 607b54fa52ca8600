//! Exact arithmetic in the Gaussian integers Z[i].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest coordinate magnitude for which the norm is guaranteed to fit.
pub const COORD_LIMIT: i64 = 1 << 31;

/// A lattice point `re + im*i` of Z[i].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GaussianInt {
    pub re: i64,
    pub im: i64,
}

pub const ZERO: GaussianInt = GaussianInt { re: 0, im: 0 };
pub const ONE: GaussianInt = GaussianInt { re: 1, im: 0 };
pub const I: GaussianInt = GaussianInt { re: 0, im: 1 };

/// The four units 1, i, -1, -i in that order.
pub const UNITS: [GaussianInt; 4] = [
    GaussianInt { re: 1, im: 0 },
    GaussianInt { re: 0, im: 1 },
    GaussianInt { re: -1, im: 0 },
    GaussianInt { re: 0, im: -1 },
];

impl GaussianInt {
    pub const fn new(re: i64, im: i64) -> Self {
        GaussianInt { re, im }
    }

    /// `re² + im²`, or `InputTooLarge` when a coordinate exceeds 2³¹ in magnitude.
    pub fn norm(self) -> Result<u64> {
        if self.re.unsigned_abs() > COORD_LIMIT as u64 || self.im.unsigned_abs() > COORD_LIMIT as u64 {
            return Err(Error::InputTooLarge(format!("{self} exceeds the 2^31 lattice range")));
        }
        Ok(self.norm_u128() as u64)
    }

    /// Norm without the range check; exact for every `i64` pair.
    pub fn norm_u128(self) -> u128 {
        let a = self.re.unsigned_abs() as u128;
        let b = self.im.unsigned_abs() as u128;
        a * a + b * b
    }

    pub fn abs(self) -> f64 {
        (self.norm_u128() as f64).sqrt()
    }

    pub fn conj(self) -> Self {
        GaussianInt::new(self.re, -self.im)
    }

    /// Multiplication by `i`.
    pub fn mul_i(self) -> Self {
        GaussianInt::new(-self.im, self.re)
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn is_unit(self) -> bool {
        self.norm_u128() == 1
    }

    /// The four associates `u * self`, in the order of [`UNITS`].
    pub fn associates(self) -> [GaussianInt; 4] {
        let a = self;
        let b = a.mul_i();
        let c = b.mul_i();
        let d = c.mul_i();
        [a, b, c, d]
    }

    /// The associate in the half-open first quadrant `re > 0, im >= 0` (zero maps to zero).
    pub fn canonical(self) -> Self {
        if self.is_zero() {
            return self;
        }
        self.associates()
            .into_iter()
            .find(|g| g.re > 0 && g.im >= 0)
            .expect("exactly one associate lies in the first quadrant")
    }

    pub fn checked_add(self, rhs: Self) -> Option<Self> {
        Some(GaussianInt::new(self.re.checked_add(rhs.re)?, self.im.checked_add(rhs.im)?))
    }

    pub fn checked_mul(self, rhs: Self) -> Option<Self> {
        let re = (self.re as i128) * (rhs.re as i128) - (self.im as i128) * (rhs.im as i128);
        let im = (self.re as i128) * (rhs.im as i128) + (self.im as i128) * (rhs.re as i128);
        Some(GaussianInt::new(i64::try_from(re).ok()?, i64::try_from(im).ok()?))
    }

    /// Euclidean division with the quotient rounded to the nearest Gaussian
    /// integer, so that `norm(rem) <= norm(divisor) / 2`.
    pub fn div_rem(self, divisor: Self) -> Option<(Self, Self)> {
        if divisor.is_zero() {
            return None;
        }
        let n = divisor.norm_u128() as i128;
        let num_re = (self.re as i128) * (divisor.re as i128) + (self.im as i128) * (divisor.im as i128);
        let num_im = (self.im as i128) * (divisor.re as i128) - (self.re as i128) * (divisor.im as i128);
        let q = GaussianInt::new(round_div(num_re, n) as i64, round_div(num_im, n) as i64);
        let r = self - q.checked_mul(divisor)?;
        Some((q, r))
    }

    /// `self / divisor` when the division is exact.
    pub fn exact_div(self, divisor: Self) -> Option<Self> {
        match self.div_rem(divisor)? {
            (q, r) if r.is_zero() => Some(q),
            _ => None,
        }
    }

    /// Whether `self` divides `other`. Zero divides only zero.
    pub fn divides(self, other: Self) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.exact_div(self).is_some()
    }
}

/// `round(num / den)` with ties toward +infinity, `den > 0`.
fn round_div(num: i128, den: i128) -> i128 {
    (2 * num + den).div_euclid(2 * den)
}

/// Greatest common divisor, canonicalized to the first-quadrant associate.
pub fn gi_gcd(a: GaussianInt, b: GaussianInt) -> Result<GaussianInt> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::BothZero);
    }
    let (mut x, mut y) = (a, b);
    while !y.is_zero() {
        let (_, r) = x.div_rem(y).ok_or_else(|| Error::InputTooLarge("gcd intermediate overflow".into()))?;
        x = y;
        y = r;
    }
    Ok(x.canonical())
}

impl Add for GaussianInt {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        GaussianInt::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for GaussianInt {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        GaussianInt::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for GaussianInt {
    type Output = Self;
    fn neg(self) -> Self {
        GaussianInt::new(-self.re, -self.im)
    }
}

impl Mul for GaussianInt {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        GaussianInt::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.re, self.im)
    }
}

/// Largest `r >= 0` with `r² <= n`.
pub fn isqrt(n: u64) -> u64 {
    let n128 = n as u128;
    let mut r = (n as f64).sqrt() as u128;
    while r * r > n128 {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n128 {
        r += 1;
    }
    r as u64
}

/// Lattice points with `lo < norm <= hi`, row by row in increasing `re`, then `im`.
pub fn annulus_points(lo: u64, hi: u64) -> impl Iterator<Item = GaussianInt> {
    let r = isqrt(hi) as i64;
    (-r..=r).flat_map(move |a| {
        let a2 = (a * a) as u64;
        let outer = isqrt(hi - a2) as i64;
        // |b| <= inner means norm <= lo
        let inner = if lo >= a2 { isqrt(lo - a2) as i64 } else { -1 };
        let (left, right) = if inner < 0 {
            ((-outer)..=outer, (outer + 1)..=outer)
        } else {
            ((-outer)..=(-inner - 1), (inner + 1)..=outer)
        };
        left.chain(right)
            .map(move |b| GaussianInt::new(a, b))
    })
}

/// Number of lattice points with `lo < norm <= hi`.
pub fn annulus_count(lo: u64, hi: u64) -> u64 {
    disk_count(hi) - disk_count(lo)
}

/// Number of lattice points with `norm <= n`, origin included.
pub fn disk_count(n: u64) -> u64 {
    let r = isqrt(n) as i64;
    (-r..=r).map(|a| 2 * isqrt(n - (a * a) as u64) + 1).sum()
}
