//! Certified high-precision reals and complexes.
//!
//! An [`HpReal`] is a ball `[(mid - rad) / 2^prec, (mid + rad) / 2^prec]`
//! with integer `mid` and `rad`. Every operation returns a ball that contains
//! the exact result of applying the operation to any points of the input
//! balls, so a decision taken on an enclosure (a floor, a comparison, a
//! nearest lattice point) is a decision about the exact value.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gaussian::GaussianInt;

/// Default working precision in bits.
pub const DEFAULT_PREC: u32 = 256;
/// Largest precision the automatic doubling ladder will try.
pub const MAX_PREC: u32 = 4096;

/// Precisions tried by certified routines: 256, 512, ..., 4096.
pub fn precision_ladder(start: u32) -> impl Iterator<Item = u32> {
    std::iter::successors(Some(start.max(64)), |p| Some(p * 2)).take_while(|p| *p <= MAX_PREC)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HpReal {
    mid: BigInt,
    rad: BigUint,
    prec: u32,
}

fn ceil_shr(v: &BigUint, bits: u32) -> BigUint {
    let q: BigUint = v >> bits;
    if (&q << bits) == *v {
        q
    } else {
        q + 1u32
    }
}

impl HpReal {
    pub fn zero(prec: u32) -> Self {
        HpReal { mid: BigInt::zero(), rad: BigUint::zero(), prec }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        HpReal { mid: BigInt::from(v) << prec, rad: BigUint::zero(), prec }
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Self {
        HpReal { mid: v << prec, rad: BigUint::zero(), prec }
    }

    /// Raw constructor; the ball is `[(mid - rad), (mid + rad)] * 2^-prec`.
    pub fn from_parts(mid: BigInt, rad: BigUint, prec: u32) -> Self {
        HpReal { mid, rad, prec }
    }

    /// `num / den`, exact when the quotient is dyadic at this precision.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num.clone(), den.clone()) };
        let (q, r) = (num << prec).div_mod_floor(&den);
        let rad = if r.is_zero() { BigUint::zero() } else { BigUint::one() };
        Ok(HpReal { mid: q, rad, prec })
    }

    /// The exact value of a finite `f64`, or a one-ulp ball if it is finer than `prec`.
    pub fn from_f64(v: f64, prec: u32) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::DomainError(format!("non-finite value {v}")));
        }
        if v == 0.0 {
            return Ok(HpReal::zero(prec));
        }
        let bits = v.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
        let mut m = BigInt::from(mant);
        if v < 0.0 {
            m = -m;
        }
        let shift = e + prec as i64;
        if shift >= 0 {
            return Ok(HpReal { mid: m << shift as u32, rad: BigUint::zero(), prec });
        }
        let den = BigInt::one() << (-shift) as u32;
        let (q, r) = m.div_mod_floor(&den);
        let rad = if r.is_zero() { BigUint::zero() } else { BigUint::one() };
        Ok(HpReal { mid: q, rad, prec })
    }

    /// `sqrt(k)` for a non-negative integer `k`.
    pub fn sqrt_u64(k: u64, prec: u32) -> Self {
        let scaled = BigUint::from(k) << (2 * prec);
        let root = scaled.sqrt();
        let rad = if &root * &root == scaled { BigUint::zero() } else { BigUint::one() };
        HpReal { mid: BigInt::from(root), rad, prec }
    }

    /// `sqrt(self)` for a ball that is certified non-negative.
    pub fn sqrt(&self) -> Result<Self> {
        let lo = self.lo_mid();
        if lo.is_negative() {
            return Err(Error::DomainError("square root of an enclosure reaching below zero".into()));
        }
        let hi = self.hi_mid();
        // sqrt is monotone: floor(sqrt(lo * 2^p)) .. ceil(sqrt(hi * 2^p)) at scale 2^p
        let lo_root = (lo.to_biguint().expect("non-negative") << self.prec).sqrt();
        let hi_scaled = hi.to_biguint().expect("non-negative") << self.prec;
        let mut hi_root = hi_scaled.sqrt();
        if &hi_root * &hi_root != hi_scaled {
            hi_root += 1u32;
        }
        Ok(Self::from_bounds(BigInt::from(lo_root), BigInt::from(hi_root), self.prec))
    }

    /// pi via Machin's formula `16 atan(1/5) - 4 atan(1/239)`.
    pub fn pi(prec: u32) -> Self {
        let guard = 64;
        let p = prec + guard;
        let v = atan_inv(5, p) * 16 - atan_inv(239, p) * 4;
        // each series term is truncated by at most one unit; far fewer than 2^guard terms
        Self::round_guard(v, guard, prec)
    }

    /// Euler's number as `sum 1/k!`.
    pub fn e(prec: u32) -> Self {
        let guard = 64;
        let p = prec + guard;
        let mut term = BigInt::one() << p;
        let mut sum = BigInt::zero();
        let mut k = 1u64;
        while !term.is_zero() {
            sum += &term;
            term /= k;
            k += 1;
        }
        // the truncated tail is below one guard unit, each division loses at most one
        Self::round_guard(sum, guard, prec)
    }

    fn round_guard(v: BigInt, guard: u32, prec: u32) -> Self {
        let mid = v >> guard;
        HpReal { mid, rad: BigUint::from(2u32), prec }
    }

    fn from_bounds(lo: BigInt, hi: BigInt, prec: u32) -> Self {
        debug_assert!(lo <= hi);
        let mid: BigInt = (&lo + &hi) >> 1;
        let rad = (&hi - &mid).max(&mid - &lo);
        HpReal { mid, rad: rad.to_biguint().expect("non-negative radius"), prec }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn mid(&self) -> &BigInt {
        &self.mid
    }

    pub fn rad(&self) -> &BigUint {
        &self.rad
    }

    fn lo_mid(&self) -> BigInt {
        &self.mid - BigInt::from(self.rad.clone())
    }

    fn hi_mid(&self) -> BigInt {
        &self.mid + BigInt::from(self.rad.clone())
    }

    /// Radius as an `f64`, rounded up.
    pub fn rad_f64(&self) -> f64 {
        scaled_to_f64(&BigInt::from(self.rad.clone()), self.prec) * (1.0 + 1e-15) + f64::MIN_POSITIVE
    }

    /// Centre of the ball as the nearest `f64` (not certified).
    pub fn to_f64(&self) -> f64 {
        scaled_to_f64(&self.mid, self.prec)
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.magnitude() <= &self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Re-express at another precision (widening the ball when bits are dropped).
    pub fn with_prec(&self, prec: u32) -> Self {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let s = prec - self.prec;
                HpReal { mid: &self.mid << s, rad: &self.rad << s, prec }
            }
            Ordering::Less => {
                let s = self.prec - prec;
                let mid = &self.mid >> s;
                let exact = (&mid << s) == self.mid;
                let mut rad = ceil_shr(&self.rad, s);
                if !exact {
                    rad += 1u32;
                }
                HpReal { mid, rad, prec }
            }
        }
    }

    fn align(&self, other: &Self) -> (Self, Self) {
        let p = self.prec.max(other.prec);
        (self.with_prec(p), other.with_prec(p))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.align(other);
        HpReal { mid: a.mid + b.mid, rad: a.rad + b.rad, prec: a.prec }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (a, b) = self.align(other);
        HpReal { mid: a.mid - b.mid, rad: a.rad + b.rad, prec: a.prec }
    }

    pub fn neg(&self) -> Self {
        HpReal { mid: -&self.mid, rad: self.rad.clone(), prec: self.prec }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.align(other);
        let p = a.prec;
        let prod = &a.mid * &b.mid;
        let mid = &prod >> p;
        let truncated = (&mid << p) != prod;
        let err = a.mid.magnitude() * &b.rad + b.mid.magnitude() * &a.rad + &a.rad * &b.rad;
        let mut rad = ceil_shr(&err, p);
        if truncated {
            rad += 1u32;
        }
        HpReal { mid, rad, prec: p }
    }

    /// Exact multiplication by an integer.
    pub fn mul_i64(&self, k: i64) -> Self {
        HpReal {
            mid: &self.mid * k,
            rad: &self.rad * k.unsigned_abs(),
            prec: self.prec,
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.align(other);
        if b.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = a.prec;
        let bm = b.mid.magnitude();
        // |(A+ea)/(B+eb) - A/B| <= (ra|B| + |A|rb) / (|B| (|B| - rb))
        let denom = bm * (bm - &b.rad);
        let numer = (&a.rad * bm + a.mid.magnitude() * &b.rad) << p;
        let mut rad = numer.div_ceil(&denom);
        let (q, r) = (&a.mid << p).div_mod_floor(&b.mid);
        if !r.is_zero() {
            rad += 1u32;
        }
        Ok(HpReal { mid: q, rad, prec: p })
    }

    /// Shift by an integer so that the centre lies in `[0, 1)`.
    pub fn frac(&self) -> Self {
        let one = BigInt::one() << self.prec;
        HpReal { mid: self.mid.mod_floor(&one), rad: self.rad.clone(), prec: self.prec }
    }

    /// Distance to the nearest integer, `||t||`. The map is 1-Lipschitz, so
    /// the radius carries over unchanged.
    pub fn dist_to_int(&self) -> Self {
        let one = BigInt::one() << self.prec;
        let f = self.mid.mod_floor(&one);
        let g = &one - &f;
        HpReal { mid: f.min(g), rad: self.rad.clone(), prec: self.prec }
    }

    /// `floor` of every point of the ball, if they all agree.
    pub fn floor_certified(&self) -> Option<BigInt> {
        let lo = self.lo_mid() >> self.prec;
        let hi = self.hi_mid() >> self.prec;
        (lo == hi).then_some(lo)
    }

    /// Certified comparison `self <= other`; `None` when the balls overlap undecidably.
    pub fn certified_le(&self, other: &Self) -> Option<bool> {
        let (a, b) = self.align(other);
        if a.hi_mid() <= b.lo_mid() {
            Some(true)
        } else if a.lo_mid() > b.hi_mid() {
            Some(false)
        } else {
            None
        }
    }

    pub fn max(&self, other: &Self) -> Self {
        let (a, b) = self.align(other);
        let lo = a.lo_mid().max(b.lo_mid());
        let hi = a.hi_mid().max(b.hi_mid());
        Self::from_bounds(lo, hi, a.prec)
    }

    /// Upper end of the ball rounded up to an `f64`.
    pub fn upper_f64(&self) -> f64 {
        let v = scaled_to_f64(&self.hi_mid(), self.prec);
        v + v.abs() * 1e-15 + f64::MIN_POSITIVE
    }

    /// Lower end of the ball rounded down to an `f64`.
    pub fn lower_f64(&self) -> f64 {
        let v = scaled_to_f64(&self.lo_mid(), self.prec);
        v - v.abs() * 1e-15 - f64::MIN_POSITIVE
    }
}

/// `m / 2^prec` as an `f64`.
fn scaled_to_f64(m: &BigInt, prec: u32) -> f64 {
    let bits = m.bits() as i64;
    // keep ~64 significant bits before converting
    let drop = (bits - 64).max(0) as u32;
    let top = (m >> drop).to_f64().unwrap_or(f64::NAN);
    top * 2f64.powi(drop as i32 - prec as i32)
}

/// `atan(1/n) * 2^p` by its alternating Taylor series, truncating each term.
fn atan_inv(n: u64, p: u32) -> BigInt {
    let n2 = BigInt::from(n * n);
    let mut power = (BigInt::one() << p) / n;
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !power.is_zero() {
        let term = &power / (2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &n2;
        k += 1;
    }
    sum
}

/// A complex ball with independent radii on the real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HpComplex {
    pub re: HpReal,
    pub im: HpReal,
}

impl HpComplex {
    pub fn new(re: HpReal, im: HpReal) -> Self {
        HpComplex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        HpComplex { re: HpReal::zero(prec), im: HpReal::zero(prec) }
    }

    pub fn from_gaussian(g: GaussianInt, prec: u32) -> Self {
        HpComplex { re: HpReal::from_i64(g.re, prec), im: HpReal::from_i64(g.im, prec) }
    }

    pub fn i(prec: u32) -> Self {
        HpComplex { re: HpReal::zero(prec), im: HpReal::from_i64(1, prec) }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Result<Self> {
        Ok(HpComplex { re: HpReal::from_f64(re, prec)?, im: HpReal::from_f64(im, prec)? })
    }

    pub fn prec(&self) -> u32 {
        self.re.prec.max(self.im.prec)
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        HpComplex { re: self.re.with_prec(prec), im: self.im.with_prec(prec) }
    }

    /// Upper bound on the Euclidean enclosure radius.
    pub fn err_radius(&self) -> f64 {
        self.re.rad_f64() + self.im.rad_f64()
    }

    pub fn conj(&self) -> Self {
        HpComplex { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn add(&self, other: &Self) -> Self {
        HpComplex { re: self.re.add(&other.re), im: self.im.add(&other.im) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        HpComplex { re: self.re.sub(&other.re), im: self.im.sub(&other.im) }
    }

    pub fn neg(&self) -> Self {
        HpComplex { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let re = self.re.mul(&other.re).sub(&self.im.mul(&other.im));
        let im = self.re.mul(&other.im).add(&self.im.mul(&other.re));
        HpComplex { re, im }
    }

    /// Exact multiplication by a Gaussian integer.
    pub fn mul_gaussian(&self, g: GaussianInt) -> Self {
        let re = self.re.mul_i64(g.re).sub(&self.im.mul_i64(g.im));
        let im = self.im.mul_i64(g.re).add(&self.re.mul_i64(g.im));
        HpComplex { re, im }
    }

    pub fn sub_gaussian(&self, g: GaussianInt) -> Self {
        self.sub(&HpComplex::from_gaussian(g, self.prec()))
    }

    pub fn abs_sq(&self) -> HpReal {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn recip(&self) -> Result<Self> {
        let n = self.abs_sq();
        if n.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(HpComplex { re: self.re.div(&n)?, im: self.im.neg().div(&n)? })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn div_real(&self, r: &HpReal) -> Result<Self> {
        Ok(HpComplex { re: self.re.div(r)?, im: self.im.div(r)? })
    }

    /// Both parts certified, the ball contains the origin.
    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    /// Reduce modulo Z[i] so both centre coordinates lie in `[0, 1)`.
    pub fn frac(&self) -> Self {
        HpComplex { re: self.re.frac(), im: self.im.frac() }
    }

    /// Enclosure of the sup-norm distance `||z|| = max(||Re z||, ||Im z||)`.
    pub fn dist_sup(&self) -> HpReal {
        self.re.dist_to_int().max(&self.im.dist_to_int())
    }

    /// `||z||` as an `f64`, provided the enclosure is no wider than `tol`.
    pub fn dist_sup_value(&self, tol: f64) -> Result<f64> {
        let d = self.dist_sup();
        if 2.0 * d.rad_f64() > tol {
            return Err(Error::PrecisionExhausted(format!(
                "enclosure width {:e} exceeds tolerance {tol:e}",
                2.0 * d.rad_f64()
            )));
        }
        Ok(d.to_f64().clamp(0.0, 0.5))
    }

    /// Componentwise nearest integer, ties rounded half up.
    pub fn nearest_gaussian_int(&self) -> Result<GaussianInt> {
        let half = HpReal::from_parts(BigInt::one() << (self.re.prec - 1), BigUint::zero(), self.re.prec);
        let re = self.re.add(&half).floor_certified();
        let half = half.with_prec(self.im.prec);
        let im = self.im.add(&half).floor_certified();
        match (re, im) {
            (Some(a), Some(b)) => {
                let a = a.to_i64().ok_or_else(|| Error::InputTooLarge("nearest lattice point".into()))?;
                let b = b.to_i64().ok_or_else(|| Error::InputTooLarge("nearest lattice point".into()))?;
                Ok(GaussianInt::new(a, b))
            }
            _ => Err(Error::PrecisionExhausted("enclosure straddles a rounding boundary".into())),
        }
    }

    /// Centre as `(re, im)` doubles.
    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

/// `sign(x)` of a certified-nonzero ball.
pub fn certified_sign(x: &HpReal) -> Option<Sign> {
    if x.contains_zero() {
        None
    } else {
        Some(x.mid.sign())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: u32 = 128;

    fn c(re: f64, im: f64) -> HpComplex {
        HpComplex::from_f64(re, im, P).unwrap()
    }

    fn dec(s: &str) -> HpReal {
        // exact decimal -> ball, independent of the theta parser
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        let neg = int.starts_with('-');
        let digits: BigInt = format!("{}{}", int.trim_start_matches('-'), frac).parse().unwrap();
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        let num = if neg { -digits } else { digits };
        HpReal::from_ratio(&num, &den, P).unwrap()
    }

    #[test]
    fn dist_sup_examples() {
        let z = HpComplex::new(dec("0.3"), dec("0.6"));
        assert!((z.dist_sup_value(1e-20).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(c(2.0, 5.0).dist_sup_value(1e-30).unwrap(), 0.0);
        assert_eq!(c(0.5, 0.0).dist_sup_value(1e-30).unwrap(), 0.5);
    }

    #[test]
    fn dist_sup_of_integer_is_exactly_zero() {
        let d = c(-7.0, 3.0).dist_sup();
        assert!(d.mid().is_zero() && d.is_exact());
        assert!(!c(-7.0, 3.25).dist_sup().contains_zero());
    }

    #[test]
    fn nearest_examples() {
        let z = HpComplex::new(dec("1.4"), dec("2.6"));
        assert_eq!(z.nearest_gaussian_int().unwrap(), GaussianInt::new(1, 3));
        assert_eq!(c(0.5, 0.5).nearest_gaussian_int().unwrap(), GaussianInt::new(1, 1));
        assert_eq!(c(-0.5, -2.5).nearest_gaussian_int().unwrap(), GaussianInt::new(0, -2));
    }

    #[test]
    fn nearest_refuses_uncertifiable_ties() {
        let tie = HpReal::from_parts(BigInt::one() << (P - 1), BigUint::from(3u32), P);
        let z = HpComplex::new(tie, HpReal::zero(P));
        assert!(matches!(z.nearest_gaussian_int(), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn constants_enclose_known_digits() {
        let pi = HpReal::pi(200);
        assert!((pi.to_f64() - std::f64::consts::PI).abs() < 1e-15);
        let e = HpReal::e(200);
        assert!((e.to_f64() - std::f64::consts::E).abs() < 1e-15);
        // 50 known digits of pi
        let pi50 = {
            let num: BigInt = "314159265358979323846264338327950288419716939937510".parse().unwrap();
            HpReal::from_ratio(&num, &BigInt::from(10u32).pow(50), 200).unwrap()
        };
        assert!((pi.sub(&pi50)).to_f64().abs() < 1e-49);
        let s2 = HpReal::sqrt_u64(2, 200);
        let sq = s2.mul(&s2).sub(&HpReal::from_i64(2, 200));
        assert!(sq.contains_zero());
        assert!(HpReal::sqrt_u64(49, 200).is_exact());
    }

    #[test]
    fn division_enclosure() {
        let one = HpReal::from_i64(1, P);
        let three = HpReal::from_i64(3, P);
        let third = one.div(&three).unwrap();
        let back = third.mul(&three).sub(&one);
        assert!(back.contains_zero());
        assert!(matches!(one.div(&HpReal::zero(P)), Err(Error::DivisionByZero)));
        let z = c(3.0, 4.0);
        let w = z.recip().unwrap().mul(&z).sub(&c(1.0, 0.0));
        assert!(w.contains_zero());
    }

    #[test]
    fn with_prec_round_trip_keeps_enclosure() {
        let x = HpReal::sqrt_u64(3, 300);
        let y = x.with_prec(100).with_prec(300);
        assert!(y.sub(&x).contains_zero());
        assert!(x.with_prec(100).rad() >= &BigUint::one());
    }

    proptest! {
        #[test]
        fn dist_sup_is_periodic(re in -50.0f64..50.0, im in -50.0f64..50.0,
                                a in -1000i64..1000, b in -1000i64..1000) {
            let z = c(re, im);
            let shifted = HpComplex::new(z.re.add(&HpReal::from_i64(a, P)), z.im.add(&HpReal::from_i64(b, P)));
            prop_assert_eq!(z.dist_sup(), shifted.dist_sup());
        }

        #[test]
        fn mul_encloses_f64_product(a in -1e3f64..1e3, b in -1e3f64..1e3) {
            let x = HpReal::from_f64(a, P).unwrap();
            let y = HpReal::from_f64(b, P).unwrap();
            let z = x.mul(&y);
            prop_assert!(((z.to_f64() - a * b) / (1.0 + (a * b).abs())).abs() < 1e-14);
        }

        #[test]
        fn sqrt_ball_squares_back(k in 1u64..1_000_000) {
            let x = HpReal::from_i64(k as i64, P).sqrt().unwrap();
            prop_assert!(x.mul(&x).sub(&HpReal::from_i64(k as i64, P)).contains_zero());
        }
    }
}
