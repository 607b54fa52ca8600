//! Certified sup-norm tests for multiples `n·κ`, `κ = g·θ`.
//!
//! Membership tests such as `||nθ|| <= δ` run over millions of lattice
//! points. A [`MultipleProbe`] reduces `κ` modulo Z[i] once in ball
//! arithmetic, evaluates `n·κ` in `f64` with a rigorous error bound, and only
//! falls back to a full ball evaluation (with precision doubling) when the
//! `f64` value lies within that bound of the threshold.

use crate::error::{Error, Result};
use crate::gaussian::GaussianInt;
use crate::hp::{precision_ladder, HpComplex, HpReal, DEFAULT_PREC};
use crate::theta::Theta;

/// Rounding slack of one f64 operation on values of magnitude <= 1.
const ULP: f64 = 2.3e-16;

#[derive(Clone, Debug)]
pub struct MultipleProbe<'a> {
    theta: &'a Theta,
    mult: GaussianInt,
    base_prec: u32,
    kr: f64,
    ki: f64,
    kerr: f64,
}

/// Distances `(||Re z||, ||Im z||)` from an `f64` pair.
fn component_dists(re: f64, im: f64) -> (f64, f64) {
    ((re - re.round()).abs(), (im - im.round()).abs())
}

impl<'a> MultipleProbe<'a> {
    pub fn new(theta: &'a Theta, mult: GaussianInt) -> Result<Self> {
        Self::with_prec(theta, mult, DEFAULT_PREC)
    }

    pub fn with_prec(theta: &'a Theta, mult: GaussianInt, base_prec: u32) -> Result<Self> {
        let k = theta.eval(base_prec)?.mul_gaussian(mult).frac();
        let (kr, ki) = k.to_f64();
        let kerr = k.re.rad_f64().max(k.im.rad_f64()) + ULP;
        if kerr > 1e-12 {
            return Err(Error::PrecisionExhausted(format!("theta enclosure too wide at {base_prec} bits")));
        }
        Ok(MultipleProbe { theta, mult, base_prec, kr, ki, kerr })
    }

    /// The reduced `κ` as doubles in `[0, 1)`.
    pub fn kappa(&self) -> (f64, f64) {
        (self.kr, self.ki)
    }

    pub fn multiplier(&self) -> GaussianInt {
        self.mult
    }

    /// `(Re(nκ), Im(nκ))` modulo 1 in `f64` (not certified).
    pub fn phase(&self, n: GaussianInt) -> (f64, f64) {
        let (a, b) = (n.re as f64, n.im as f64);
        (a * self.kr - b * self.ki, a * self.ki + b * self.kr)
    }

    /// `(||Re(nκ)||, ||Im(nκ)||)` in `f64`, accurate to [`Self::err_bound`].
    pub fn dists(&self, n: GaussianInt) -> (f64, f64) {
        let (re, im) = self.phase(n);
        component_dists(re, im)
    }

    /// Bound on the error of either component of [`Self::dists`].
    pub fn err_bound(&self, n: GaussianInt) -> f64 {
        let s = n.re.unsigned_abs() as f64 + n.im.unsigned_abs() as f64;
        2.0 * (s + 1.0) * (self.kerr + 2.0 * ULP)
    }

    /// Ball enclosure of `n·g·θ` at the given precision.
    pub fn exact(&self, n: GaussianInt, prec: u32) -> Result<HpComplex> {
        let m = n
            .checked_mul(self.mult)
            .ok_or_else(|| Error::InputTooLarge(format!("{n} * {}", self.mult)))?;
        Ok(self.theta.eval(prec)?.mul_gaussian(m))
    }

    fn escalate<T>(&self, n: GaussianInt, mut decide: impl FnMut(&HpComplex) -> Option<T>) -> Result<T> {
        for prec in precision_ladder(self.base_prec) {
            if let Some(v) = decide(&self.exact(n, prec)?) {
                return Ok(v);
            }
        }
        Err(Error::PrecisionExhausted(format!(
            "membership of n = {n} (multiplier {}) undecided at 4096 bits",
            self.mult
        )))
    }

    /// Certified `||Im(nκ)|| <= d_im` and `||Re(nκ)|| <= d_re`.
    pub fn within_box(&self, n: GaussianInt, d_im: f64, d_re: f64) -> Result<bool> {
        let (re, im) = self.dists(n);
        let e = self.err_bound(n);
        // every distance to Z is at most 1/2
        let re_ok = if d_re >= 0.5 { Some(true) } else { decide_le(re, e, d_re) };
        let im_ok = if d_im >= 0.5 { Some(true) } else { decide_le(im, e, d_im) };
        match (re_ok, im_ok) {
            (Some(false), _) | (_, Some(false)) => Ok(false),
            (Some(true), Some(true)) => Ok(true),
            _ => self.escalate(n, |z| {
                let p = z.prec();
                let tr = HpReal::from_f64(d_re, p).ok()?;
                let ti = HpReal::from_f64(d_im, p).ok()?;
                let a = z.re.dist_to_int().certified_le(&tr);
                let b = z.im.dist_to_int().certified_le(&ti);
                match (a, b) {
                    (Some(false), _) | (_, Some(false)) => Some(false),
                    (Some(true), Some(true)) => Some(true),
                    _ => None,
                }
            }),
        }
    }

    /// Certified `||nκ|| <= delta` in the sup norm.
    pub fn sup_le(&self, n: GaussianInt, delta: f64) -> Result<bool> {
        self.within_box(n, delta, delta)
    }

    /// Certified `||nκ|| >= bound` in the sup norm.
    pub fn sup_ge(&self, n: GaussianInt, bound: &HpReal) -> Result<bool> {
        let (re, im) = self.dists(n);
        let d = re.max(im);
        let e = self.err_bound(n);
        if d - e >= bound.upper_f64() {
            return Ok(true);
        }
        if d + e < bound.lower_f64() {
            return Ok(false);
        }
        self.escalate(n, |z| {
            bound.with_prec(z.prec()).certified_le(&z.dist_sup())
        })
    }
}

fn decide_le(value: f64, err: f64, threshold: f64) -> Option<bool> {
    if value + err <= threshold {
        Some(true)
    } else if value - err > threshold {
        Some(false)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_path_agrees_with_ball_arithmetic() {
        let theta = Theta::parse("sqrt:2 + i*sqrt:3").unwrap();
        let m = GaussianInt::new(3, -2);
        let probe = MultipleProbe::new(&theta, m).unwrap();
        for a in -40..=40 {
            for b in -40..=40 {
                let n = GaussianInt::new(a, b);
                let (re, im) = probe.dists(n);
                let z = probe.exact(n, 256).unwrap();
                let (er, ei) = (z.re.dist_to_int().to_f64(), z.im.dist_to_int().to_f64());
                let e = probe.err_bound(n);
                assert!((re - er).abs() <= e && (im - ei).abs() <= e);
            }
        }
    }

    #[test]
    fn threshold_on_the_boundary_escalates() {
        // theta = 1/8 + i/4 exactly: ||4θ|| = 1/2 and ||θ|| = 1/4 sit on dyadic thresholds
        let theta = Theta::parse("0.125 + 0.25i").unwrap();
        let probe = MultipleProbe::new(&theta, GaussianInt::new(1, 0)).unwrap();
        assert!(probe.sup_le(GaussianInt::new(1, 0), 0.25).unwrap());
        assert!(!probe.sup_le(GaussianInt::new(1, 0), 0.2499).unwrap());
        assert!(probe.sup_le(GaussianInt::new(4, 0), 0.5).unwrap());
    }

    #[test]
    fn sup_ge_decides() {
        let theta = Theta::parse("sqrt:2 + i*sqrt:3").unwrap();
        let probe = MultipleProbe::new(&theta, GaussianInt::new(1, 0)).unwrap();
        let n = GaussianInt::new(5, 1);
        let d = probe.exact(n, 256).unwrap().dist_sup().to_f64();
        let below = HpReal::from_f64(d * 0.999, 256).unwrap();
        let above = HpReal::from_f64(d * 1.001, 256).unwrap();
        assert!(probe.sup_ge(n, &below).unwrap());
        assert!(!probe.sup_ge(n, &above).unwrap());
    }
}
