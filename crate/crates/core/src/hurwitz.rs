//! Hurwitz (nearest Gaussian integer) continued fractions.
//!
//! `θ₀ = θ`, `aₙ = round(θₙ)`, `θₙ₊₁ = 1/(θₙ - aₙ)`, with every rounding
//! decision certified on a ball enclosure of `θₙ`. Convergents follow the
//! usual recurrence and approximate θ to within `(2+√2)/|q|²`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{gi_gcd, GaussianInt, ONE, ZERO};
use crate::hp::{precision_ladder, HpComplex, HpReal, DEFAULT_PREC, MAX_PREC};
use crate::theta::Theta;

/// Why an expansion stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StopReason {
    /// `max_terms` quotients were produced.
    Complete,
    /// The remainder `θₙ - aₙ` is (or cannot be told apart from) zero.
    RemainderEnclosesZero,
    /// A rounding decision could not be certified.
    Uncertified,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CfExpansion {
    pub theta: String,
    pub partial_quotients: Vec<GaussianInt>,
    pub certified_terms: usize,
    pub precision_bits: u32,
    pub stop: StopReason,
}

/// Failure modes of [`expand`], each carrying the certified prefix.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CfError {
    #[error("theta lies in Q(i): expansion terminated after {} terms", .0.partial_quotients.len())]
    Terminated(Box<CfExpansion>),
    #[error("precision exhausted after {} certified terms", .0.certified_terms)]
    PrecisionExhausted(Box<CfExpansion>),
    #[error(transparent)]
    Other(#[from] Error),
}

impl From<CfError> for Error {
    fn from(e: CfError) -> Self {
        match e {
            CfError::Terminated(x) => Error::DomainError(format!(
                "theta lies in Q(i): expansion terminated after {} terms",
                x.partial_quotients.len()
            )),
            CfError::PrecisionExhausted(x) => {
                Error::PrecisionExhausted(format!("continued fraction certified only {} terms", x.certified_terms))
            }
            CfError::Other(e) => e,
        }
    }
}

/// One pass at a fixed precision.
pub fn expand_at(theta: &HpComplex, max_terms: usize) -> CfExpansion {
    let mut quotients = Vec::with_capacity(max_terms);
    let mut t = theta.clone();
    let mut stop = StopReason::Complete;
    while quotients.len() < max_terms {
        let a = match t.nearest_gaussian_int() {
            Ok(a) => a,
            Err(_) => {
                stop = StopReason::Uncertified;
                break;
            }
        };
        quotients.push(a);
        if quotients.len() == max_terms {
            break;
        }
        let r = t.sub_gaussian(a);
        if r.contains_zero() {
            stop = StopReason::RemainderEnclosesZero;
            break;
        }
        t = match r.recip() {
            Ok(v) => v,
            Err(_) => {
                stop = StopReason::RemainderEnclosesZero;
                break;
            }
        };
    }
    CfExpansion {
        theta: String::new(),
        certified_terms: quotients.len(),
        partial_quotients: quotients,
        precision_bits: theta.prec(),
        stop,
    }
}

/// Expand θ to `max_terms` quotients, doubling the working precision from
/// 256 up to 4096 bits as needed.
pub fn expand(theta: &Theta, max_terms: usize) -> std::result::Result<CfExpansion, CfError> {
    expand_from(theta, max_terms, DEFAULT_PREC)
}

pub fn expand_from(theta: &Theta, max_terms: usize, start_prec: u32) -> std::result::Result<CfExpansion, CfError> {
    let mut last = None;
    for prec in precision_ladder(start_prec) {
        let value = theta.eval(prec)?;
        let mut exp = expand_at(&value, max_terms);
        exp.theta = theta.source().to_string();
        match exp.stop {
            StopReason::Complete => return Ok(exp),
            StopReason::RemainderEnclosesZero => {
                let exact_zero = {
                    let n = exp.partial_quotients.len();
                    exact_remainder_is_zero(&value, &exp.partial_quotients[..n])
                };
                if exact_zero || prec >= MAX_PREC {
                    return Err(CfError::Terminated(Box::new(exp)));
                }
            }
            StopReason::Uncertified => {}
        }
        last = Some(exp);
    }
    Err(CfError::PrecisionExhausted(Box::new(last.expect("at least one precision tried"))))
}

/// Replays the recurrence and reports whether the final remainder is an exact zero ball.
fn exact_remainder_is_zero(theta: &HpComplex, quotients: &[GaussianInt]) -> bool {
    let mut t = theta.clone();
    for (k, a) in quotients.iter().enumerate() {
        let r = t.sub_gaussian(*a);
        if k + 1 == quotients.len() {
            return r.re.is_exact() && r.im.is_exact() && r.contains_zero();
        }
        match r.recip() {
            Ok(v) => t = v,
            Err(_) => return false,
        }
    }
    false
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Convergent {
    pub p: GaussianInt,
    pub q: GaussianInt,
    pub index: usize,
}

impl Convergent {
    pub fn q_abs(&self) -> f64 {
        self.q.abs()
    }

    pub fn q_norm(&self) -> u64 {
        self.q.norm_u128() as u64
    }
}

/// Convergents `pₙ/qₙ` of the certified prefix; stops early on `i64` overflow.
pub fn convergents(exp: &CfExpansion) -> Vec<Convergent> {
    let mut out = Vec::new();
    let (mut p_prev, mut q_prev) = (ONE, ZERO);
    let (mut p, mut q) = match exp.partial_quotients.first() {
        Some(&a0) => (a0, ONE),
        None => return out,
    };
    out.push(Convergent { p, q, index: 0 });
    for (n, &a) in exp.partial_quotients.iter().enumerate().take(exp.certified_terms).skip(1) {
        let next = a
            .checked_mul(p)
            .and_then(|x| x.checked_add(p_prev))
            .zip(a.checked_mul(q).and_then(|x| x.checked_add(q_prev)));
        let Some((np, nq)) = next else { break };
        if nq.norm().is_err() || np.norm().is_err() {
            break;
        }
        p_prev = p;
        q_prev = q;
        p = np;
        q = nq;
        out.push(Convergent { p, q, index: n });
    }
    out
}

/// The convergent whose `norm(q)` is the largest not exceeding `target_norm`.
pub fn pick_denominator(convs: &[Convergent], target_norm: u64) -> Result<Convergent> {
    convs
        .iter()
        .filter(|c| c.q_norm() <= target_norm)
        // smaller index wins ties
        .min_by_key(|c| (target_norm - c.q_norm(), c.index))
        .copied()
        .ok_or(Error::NoConvergentBelowTarget(target_norm))
}

/// The Hurwitz approximation constant `2 + √2`.
pub fn hurwitz_constant(prec: u32) -> HpReal {
    HpReal::from_i64(2, prec).add(&HpReal::sqrt_u64(2, prec))
}

pub const HURWITZ_C: f64 = 2.0 + std::f64::consts::SQRT_2;

/// `|θ - p/q|·|q|²` as a certified ball, computed as `|qθ - p|·|q|`.
pub fn approximation_quality(theta: &HpComplex, c: &Convergent) -> HpReal {
    let e = theta.mul_gaussian(c.q).sub_gaussian(c.p);
    let prec = theta.prec();
    e.abs_sq()
        .mul(&HpReal::from_i64(c.q_norm() as i64, prec))
        .sqrt()
        .unwrap_or_else(|_| HpReal::zero(prec))
}

/// Certified check of `|θ - p/q| <= C/|q|²` with `C = 2+√2`.
pub fn satisfies_hurwitz_bound(theta: &HpComplex, c: &Convergent) -> Option<bool> {
    let prec = theta.prec();
    // compare squares: |qθ - p|² N(q) <= C²
    let lhs = theta
        .mul_gaussian(c.q)
        .sub_gaussian(c.p)
        .abs_sq()
        .mul(&HpReal::from_i64(c.q_norm() as i64, prec));
    let cc = hurwitz_constant(prec);
    lhs.certified_le(&cc.mul(&cc))
}

/// `p_n q_{n-1} - p_{n-1} q_n`, which is always a unit.
pub fn determinant(prev: &Convergent, cur: &Convergent) -> GaussianInt {
    cur.p * prev.q - prev.p * cur.q
}

/// Whether `gcd(p, q)` is a unit.
pub fn is_coprime(c: &Convergent) -> bool {
    gi_gcd(c.p, c.q).map(|g| g == ONE).unwrap_or(false)
}
