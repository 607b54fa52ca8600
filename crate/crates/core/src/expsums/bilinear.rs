//! The type I sums `E_i` and the bilinear type II sums `F_i`.
//!
//! For a frequency `j` and a multiplier `m` the inner sum over `n` runs over
//! `x/(2N(m)) < N(n) <= x/N(m)`, so that `x/2 < N(mn) <= x`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use super::{annulus_exp_sum_f64, AnnulusSpec, BoundReport, Budget, FreqBox, Phase};
use crate::error::{Error, Result};
use crate::gaussian::{annulus_points, GaussianInt};
use crate::hurwitz::Convergent;
use crate::probe::MultipleProbe;
use crate::theta::Theta;
use crate::vaaler::e;

/// Coefficients `a_m`, `b_n` with `|a_m|, |b_n| <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CoeffSource {
    Zeros,
    Ones,
    /// Uniform in the unit disc, a pure function of `(seed, side, n)`.
    RandomDisc { seed: u64 },
}

/// Which of the two coefficient sequences is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoeffSide {
    A,
    B,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl CoeffSource {
    pub fn value(&self, side: CoeffSide, n: GaussianInt) -> Complex64 {
        match *self {
            CoeffSource::Zeros => Complex64::new(0.0, 0.0),
            CoeffSource::Ones => Complex64::new(1.0, 0.0),
            CoeffSource::RandomDisc { seed } => {
                let tag = match side {
                    CoeffSide::A => 0xa,
                    CoeffSide::B => 0xb,
                };
                let key = splitmix(splitmix(splitmix(seed ^ tag) ^ n.re as u64) ^ n.im as u64);
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(key);
                let r = rng.gen::<f64>().sqrt();
                let t: f64 = rng.gen();
                e(t) * r
            }
        }
    }
}

/// Nonzero `m` with `lo < N(m) <= hi`.
pub fn multipliers(lo: f64, hi: f64) -> Vec<GaussianInt> {
    annulus_points(lo.max(0.0).floor() as u64, hi.max(0.0).floor() as u64).collect()
}

/// The `n`-range `(x/(2N(m)), x/N(m)]` for a multiplier of norm `nm`.
pub fn inner_range(x: f64, nm: u64) -> AnnulusSpec {
    AnnulusSpec { lo: x / (2.0 * nm as f64), hi: x / nm as f64 }
}

/// `j·(κr + iκi)` reduced modulo Z[i].
fn scale(j: (i64, i64), kr: f64, ki: f64) -> (f64, f64) {
    let (a, b) = (j.0 as f64, j.1 as f64);
    let re = a * kr - b * ki;
    let im = a * ki + b * kr;
    (re - re.round(), im - im.round())
}

fn phase_of(phase: Phase, j: (i64, i64), re: f64, im: f64) -> f64 {
    let (a, b) = (j.0 as f64, j.1 as f64);
    match phase {
        // Im(j·w)
        Phase::Im => a * im + b * re,
        // Re(j·w)
        Phase::Re => a * re - b * im,
    }
}

fn m_norm(m: GaussianInt) -> u64 {
    m.norm_u128() as u64
}

/// `Σ_j Σ_{lo < N(m) <= hi} |Σ_n e(phase(j·m·n·θ))|`.
pub fn e_sum(theta: &Theta, freqs: &[(i64, i64)], phase: Phase, lo: f64, hi: f64, x: f64, budget: &Budget) -> Result<f64> {
    let ms = multipliers(lo, hi);
    let rows: f64 = ms.iter().map(|&m| 2.0 * (x / m_norm(m) as f64).sqrt() + 1.0).sum();
    budget.check("E-sum", rows * freqs.len() as f64)?;
    let per_m: Vec<f64> = ms
        .par_iter()
        .map(|&m| {
            let probe = MultipleProbe::new(theta, m)?;
            let (kr, ki) = probe.kappa();
            let spec = inner_range(x, m_norm(m));
            let mut s = 0.0;
            for &j in freqs {
                let (re, im) = scale(j, kr, ki);
                s += annulus_exp_sum_f64(spec, re, im, phase, budget)?.norm();
            }
            Ok(s)
        })
        .collect::<Result<_>>()?;
    Ok(per_m.iter().sum())
}

/// `E₃(H1, H2)` restricted to `K < N(m) <= K'`.
pub fn e3_range(theta: &Theta, bx: &FreqBox, k: f64, kp: f64, x: f64, budget: &Budget) -> Result<f64> {
    e_sum(theta, &bx.freqs(), Phase::Im, k, kp, x, budget)
}

/// `E₃(H1, H2) = Σ_{j} Σ_{N(m) <= M} |Σ_n e(Im(jmnθ))|`.
pub fn e3(theta: &Theta, bx: &FreqBox, m_max: f64, x: f64, budget: &Budget) -> Result<f64> {
    e3_range(theta, bx, 0.0, m_max, x, budget)
}

/// `E₁(H) = Σ_{1<=|j|<=H} Σ_m |Σ_n e(j Im(mnθ))|`, which is `E₃(H, 1/2)`.
pub fn e1(theta: &Theta, h: f64, m_max: f64, x: f64, budget: &Budget) -> Result<f64> {
    e3(theta, &FreqBox::new(h, 0.5)?, m_max, x, budget)
}

/// `E₂(H) = Σ_{1<=|j|<=H} Σ_m |Σ_n e(j Re(mnθ))|`.
pub fn e2(theta: &Theta, h: f64, m_max: f64, x: f64, budget: &Budget) -> Result<f64> {
    let freqs = FreqBox::new(h, 0.5)?.freqs();
    e_sum(theta, &freqs, Phase::Re, 0.0, m_max, x, budget)
}

/// Per-frequency `S_{j,m} = Σ_n b_n e(phase(jmnθ))` for one multiplier.
fn inner_sums(
    theta: &Theta,
    m: GaussianInt,
    freqs: &[(i64, i64)],
    phase: Phase,
    x: f64,
    coeffs: CoeffSource,
) -> Result<Vec<Complex64>> {
    let probe = MultipleProbe::new(theta, m)?;
    let (lo, hi) = inner_range(x, m_norm(m)).int_bounds();
    let mut acc = vec![Complex64::new(0.0, 0.0); freqs.len()];
    for n in annulus_points(lo, hi) {
        let b = coeffs.value(CoeffSide::B, n);
        let (re, im) = probe.phase(n);
        for (s, &j) in acc.iter_mut().zip(freqs) {
            *s += b * e(phase_of(phase, j, re, im));
        }
    }
    Ok(acc)
}

fn pair_cost(ms: &[GaussianInt], x: f64, freqs: usize) -> f64 {
    let pts: f64 = ms.iter().map(|&m| super::disk_cost(x / m_norm(m) as f64)).sum();
    pts * freqs as f64
}

/// Per-frequency `Σ_{lo<N(m)<=hi, mn∈B} a_m b_n e(phase(jmnθ))`.
#[allow(clippy::too_many_arguments)]
pub fn bilinear_sums(
    theta: &Theta,
    freqs: &[(i64, i64)],
    phase: Phase,
    lo: f64,
    hi: f64,
    x: f64,
    coeffs: CoeffSource,
    budget: &Budget,
) -> Result<Vec<Complex64>> {
    let ms = multipliers(lo, hi);
    budget.check("bilinear sum", pair_cost(&ms, x, freqs.len()))?;
    let per_m: Vec<Vec<Complex64>> = ms
        .par_iter()
        .map(|&m| {
            let a = coeffs.value(CoeffSide::A, m);
            Ok(inner_sums(theta, m, freqs, phase, x, coeffs)?.into_iter().map(|s| a * s).collect())
        })
        .collect::<Result<_>>()?;
    let mut total = vec![Complex64::new(0.0, 0.0); freqs.len()];
    for row in &per_m {
        for (t, s) in total.iter_mut().zip(row) {
            *t += s;
        }
    }
    Ok(total)
}

/// `F₃(H1, H2, K, K')`.
pub fn f3_range(theta: &Theta, bx: &FreqBox, k: f64, kp: f64, x: f64, coeffs: CoeffSource, budget: &Budget) -> Result<f64> {
    let sums = bilinear_sums(theta, &bx.freqs(), Phase::Im, k, kp, x, coeffs, budget)?;
    Ok(sums.iter().map(|s| s.norm()).sum())
}

/// `F₃(H1, H2)` over `x^α < N(m) <= x^{α+β}`.
#[allow(clippy::too_many_arguments)]
pub fn f3(theta: &Theta, bx: &FreqBox, alpha: f64, beta: f64, x: f64, coeffs: CoeffSource, budget: &Budget) -> Result<f64> {
    f3_range(theta, bx, x.powf(alpha), x.powf(alpha + beta), x, coeffs, budget)
}

/// `F₁(H) = F₃(H, 1/2)`.
pub fn f1(theta: &Theta, h: f64, alpha: f64, beta: f64, x: f64, coeffs: CoeffSource, budget: &Budget) -> Result<f64> {
    f3(theta, &FreqBox::new(h, 0.5)?, alpha, beta, x, coeffs, budget)
}

/// `F₂(H)`, with `Re` in place of `Im`.
pub fn f2(theta: &Theta, h: f64, alpha: f64, beta: f64, x: f64, coeffs: CoeffSource, budget: &Budget) -> Result<f64> {
    let freqs = FreqBox::new(h, 0.5)?.freqs();
    let sums = bilinear_sums(theta, &freqs, Phase::Re, x.powf(alpha), x.powf(alpha + beta), x, coeffs, budget)?;
    Ok(sums.iter().map(|s| s.norm()).sum())
}

/// Checks `F₃(H1,H2,K,K')² <= N_j·N_m·Σ_j Σ_{n1,n2} b_{n1} conj(b_{n2}) Σ_m e(Im(jm(n1-n2)θ))`,
/// with `N_j`, `N_m` the exact numbers of frequencies and multipliers.
///
/// The right side is evaluated in its expanded form; its equality with
/// `Σ_j Σ_m |S_{j,m}|²` is recorded in the context (`direct`, `expanded`).
#[allow(clippy::too_many_arguments)]
pub fn cauchy_schwarz_diagnostic(
    theta: &Theta,
    bx: &FreqBox,
    k: f64,
    kp: f64,
    x: f64,
    coeffs: CoeffSource,
    budget: &Budget,
) -> Result<BoundReport> {
    if !(k > 0.0 && k < kp && kp <= 2.0 * k) {
        return Err(Error::DomainError(format!("need 0 < K < K' <= 2K, got K = {k}, K' = {kp}")));
    }
    let freqs = bx.freqs();
    let ms = multipliers(k, kp);
    let ns = multipliers(x / (2.0 * kp), x / k);
    budget.check("Cauchy-Schwarz expansion", (ns.len() * ns.len() * freqs.len()) as f64 * (2.0 * kp.sqrt() + 1.0))?;

    let lhs = f3_range(theta, bx, k, kp, x, coeffs, budget)?;
    let direct_rows: Vec<f64> = ms
        .par_iter()
        .map(|&m| Ok(inner_sums(theta, m, &freqs, Phase::Im, x, coeffs)?.iter().map(|s| s.norm_sqr()).sum()))
        .collect::<Result<_>>()?;
    let direct: f64 = direct_rows.iter().sum();

    let expanded_rows: Vec<Complex64> = ns
        .par_iter()
        .map(|&n1| {
            let b1 = coeffs.value(CoeffSide::B, n1);
            let mut acc = Complex64::new(0.0, 0.0);
            for &n2 in &ns {
                let (nn1, nn2) = (m_norm(n1) as f64, m_norm(n2) as f64);
                let lo = k.max(x / (2.0 * nn1)).max(x / (2.0 * nn2));
                let hi = kp.min(x / nn1).min(x / nn2);
                if hi.floor() <= lo.floor() {
                    continue;
                }
                let w = b1 * coeffs.value(CoeffSide::B, n2).conj();
                let probe = MultipleProbe::new(theta, n1 - n2)?;
                let (kr, ki) = probe.kappa();
                for &j in &freqs {
                    let (re, im) = scale(j, kr, ki);
                    acc += w * annulus_exp_sum_f64(AnnulusSpec { lo, hi }, re, im, Phase::Im, budget)?;
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let expanded: Complex64 = expanded_rows.iter().sum();

    let (nj, nm) = (freqs.len() as f64, ms.len() as f64);
    let literal = bx.h1 * bx.h2 * k * expanded.re;
    Ok(BoundReport::new("cauchy_schwarz", lhs * lhs, nj * nm * expanded.re)
        .with("direct", direct)
        .with("expanded", expanded.re)
        .with("expanded_im", expanded.im)
        .with("n_freqs", nj)
        .with("n_multipliers", nm)
        .with("K", k)
        .with("Kp", kp)
        .with("x", x)
        .with("literal_rhs", literal)
        .with("literal_constant", if literal > 0.0 { lhs * lhs / literal } else { f64::INFINITY }))
}

/// Dyadic intervals `(K, min(2K, end)]` starting at `K = start`.
pub fn dyadic_splits(start: f64, end: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut k = start;
    while k < end {
        out.push((k, (2.0 * k).min(end)));
        k *= 2.0;
    }
    out
}

/// Measured `E₃`, `F₃` and their dyadic pieces against the composite
/// right-hand sides, with `|q|` from `conv`.
#[allow(clippy::too_many_arguments)]
pub fn e3_f3_bound_reports(
    theta: &Theta,
    conv: &Convergent,
    bx: &FreqBox,
    m_max: f64,
    alpha: f64,
    beta: f64,
    x: f64,
    coeffs: CoeffSource,
    budget: &Budget,
) -> Result<Vec<BoundReport>> {
    let q = conv.q_abs();
    let (h1, h2) = (bx.h1, bx.h2);
    let hs = h1 * h1 + h2 * h2;
    let ctx = |r: BoundReport| {
        r.with("H1", h1)
            .with("H2", h2)
            .with("x", x)
            .with("M", m_max)
            .with("alpha", alpha)
            .with("beta", beta)
            .with("q_abs", q)
            .with("conv_index", conv.index as f64)
    };
    let mut out = Vec::new();

    let e_splits = dyadic_splits(0.5, m_max);
    let mut split_total = 0.0;
    let mut pieces = Vec::new();
    for &(k, kp) in &e_splits {
        let v = e3_range(theta, bx, k, kp, x, budget)?;
        split_total += v;
        let rhs = hs * x / (q * q) + hs * x.sqrt() * k.sqrt() + q * x.powf(0.75) * k.powf(-0.75) + q * q * x.sqrt() / k.sqrt();
        pieces.push(ctx(BoundReport::new("e3_dyadic", v, rhs)).with("K", k).with("Kp", kp));
    }
    let total = e3(theta, bx, m_max, x, budget)?;
    let rhs = hs * x / (q * q) + hs * x.sqrt() * m_max.sqrt() + q * x.powf(0.75) + q * q * x.sqrt();
    out.push(ctx(BoundReport::new("e3_total", total, rhs)).with("splits", e_splits.len() as f64).with("split_total", split_total));
    out.append(&mut pieces);

    let (lo, hi) = (x.powf(alpha), x.powf(alpha + beta));
    let f_splits = dyadic_splits(lo, hi);
    let mut split_total = 0.0;
    let mut pieces = Vec::new();
    let hh = h1 * h2;
    for &(k, kp) in &f_splits {
        let v = f3_range(theta, bx, k, kp, x, coeffs, budget)?;
        split_total += v;
        let rhs = hh * (x * k).sqrt() + hh.sqrt() * ((h1 + h2) * x / q + (h1 + h2) * x * k.powf(-0.25) + q * x.sqrt() * k.powf(0.25));
        pieces.push(ctx(BoundReport::new("f3_dyadic", v, rhs)).with("K", k).with("Kp", kp));
    }
    let total = f3_range(theta, bx, lo, hi, x, coeffs, budget)?;
    let ab = alpha + beta;
    let rhs = hh * x.powf((1.0 + ab) / 2.0)
        + hh.sqrt() * ((h1 + h2) * x / q + (h1 + h2) * x.powf(1.0 - alpha / 4.0) + q * x.powf(0.5 + ab / 4.0));
    out.push(ctx(BoundReport::new("f3_total", total, rhs)).with("splits", f_splits.len() as f64).with("split_total", split_total));
    out.append(&mut pieces);
    Ok(out)
}
