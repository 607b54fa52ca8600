//! The equidistribution experiment: `S(x, δ)` against `4δ²S(x)`, the type I
//! and type II sieve hypotheses, the parameter preset and the search for
//! primes with small `||pθ||`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expsums::{disk_cost, inner_range, multipliers, BoundReport, Budget, CoeffSide, CoeffSource};
use crate::gaussian::{annulus_points, GaussianInt};
use crate::hp::{HpReal, DEFAULT_PREC};
use crate::hurwitz::{convergents, expand, pick_denominator, Convergent};
use crate::primes::{build_sieve, SieveTable};
use crate::probe::MultipleProbe;
use crate::theta::Theta;

pub const DEFAULT_THETA: &str = "sqrt:2 + i*sqrt:3";
pub const DEFAULT_X: u64 = 100_000;
pub const DEFAULT_DELTA: f64 = 0.1;
pub const DEFAULT_EPSILON: f64 = 0.01;

/// A fully resolved experiment configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub theta: String,
    pub x: u64,
    pub delta: f64,
    pub m: f64,
    pub alpha: f64,
    pub beta: f64,
    pub j: u64,
    pub epsilon: f64,
    pub seed: u64,
}

/// One layer of configuration values; later layers override earlier ones.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigLayer {
    pub theta: Option<String>,
    pub x: Option<u64>,
    pub delta: Option<f64>,
    pub m: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub j: Option<u64>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::InvalidConfig(format!("{key} = {v:?} is not a valid number")))
}

impl ConfigLayer {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut layer = ConfigLayer::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key = value", no + 1)))?;
            layer.set(k.trim(), v.trim())?;
        }
        Ok(layer)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "theta" => self.theta = Some(v.to_string()),
            "x" => self.x = Some(parse_num::<f64>(key, v).and_then(|f| as_count(key, f))?),
            "delta" => self.delta = Some(parse_num(key, v)?),
            "M" | "m" => self.m = Some(parse_num(key, v)?),
            "alpha" => self.alpha = Some(parse_num(key, v)?),
            "beta" => self.beta = Some(parse_num(key, v)?),
            "J" | "j" => self.j = Some(parse_num(key, v)?),
            "epsilon" => self.epsilon = Some(parse_num(key, v)?),
            "seed" => self.seed = Some(parse_num(key, v)?),
            _ => return Err(Error::InvalidConfig(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// `self` with every value set in `over` replaced.
    pub fn merge(self, over: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            theta: over.theta.or(self.theta),
            x: over.x.or(self.x),
            delta: over.delta.or(self.delta),
            m: over.m.or(self.m),
            alpha: over.alpha.or(self.alpha),
            beta: over.beta.or(self.beta),
            j: over.j.or(self.j),
            epsilon: over.epsilon.or(self.epsilon),
            seed: over.seed.or(self.seed),
        }
    }

    /// Fills defaults and validates.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let theta = self.theta.clone().unwrap_or_else(|| DEFAULT_THETA.to_string());
        Theta::parse(&theta)?;
        let x = self.x.unwrap_or(DEFAULT_X);
        let delta = self.delta.unwrap_or(DEFAULT_DELTA);
        let alpha = self.alpha.unwrap_or(1.0 / 3.0);
        let beta = self.beta.unwrap_or(0.5);
        let epsilon = self.epsilon.unwrap_or(DEFAULT_EPSILON);
        let xf = x as f64;
        let m = self.m.unwrap_or_else(|| xf.powf(2.0 / 3.0));
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if x < 2 {
            return bad(format!("x = {x} must be >= 2"));
        }
        if !(delta > 0.0 && delta <= 0.5) {
            return bad(format!("delta = {delta} outside (0, 1/2]"));
        }
        if alpha.is_nan() || alpha <= 0.0 || !(beta > 0.0 && beta <= 0.5) {
            return bad(format!("need alpha > 0 and 0 < beta <= 1/2, got {alpha}, {beta}"));
        }
        if epsilon.is_nan() || epsilon < 0.0 {
            return bad(format!("epsilon = {epsilon} must be >= 0"));
        }
        if m.is_nan() || m <= xf.powf(alpha) {
            return bad(format!("M = {m} must exceed x^alpha = {}", xf.powf(alpha)));
        }
        let j_min = (1.0 / delta).ceil() as u64;
        let j = self.j.unwrap_or_else(|| (xf.powf(3.0 * epsilon) / delta).ceil() as u64);
        if j < j_min {
            return bad(format!("J = {j} must be >= 1/delta, i.e. >= {j_min}"));
        }
        Ok(ExperimentConfig { theta, x, delta, m, alpha, beta, j, epsilon, seed: self.seed.unwrap_or(0) })
    }
}

fn as_count(key: &str, f: f64) -> Result<u64> {
    if f >= 0.0 && f.fract() == 0.0 && f < 9.0e15 {
        Ok(f as u64)
    } else {
        Err(Error::InvalidConfig(format!("{key} = {f} is not a non-negative integer")))
    }
}

impl ExperimentConfig {
    pub fn theta(&self) -> Result<Theta> {
        Theta::parse(&self.theta)
    }

    /// `key = value` pairs in a fixed order.
    pub fn pairs(&self) -> Vec<(String, String)> {
        vec![
            ("theta".into(), self.theta.clone()),
            ("x".into(), self.x.to_string()),
            ("delta".into(), self.delta.to_string()),
            ("M".into(), self.m.to_string()),
            ("alpha".into(), self.alpha.to_string()),
            ("beta".into(), self.beta.to_string()),
            ("J".into(), self.j.to_string()),
            ("epsilon".into(), self.epsilon.to_string()),
            ("seed".into(), self.seed.to_string()),
        ]
    }
}

fn check_table(table: &SieveTable, x: u64) -> Result<()> {
    if x > table.limit() {
        return Err(Error::OutOfRange(format!("x = {x} beyond sieve limit {}", table.limit())));
    }
    Ok(())
}

/// `S(x, δ)` for several `δ` at once: Gaussian primes with `x/2 < N(p) <= x`
/// and `||pθ|| <= δ`.
pub fn s_x_delta_many(theta: &Theta, table: &SieveTable, x: u64, deltas: &[f64]) -> Result<Vec<u64>> {
    check_table(table, x)?;
    if let Some(d) = deltas.iter().find(|d| !(0.0..=0.5).contains(*d)) {
        return Err(Error::DomainError(format!("delta = {d} outside [0, 1/2]")));
    }
    let probe = MultipleProbe::new(theta, GaussianInt::new(1, 0))?;
    let primes = table.primes_in(x / 2, x);
    let per_chunk: Vec<Vec<u64>> = primes
        .par_chunks(4096)
        .map(|chunk| {
            let mut c = vec![0u64; deltas.len()];
            for &p in chunk {
                for (k, &d) in deltas.iter().enumerate() {
                    c[k] += probe.sup_le(p, d)? as u64;
                }
            }
            Ok(c)
        })
        .collect::<Result<_>>()?;
    Ok((0..deltas.len()).map(|k| per_chunk.iter().map(|c| c[k]).sum()).collect())
}

pub fn s_x_delta(theta: &Theta, table: &SieveTable, x: u64, delta: f64) -> Result<u64> {
    Ok(s_x_delta_many(theta, table, x, &[delta])?[0])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioResult {
    pub x: u64,
    pub delta: f64,
    pub s_x_delta: u64,
    pub s_x: u64,
    /// `S(x, δ) / (4δ²S(x))`
    pub ratio: f64,
}

impl RatioResult {
    pub fn new(x: u64, delta: f64, s_x_delta: u64, s_x: u64) -> Self {
        RatioResult { x, delta, s_x_delta, s_x, ratio: s_x_delta as f64 / (4.0 * delta * delta * s_x as f64) }
    }
}

pub fn equidist_ratio(cfg: &ExperimentConfig, table: &SieveTable) -> Result<RatioResult> {
    let theta = cfg.theta()?;
    let s = s_x_delta(&theta, table, cfg.x, cfg.delta)?;
    let total = crate::primes::count_annulus(table, cfg.x)?;
    Ok(RatioResult::new(cfg.x, cfg.delta, s, total))
}

/// Per multiplier `m`: `(Σ_{mn∈A} w_n, Σ_{mn∈B} w_n)`.
fn type_sums(
    cfg: &ExperimentConfig,
    ms: &[GaussianInt],
    weight_n: impl Fn(GaussianInt) -> Complex64 + Sync,
    budget: &Budget,
) -> Result<Vec<(Complex64, Complex64)>> {
    let theta = cfg.theta()?;
    let x = cfg.x as f64;
    let cost: f64 = ms.iter().map(|&m| disk_cost(x / m.norm_u128() as f64)).sum();
    budget.check("type I/II sum", cost)?;
    ms.par_iter()
        .map(|&m| {
            let probe = MultipleProbe::new(&theta, m)?;
            let (lo, hi) = inner_range(x, m.norm_u128() as u64).int_bounds();
            let (mut in_a, mut in_b) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for n in annulus_points(lo, hi) {
                let w = weight_n(n);
                if probe.sup_le(n, cfg.delta)? {
                    in_a += w;
                }
                in_b += w;
            }
            Ok((in_a, in_b))
        })
        .collect()
}

fn finish_type_report(
    label: &str,
    cfg: &ExperimentConfig,
    ms: &[GaussianInt],
    sums: &[(Complex64, Complex64)],
    coeff_a: CoeffSource,
    extra: impl FnOnce(BoundReport) -> BoundReport,
) -> BoundReport {
    let (mut lhs, mut rhs) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for (&m, &(a_sum, b_sum)) in ms.iter().zip(sums) {
        let a = coeff_a.value(CoeffSide::A, m);
        lhs += a * a_sum;
        rhs += a * b_sum;
    }
    let lambda = 4.0 * cfg.delta * cfg.delta;
    let measured = (lhs - rhs * lambda).norm();
    let x = cfg.x as f64;
    let y = cfg.delta * cfg.delta * x.powf(1.0 - cfg.epsilon);
    extra(
        BoundReport::new(label, measured, y)
            .with("x", x)
            .with("delta", cfg.delta)
            .with("lhs_re", lhs.re)
            .with("lhs_im", lhs.im)
            .with("rhs_re", rhs.re)
            .with("rhs_im", rhs.im)
            .with("multipliers", ms.len() as f64)
            .with("J", cfg.j as f64)
            .with("epsilon", cfg.epsilon),
    )
}

/// `|Σ_{N(m)<=M, mn∈A} a_m - 4δ² Σ_{N(m)<=M, mn∈B} a_m|` against
/// `Y = δ²x^{1-ε}`.
pub fn type1_check(cfg: &ExperimentConfig, coeffs: CoeffSource, budget: &Budget) -> Result<BoundReport> {
    let ms = multipliers(0.0, cfg.m);
    let sums = type_sums(cfg, &ms, |_| Complex64::new(1.0, 0.0), budget)?;
    let (x, d, j, e) = (cfg.x as f64, cfg.delta, cfg.j as f64, cfg.epsilon);
    let q = x.powf(1.0 / 12.0);
    let est = d * x / j + d * d * j * j * x / (q * q) + d * d * j * j * x.sqrt() * cfg.m.sqrt() + d * d * q * x.powf(0.75) + d * d * q * q * x.sqrt();
    Ok(finish_type_report("typeI", cfg, &ms, &sums, coeffs, |r| {
        r.with("M", cfg.m)
            .with("general_rhs", (j * x * q).powf(e) * est)
            .with("preset_rhs", d * d * x.powf(1.0 - e) + x.powf(5.0 / 6.0 + 8.0 * e))
    }))
}

/// The bilinear analogue over `x^α < N(m) <= x^{α+β}` with coefficients
/// `a_m b_n` drawn from `coeffs`.
pub fn type2_check(cfg: &ExperimentConfig, coeffs: CoeffSource, budget: &Budget) -> Result<BoundReport> {
    let x = cfg.x as f64;
    let ms = multipliers(x.powf(cfg.alpha), x.powf(cfg.alpha + cfg.beta));
    let sums = type_sums(cfg, &ms, |n| coeffs.value(CoeffSide::B, n), budget)?;
    let (d, j, e, a, b) = (cfg.delta, cfg.j as f64, cfg.epsilon, cfg.alpha, cfg.beta);
    let q = x.powf(1.0 / 12.0);
    let est = d * x / j + x.powf((1.0 + a + b) / 2.0) + d * j * x / q + d * j * x.powf(1.0 - a / 4.0) + d * q * x.powf(0.5 + (a + b) / 4.0);
    Ok(finish_type_report("typeII", cfg, &ms, &sums, coeffs, |r| {
        r.with("alpha", a)
            .with("beta", b)
            .with("general_rhs", (j * x).powf(e) * est)
            .with("preset_rhs", d * d * x.powf(1.0 - e) + x.powf(11.0 / 12.0 + 8.0 * e))
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorollaryHit {
    pub p: GaussianInt,
    pub norm: u64,
    /// `||pθ||` from the high-precision recomputation
    pub dist: f64,
    /// `N(p)^{-γ}`
    pub threshold: f64,
    /// confirmed again at four times the working precision
    pub reverified: bool,
}

/// Gaussian primes with `N(p) <= x_max` and `||pθ|| <= N(p)^{-γ}`, sorted by
/// norm; every hit is recomputed at `4×` precision.
pub fn corollary_search(theta: &Theta, gamma: f64, x_max: u64, table: &SieveTable) -> Result<Vec<CorollaryHit>> {
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::DomainError(format!("gamma = {gamma} must be > 0")));
    }
    check_table(table, x_max)?;
    let probe = MultipleProbe::new(theta, GaussianInt::new(1, 0))?;
    let primes = table.primes_in(0, x_max);
    let hits: Vec<Option<(GaussianInt, u64, f64)>> = primes
        .par_iter()
        .map(|&p| {
            let norm = p.norm()?;
            let thr = (norm as f64).powf(-gamma);
            Ok(probe.sup_le(p, thr)?.then_some((p, norm, thr)))
        })
        .collect::<Result<_>>()?;
    let hi_prec = 4 * DEFAULT_PREC;
    let th = theta.eval(hi_prec)?;
    let mut out: Vec<CorollaryHit> = hits
        .into_iter()
        .flatten()
        .map(|(p, norm, threshold)| {
            let d = th.mul_gaussian(p).dist_sup();
            let reverified = threshold >= 0.5 || HpReal::from_f64(threshold, hi_prec).map(|t| d.certified_le(&t) == Some(true)).unwrap_or(false);
            Ok(CorollaryHit { p, norm, dist: d.to_f64(), threshold, reverified })
        })
        .collect::<Result<_>>()?;
    out.sort_by_key(|h| (h.norm, h.p));
    Ok(out)
}

/// The parameter preset `x = min(N(q)⁶, budget)`, from the convergent with
/// the largest `N(q) <= budget^{1/6}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Preset {
    pub conv: Convergent,
    pub x: u64,
}

pub fn preset(theta: &Theta, x_budget: u64) -> Result<Preset> {
    let exp = expand(theta, 64).map_err(Error::from)?;
    let convs = convergents(&exp);
    let target = (x_budget as f64).powf(1.0 / 6.0).floor() as u64;
    let conv = pick_denominator(&convs, target)?;
    let x = (conv.q_norm() as u128).pow(6).min(x_budget as u128) as u64;
    Ok(Preset { conv, x })
}

/// Grid of `(x, δ)` points, visited with `x` outer and `δ` inner.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SweepGrid {
    pub xs: Vec<u64>,
    pub deltas: Vec<f64>,
}

/// One [`RatioResult`] per grid point, in grid order.
pub fn sweep(theta: &Theta, grid: &SweepGrid) -> Result<Vec<RatioResult>> {
    let Some(&x_max) = grid.xs.iter().max() else {
        return Ok(Vec::new());
    };
    if grid.deltas.is_empty() {
        return Ok(Vec::new());
    }
    let table = build_sieve(x_max.max(2))?;
    let mut out = Vec::with_capacity(grid.xs.len() * grid.deltas.len());
    for &x in &grid.xs {
        let counts = s_x_delta_many(theta, &table, x, &grid.deltas)?;
        let total = crate::primes::count_annulus(&table, x)?;
        for (&d, &c) in grid.deltas.iter().zip(&counts) {
            out.push(RatioResult::new(x, d, c, total));
        }
    }
    Ok(out)
}

/// Expected number of corollary hits, `Σ_p min(1, 4N(p)^{-2γ})`.
pub fn corollary_heuristic(table: &SieveTable, gamma: f64, x_max: u64) -> f64 {
    table
        .norms_in(0, x_max)
        .map(|(n, c)| c as f64 * (4.0 * (n as f64).powf(-2.0 * gamma)).min(1.0))
        .sum()
}

/// Hits grouped by norm, for summaries.
pub fn hits_by_norm(hits: &[CorollaryHit]) -> BTreeMap<u64, usize> {
    let mut m = BTreeMap::new();
    for h in hits {
        *m.entry(h.norm).or_insert(0) += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::{count_annulus, is_gaussian_prime};

    fn cfg(text: &str) -> ExperimentConfig {
        ConfigLayer::parse(text).unwrap().resolve().unwrap()
    }

    #[test]
    fn config_defaults_and_validation() {
        let c = cfg("");
        assert_eq!(c.theta, DEFAULT_THETA);
        assert_eq!(c.x, DEFAULT_X);
        assert!((c.m - (DEFAULT_X as f64).powf(2.0 / 3.0)).abs() < 1e-9);
        assert_eq!(c.j, ((DEFAULT_X as f64).powf(0.03) / 0.1).ceil() as u64);
        let c = cfg("# comment\ntheta = 3+2i\nx = 1e4\ndelta=0.2  # trailing\nJ = 5\nseed = 9");
        assert_eq!((c.x, c.delta, c.j, c.seed), (10_000, 0.2, 5, 9));
        for bad in ["delta = 0", "delta = 0.6", "J = 3\ndelta = 0.5\nJ = 1", "x = 1", "beta = 0.7", "foo = 1", "x", "x = 2.5", "M = 2", "theta = 1 +"] {
            assert!(ConfigLayer::parse(bad).and_then(|l| l.resolve()).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn config_precedence() {
        let defaults = ConfigLayer::default();
        let file = ConfigLayer::parse("x = 5000\ndelta = 0.2").unwrap();
        let mut flags = ConfigLayer::default();
        flags.set("delta", "0.05").unwrap();
        let c = defaults.merge(file).merge(flags).resolve().unwrap();
        assert_eq!((c.x, c.delta), (5000, 0.05));
    }

    #[test]
    fn s_x_delta_examples_and_oracle() {
        let t = Theta::parse(DEFAULT_THETA).unwrap();
        let table = build_sieve(10_000).unwrap();
        for x in [10, 100, 2500, 10_000] {
            assert_eq!(s_x_delta(&t, &table, x, 0.5).unwrap(), count_annulus(&table, x).unwrap());
        }
        assert_eq!(s_x_delta(&t, &table, 10_000, 0.0).unwrap(), 0);
        let th = t.eval(256).unwrap();
        let brute = annulus_points(5000, 10_000)
            .filter(|&p| is_gaussian_prime(p).unwrap() && th.mul_gaussian(p).dist_sup().to_f64() <= 0.1)
            .count() as u64;
        assert_eq!(s_x_delta(&t, &table, 10_000, 0.1).unwrap(), brute);
        let counts = s_x_delta_many(&t, &table, 10_000, &[0.02, 0.05, 0.1, 0.3, 0.5]).unwrap();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]));
        assert!(s_x_delta(&t, &table, 20_000, 0.1).is_err());
    }

    #[test]
    fn conjugation_symmetry() {
        let t = Theta::parse("e + i*sqrt:7").unwrap();
        let table = build_sieve(20_000).unwrap();
        for d in [0.03, 0.1, 0.25] {
            assert_eq!(s_x_delta(&t, &table, 20_000, d).unwrap(), s_x_delta(&t.conj(), &table, 20_000, d).unwrap());
        }
    }

    #[test]
    fn ratio_is_one_at_half() {
        let table = build_sieve(5000).unwrap();
        let r = equidist_ratio(&cfg("x = 5000\ndelta = 0.5"), &table).unwrap();
        assert_eq!(r.ratio, 1.0);
        assert!(r.s_x_delta <= r.s_x);
    }

    #[test]
    fn type_checks_vanish_at_half_and_for_zero_coefficients() {
        let b = Budget::default();
        let c = cfg("x = 20000\ndelta = 0.5");
        for coeffs in [CoeffSource::Ones, CoeffSource::RandomDisc { seed: 4 }] {
            assert_eq!(type1_check(&c, coeffs, &b).unwrap().measured, 0.0);
            assert_eq!(type2_check(&c, coeffs, &b).unwrap().measured, 0.0);
        }
        let c = cfg("x = 20000\ndelta = 0.1");
        assert_eq!(type1_check(&c, CoeffSource::Zeros, &b).unwrap().measured, 0.0);
        assert_eq!(type2_check(&c, CoeffSource::Zeros, &b).unwrap().measured, 0.0);
        let r = type1_check(&c, CoeffSource::RandomDisc { seed: 1 }, &b).unwrap();
        assert!(r.fitted_constant.is_finite() && r.measured > 0.0);
    }

    #[test]
    fn type1_sum_matches_brute_force() {
        let b = Budget::default();
        let c = cfg("x = 3000\ndelta = 0.15\nM = 20");
        let t = c.theta().unwrap();
        let th = t.eval(256).unwrap();
        let (mut lhs, mut rhs) = (0i64, 0i64);
        for m in multipliers(0.0, 20.0) {
            for n in annulus_points(0, 3000) {
                let nn = m.norm_u128() * n.norm_u128();
                if 2 * nn > 3000 && nn <= 3000 {
                    rhs += 1;
                    if th.mul_gaussian(m * n).dist_sup().to_f64() <= 0.15 {
                        lhs += 1;
                    }
                }
            }
        }
        let r = type1_check(&c, CoeffSource::Ones, &b).unwrap();
        assert_eq!((r.context["lhs_re"], r.context["rhs_re"]), (lhs as f64, rhs as f64));
    }

    #[test]
    fn corollary_examples() {
        let t = Theta::parse(DEFAULT_THETA).unwrap();
        let table = build_sieve(20_000).unwrap();
        // N(p)^{-γ} >= 1/2 everywhere: every prime qualifies
        let all = corollary_search(&t, 0.01, 20_000, &table).unwrap();
        assert_eq!(all.len() as u64, table.count_upto(20_000));
        let hits = corollary_search(&t, 1.0 / 24.0, 20_000, &table).unwrap();
        assert!(!hits.is_empty());
        assert!(hits.iter().all(|h| h.reverified && h.dist <= h.threshold));
        assert!(hits.windows(2).all(|w| w[0].norm <= w[1].norm));
        let th = t.eval(2048).unwrap();
        let first = hits[0];
        assert!(th.mul_gaussian(first.p).dist_sup().to_f64() <= first.threshold);
        assert!(corollary_search(&t, 0.0, 100, &table).is_err());
    }

    #[test]
    fn preset_uses_sixth_power_of_norm() {
        let t = Theta::parse(DEFAULT_THETA).unwrap();
        let p = preset(&t, 1_000_000).unwrap();
        assert!(p.conv.q_norm() <= 10);
        assert_eq!(p.x, (p.conv.q_norm() as u64).pow(6).min(1_000_000));
    }

    #[test]
    fn sweep_shapes() {
        let t = Theta::parse(DEFAULT_THETA).unwrap();
        assert!(sweep(&t, &SweepGrid::default()).unwrap().is_empty());
        let g = SweepGrid { xs: vec![1000, 4000], deltas: vec![0.05, 0.1, 0.2] };
        let rows = sweep(&t, &g).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!((rows[4].x, rows[4].delta), (4000, 0.1));
        assert_eq!(rows, sweep(&t, &g).unwrap());
    }
}
