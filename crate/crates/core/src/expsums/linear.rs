//! Geometric sums and linear exponential sums over annuli by slicing.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{disk_cost, AnnulusSpec, Budget};
use crate::error::Result;
use crate::gaussian::isqrt;
use crate::hp::HpComplex;
use crate::vaaler::e;

/// Below this distance from Z a geometric sum is summed term by term.
pub const CLOSED_FORM_CUTOFF: f64 = 1e-6;

/// Which part of `n·κ` enters the phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Phase {
    /// `e(Im(nκ)) = e(n1·Im κ + n2·Re κ)`
    Im,
    /// `e(Re(nκ)) = e(n1·Re κ - n2·Im κ)`
    Re,
}

impl Phase {
    /// Coefficients `(row, col)` of `n1` and `n2` in the phase.
    pub fn coefficients(self, kre: f64, kim: f64) -> (f64, f64) {
        match self {
            Phase::Im => (kim, kre),
            Phase::Re => (kre, -kim),
        }
    }
}

fn dist_to_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// `Σ_{m0 <= m < m0+n} e(mz)`.
fn geometric(m0: i64, n: i64, z: f64) -> Complex64 {
    if n <= 0 {
        return Complex64::new(0.0, 0.0);
    }
    let z = z - z.round();
    if z.abs() <= CLOSED_FORM_CUTOFF {
        return (m0..m0 + n).map(|m| e(m as f64 * z)).sum();
    }
    // e(center·z) · sin(πnz) / sin(πz)
    let center = (2 * m0 + n - 1) as f64 * z / 2.0;
    let t = n as f64 * z;
    let ratio = (PI * (t - 2.0 * (t / 2.0).round())).sin() / (PI * z).sin();
    e(center) * ratio
}

/// `Σ_{a < m <= b} e(mz)`; zero when the range is empty.
pub fn linear_sum_1d(a: f64, b: f64, z: f64) -> Complex64 {
    let lo = a.floor() as i64 + 1;
    let hi = b.floor() as i64;
    geometric(lo, hi - lo + 1, z)
}

/// `Σ e(row·m1 + col·m2)` over `spec.lo < m1² + m2² <= spec.hi`, one
/// geometric sum per row `m1`. A lower bound of exactly 0 means the closed
/// disk, origin included.
pub fn disk_phase_sum(spec: AnnulusSpec, row: f64, col: f64, budget: &Budget) -> Result<Complex64> {
    let (lo, hi) = spec.int_bounds();
    let r = isqrt(hi) as i64;
    let cost = if dist_to_int(col) <= CLOSED_FORM_CUTOFF { disk_cost(hi as f64) } else { (2 * r + 1) as f64 };
    budget.check("annulus exponential sum", cost)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for m1 in -r..=r {
        let sq = (m1 * m1) as u64;
        let outer = isqrt(hi - sq) as i64;
        let mut s = geometric(-outer, 2 * outer + 1, col);
        if spec.lo > 0.0 && lo >= sq {
            let inner = isqrt(lo - sq) as i64;
            s -= geometric(-inner, 2 * inner + 1, col);
        }
        acc += e(row * m1 as f64) * s;
    }
    Ok(acc)
}

/// `κ` reduced modulo Z[i], as doubles.
pub fn reduce_kappa(kappa: &HpComplex) -> (f64, f64) {
    kappa.frac().to_f64()
}

/// `Σ_{ỹ < N(m) <= y} e(Im(mκ))`.
pub fn annulus_exp_sum(spec: AnnulusSpec, kappa: &HpComplex, budget: &Budget) -> Result<Complex64> {
    let (kre, kim) = reduce_kappa(kappa);
    annulus_exp_sum_f64(spec, kre, kim, Phase::Im, budget)
}

/// [`annulus_exp_sum`] for a reduced `κ` given as doubles, with either phase.
pub fn annulus_exp_sum_f64(spec: AnnulusSpec, kre: f64, kim: f64, phase: Phase, budget: &Budget) -> Result<Complex64> {
    let (row, col) = phase.coefficients(kre, kim);
    disk_phase_sum(spec, row, col, budget)
}

/// `y^{1/2} min{||Im κ||⁻¹, √y}^{1/2} min{||Re κ||⁻¹, √y}^{1/2}`.
pub fn lin_bound_rhs(spec: AnnulusSpec, kre: f64, kim: f64) -> f64 {
    let sy = spec.hi.sqrt();
    let cap = |d: f64| if d * sy <= 1.0 { sy } else { 1.0 / d };
    sy * cap(dist_to_int(kim)).sqrt() * cap(dist_to_int(kre)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::annulus_points;
    use rand::{Rng, SeedableRng};

    fn naive_1d(a: f64, b: f64, z: f64) -> Complex64 {
        ((a.floor() as i64 + 1)..=(b.floor() as i64)).map(|m| e(m as f64 * z)).sum()
    }

    fn naive_annulus(spec: AnnulusSpec, kre: f64, kim: f64, phase: Phase) -> Complex64 {
        let (lo, hi) = spec.int_bounds();
        let origin = (spec.lo == 0.0).then_some(crate::gaussian::ZERO);
        annulus_points(lo, hi)
            .chain(origin)
            .map(|n| {
                let (a, b) = (n.re as f64, n.im as f64);
                match phase {
                    Phase::Im => e(a * kim + b * kre),
                    Phase::Re => e(a * kre - b * kim),
                }
            })
            .sum()
    }

    #[test]
    fn linear_examples() {
        assert!((linear_sum_1d(0.0, 10.0, 0.0) - 10.0).norm() < 1e-15);
        assert!(linear_sum_1d(0.0, 2.0, 0.5).norm() < 1e-15);
        assert_eq!(linear_sum_1d(3.0, 3.5, 0.1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn linear_matches_naive_and_classical_bound() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let a: f64 = rng.gen_range(-500.0..500.0);
            let b = a + rng.gen_range(0.01..1000.0);
            let z: f64 = if rng.gen_bool(0.1) { rng.gen_range(-1e-6..1e-6) } else { rng.gen_range(-3.0..3.0) };
            let s = linear_sum_1d(a, b, z);
            assert!((s - naive_1d(a, b, z)).norm() <= 1e-9 * (1.0 + s.norm()), "a={a} b={b} z={z}");
            let d = dist_to_int(z);
            let cap = if d > 0.0 { (b - a + 1.0).min(1.0 / (2.0 * d)) } else { b - a + 1.0 };
            assert!(s.norm() <= cap + 1e-9);
        }
    }

    #[test]
    fn annulus_examples() {
        let b = Budget::default();
        let zero = HpComplex::zero(128);
        assert!((annulus_exp_sum(AnnulusSpec::new(0.0, 25.0).unwrap(), &zero, &b).unwrap() - 81.0).norm() < 1e-12);
        let s = annulus_exp_sum(AnnulusSpec::new(5.0, 10.0).unwrap(), &zero, &b).unwrap();
        assert!((s - annulus_points(5, 10).count() as f64).norm() < 1e-12);
        let s = annulus_exp_sum(AnnulusSpec::new(0.5, 25.0).unwrap(), &zero, &b).unwrap();
        assert!((s - 80.0).norm() < 1e-12);
    }

    #[test]
    fn slicing_matches_naive_double_loop() {
        let b = Budget::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for k in 0..300 {
            let hi: f64 = rng.gen_range(1.0..10_000.0);
            let lo: f64 = if k % 3 == 0 { 0.0 } else { rng.gen_range(0.0..hi) };
            let spec = AnnulusSpec::new(lo, hi).unwrap();
            let (kre, kim): (f64, f64) = (rng.gen(), rng.gen());
            for phase in [Phase::Im, Phase::Re] {
                let fast = annulus_exp_sum_f64(spec, kre, kim, phase, &b).unwrap();
                let slow = naive_annulus(spec, kre, kim, phase);
                assert!((fast - slow).norm() <= 1e-9 * slow.norm().max(1.0), "{spec:?} {kre} {kim}");
            }
        }
    }

    #[test]
    fn im_and_re_phases_swap_under_multiplication_by_i() {
        // Re(nκ) = Im(n·iκ)
        let b = Budget::default();
        let spec = AnnulusSpec::new(40.0, 900.0).unwrap();
        let (kre, kim) = (0.3271, 0.771);
        let re = annulus_exp_sum_f64(spec, kre, kim, Phase::Re, &b).unwrap();
        let im = annulus_exp_sum_f64(spec, -kim, kre, Phase::Im, &b).unwrap();
        assert!((re - im).norm() < 1e-9);
    }

    #[test]
    fn lin_rhs_regimes() {
        let spec = AnnulusSpec::new(0.0, 100.0).unwrap();
        assert!((lin_bound_rhs(spec, 0.25, 0.5) - 10.0 * (1.0f64 / (0.25 * 0.5)).sqrt()).abs() < 1e-12);
        assert!((lin_bound_rhs(spec, 0.0, 1e-9) - 100.0).abs() < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let b = Budget { max_lattice_points: 1000 };
        let spec = AnnulusSpec::new(0.0, 1e6).unwrap();
        assert!(annulus_exp_sum_f64(spec, 0.3, 0.2, Phase::Im, &b).is_err());
        assert!(annulus_exp_sum_f64(AnnulusSpec::new(0.0, 1e4).unwrap(), 0.3, 0.2, Phase::Im, &b).is_ok());
    }
}
