//! The sawtooth `ψ(x) = x - ⌊x⌋ - 1/2`, its degree-`J` trigonometric
//! approximation `ψ*` and the non-negative majorant `σ` of `|ψ* - ψ|`.
//!
//! `e(x) = exp(2πix)` throughout.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VaalerParams {
    j: u32,
}

impl VaalerParams {
    pub fn new(j: u32) -> Result<Self> {
        if j == 0 {
            return Err(Error::DomainError("truncation level J must be >= 1".into()));
        }
        Ok(VaalerParams { j })
    }

    /// The smallest admissible `J` for a window of half-width `delta`, `⌈1/δ⌉`.
    pub fn for_delta(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(Error::DomainError(format!("delta = {delta} outside (0, 1/2]")));
        }
        Self::new((1.0 / delta).ceil() as u32)
    }

    pub fn j(&self) -> u32 {
        self.j
    }
}

/// `e(x) = exp(2πix)`, reducing `x` modulo 1 first.
pub fn e(x: f64) -> Complex64 {
    let t = 2.0 * PI * (x - x.round());
    Complex64::new(t.cos(), t.sin())
}

pub fn psi(x: f64) -> f64 {
    x - x.floor() - 0.5
}

/// `W(t) = πt(1-|t|)cot(πt) + |t|` on `0 < |t| < 1`.
pub fn weight_w(t: f64) -> Result<f64> {
    if !(t != 0.0 && t.abs() < 1.0) {
        return Err(Error::DomainError(format!("W(t) needs 0 < |t| < 1, got {t}")));
    }
    let a = t.abs();
    // even in t: πt·cot(πt) depends on |t| only
    Ok(PI * a * (1.0 - a) / (PI * a).tan() + a)
}

/// Neumaier-compensated complex sum.
#[derive(Default)]
struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    fn add(&mut self, v: Complex64) {
        fn step(s: &mut f64, c: &mut f64, v: f64) {
            let t = *s + v;
            if s.abs() >= v.abs() {
                *c += (*s - t) + v;
            } else {
                *c += (v - t) + *s;
            }
            *s = t;
        }
        step(&mut self.sum.re, &mut self.comp.re, v.re);
        step(&mut self.sum.im, &mut self.comp.im, v.im);
    }

    fn total(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// `ψ*(x) = -Σ_{1<=|j|<=J} (2πij)⁻¹ W(j/(J+1)) e(jx)`.
pub fn psi_star(x: f64, params: VaalerParams) -> f64 {
    let jmax = params.j as i64;
    let mut acc = CompensatedSum::default();
    for j in (-jmax..=jmax).filter(|&j| j != 0) {
        let w = weight_w(j as f64 / (jmax + 1) as f64).expect("|j|/(J+1) in (0,1)");
        let coef = -w / Complex64::new(0.0, 2.0 * PI * j as f64);
        acc.add(coef * e(j as f64 * x));
    }
    let v = acc.total();
    debug_assert!(v.im.abs() < 1e-12, "psi* imaginary residue {}", v.im);
    v.re
}

/// `σ(x) = (2J+2)⁻¹ Σ_{|j|<=J} (1 - |j|/(J+1)) e(jx)`.
pub fn sigma_majorant(x: f64, params: VaalerParams) -> f64 {
    let jmax = params.j as i64;
    let mut acc = CompensatedSum::default();
    for j in -jmax..=jmax {
        let w = 1.0 - j.abs() as f64 / (jmax + 1) as f64;
        acc.add(w * e(j as f64 * x));
    }
    let v = acc.total() / (2.0 * (jmax + 1) as f64);
    debug_assert!(v.im.abs() < 1e-12, "sigma imaginary residue {}", v.im);
    v.re
}

/// `[δ - t] - [-δ - t]`, which is 1 exactly when `||t|| <= δ` (off the boundary).
pub fn window_indicator(t: f64, delta: f64) -> i64 {
    ((delta - t).floor() - (-delta - t).floor()) as i64
}

/// Maxima of the approximation error on a uniform grid of `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct VaalerGridStats {
    pub j: u32,
    pub grid: usize,
    /// `max (|ψ* - ψ| - σ)`, non-positive when the majorant holds.
    pub max_excess: f64,
    pub min_sigma: f64,
    pub max_abs_error: f64,
}

pub fn grid_check(params: VaalerParams, grid: usize) -> VaalerGridStats {
    use rayon::prelude::*;
    let rows: Vec<(f64, f64, f64)> = (0..grid)
        .into_par_iter()
        .map(|k| {
            let x = k as f64 / grid as f64;
            let err = (psi_star(x, params) - psi(x)).abs();
            let s = sigma_majorant(x, params);
            (err - s, s, err)
        })
        .collect();
    rows.iter().fold(
        VaalerGridStats {
            j: params.j,
            grid,
            max_excess: f64::NEG_INFINITY,
            min_sigma: f64::INFINITY,
            max_abs_error: 0.0,
        },
        |mut acc, &(excess, s, err)| {
            acc.max_excess = acc.max_excess.max(excess);
            acc.min_sigma = acc.min_sigma.min(s);
            acc.max_abs_error = acc.max_abs_error.max(err);
            acc
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(j: u32) -> VaalerParams {
        VaalerParams::new(j).unwrap()
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(0.0), -0.5);
        assert_eq!(psi(0.75), 0.25);
        assert_eq!(psi(1.25), -0.25);
        assert_eq!(psi(-3.0), -0.5);
    }

    #[test]
    fn weight_examples() {
        assert!((weight_w(0.5).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(weight_w(0.3).unwrap(), weight_w(-0.3).unwrap());
        assert!((weight_w(1e-6).unwrap() - 1.0).abs() < 1e-5);
        for bad in [0.0, 1.0, -1.0, 1.5] {
            assert!(matches!(weight_w(bad), Err(Error::DomainError(_))));
        }
    }

    #[test]
    fn psi_star_examples() {
        for j in [1, 2, 7, 40] {
            assert!(psi_star(0.0, p(j)).abs() < 1e-15);
        }
        assert!(psi_star(0.5, p(1)).abs() < 1e-15);
        let x = 0.37;
        assert!((psi_star(x, p(10)) - psi(x)).abs() <= sigma_majorant(x, p(10)) + 1e-12);
    }

    #[test]
    fn psi_star_matches_real_sine_form() {
        // independent route: ψ*(x) = -Σ_{j=1}^J W(j/(J+1)) sin(2πjx)/(πj)
        for j in [1u32, 5, 33] {
            for k in 0..50 {
                let x = k as f64 / 50.0 + 0.013;
                let direct: f64 = (1..=j)
                    .map(|i| {
                        let w = weight_w(i as f64 / (j + 1) as f64).unwrap();
                        -w * (2.0 * PI * i as f64 * x).sin() / (PI * i as f64)
                    })
                    .sum();
                assert!((psi_star(x, p(j)) - direct).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn sigma_examples() {
        for j in [1, 3, 50] {
            assert!((sigma_majorant(0.0, p(j)) - 0.5).abs() < 1e-15);
        }
        assert!(sigma_majorant(0.5, p(1)).abs() < 1e-15);
        for j in [1u32, 4, 9] {
            let n = 4096;
            let mean: f64 = (0..n).map(|k| sigma_majorant(k as f64 / n as f64, p(j))).sum::<f64>() / n as f64;
            assert!((mean - 1.0 / (2.0 * (j + 1) as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn majorant_and_periodicity_on_grid() {
        for j in [1u32, 5, 10, 50] {
            let s = grid_check(p(j), 2000);
            assert!(s.max_excess <= 1e-12 && s.min_sigma >= -1e-12, "{s:?}");
            for k in 0..100 {
                let x = k as f64 / 100.0;
                assert!((psi_star(x + 3.0, p(j)) - psi_star(x, p(j))).abs() < 1e-12);
                assert!((sigma_majorant(x - 2.0, p(j)) - sigma_majorant(x, p(j))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn window_indicator_detects_small_distance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for delta in [0.05, 0.2] {
            for _ in 0..1000 {
                let t: f64 = rng.gen_range(-20.0..20.0);
                let dist = (t - t.round()).abs();
                if (dist - delta).abs() < 1e-9 {
                    continue;
                }
                assert_eq!(window_indicator(t, delta) == 1, dist <= delta, "t = {t}");
                assert!((0..=1).contains(&window_indicator(t, delta)));
            }
        }
    }

    #[test]
    fn for_delta_requires_j_at_least_inverse_delta() {
        assert_eq!(VaalerParams::for_delta(0.1).unwrap().j(), 10);
        assert_eq!(VaalerParams::for_delta(0.3).unwrap().j(), 4);
        assert!(VaalerParams::for_delta(0.0).is_err());
        assert!(VaalerParams::new(0).is_err());
    }
}
