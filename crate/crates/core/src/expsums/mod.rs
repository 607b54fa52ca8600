//! Lattice exponential sums and the counting function `Σ_θ`.
//!
//! Every `≪` estimate is checked as a [`BoundReport`]: the measured value, the
//! right-hand side with implied constant 1, and their ratio. Exact identities
//! and inequalities with explicit constants are hard errors instead.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

mod bilinear;
mod counting;
mod linear;

pub use bilinear::*;
pub use counting::*;
pub use linear::*;

/// The norm range `lo < N(n) <= hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnnulusSpec {
    pub lo: f64,
    pub hi: f64,
}

impl AnnulusSpec {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::DomainError(format!("annulus ({lo}, {hi}] needs 0 <= lo < hi")));
        }
        Ok(AnnulusSpec { lo, hi })
    }

    /// Integer bounds `(⌊lo⌋, ⌊hi⌋)`; membership is `lo' < N <= hi'`.
    pub fn int_bounds(&self) -> (u64, u64) {
        (self.lo.floor() as u64, self.hi.floor() as u64)
    }
}

/// Frequencies `j ≠ 0` with `|Re j| <= H1`, `|Im j| <= H2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FreqBox {
    pub h1: f64,
    pub h2: f64,
}

impl FreqBox {
    pub fn new(h1: f64, h2: f64) -> Result<Self> {
        if !(h1 >= 1.0 && h2 >= 0.5 && h1.is_finite() && h2.is_finite()) {
            return Err(Error::DomainError(format!("frequency box needs H1 >= 1, H2 >= 1/2, got ({h1}, {h2})")));
        }
        Ok(FreqBox { h1, h2 })
    }

    /// The frequencies `(j1, j2)` in lexicographic order.
    pub fn freqs(&self) -> Vec<(i64, i64)> {
        let (a, b) = (self.h1.floor() as i64, self.h2.floor() as i64);
        (-a..=a)
            .flat_map(|j1| (-b..=b).map(move |j2| (j1, j2)))
            .filter(|&j| j != (0, 0))
            .collect()
    }
}

/// A measured quantity against the right side of an `≪` inequality.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub label: String,
    pub measured: f64,
    pub bound_rhs: f64,
    pub fitted_constant: f64,
    pub context: BTreeMap<String, f64>,
}

impl BoundReport {
    pub fn new(label: &str, measured: f64, bound_rhs: f64) -> Self {
        let fitted_constant = if bound_rhs > 0.0 { measured / bound_rhs } else { f64::INFINITY };
        BoundReport {
            label: label.to_string(),
            measured,
            bound_rhs,
            fitted_constant,
            context: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.context.insert(key.to_string(), value);
        self
    }
}

/// Hard cap on lattice enumeration work.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_lattice_points: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_lattice_points: 100_000_000 }
    }
}

impl Budget {
    pub fn check(&self, what: &str, cost: f64) -> Result<()> {
        if cost > self.max_lattice_points as f64 {
            return Err(Error::BudgetExceeded(format!(
                "{what} needs ~{cost:.3e} lattice points, budget {}",
                self.max_lattice_points
            )));
        }
        Ok(())
    }
}

/// Upper estimate of `#{n : N(n) <= z}`.
pub(crate) fn disk_cost(z: f64) -> f64 {
    std::f64::consts::PI * z + 8.0 * z.sqrt() + 8.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn freq_box() {
        let b = FreqBox::new(1.0, 0.5).unwrap();
        assert_eq!(b.freqs(), vec![(-1, 0), (1, 0)]);
        assert_eq!(FreqBox::new(2.5, 1.0).unwrap().freqs().len(), 5 * 3 - 1);
        assert!(FreqBox::new(0.5, 1.0).is_err());
        assert!(FreqBox::new(1.0, 0.4).is_err());
    }

    #[test]
    fn annulus_spec() {
        assert_eq!(AnnulusSpec::new(5.0, 10.0).unwrap().int_bounds(), (5, 10));
        assert_eq!(AnnulusSpec::new(2.5, 7.9).unwrap().int_bounds(), (2, 7));
        assert!(AnnulusSpec::new(3.0, 3.0).is_err());
        assert!(AnnulusSpec::new(-1.0, 3.0).is_err());
    }

    #[test]
    fn budget() {
        let b = Budget { max_lattice_points: 100 };
        assert!(b.check("x", 99.0).is_ok());
        assert!(matches!(b.check("x", 101.0), Err(Error::BudgetExceeded(_))));
    }
}
