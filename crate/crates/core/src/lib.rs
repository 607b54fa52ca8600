//! Computational laboratory for Diophantine approximation by Gaussian primes.
//!
//! The crate measures how the multiples `pθ` of a complex `θ ∉ Q(i)` by
//! Gaussian primes `p` distribute modulo Z[i], and checks numerically each
//! inequality used to control that distribution:
//!
//! - [`gaussian`], [`hp`], [`probe`]: exact Z[i] arithmetic, certified ball
//!   arithmetic and certified sup-norm tests `||nθ|| <= δ`.
//! - [`theta`]: the symbolic θ input language.
//! - [`primes`]: the Gaussian prime sieve and `S(x)`.
//! - [`hurwitz`]: Hurwitz continued fractions and their convergents.
//! - [`vaaler`]: the sawtooth and its trigonometric approximation.
//! - [`expsums`]: lattice exponential sums, counting functions and bound reports.
//! - [`harness`]: the equidistribution experiment, sieve hypotheses and sweeps.
//! - [`output`]: CSV and JSON-lines tables with a run manifest.

pub mod error;
pub mod expsums;
pub mod gaussian;
pub mod harness;
pub mod hp;
pub mod hurwitz;
pub mod output;
pub mod primes;
pub mod probe;
pub mod theta;
pub mod vaaler;

pub use error::{Error, Result};
pub use gaussian::GaussianInt;
pub use hp::{HpComplex, HpReal};
pub use theta::Theta;
