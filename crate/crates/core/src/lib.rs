//! Exact computations on the superspecial locus and its arithmetic
//! counterpart.
//!
//! * [`exactnum`]: rationals, Bernoulli numbers, `ζ(1 - 2k)`.
//! * [`ffield`]: `F_p`, `F_{p^2}`, polynomials and root finding.
//! * [`sslocus`]: the genus-one census `(H, F, T)` with the Frobenius involution.
//! * [`massform`]: masses, `|GSp_{2g}(Z/N)|` and level-`N` class numbers.
//! * [`cosettrace`]: a finite-group model of the trace formula.
//! * [`verify`]: the full battery of identity checks.

pub mod arith;
pub mod cosettrace;
pub mod error;
pub mod exactnum;
pub mod ffield;
pub mod massform;
pub mod sslocus;
pub mod verify;

pub use error::{Error, Result};
pub use exactnum::BigRational;
