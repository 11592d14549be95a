//! `F_p`, `F_{p^2}` and polynomials over `F_p`.

mod fp;
mod fp2;
mod poly;
mod roots;

pub use fp::{canonical_nonresidue, FpElement, MAX_MODULUS};
pub use fp2::{frobenius, lambda_to_j, Fp2Element, Fp2Field};
pub use poly::{hasse_poly, FpPoly};
pub use roots::{roots_in_fp2, roots_in_fp2_exhaustive};
