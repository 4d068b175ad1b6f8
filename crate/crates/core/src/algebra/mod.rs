//! Arithmetic in F_p and F_p[X], and dense linear algebra over F_p.

mod field;
mod matrix;
mod poly;

pub use field::{is_prime, PrimeField, MAX_MODULUS};
pub use matrix::{FpMatrix, SolutionSet};
pub use poly::{parse_poly, Degree, Poly};
