//! Exact arithmetic kernel: scalars in Q(i, √2), sparse polynomials,
//! rational functions, truncated graded series and residues.

pub mod poly;
pub mod ratfn;
pub mod residue;
pub mod scalar;
pub mod series;

pub use poly::{MultiPoly, Var};
pub use ratfn::RationalFn;
pub use scalar::Scalar;
pub use series::{laurent, GradedSeries, Ring};

use num_rational::Rational64;

/// Exponent unit of Λ-graded series.
pub fn lambda_unit() -> Rational64 {
    Rational64::new(1, 12)
}

/// Integer exponent unit for t, ε, v and local parameters.
pub fn int_unit() -> Rational64 {
    Rational64::from_integer(1)
}

/// Number of Λ-units in one power of Λ.
pub const LU: i64 = 12;
