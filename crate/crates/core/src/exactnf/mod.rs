//! Exact arithmetic: polynomials over Z and Q, number fields, certification
//! of recognized Belyi maps and the descent check.

use thiserror::Error;

use crate::lattice::LatticeError;

pub mod certify;
pub mod descent;
pub mod field;
pub mod poly;

pub use certify::{certify_map, CertifiedBelyiMap, CertifyConfig, MapFactor, MapNormalization, Predicate};
pub use descent::{descent_check, moebius_coeff_action, DescentScalars, Moebius, SubfieldEmbedding};
pub use field::{root_in_field, FPoly, FieldElement, NumberField};
pub use poly::{poly_discriminant, resultant, ZPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("invalid number field: {0}")]
    BadField(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("expected {expected} coordinates, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("polynomial degree {poly} does not divide field degree {field}")]
    DegreeMismatch { poly: usize, field: usize },
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("precision {bits} bits insufficient: {spurious} lattice relations failed exact verification")]
    PrecisionInsufficient { bits: u32, spurious: usize },
    #[error("Möbius transform is degenerate")]
    DegenerateMoebius,
    #[error("coefficient {index} is a pole of the Möbius transform")]
    PoleHit { index: usize },
    #[error("no verified subfield embedding")]
    NotAnEmbedding,
    #[error("recognition of {symbol} failed at {bits} bits: {detail}")]
    Recognition { symbol: String, bits: u32, detail: String },
    #[error("exact verification failed: {}", .0.join(", "))]
    PredicateFailed(Vec<String>),
    #[error("certified map line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Defining polynomial of the degree-36 coefficient field, leading term first.
pub const F_L: [i64; 37] = [
    1, -15, 105, -452, 1321, -2696, 3634, -2077, -3717, 11765, -13336, -4257, 46791, -104102, 156805, -191498, 200457,
    -170957, 98979, -17978, -18499, -638, 28239, -22998, 15, 2577, 19524, -38036, 35169, -19422, 6174, -736, -40, -154,
    144, -48, 6,
];

/// Defining polynomial of its degree-12 subfield, leading term first.
pub const F_K: [i64; 13] = [1, -2, 9, -20, 38, -73, 101, -86, 55, -46, 42, -24, 6];

/// Ascending integer coefficients from a leading-term-first table.
pub fn ascending(coeffs: &[i64]) -> ZPoly {
    coeffs.iter().rev().map(|&c| rug::Integer::from(c)).collect()
}

/// `2^26·3^13·5^18·7^27`.
pub fn stated_discriminant() -> rug::Integer {
    use rug::ops::Pow;
    rug::Integer::from(2).pow(26u32)
        * rug::Integer::from(3).pow(13u32)
        * rug::Integer::from(5).pow(18u32)
        * rug::Integer::from(7).pow(27u32)
}
