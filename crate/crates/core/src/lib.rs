//! Genus-zero Belyi maps of finite-index subgroups of the modular group.
//!
//! The pipeline runs from a permutation triple to a certified rational map:
//! [`triple`] derives the subgroup profile, [`ansatz`] sets up the polynomial
//! system, [`solve`] finds high-precision numerical solutions, [`lattice`]
//! recognizes them as algebraic numbers, [`exactnf`] certifies the result
//! exactly, and [`monodromy`] recovers the triple from the map.

pub mod perm;
pub mod triple;
pub mod ansatz;
pub mod numeric;
pub mod linalg;
pub mod roots;
pub mod solve;
pub mod lattice;
pub mod exactnf;
pub mod monodromy;
