//! Non-abelian cohomology with crossed-group coefficients on finite sites.
//!
//! The crate computes H⁰, H¹ and H² for sheaves of (crossed) groups over the
//! poset-of-opens site of a finite topological space: torsors and their
//! classification, contracted products, descent-data 2-cocycles, both
//! coboundary maps, the six-term and H²-level exactness checks, and the
//! comparison oracles (abelian Čech cohomology, the inner-automorphism
//! correspondence).  Everything is table-driven and exhaustively verifiable.

pub mod action;
pub mod cohomology;
pub mod compare;
pub mod crossed;
pub mod error;
pub mod fixtures;
pub mod group;
pub mod presheaf;
pub mod site;

pub use error::{Budget, Error, Result};
