//! Exact computation of the Lefschetz defect of complex abelian varieties.
//!
//! An explicit torus is a lattice `Z^2n` with a complex structure over a real
//! number field. [`cohomology::defect_of_class`] gives the defect of a single
//! divisor class, [`effectivity::torus_defect`] searches effective classes for
//! the global defect, and [`classifier::classify`] computes the same number
//! from an isogeny decomposition.

pub mod checks;
pub mod classifier;
pub mod cohomology;
pub mod document;
pub mod effectivity;
mod error;
pub mod exactmath;
pub mod torus;

pub use error::{Error, Result};
