//! Bunches of grapes: reductions to normal, rich and quasi-minimal form,
//! quasi-isometry decisions for their 2-braid groups, intersection complexes
//! and brute-force configuration spaces.

pub mod cube;
pub mod error;
pub mod grape;
pub mod intersection;
pub mod io;
pub mod qi;
pub mod reductions;

pub use error::{Error, Result};
pub use grape::{CanonicalForm, Classification, GrapeBunch, PathSubstem, Size, Stem, Twig};
