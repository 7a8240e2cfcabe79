//! Exact finite models of sheaf and kernel calculus on finite groupoids,
//! together with quantale-enriched presheaves and the enhancement construction.
//!
//! Everything is computed with exact arithmetic. Level-1/2 data (equivariant
//! vector bundles) lives over the rationals; level-0 data and enrichment bases
//! use any [`coeff::CoeffSystem`].

pub mod coeff;
pub mod corpus;
pub mod enhance;
pub mod enriched;
pub mod error;
pub mod frobenius;
pub mod groupoid;
pub mod kernelcalc;
pub mod sheafcalc;

pub use error::{Error, Result};
