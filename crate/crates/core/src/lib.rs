//! Numerical exterior calculus for Chern–Weil theory on manifolds with
//! boundary: Pfaffian and transgression forms built from explicit
//! connections, the mapping-cone pair complex with its Lefschetz pairings,
//! Thom maps on disk and sphere bundles, and exact discrete cohomology.

pub mod bundles;
pub mod chern_weil;
pub mod discrete;
pub mod error;
pub mod forms;
pub mod geometry;
pub mod jet;
pub mod random;
pub mod relative;
pub mod thom;
pub mod tolerances;

pub use error::{Error, Result};
