//! Exact computations with piecewise polynomial functions on fans and
//! polyhedral complexes, their special-fiber complexes, limit towers of
//! currents over refinements, and arithmetic Chow classes of toric models.

pub mod arithchow;
pub mod checks;
pub mod error;
pub mod fixtures;
pub mod limits;
pub mod polyhedra;
pub mod polyring;
pub mod ppfan;
pub mod qlinalg;
pub mod specialfiber;

pub use error::{Error, Result};
